// Carnot-Caratheodory distance from the origin on H^n.
//
// Geodesics from the identity are horizontal lifts of planar circular arcs.
// For |z| > 0 the arc angle theta in (0, pi) solves
//     mu(theta) = (theta - sin theta cos theta) / sin^2 theta = 4|u| / |z|^2
// (mu is strictly increasing, mu(0+) = 0, mu(pi-) = +inf), and the distance
// is theta |z| / sin theta.  On the center axis (z = 0) the arcs close up
// and the isoperimetric relation gives 2 sqrt(pi |u|).

#pragma once

#include "subfrac/hgroup.hpp"

namespace subfrac {

struct CcOptions {
    double tol = 1e-13;     // bisection width target on theta
    int max_iter = 200;
};

// Distance of x from the group identity (a homogeneous norm).
double cc_norm(const GroupConfig& g, const Point& x,
               const CcOptions& opt = CcOptions{});

// Ratio bounds of the Koranyi gauge against the cc norm, scanned over a
// direction grid: returns {min_ratio, max_ratio} of gauge/cc.
struct RatioBounds {
    double lo = 0.0, hi = 0.0;
};
RatioBounds gauge_cc_ratio_bounds(const GroupConfig& g, int samples = 2000);

}  // namespace subfrac
