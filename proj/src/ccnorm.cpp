#include "subfrac/ccnorm.hpp"

#include <cmath>
#include <stdexcept>

namespace subfrac {

namespace {

// mu(theta) = (theta - sin theta cos theta) / sin^2 theta on (0, pi),
// strictly increasing from 0 to +inf; series-stable near 0.
inline double mu_of_theta(double th) {
    if (th < 1e-3) {
        const double t2 = th * th;
        return (2.0 / 3.0) * th * (1.0 + 2.0 * t2 / 15.0 + 2.0 * t2 * t2 / 105.0);
    }
    const double s = std::sin(th);
    return (th - s * std::cos(th)) / (s * s);
}

}  // namespace

double cc_norm(const GroupConfig& g, const Point& x, const CcOptions& opt) {
    check_point(g, x, "cc_norm");
    const double zs = horizontal_norm_sq(g, x);
    const double au = std::abs(x[2 * g.n]);
    if (au == 0.0) return std::sqrt(zs);
    if (zs == 0.0) return 2.0 * std::sqrt(M_PI * au);

    const double target = 4.0 * au / zs;
    if (target > 1e10) {
        // theta -> pi asymptotics: eps = pi - theta with
        // eps = sqrt(pi/m) (1 + pi/(6m)), cc = |z| (pi/eps)(1 - eps/pi)(1 + eps^2/6)
        const double eps =
            std::sqrt(M_PI / target) * (1.0 + M_PI / (6.0 * target));
        return std::sqrt(zs) * (M_PI / eps) * (1.0 - eps / M_PI) *
               (1.0 + eps * eps / 6.0);
    }

    double lo = 0.0, hi = M_PI - 1e-9;
    if (mu_of_theta(hi) < target)
        throw std::runtime_error("cc_norm: bracket failure near theta = pi");
    for (int it = 0; it < opt.max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mu_of_theta(mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < opt.tol) break;
    }
    if (hi - lo > 64.0 * opt.tol)
        throw std::runtime_error("cc_norm: bisection failed to contract");
    const double th = 0.5 * (lo + hi);
    const double s = (th < 1e-8) ? th : std::sin(th);
    return th * std::sqrt(zs) / s;
}

RatioBounds gauge_cc_ratio_bounds(const GroupConfig& g, int samples) {
    RatioBounds rb;
    rb.lo = 1e300;
    rb.hi = 0.0;
    for (int k = 0; k <= samples; ++k) {
        const double beta = -0.5 * M_PI + M_PI * k / samples;
        const double cb = std::max(0.0, std::cos(beta));
        Point sigma(static_cast<std::size_t>(g.dim()));
        sigma[0] = std::sqrt(cb);
        sigma[2 * g.n] = std::sin(beta);
        // unit Koranyi gauge by construction; ratio = 1 / cc
        const double cc = cc_norm(g, sigma);
        const double ratio = 1.0 / cc;
        rb.lo = std::min(rb.lo, ratio);
        rb.hi = std::max(rb.hi, ratio);
    }
    return rb;
}

}  // namespace subfrac
