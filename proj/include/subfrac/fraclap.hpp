#pragma once

// The analytically continued map alpha -> psi(x, alpha) on (-inf, Q) and the
// fractional power L^s phi(x) = psi_phi(x, -2s).
//
// psi(x, alpha) = int_G (phi(x y) - T(y)) P_alpha(y) dy, where T is the
// group Taylor polynomial of phi at x of homogeneous degree 2m+1 on the
// strip alpha in (-2m-2, -2m), and T = 0 for alpha > 0.  Only the
// componentwise-even Taylor terms are ever subtracted: the odd ones
// integrate to zero against the symmetric kernel, and the symmetric
// direction grids used here cancel them exactly.
//
// Two independent routes are implemented:
//   spatial: the singular integral in gauge-polar form (deterministic, n=1),
//            with a far-field form for distant base points;
//   time:    the Balakrishnan form
//            Gamma(alpha/2) psi = int_0^1 t^{alpha/2-1} (F(t) - sum_p c_p t^p) dt
//                                 + sum_p c_p / (p + alpha/2)
//                                 + int_1^inf t^{alpha/2-1} F(t) dt,
//            F(t) = e^{-tL} phi(x), with c_p built from the same node set
//            as F so the subtraction cancels discretization error exactly.
//
// At the poles alpha = -2m the continued value is the pole formula
//   psi(x, -2m) = (-1)^m m! sum_{gamma even, w(gamma) = 2m} c_gamma mu_gamma,
// (c_gamma the group Taylor coefficients, mu_gamma the heat moments), which
// collapses to L^m phi(x) when the exact moments are inserted.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "subfrac/heatkernel.hpp"
#include "subfrac/hgroup.hpp"
#include "subfrac/riesz.hpp"
#include "subfrac/testfun.hpp"

namespace subfrac {

// ---------------------------------------------------------------------------
// Strip selection.

struct StripSelector {
    double alpha = 0.0;
    // Smallest m >= 0 with alpha > -2m-2; -1 when alpha > 0 (no subtraction).
    int m = -1;
    bool at_pole = false;    // alpha == -2*pole_index exactly
    int pole_index = 0;
    bool near_pole = false;  // within near_pole_eps of a pole but not on it

    static StripSelector select(double alpha, double Q,
                                double near_pole_eps = 1e-6);
};

struct PsiResult {
    double value = 0.0;
    double std_error = 0.0;  // 0 for deterministic routes
    std::string route;       // "spatial" | "time" | "pole"
    bool near_pole_correction = false;
    std::string provenance;
};

// ---------------------------------------------------------------------------
// Options.

struct PsiOptions {
    GaugeGridOptions grid{};       // direction set; volume grid for the time route
    RadialOptions radial{};        // P_alpha radial profile quadrature
    int sphere_pts = 257;          // P_alpha gauge-sphere table resolution
    double rho_switch = 0.03125;   // jet closure radius (spatial near form)
    double far_threshold = 6.0;    // ||x||_K beyond which the far form is used
    int far_box_panels = 3;        // far form: GL panels per axis on the w-box
    int far_box_nodes = 12;
    double near_pole_eps = 1e-6;   // near-pole dispatch width
    double pole_deriv_delta = 0.05;  // step for the near-pole first-order term
    double eps_rel = 1e-12;        // generic quadrature stop
    std::string moment_source = "measured";  // "measured" | "reference"
    SamplerSpec sampler{};         // diffusion cloud (time route for n >= 2)
};

// ---------------------------------------------------------------------------
// Routes.  All require alpha < Q and non-pole (pole/near-pole handling lives
// in frac_power / psi_eval dispatch).

// Deterministic spatial route, n = 1 only.
PsiResult psi_spatial(const GroupConfig& g, const TestFunction& phi,
                      const Point& x, double alpha, const PsiOptions& opt = {});

// Spatial route for a numeric field (no jets): valid on alpha in (-2, Q),
// where the subtraction needs only the field's value at x.  Used for nested
// operator evaluations.  n = 1 only.
PsiResult psi_spatial_field(const GroupConfig& g,
                            const std::function<double(const Point&)>& field,
                            const Point& x, double alpha,
                            const PsiOptions& opt = {});

// Balakrishnan time route: deterministic volume grid for n = 1, diffusion
// cloud (with symmetrization) for n >= 2.
PsiResult psi_time(const GroupConfig& g, const TestFunction& phi,
                   const Point& x, double alpha, const MomentTable& moments,
                   const PsiOptions& opt = {});

// Pole value psi(x, -2m).
double psi_pole(const GroupConfig& g, const TestFunction& phi, const Point& x,
                int m, const MomentTable& moments);

// Moment table per the options' moment_source ("measured": n=1 quadrature /
// n>=2 cloud; "reference": closed-form values, n = 1 only), cached.
std::shared_ptr<const MomentTable> psi_moment_table(const GroupConfig& g,
                                                    const PsiOptions& opt,
                                                    int max_weight = 12);

// Unified dispatch: pole / near-pole (pole formula plus first-order
// correction, flagged) / spatial (n = 1) / time (n >= 2); route may be
// forced with route in {"auto", "spatial", "time", "pole"}.
PsiResult psi_eval(const GroupConfig& g, const TestFunction& phi,
                   const Point& x, double alpha, const PsiOptions& opt = {},
                   const std::string& route = "auto");

// L^s phi(x) = psi(x, -2s); requires s > -Q/2.
PsiResult frac_power(const GroupConfig& g, const TestFunction& phi, double s,
                     const Point& x, const PsiOptions& opt = {});

// ---------------------------------------------------------------------------
// Verification helpers.

struct SemigroupResult {
    double lhs = 0.0;  // L^s (L^p phi) (x)
    double rhs = 0.0;  // L^{s+p} phi (x)
    double gap = 0.0;  // |lhs - rhs| / max(|rhs|, tiny)
    PsiResult lhs_detail, rhs_detail;
};

// Nested evaluation of L^s (L^p phi)(x).  n = 1; phi must be horizontally
// radial (the inner field is tabulated on (|z|, u)).  Outer s must satisfy
// s in (0,1) or be a small nonnegative integer (frame finite differences).
SemigroupResult semigroup_check(const GroupConfig& g, const TestFunctionPtr& phi,
                                double s, double p, const Point& x,
                                const PsiOptions& opt = {});

struct ContinuityResult {
    double extrapolated = 0.0;  // Richardson limit of psi across the pole
    double pole_value = 0.0;    // psi_pole(m)
    double gap = 0.0;           // |extrapolated - pole_value|
};

// Approach alpha -> -2m from both sides (delta and delta/2, Richardson in
// delta^2 of the symmetric average) and compare with the pole formula.
ContinuityResult strip_continuity_check(const GroupConfig& g,
                                        const TestFunctionPtr& phi,
                                        const Point& x, int m,
                                        const PsiOptions& opt = {});

// Moment-collapse diagnostics.  The coefficient of T^2 phi (m = 2) and of
// T^2 L phi (m = 3) in the pole formula are proportional to the moment
// combinations
//   C_T2  = mu(u^2) - (2n/4!) mu(y1^4),
//   C_T2L = (1/4) mu(y1^2 u^2) - ((5 + 3(n-1))/6!) mu(y1^6),
// which vanish for the exact heat moments; both are reported with
// propagated estimation errors.
struct CollapseResult {
    double t2_comb = 0.0;   // C_T2 evaluated on the table
    double t2_err = 0.0;
    double t2l_comb = 0.0;  // C_T2L evaluated on the table
    double t2l_err = 0.0;
};
CollapseResult moment_collapse(const GroupConfig& g, const MomentTable& mt);

}  // namespace subfrac
