#pragma once

// Homogeneous alpha-norms, Riesz-type kernels P_alpha, the spectral
// functions sigma(alpha) and d(alpha), boundary moments in volume form,
// and the convolution identity P_{a+b} = P_a * P_b.
//
// Everything is built on the profile
//     I(alpha, x) = int_0^inf t^{alpha/2 - 1} h(t, x) dt
//                 = 2 int_0^inf r^{Q - alpha - 1} h(1, delta_r x) dr,
// (substitute r = 1/sqrt(t) and use the parabolic scaling of h), which
// converges for every alpha < Q and x != 0.  Then
//     ||x||_alpha = I(alpha, x)^{1/(alpha - Q)},
//     P_alpha(x)  = I(alpha, x) / Gamma(alpha/2)   (alpha not in {0,-2,-4,...}).
//
// Surface integrals over the Carnot-Caratheodory unit sphere are always
// evaluated in their equivalent volume form against h(1,.) dy; no sphere
// mesh is ever built.

#include <memory>
#include <string>
#include <vector>

#include "subfrac/heatkernel.hpp"
#include "subfrac/hgroup.hpp"

namespace subfrac {

// Euler gamma function (Lanczos approximation, reflection for z < 1/2).
// Throws std::domain_error at the poles z in {0, -1, -2, ...}.
double gamma_fn(double z);

// True when alpha sits on a pole of the 1/Gamma(alpha/2) prefactor,
// i.e. alpha in {0, -2, -4, ...} (exact test on the double).
bool palpha_pole(double alpha);

struct RadialOptions {
    HkOptions hk{};
    int nodes = 16;          // Gauss-Legendre order per radial panel
    double eps_rel = 1e-13;  // tail / origin stop threshold
    int max_panels = 8000;
};

// I(alpha, x) in the radial form above.  Requires alpha < Q, x != 0.
double alpha_profile(const GroupConfig& g, double alpha, const Point& x,
                     const RadialOptions& opt = {});

// Same profile by direct t-quadrature (change-of-variables audit).
double alpha_profile_direct(const GroupConfig& g, double alpha, const Point& x,
                            const RadialOptions& opt = {});

// ||x||_alpha = I(alpha,x)^{1/(alpha-Q)}; homogeneous of degree 1.
double alpha_norm(const GroupConfig& g, double alpha, const Point& x,
                  const RadialOptions& opt = {});

// P_alpha(x) = I(alpha,x)/Gamma(alpha/2); throws on prefactor poles and
// on alpha >= Q.
double p_alpha(const GroupConfig& g, double alpha, const Point& x,
               const RadialOptions& opt = {});

// ---------------------------------------------------------------------------
// Unit-gauge-sphere table of P_alpha for n = 1.
//
// P_alpha is homogeneous of degree alpha - Q and invariant under horizontal
// rotations, so on H^1 it is determined by its restriction to the gauge
// sphere, a smooth function of the latitude beta alone:
//     P_alpha(x) = R^{alpha-Q} P_alpha(sigma(beta)),  R = ||x||_K,
//     sigma(beta) = (sqrt(cos beta), 0, sin beta),  u = R^2 sin beta.
// The table samples beta uniformly and interpolates with a cubic stencil.

class PAlphaSphere {
  public:
    PAlphaSphere(const GroupConfig& g, double alpha, int npts = 257,
                 const RadialOptions& opt = {});

    double alpha() const { return alpha_; }
    // P_alpha(sigma(beta)), beta in [-pi/2, pi/2].
    double at_beta(double beta) const;
    // P_alpha(x) for any x != 0 via homogeneity.
    double eval(const GroupConfig& g, const Point& x) const;

  private:
    double alpha_;
    double qexp_;  // alpha - Q
    std::vector<double> vals_;
};

// Process-wide cache of sphere tables keyed by (n, alpha, npts); building one
// costs a few seconds, and the fractional-power routines reuse the same
// handful of alphas across many evaluation points.
std::shared_ptr<const PAlphaSphere> palpha_sphere_shared(
    const GroupConfig& g, double alpha, int npts = 257,
    const RadialOptions& opt = {});

// ---------------------------------------------------------------------------
// Spectral functions and boundary moments (volume form).
//
//   sigma(alpha)            = 2 E_{Y ~ h(1,.)} [ ||Y||_c^{-alpha} ]
//   d(alpha)                = 2 E [ y_i^2 ||Y||_c^{-alpha-2} ]     (any i <= 2n)
//   boundary_moment(gamma)  = 2 E [ Y^gamma ||Y||_c^{-alpha-w(gamma)} ]
//
// Each exposes a deterministic n=1 quadrature backend (gauge-polar grid)
// and a Monte Carlo backend over a cached diffusion cloud; both report the
// estimate with a standard error (0 for quadrature).

struct SpectralResult {
    double value = 0.0;
    double std_error = 0.0;
    std::string backend;  // "quadrature" or "mc"
};

SpectralResult sigma_quad(const GroupConfig& g, double alpha,
                          const GaugePolarGrid& grid);
SpectralResult d_alpha_quad(const GroupConfig& g, double alpha, int i,
                            const GaugePolarGrid& grid);
SpectralResult boundary_moment_quad(const GroupConfig& g,
                                    const std::vector<int>& gamma, double alpha,
                                    const GaugePolarGrid& grid);

// CC norms of a sample cloud, computed once and cached per cloud identity.
std::shared_ptr<const std::vector<double>> cloud_cc_norms(
    const GroupConfig& g, const std::vector<Point>& cloud);

SpectralResult sigma_mc(const GroupConfig& g, double alpha,
                        const std::vector<Point>& cloud);
SpectralResult d_alpha_mc(const GroupConfig& g, double alpha, int i,
                          const std::vector<Point>& cloud);
// Odd gamma returns exact 0 with backend "symmetry".
SpectralResult boundary_moment_mc(const GroupConfig& g,
                                  const std::vector<int>& gamma, double alpha,
                                  const std::vector<Point>& cloud);

// ---------------------------------------------------------------------------
// Convolution identity P_{a+b}(x) = (P_a * P_b)(x), n = 1 only.
//
// rhs = int P_a(x v) P_b(v) dv after the left translation y = x v (P_b is
// symmetric), importance-sampled from a two-center mixture matched to the
// singularities at v = 0 and v = x^{-1}.

struct ConvOptions {
    std::int64_t samples = 200000;
    std::uint64_t seed = 20260816;
    int sphere_pts = 257;    // P_alpha sphere-table resolution
    RadialOptions radial{};
};

struct ConvResult {
    double lhs = 0.0;      // P_{a+b}(x), radial quadrature
    double rhs = 0.0;      // MC estimate of the convolution
    double rhs_err = 0.0;  // standard error of rhs
    double rel_gap = 0.0;  // |lhs-rhs| / |lhs|
};

ConvResult convolution_check(const GroupConfig& g, double a, double b,
                             const Point& x, const ConvOptions& opt = {});

}  // namespace subfrac
