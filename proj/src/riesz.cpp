#include "subfrac/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "subfrac/ccnorm.hpp"
#include "subfrac/quadrature.hpp"
#include "subfrac/rng.hpp"

namespace subfrac {

// ---------------------------------------------------------------------------
// Euler gamma: Lanczos approximation (g = 7, 9 coefficients), reflection
// formula for z < 1/2.  Relative accuracy ~1e-14 on the range used here.

double gamma_fn(double z) {
    if (z <= 0.0 && z == std::floor(z))
        throw std::domain_error("gamma_fn: pole at nonpositive integer");
    if (z < 0.5) {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return M_PI / (std::sin(M_PI * z) * gamma_fn(1.0 - z));
    }
    static const double c[9] = {
        0.99999999999980993,      676.5203681218851,   -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,  12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    const double zz = z - 1.0;
    double a = c[0];
    for (int i = 1; i < 9; ++i) a += c[i] / (zz + i);
    const double t = zz + 7.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, zz + 0.5) * std::exp(-t) * a;
}

bool palpha_pole(double alpha) {
    return alpha <= 0.0 && std::rint(alpha / 2.0) == alpha / 2.0;
}

// ---------------------------------------------------------------------------
// Radial profile I(alpha, x).

namespace {

void require_profile_args(const GroupConfig& g, double alpha, const Point& x,
                          const char* who) {
    check_point(g, x, who);
    if (!(alpha < g.homogeneous_dim()))
        throw std::invalid_argument(std::string(who) + ": requires alpha < Q");
    if (euclid_norm(x) == 0.0)
        throw std::invalid_argument(std::string(who) + ": x must be nonzero");
}

}  // namespace

double alpha_profile(const GroupConfig& g, double alpha, const Point& x,
                     const RadialOptions& opt) {
    require_profile_args(g, alpha, x, "alpha_profile");
    const double Q = g.homogeneous_dim();
    const double R = koranyi_norm(g, x);
    const double r1 = 1.0 / R;

    auto hk_at = [&](double r) { return hk_eval(g, 1.0, dilate(g, r, x), opt.hk); };
    auto f = [&](double r) { return std::pow(r, Q - alpha - 1.0) * hk_at(r); };

    // Origin piece: dyadic march down from r1, then close the remaining
    // [0, b] with the even expansion h(1, delta_r x) = A + B r^2 + C r^4.
    double origin = 0.0;
    double b = r1;
    for (int level = 0; level < 40; ++level) {
        const double panel = gauss_panel(f, 0.5 * b, b, opt.nodes);
        origin += panel;
        b *= 0.5;
        if (level >= 2 && std::abs(panel) <= opt.eps_rel * std::abs(origin))
            break;
    }
    {
        const double h0 = hk_at(b), h1 = hk_at(0.5 * b), h2 = hk_at(0.25 * b);
        const double b2 = b * b;
        // Solve A + B s + C s^2 = h at s = b^2, b^2/4, b^2/16.
        const double s0 = b2, s1 = 0.25 * b2, s2 = 0.0625 * b2;
        const double d01 = (h0 - h1) / (s0 - s1), d12 = (h1 - h2) / (s1 - s2);
        const double C = (d01 - d12) / (s0 - s2);
        const double B = d01 - C * (s0 + s1);
        const double A = h0 - B * s0 - C * s0 * s0;
        origin += A * std::pow(b, Q - alpha) / (Q - alpha) +
                  B * std::pow(b, Q - alpha + 2.0) / (Q - alpha + 2.0) +
                  C * std::pow(b, Q - alpha + 4.0) / (Q - alpha + 4.0);
    }

    bool ok = false;
    const double tail = integrate_tail(f, r1, 0.5 * r1, 1.0, opt.eps_rel,
                                       opt.nodes, opt.max_panels, &ok);
    if (!ok) throw std::runtime_error("alpha_profile: radial tail did not settle");
    return 2.0 * (origin + tail);
}

double alpha_profile_direct(const GroupConfig& g, double alpha, const Point& x,
                            const RadialOptions& opt) {
    require_profile_args(g, alpha, x, "alpha_profile_direct");
    const double Q = g.homogeneous_dim();

    auto f = [&](double t) {
        return std::pow(t, 0.5 * alpha - 1.0) * hk_eval(g, t, x, opt.hk);
    };

    // Body: dyadic march from T down to 0 (h vanishes to all orders there).
    const double T = 300.0;
    bool ok = false;
    const double body = integrate_to_zero(f, T, opt.eps_rel, opt.nodes, 60, &ok);
    if (!ok)
        throw std::runtime_error("alpha_profile_direct: body did not settle");

    // Tail t > T: h(t,x) = t^{-Q/2} (A + B/t + C/t^2 + O(t^-3)); fit at
    // T, 2T, 4T and integrate the powers analytically (valid: alpha < Q).
    const double g0 = hk_eval(g, T, x, opt.hk) * std::pow(T, 0.5 * Q);
    const double g1 = hk_eval(g, 2.0 * T, x, opt.hk) * std::pow(2.0 * T, 0.5 * Q);
    const double g2 = hk_eval(g, 4.0 * T, x, opt.hk) * std::pow(4.0 * T, 0.5 * Q);
    const double s0 = 1.0 / T, s1 = 0.5 / T, s2 = 0.25 / T;
    const double d01 = (g0 - g1) / (s0 - s1), d12 = (g1 - g2) / (s1 - s2);
    const double C = (d01 - d12) / (s0 - s2);
    const double B = d01 - C * (s0 + s1);
    const double A = g0 - B * s0 - C * s0 * s0;
    const double e0 = 0.5 * (alpha - Q);  // exponent of t^{e0-1} leading tail
    const double tail = A * std::pow(T, e0) / (-e0) +
                        B * std::pow(T, e0 - 1.0) / (1.0 - e0) +
                        C * std::pow(T, e0 - 2.0) / (2.0 - e0);
    return body + tail;
}

double alpha_norm(const GroupConfig& g, double alpha, const Point& x,
                  const RadialOptions& opt) {
    const double Q = g.homogeneous_dim();
    return std::pow(alpha_profile(g, alpha, x, opt), 1.0 / (alpha - Q));
}

double p_alpha(const GroupConfig& g, double alpha, const Point& x,
               const RadialOptions& opt) {
    if (palpha_pole(alpha))
        throw std::domain_error("p_alpha: alpha is a pole of 1/Gamma(alpha/2)");
    return alpha_profile(g, alpha, x, opt) / gamma_fn(0.5 * alpha);
}

// ---------------------------------------------------------------------------
// Unit-gauge-sphere table (n = 1).

PAlphaSphere::PAlphaSphere(const GroupConfig& g, double alpha, int npts,
                           const RadialOptions& opt)
    : alpha_(alpha), qexp_(alpha - g.homogeneous_dim()) {
    if (npts < 8) throw std::invalid_argument("PAlphaSphere: npts too small");
    vals_.resize(static_cast<std::size_t>(npts));
    for (int i = 0; i < npts; ++i) {
        const double beta = -0.5 * M_PI + M_PI * i / (npts - 1);
        const double cb = std::max(0.0, std::cos(beta));
        // P_alpha is invariant under horizontal rotations (automorphisms),
        // so one representative per (gauge, beta) orbit suffices.
        Point sigma(static_cast<std::size_t>(g.dim()));
        sigma[0] = std::sqrt(cb);
        sigma[static_cast<std::size_t>(2 * g.n)] = std::sin(beta);
        vals_[static_cast<std::size_t>(i)] = p_alpha(g, alpha, sigma, opt);
    }
}

std::shared_ptr<const PAlphaSphere> palpha_sphere_shared(
    const GroupConfig& g, double alpha, int npts, const RadialOptions& opt) {
    using Key = std::tuple<int, double, int>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const PAlphaSphere>> cache;
    const Key key{g.n, alpha, npts};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto table = std::make_shared<const PAlphaSphere>(g, alpha, npts, opt);
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.emplace(key, std::move(table));
    (void)inserted;
    return it->second;
}

double PAlphaSphere::at_beta(double beta) const {
    const int npts = static_cast<int>(vals_.size());
    const double h = M_PI / (npts - 1);
    double s = (beta + 0.5 * M_PI) / h;
    s = std::min(std::max(s, 0.0), static_cast<double>(npts - 1));
    // 4-point cubic (Lagrange) stencil, clamped at the ends.
    int i1 = static_cast<int>(std::floor(s));
    i1 = std::min(std::max(i1, 1), npts - 3);
    const double u = s - i1;
    const double ym = vals_[static_cast<std::size_t>(i1 - 1)];
    const double y0 = vals_[static_cast<std::size_t>(i1)];
    const double y1 = vals_[static_cast<std::size_t>(i1 + 1)];
    const double y2 = vals_[static_cast<std::size_t>(i1 + 2)];
    const double a0 = y0;
    const double a1 = 0.5 * (y1 - ym);
    const double a2 = ym - 2.5 * y0 + 2.0 * y1 - 0.5 * y2;
    const double a3 = 0.5 * (y2 - ym) + 1.5 * (y0 - y1);
    return a0 + u * (a1 + u * (a2 + u * a3));
}

double PAlphaSphere::eval(const GroupConfig& g, const Point& x) const {
    const double R = koranyi_norm(g, x);
    if (R == 0.0)
        throw std::invalid_argument("PAlphaSphere::eval: x must be nonzero");
    const double su = std::min(std::max(x.u() / (R * R), -1.0), 1.0);
    return std::pow(R, qexp_) * at_beta(std::asin(su));
}

// ---------------------------------------------------------------------------
// Spectral functions: quadrature backends (n = 1 grid).

SpectralResult sigma_quad(const GroupConfig& g, double alpha,
                          const GaugePolarGrid& grid) {
    if (!(alpha < g.homogeneous_dim()))
        throw std::invalid_argument("sigma_quad: requires alpha < Q");
    const double v = grid.integrate([&](const GridNode& nd) {
        return std::pow(nd.rho * grid.cc_unit(nd.ibeta), -alpha);
    });
    return {2.0 * v, 0.0, "quadrature"};
}

SpectralResult d_alpha_quad(const GroupConfig& g, double alpha, int i,
                            const GaugePolarGrid& grid) {
    if (!(alpha < g.homogeneous_dim()))
        throw std::invalid_argument("d_alpha_quad: requires alpha < Q");
    if (i < 0 || i >= 2 * g.n)
        throw std::invalid_argument("d_alpha_quad: horizontal index required");
    const double v = grid.integrate([&](const GridNode& nd) {
        const double yi = (i == 0) ? nd.y1 : nd.y2;
        return yi * yi * std::pow(nd.rho * grid.cc_unit(nd.ibeta), -alpha - 2.0);
    });
    return {2.0 * v, 0.0, "quadrature"};
}

SpectralResult boundary_moment_quad(const GroupConfig& g,
                                    const std::vector<int>& gamma, double alpha,
                                    const GaugePolarGrid& grid) {
    if (gamma.size() != static_cast<std::size_t>(g.dim()))
        throw std::invalid_argument("boundary_moment_quad: gamma size");
    for (int e : gamma)
        if (e < 0) throw std::invalid_argument("boundary_moment_quad: negative exponent");
    for (int e : gamma)
        if (e % 2 != 0) return {0.0, 0.0, "symmetry"};
    if (!(alpha < g.homogeneous_dim()))
        throw std::invalid_argument("boundary_moment_quad: requires alpha < Q");
    const double w = monomial_weight(g, gamma);
    const double v = grid.integrate([&](const GridNode& nd) {
        double m = 1.0;
        for (int e = 0; e < gamma[0]; ++e) m *= nd.y1;
        for (int e = 0; e < gamma[1]; ++e) m *= nd.y2;
        for (int e = 0; e < gamma[2]; ++e) m *= nd.u;
        return m * std::pow(nd.rho * grid.cc_unit(nd.ibeta), -alpha - w);
    });
    return {2.0 * v, 0.0, "quadrature"};
}

// ---------------------------------------------------------------------------
// Spectral functions: Monte Carlo backends over a cached cloud.

std::shared_ptr<const std::vector<double>> cloud_cc_norms(
    const GroupConfig& g, const std::vector<Point>& cloud) {
    if (cloud.empty())
        throw std::invalid_argument("cloud_cc_norms: empty cloud");
    using Key = std::tuple<const void*, std::size_t, double, double>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const std::vector<double>>> cache;
    const Key key{cloud.data(), cloud.size(), cloud.front()[0],
                  cloud.back()[2 * g.n]};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto norms = std::make_shared<std::vector<double>>(cloud.size());
    for (std::size_t k = 0; k < cloud.size(); ++k)
        (*norms)[k] = cc_norm(g, cloud[k]);
    std::lock_guard<std::mutex> lock(mu);
    cache[key] = norms;
    return norms;
}

namespace {

// Mean and standard error of term(k) over the cloud, fixed reduction order.
template <typename Term>
SpectralResult mc_mean(std::size_t count, Term&& term) {
    std::vector<double> vals(count), sq(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double v = term(k);
        vals[k] = v;
        sq[k] = v * v;
    }
    const double N = static_cast<double>(count);
    const double mean = pairwise_sum(vals) / N;
    const double m2 = pairwise_sum(sq) / N;
    const double var = std::max(0.0, m2 - mean * mean);
    return {mean, std::sqrt(var / N), "mc"};
}

}  // namespace

SpectralResult sigma_mc(const GroupConfig& g, double alpha,
                        const std::vector<Point>& cloud) {
    if (!(alpha < g.homogeneous_dim()))
        throw std::invalid_argument("sigma_mc: requires alpha < Q");
    auto cc = cloud_cc_norms(g, cloud);
    SpectralResult r = mc_mean(cloud.size(), [&](std::size_t k) {
        return std::pow((*cc)[k], -alpha);
    });
    r.value *= 2.0;
    r.std_error *= 2.0;
    return r;
}

SpectralResult d_alpha_mc(const GroupConfig& g, double alpha, int i,
                          const std::vector<Point>& cloud) {
    if (!(alpha < g.homogeneous_dim()))
        throw std::invalid_argument("d_alpha_mc: requires alpha < Q");
    if (i < 0 || i >= 2 * g.n)
        throw std::invalid_argument("d_alpha_mc: horizontal index required");
    auto cc = cloud_cc_norms(g, cloud);
    SpectralResult r = mc_mean(cloud.size(), [&](std::size_t k) {
        const double yi = cloud[k][static_cast<std::size_t>(i)];
        return yi * yi * std::pow((*cc)[k], -alpha - 2.0);
    });
    r.value *= 2.0;
    r.std_error *= 2.0;
    return r;
}

SpectralResult boundary_moment_mc(const GroupConfig& g,
                                  const std::vector<int>& gamma, double alpha,
                                  const std::vector<Point>& cloud) {
    if (gamma.size() != static_cast<std::size_t>(g.dim()))
        throw std::invalid_argument("boundary_moment_mc: gamma size");
    for (int e : gamma)
        if (e < 0) throw std::invalid_argument("boundary_moment_mc: negative exponent");
    for (int e : gamma)
        if (e % 2 != 0) return {0.0, 0.0, "symmetry"};
    if (!(alpha < g.homogeneous_dim()))
        throw std::invalid_argument("boundary_moment_mc: requires alpha < Q");
    auto cc = cloud_cc_norms(g, cloud);
    const double w = monomial_weight(g, gamma);
    SpectralResult r = mc_mean(cloud.size(), [&](std::size_t k) {
        return eval_monomial(cloud[k], gamma) *
               std::pow((*cc)[k], -alpha - w);
    });
    r.value *= 2.0;
    r.std_error *= 2.0;
    return r;
}

// ---------------------------------------------------------------------------
// Convolution identity, n = 1.
//
// After y = x v the right-hand side is  rhs = int P_a(x v) P_b(v) dv  with
// integrable singularities at v = 0 (strength b - Q) and v = x^{-1}
// (strength a - Q).  The proposal is an equal mixture of two gauge-polar
// densities centered at those points; inside radius R0 the radial density
// matches the local singularity exactly, outside it is Pareto with
// exponent kappa = Q - (a + b), which keeps the weight variance finite
// for a + b < Q.

namespace {

struct PolarProposal {
    double expo;   // inner radial exponent: density ~ rho^{expo-1} on (0, R0]
    double r0;
    double kappa;  // tail: density ~ rho^{-1-kappa} on (R0, inf)
    double p_in;   // mass assigned to the inner piece

    double sample_rho(double u01, bool* inner) const {
        if (u01 < p_in) {
            *inner = true;
            const double v = u01 / p_in;
            return r0 * std::pow(v, 1.0 / expo);
        }
        *inner = false;
        const double v = (u01 - p_in) / (1.0 - p_in);
        return r0 * std::pow(1.0 - v, -1.0 / kappa);
    }

    double rho_density(double rho) const {
        if (rho <= 0.0) return 0.0;
        if (rho <= r0)
            return p_in * expo * std::pow(rho / r0, expo - 1.0) / r0;
        return (1.0 - p_in) * kappa * std::pow(r0, kappa) *
               std::pow(rho, -1.0 - kappa);
    }
};

// Density (w.r.t. Lebesgue measure dv) of v = c * delta_rho sigma(beta,theta)
// with rho ~ prop, beta ~ U(-pi/2, pi/2), theta ~ U(0, 2pi).  Beta is kept
// uniform (not cos-weighted) so the proposal stays bounded away from zero
// on the center axis, where the integrand does not vanish.  In gauge-polar
// coordinates dv = rho^{Q-1} drho dbeta dtheta, so
//   q(v) = f_rho(rho) / (2 pi^2 rho^{Q-1}).
double proposal_density(const GroupConfig& g, const PolarProposal& prop,
                        const Point& center_inv_times_v) {
    const Point& w = center_inv_times_v;
    const double rho = koranyi_norm(g, w);
    if (rho == 0.0) return 0.0;
    return prop.rho_density(rho) / (2.0 * M_PI * M_PI * rho * rho * rho);
}

}  // namespace

ConvResult convolution_check(const GroupConfig& g, double a, double b,
                             const Point& x, const ConvOptions& opt) {
    if (g.n != 1)
        throw std::invalid_argument("convolution_check: n = 1 only");
    const double Q = g.homogeneous_dim();
    if (!(a > 0.0) || !(b > 0.0) || !(a + b < Q))
        throw std::invalid_argument(
            "convolution_check: need a, b > 0 and a + b < Q");
    check_point(g, x, "convolution_check");
    if (euclid_norm(x) == 0.0)
        throw std::invalid_argument("convolution_check: x must be nonzero");

    ConvResult out;
    out.lhs = p_alpha(g, a + b, x, opt.radial);

    const PAlphaSphere sa(g, a, opt.sphere_pts, opt.radial);
    const PAlphaSphere* sb = &sa;
    PAlphaSphere sb_store = sa;
    if (b != a) {
        sb_store = PAlphaSphere(g, b, opt.sphere_pts, opt.radial);
        sb = &sb_store;
    }

    const Point xinv = group_inv(g, x);
    const double r0 = 0.5 * koranyi_norm(g, x);
    const double kappa = Q - (a + b);
    const PolarProposal prop0{b, r0, kappa, 0.6};   // center 0, matches P_b
    const PolarProposal propx{a, r0, kappa, 0.6};   // center x^{-1}, matches P_a

    Philox rng(opt.seed, (1ull << 48));
    std::vector<double> vals(static_cast<std::size_t>(opt.samples));
    std::vector<double> sq(static_cast<std::size_t>(opt.samples));
    Point v(3), w(3), sigma(3);
    for (std::int64_t k = 0; k < opt.samples; ++k) {
        const bool use0 = rng.next_unit() < 0.5;
        const PolarProposal& prop = use0 ? prop0 : propx;
        bool inner = false;
        const double rho = prop.sample_rho(rng.next_unit(), &inner);
        const double beta = (rng.next_unit() - 0.5) * M_PI;
        const double cbta = std::max(0.0, std::cos(beta));
        const double theta = 2.0 * M_PI * rng.next_unit();
        sigma[0] = std::sqrt(cbta) * std::cos(theta);
        sigma[1] = std::sqrt(cbta) * std::sin(theta);
        sigma[2] = std::sin(beta);
        const Point dil = dilate(g, rho, sigma);
        if (use0)
            v = dil;
        else
            v = group_mul(g, xinv, dil);

        // mixture density at v: 0-centered piece sees w = v, the
        // x^{-1}-centered piece sees w = x * v.
        w = group_mul(g, x, v);
        const double q =
            0.5 * proposal_density(g, prop0, v) +
            0.5 * proposal_density(g, propx, w);
        double f = 0.0;
        if (q > 0.0 && koranyi_norm(g, v) > 0.0 && koranyi_norm(g, w) > 0.0) {
            const double pb = sb->eval(g, v);
            const double pa = sa.eval(g, w);
            f = pa * pb / q;
        }
        vals[static_cast<std::size_t>(k)] = f;
        sq[static_cast<std::size_t>(k)] = f * f;
    }
    const double N = static_cast<double>(opt.samples);
    out.rhs = pairwise_sum(vals) / N;
    const double m2 = pairwise_sum(sq) / N;
    out.rhs_err = std::sqrt(std::max(0.0, m2 - out.rhs * out.rhs) / N);
    out.rel_gap = std::abs(out.lhs - out.rhs) / std::abs(out.lhs);
    return out;
}

}  // namespace subfrac
