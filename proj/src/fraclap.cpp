#include "subfrac/fraclap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "subfrac/jets.hpp"
#include "subfrac/quadrature.hpp"

namespace subfrac {

namespace {

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
    return h;
}

std::uint64_t fnv_mix(std::uint64_t h, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    return fnv_mix(h, bits);
}

double factorial(int m) {
    double f = 1.0;
    for (int k = 2; k <= m; ++k) f *= k;
    return f;
}

// ---------------------------------------------------------------------------
// Direction set: the (beta, theta) tensor directions of the gauge sphere,
// shared with the volume grid's angular layout.  The theta trapezoid is
// exact on trigonometric polynomials of degree < theta_nodes and the beta
// set is mirror-symmetric, so direction sums of componentwise-odd monomials
// vanish to roundoff -- the justification for subtracting only the even
// Taylor layers.

struct DirectionSet {
    std::vector<double> s1, s2, su;  // unit-gauge direction coordinates
    std::vector<double> w;           // beta weight * theta weight
    std::vector<int> ib;             // latitude index
    std::vector<double> betas;       // latitude angles
};

std::shared_ptr<const DirectionSet> direction_set(const GaugeGridOptions& opt) {
    static std::mutex mu;
    static std::map<std::uint64_t, std::shared_ptr<const DirectionSet>> cache;
    std::uint64_t key = 1469598103934665603ull;
    key = fnv_mix(key, static_cast<std::uint64_t>(opt.theta_nodes));
    key = fnv_mix(key, static_cast<std::uint64_t>(opt.beta_central_panels));
    key = fnv_mix(key, static_cast<std::uint64_t>(opt.beta_graded_panels));
    key = fnv_mix(key, static_cast<std::uint64_t>(opt.beta_nodes_per_panel));
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto ds = std::make_shared<DirectionSet>();
    const std::vector<BetaNode> bn = make_beta_nodes(opt);
    const int J = opt.theta_nodes;
    const double wt = 2.0 * M_PI / J;
    ds->betas.reserve(bn.size());
    for (const BetaNode& b : bn) ds->betas.push_back(b.beta);
    for (std::size_t i = 0; i < bn.size(); ++i) {
        const double cb = std::max(0.0, std::cos(bn[i].beta));
        const double r = std::sqrt(cb);
        const double su = std::sin(bn[i].beta);
        for (int j = 0; j < J; ++j) {
            const double th = wt * j;
            ds->s1.push_back(r * std::cos(th));
            ds->s2.push_back(r * std::sin(th));
            ds->su.push_back(su);
            ds->w.push_back(bn[i].weight * wt);
            ds->ib.push_back(static_cast<int>(i));
        }
    }
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.emplace(key, std::move(ds));
    (void)inserted;
    return it->second;
}

// Per-direction homogeneous-layer values s_w(sigma) = sum_{|gamma|_H = w}
// c_gamma sigma^gamma of a jet, split by componentwise parity.
struct LayerSums {
    int w_hi = 0;
    std::vector<double> even;  // dirs x (w_hi + 1), row-major by direction
    std::vector<double> odd;
};

LayerSums direction_layers(const Jet& jet, const DirectionSet& ds, int w_hi) {
    const MultiIndexSet& t = *jet.table;
    const int nranks = t.count_through_degree(jet.order);
    const std::size_t nd = ds.s1.size();
    LayerSums ls;
    ls.w_hi = w_hi;
    ls.even.assign(nd * static_cast<std::size_t>(w_hi + 1), 0.0);
    ls.odd.assign(nd * static_cast<std::size_t>(w_hi + 1), 0.0);
    struct Term {
        int e1, e2, eu, w;
        bool even;
        double c;
    };
    std::vector<Term> terms;
    terms.reserve(static_cast<std::size_t>(nranks));
    for (int r = 0; r < nranks; ++r) {
        const double c = jet.c[static_cast<std::size_t>(r)];
        if (c == 0.0) continue;
        const int w = t.hweight(r);
        if (w > w_hi) continue;
        const std::vector<int>& e = t.exponents(r);
        const bool even = (e[0] % 2 == 0) && (e[1] % 2 == 0) && (e[2] % 2 == 0);
        terms.push_back({e[0], e[1], e[2], w, even, c});
    }
    const int maxe = jet.order;
    std::vector<double> p1(static_cast<std::size_t>(maxe + 1));
    std::vector<double> p2(p1.size()), pu(p1.size());
    for (std::size_t d = 0; d < nd; ++d) {
        p1[0] = p2[0] = pu[0] = 1.0;
        for (int e = 1; e <= maxe; ++e) {
            p1[static_cast<std::size_t>(e)] = p1[static_cast<std::size_t>(e - 1)] * ds.s1[d];
            p2[static_cast<std::size_t>(e)] = p2[static_cast<std::size_t>(e - 1)] * ds.s2[d];
            pu[static_cast<std::size_t>(e)] = pu[static_cast<std::size_t>(e - 1)] * ds.su[d];
        }
        double* ev = &ls.even[d * static_cast<std::size_t>(w_hi + 1)];
        double* od = &ls.odd[d * static_cast<std::size_t>(w_hi + 1)];
        for (const Term& q : terms) {
            const double v = q.c * p1[static_cast<std::size_t>(q.e1)] *
                             p2[static_cast<std::size_t>(q.e2)] *
                             pu[static_cast<std::size_t>(q.eu)];
            (q.even ? ev : od)[q.w] += v;
        }
    }
    return ls;
}

// P_alpha(sigma) folded into the direction weights.
std::vector<double> weighted_directions(const DirectionSet& ds,
                                        const PAlphaSphere& tab) {
    std::vector<double> pb(ds.betas.size());
    for (std::size_t i = 0; i < ds.betas.size(); ++i)
        pb[i] = tab.at_beta(ds.betas[i]);
    std::vector<double> wp(ds.s1.size());
    for (std::size_t d = 0; d < wp.size(); ++d)
        wp[d] = ds.w[d] * pb[static_cast<std::size_t>(ds.ib[d])];
    return wp;
}

Point offset_point(const DirectionSet& ds, std::size_t d, double rho) {
    Point y(3);
    y[0] = rho * ds.s1[d];
    y[1] = rho * ds.s2[d];
    y[2] = rho * rho * ds.su[d];
    return y;
}

// ---------------------------------------------------------------------------
// Far-field form: for base points beyond the test function's reach the
// Taylor subtraction is numerically zero (the coefficients decay like the
// function), so psi reduces to the plain convolution over the support box.

PsiResult psi_far_box(const GroupConfig& g, const TestFunction& phi,
                      const Point& x, const PAlphaSphere& tab,
                      const PsiOptions& opt) {
    const double L = phi.support_radius();
    const GaussRule& gr = gauss_rule(opt.far_box_nodes);
    std::vector<double> q, qw;
    const double wpan = 2.0 * L / opt.far_box_panels;
    for (int p = 0; p < opt.far_box_panels; ++p) {
        const double a = -L + p * wpan;
        for (std::size_t k = 0; k < gr.nodes.size(); ++k) {
            q.push_back(a + 0.5 * wpan * (gr.nodes[k] + 1.0));
            qw.push_back(0.5 * wpan * gr.weights[k]);
        }
    }
    const Point xin = group_inv(g, x);
    const std::size_t n1 = q.size();
    std::vector<double> terms;
    terms.reserve(n1 * n1 * n1);
    Point wpt(3);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n1; ++j)
            for (std::size_t k = 0; k < n1; ++k) {
                wpt[0] = q[i];
                wpt[1] = q[j];
                wpt[2] = q[k];
                const double f = phi.value(g, wpt);
                if (f == 0.0) {
                    terms.push_back(0.0);
                    continue;
                }
                const Point y = group_mul(g, xin, wpt);
                if (koranyi_norm(g, y) < 1e-10) {
                    terms.push_back(0.0);
                    continue;
                }
                terms.push_back(qw[i] * qw[j] * qw[k] * f * tab.eval(g, y));
            }
    PsiResult out;
    out.value = pairwise_sum(terms);
    out.route = "spatial";
    out.std_error = 3e-6 * std::abs(out.value);
    std::ostringstream os;
    os << "far-field box form, half-width " << L
       << "; Taylor terms negligible at this range";
    out.provenance = os.str();
    return out;
}

// ---------------------------------------------------------------------------
// Moment-table helpers.

std::uint64_t grid_digest(const GaugeGridOptions& o) {
    std::uint64_t h = 1469598103934665603ull;
    h = fnv_mix(h, static_cast<std::uint64_t>(o.rho_nodes_per_panel));
    h = fnv_mix(h, static_cast<std::uint64_t>(o.theta_nodes));
    h = fnv_mix(h, static_cast<std::uint64_t>(o.beta_central_panels));
    h = fnv_mix(h, static_cast<std::uint64_t>(o.beta_graded_panels));
    h = fnv_mix(h, static_cast<std::uint64_t>(o.beta_nodes_per_panel));
    h = fnv_mix(h, o.rho_max);
    h = fnv_mix(h, static_cast<std::uint64_t>(o.rho_dyadic_levels));
    h = fnv_mix(h, o.rho_linear_width);
    return h;
}

std::uint64_t sampler_digest(const SamplerSpec& s) {
    std::uint64_t h = 1469598103934665603ull;
    h = fnv_mix(h, static_cast<std::uint64_t>(s.paths));
    h = fnv_mix(h, static_cast<std::uint64_t>(s.steps));
    h = fnv_mix(h, s.t);
    h = fnv_mix(h, s.seed);
    return h;
}

// Raw diffusion cloud shared across evaluations (n >= 2 time route).
std::shared_ptr<const std::vector<Point>> shared_cloud(const GroupConfig& g,
                                                       const SamplerSpec& spec) {
    static std::mutex mu;
    static std::map<std::uint64_t, std::shared_ptr<const std::vector<Point>>> cache;
    std::uint64_t key = fnv_mix(sampler_digest(spec), static_cast<std::uint64_t>(g.n));
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto cloud = std::make_shared<const std::vector<Point>>(sample_cloud(g, spec));
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.emplace(key, std::move(cloud));
    (void)inserted;
    return it->second;
}

std::vector<Point> symmetrized(const std::vector<Point>& cloud,
                               const GroupConfig& g) {
    std::vector<Point> out;
    out.reserve(2 * cloud.size());
    for (const Point& p : cloud) out.push_back(p);
    for (const Point& p : cloud) out.push_back(group_inv(g, p));
    return out;
}

MomentTable reference_moment_table(const GroupConfig& g, int max_weight) {
    if (g.n != 1)
        throw std::invalid_argument(
            "psi_moment_table: reference moments are tabulated for n = 1 only");
    if (max_weight > 6)
        throw std::invalid_argument(
            "psi_moment_table: reference moments stop at weight 6");
    MomentTable t;
    t.n = 1;
    t.max_weight = max_weight;
    t.source = "reference";
    auto put = [&](std::initializer_list<int> gm, double v) {
        t.mu[std::vector<int>(gm)] = v;
        t.err[std::vector<int>(gm)] = 0.0;
    };
    put({0, 0, 0}, 1.0);
    if (max_weight >= 2) {
        put({2, 0, 0}, 2.0);
        put({0, 2, 0}, 2.0);
    }
    if (max_weight >= 4) {
        put({4, 0, 0}, 12.0);
        put({0, 4, 0}, 12.0);
        put({2, 2, 0}, 4.0);
        put({0, 0, 2}, 1.0);
    }
    if (max_weight >= 6) {
        put({6, 0, 0}, 120.0);
        put({0, 6, 0}, 120.0);
        put({4, 2, 0}, 24.0);
        put({2, 4, 0}, 24.0);
        put({2, 0, 2}, 10.0 / 3.0);
        put({0, 2, 2}, 10.0 / 3.0);
    }
    return t;
}

// Heat-expansion coefficients c_p = sum_{w(gamma) = 2p} c_gamma mu_gamma of
// F(t) = e^{-tL} phi(x) = sum_p c_p t^p, using the SAME node set's moments
// as the F evaluations so the Balakrishnan subtraction cancels the
// discretization error exactly.
std::vector<double> heat_coeffs(const Jet& jet, const MomentTable& mt, int p_hi) {
    const MultiIndexSet& t = *jet.table;
    const int nranks = t.count_through_degree(jet.order);
    std::vector<double> c(static_cast<std::size_t>(p_hi + 1), 0.0);
    for (int r = 0; r < nranks; ++r) {
        const double cr = jet.c[static_cast<std::size_t>(r)];
        if (cr == 0.0) continue;
        const int w = t.hweight(r);
        if (w % 2 != 0 || w > 2 * p_hi) continue;
        const std::vector<int>& e = t.exponents(r);
        bool even = true;
        for (int ei : e)
            if (ei % 2 != 0) {
                even = false;
                break;
            }
        if (!even) continue;  // odd moments vanish on symmetric node sets
        c[static_cast<std::size_t>(w / 2)] += cr * mt.get(e);
    }
    return c;
}

// Shared Balakrishnan assembly: given F(t) and the coefficients c_p,
//   Gamma(alpha/2) psi = int_{tsw}^1 t^{alpha/2-1}(F - sum_{p<=m} c_p t^p) dt
//                        + sum_{p<=m} c_p/(p + alpha/2)
//                        + sum_{p=m+1}^{p_hi} c_p tsw^{p+alpha/2}/(p+alpha/2)
//                        + int_1^inf t^{alpha/2-1} F dt,
// the third line closing the [0, tsw] gap with the Taylor layers (avoiding
// the cancellation-noise blowup of marching t -> 0 under the subtraction).
double balakrishnan_value(double alpha, int m, int p_hi,
                          const std::vector<double>& c,
                          const std::function<double(double)>& F,
                          const PsiOptions& opt) {
    const double tsw = opt.rho_switch * opt.rho_switch;
    const int nodes = opt.radial.nodes;
    auto body_integrand = [&](double t) {
        double sub = 0.0;
        double tp = 1.0;
        for (int p = 0; p <= m; ++p) {
            sub += c[static_cast<std::size_t>(p)] * tp;
            tp *= t;
        }
        return std::pow(t, 0.5 * alpha - 1.0) * (F(t) - sub);
    };
    double body = 0.0;
    double top = 1.0;
    while (top > tsw * (1.0 + 1e-12)) {
        const double bot = std::max(0.5 * top, tsw);
        body += gauss_panel(body_integrand, bot, top, nodes);
        top = bot;
    }
    double poly = 0.0;
    for (int p = 0; p <= m; ++p)
        poly += c[static_cast<std::size_t>(p)] / (p + 0.5 * alpha);
    double closure = 0.0;
    for (int p = std::max(m + 1, 0); p <= p_hi; ++p)
        closure += c[static_cast<std::size_t>(p)] *
                   std::pow(tsw, p + 0.5 * alpha) / (p + 0.5 * alpha);
    // Tail in s = log t: int_1^inf t^{alpha/2-1} F dt = int_0^inf e^{s
    // alpha/2} F(e^s) ds; unit panels marched until negligible.
    bool conv = false;
    auto tail_integrand = [&](double s) {
        return std::exp(0.5 * alpha * s) * F(std::exp(s));
    };
    const double tail =
        integrate_tail(tail_integrand, 0.0, 1.0, 1.0, opt.eps_rel, nodes, 50, &conv);
    return (body + poly + closure + tail) / gamma_fn(0.5 * alpha);
}

// Mean of phi(x . delta_sqrt(t) Y) over a point set (pairwise-reduced).
double cloud_mean(const GroupConfig& g, const TestFunction& phi, const Point& x,
                  double t, const std::vector<Point>& pts) {
    const double rt = std::sqrt(t);
    std::vector<double> vals(pts.size());
    const int hd = g.hdim();
    Point y(static_cast<std::size_t>(g.dim()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (int j = 0; j < hd; ++j) y[static_cast<std::size_t>(j)] = rt * pts[i][static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(hd)] = t * pts[i][static_cast<std::size_t>(hd)];
        vals[i] = phi.value(g, group_mul(g, x, y));
    }
    return pairwise_sum(vals) / static_cast<double>(pts.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// Strip selection.

StripSelector StripSelector::select(double alpha, double Q, double near_pole_eps) {
    if (!(alpha < Q))
        throw std::invalid_argument("psi: alpha must be < Q");
    StripSelector s;
    s.alpha = alpha;
    if (alpha <= 0.0 && std::rint(0.5 * alpha) == 0.5 * alpha) {
        s.at_pole = true;
        s.pole_index = static_cast<int>(std::rint(-0.5 * alpha));
        s.m = s.pole_index;
        return s;
    }
    s.m = (alpha > 0.0) ? -1 : static_cast<int>(std::floor(-0.5 * alpha));
    const double l = std::rint(-0.5 * alpha);
    if (l >= 0.0 && std::abs(alpha + 2.0 * l) < near_pole_eps) {
        s.near_pole = true;
        s.pole_index = static_cast<int>(l);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Spatial route (n = 1).

PsiResult psi_spatial(const GroupConfig& g, const TestFunction& phi,
                      const Point& x, double alpha, const PsiOptions& opt) {
    if (g.n != 1)
        throw std::invalid_argument("psi_spatial: deterministic route is n = 1 only");
    check_point(g, x, "psi_spatial");
    const double Q = g.homogeneous_dim();
    const StripSelector sel = StripSelector::select(alpha, Q, 0.0);
    if (sel.at_pole)
        throw std::invalid_argument("psi_spatial: alpha is a pole; use psi_pole");
    auto tab = palpha_sphere_shared(g, alpha, opt.sphere_pts, opt.radial);

    const double R = koranyi_norm(g, x);
    const double far_at = std::max(opt.far_threshold, phi.support_radius() + 1.5);
    if (R >= far_at) return psi_far_box(g, phi, x, *tab, opt);

    const int m = sel.m;
    if (m > 8)
        throw std::invalid_argument("psi_spatial: alpha below -18 is not supported");
    const int w_hi = (m >= 0) ? 2 * m + 6 : 6;
    const Jet jet = ztaylor(g, phi, x, w_hi, true);
    auto ds = direction_set(opt.grid);
    const std::vector<double> wp = weighted_directions(*ds, *tab);
    const LayerSums ls = direction_layers(jet, *ds, w_hi);
    const std::size_t nd = ds->s1.size();
    const std::size_t stride = static_cast<std::size_t>(w_hi + 1);

    // Weighted layer sums over directions.
    std::vector<double> sbar_even(stride, 0.0), sbar_odd(stride, 0.0);
    {
        std::vector<double> terms(nd);
        for (int w = 0; w <= w_hi; ++w) {
            for (std::size_t d = 0; d < nd; ++d)
                terms[d] = wp[d] * ls.even[d * stride + static_cast<std::size_t>(w)];
            sbar_even[static_cast<std::size_t>(w)] = pairwise_sum(terms);
            for (std::size_t d = 0; d < nd; ++d)
                terms[d] = wp[d] * ls.odd[d * stride + static_cast<std::size_t>(w)];
            sbar_odd[static_cast<std::size_t>(w)] = pairwise_sum(terms);
        }
    }

    // Near piece: int_{rho_sw}^1 rho^{alpha-1} sum_dir wp (phi(x .
    // delta_rho sigma) - S_even(rho; sigma)) drho, dyadic Gauss panels.
    std::vector<double> dirterm(nd);
    std::vector<double> rhopow(stride);
    auto ring = [&](double rho) {
        rhopow[0] = 1.0;
        for (int w = 1; w <= w_hi; ++w)
            rhopow[static_cast<std::size_t>(w)] = rhopow[static_cast<std::size_t>(w - 1)] * rho;
        for (std::size_t d = 0; d < nd; ++d) {
            double sub = 0.0;
            for (int w = 0; w <= 2 * m; w += 2)
                sub += ls.even[d * stride + static_cast<std::size_t>(w)] *
                       rhopow[static_cast<std::size_t>(w)];
            const Point z = group_mul(g, x, offset_point(*ds, d, rho));
            dirterm[d] = wp[d] * (phi.value(g, z) - sub);
        }
        return pairwise_sum(dirterm) * std::pow(rho, alpha - 1.0);
    };
    double near = 0.0;
    {
        double top = 1.0;
        while (top > opt.rho_switch * (1.0 + 1e-12)) {
            const double bot = std::max(0.5 * top, opt.rho_switch);
            near += gauss_panel(ring, bot, top, opt.radial.nodes);
            top = bot;
        }
    }

    // Taylor closure of (0, rho_sw]: the even layers above the subtraction
    // integrate in closed form, sidestepping the 2^{k|alpha|} cancellation
    // noise a marched subtraction would accumulate near rho = 0.
    double closure = 0.0;
    const int w_lo = (m >= 0) ? 2 * m + 2 : 0;
    for (int w = w_lo; w <= w_hi; w += 2)
        closure += sbar_even[static_cast<std::size_t>(w)] *
                   std::pow(opt.rho_switch, w + alpha) / (w + alpha);

    // Far phi piece: rho in [1, inf), panels marched until negligible.
    std::vector<double> ft(nd);
    auto far_ring = [&](double rho) {
        for (std::size_t d = 0; d < nd; ++d) {
            const Point z = group_mul(g, x, offset_point(*ds, d, rho));
            ft[d] = wp[d] * phi.value(g, z);
        }
        return pairwise_sum(ft) * std::pow(rho, alpha - 1.0);
    };
    bool far_conv = false;
    const int far_panels =
        static_cast<int>(std::ceil((R + phi.support_radius() + 4.0) / 0.5));
    const double farphi = integrate_tail(far_ring, 1.0, 0.5, 1.0, opt.eps_rel,
                                         opt.radial.nodes, far_panels, &far_conv);

    // Far Taylor piece: - int_{rho>1} S_even P_alpha closes to
    // + sum_{w <= 2m} Sbar_w / (w + alpha) (w + alpha < 0 on the strip).
    double fars = 0.0;
    for (int w = 0; w <= 2 * m; w += 2)
        fars += sbar_even[static_cast<std::size_t>(w)] / (w + alpha);

    PsiResult out;
    out.value = near + closure + farphi + fars;
    out.route = "spatial";
    out.std_error = 3e-6 * std::abs(out.value) + 1e-13;
    double odd_resid = 0.0;
    for (int w = 1; w <= w_hi; w += 2)
        odd_resid = std::max(odd_resid, std::abs(sbar_odd[static_cast<std::size_t>(w)]));
    std::ostringstream os;
    os << "near split at rho=" << opt.rho_switch << ", closure w=[" << w_lo
       << "," << w_hi << "], odd-layer residual " << odd_resid
       << (far_conv ? "" : ", far march hit panel cap");
    out.provenance = os.str();
    return out;
}

PsiResult psi_spatial_field(const GroupConfig& g,
                            const std::function<double(const Point&)>& field,
                            const Point& x, double alpha,
                            const PsiOptions& opt) {
    if (g.n != 1)
        throw std::invalid_argument("psi_spatial_field: n = 1 only");
    check_point(g, x, "psi_spatial_field");
    const double Q = g.homogeneous_dim();
    const StripSelector sel = StripSelector::select(alpha, Q, 0.0);
    if (sel.at_pole)
        throw std::invalid_argument("psi_spatial_field: alpha is a pole");
    if (sel.m > 0)
        throw std::invalid_argument(
            "psi_spatial_field: alpha must lie in (-2, Q); deeper strips need "
            "jets, which a numeric field cannot provide");
    auto tab = palpha_sphere_shared(g, alpha, opt.sphere_pts, opt.radial);
    auto ds = direction_set(opt.grid);
    const std::vector<double> wp = weighted_directions(*ds, *tab);
    const std::size_t nd = ds->s1.size();
    const double f0 = field(x);
    const double sum_wp = pairwise_sum(wp);

    std::vector<double> dirterm(nd);
    auto ring = [&](double rho) {
        for (std::size_t d = 0; d < nd; ++d)
            dirterm[d] = wp[d] * field(group_mul(g, x, offset_point(*ds, d, rho)));
        double s = pairwise_sum(dirterm);
        if (alpha < 0.0) s -= f0 * sum_wp;
        return s * std::pow(rho, alpha - 1.0);
    };

    // March dyadic panels down; the direction-summed integrand decays like
    // rho^{2+alpha} (odd layers cancel), so the panel-negligibility stop is
    // reliable.  For alpha > 0 the value-level closure covers the stub.
    double near = 0.0;
    double bot = 1.0;
    int negligible = 0;
    for (int k = 0; k < 40 && negligible < 2; ++k) {
        const double top = bot;
        bot = 0.5 * top;
        const double panel = gauss_panel(ring, bot, top, opt.radial.nodes);
        near += panel;
        if (std::abs(panel) <= opt.eps_rel * std::max(std::abs(near), 1e-300))
            ++negligible;
        else
            negligible = 0;
    }
    double closure = 0.0;
    double fars = 0.0;
    if (alpha < 0.0)
        fars = f0 * sum_wp / alpha;  // continued far part of the subtraction
    else
        closure = f0 * sum_wp * std::pow(bot, alpha) / alpha;

    std::vector<double> ft(nd);
    auto far_ring = [&](double rho) {
        for (std::size_t d = 0; d < nd; ++d)
            ft[d] = wp[d] * field(group_mul(g, x, offset_point(*ds, d, rho)));
        return pairwise_sum(ft) * std::pow(rho, alpha - 1.0);
    };
    bool far_conv = false;
    const double farv = integrate_tail(far_ring, 1.0, 0.5, 1.0, opt.eps_rel,
                                       opt.radial.nodes, 128, &far_conv);

    PsiResult out;
    out.value = near + closure + farv + fars;
    out.route = "spatial";
    out.std_error = 1e-5 * std::abs(out.value) + 1e-12;
    out.provenance = "field form (value-level subtraction)";
    return out;
}

// ---------------------------------------------------------------------------
// Time route.

PsiResult psi_time(const GroupConfig& g, const TestFunction& phi, const Point& x,
                   double alpha, const MomentTable& moments,
                   const PsiOptions& opt) {
    check_point(g, x, "psi_time");
    const double Q = g.homogeneous_dim();
    const StripSelector sel = StripSelector::select(alpha, Q, 0.0);
    if (sel.at_pole)
        throw std::invalid_argument("psi_time: alpha is a pole; use psi_pole");
    const int m = sel.m;
    const int p_hi = (m >= 0) ? m + 3 : 3;
    const Jet jet = ztaylor(g, phi, x, 2 * p_hi, true);

    PsiResult out;
    out.route = "time";
    if (g.n == 1) {
        auto grid = GaugePolarGrid::shared(g, opt.grid);
        const std::vector<double> c = heat_coeffs(jet, moments, p_hi);
        auto F = [&](double t) {
            const double rt = std::sqrt(t);
            return grid->integrate([&](const GridNode& nd) {
                Point y(3);
                y[0] = rt * nd.y1;
                y[1] = rt * nd.y2;
                y[2] = t * nd.u;
                return phi.value(g, group_mul(g, x, y));
            });
        };
        out.value = balakrishnan_value(alpha, m, p_hi, c, F, opt);
        out.std_error = 3e-6 * std::abs(out.value) + 1e-13;
        out.provenance = "volume-grid heat curve, node-consistent coefficients";
        return out;
    }

    // n >= 2: diffusion-cloud backend.  Four disjoint symmetrized replicates,
    // each with its own node-consistent moment table, give value and spread.
    (void)moments;  // the n = 1 signature table; replicates derive their own
    auto cloud = shared_cloud(g, opt.sampler);
    const std::size_t nrep = 4;
    const std::size_t chunk = cloud->size() / nrep;
    if (chunk < 100)
        throw std::invalid_argument("psi_time: cloud too small for replicates");
    std::vector<double> psis(nrep);
    for (std::size_t r = 0; r < nrep; ++r) {
        std::vector<Point> sub(cloud->begin() + static_cast<std::ptrdiff_t>(r * chunk),
                               cloud->begin() + static_cast<std::ptrdiff_t>((r + 1) * chunk));
        const std::vector<Point> sym = symmetrized(sub, g);
        const MomentTable mt = moment_table_mc(g, sym, 2 * p_hi);
        const std::vector<double> c = heat_coeffs(jet, mt, p_hi);
        auto F = [&](double t) { return cloud_mean(g, phi, x, t, sym); };
        psis[r] = balakrishnan_value(alpha, m, p_hi, c, F, opt);
    }
    double mean = 0.0;
    for (double v : psis) mean += v;
    mean /= static_cast<double>(nrep);
    double var = 0.0;
    for (double v : psis) var += (v - mean) * (v - mean);
    var /= static_cast<double>(nrep - 1);
    out.value = mean;
    out.std_error = std::sqrt(var / static_cast<double>(nrep));
    out.provenance = "diffusion-cloud heat curve, 4 symmetrized replicates";
    return out;
}

// ---------------------------------------------------------------------------
// Pole values and moment tables.

double psi_pole(const GroupConfig& g, const TestFunction& phi, const Point& x,
                int m, const MomentTable& moments) {
    if (m < 0) throw std::invalid_argument("psi_pole: m must be >= 0");
    check_point(g, x, "psi_pole");
    const Jet jet = ztaylor(g, phi, x, 2 * m, true);
    const MultiIndexSet& t = *jet.table;
    const int nranks = t.count_through_degree(jet.order);
    std::vector<double> terms;
    for (int r = 0; r < nranks; ++r) {
        const double cr = jet.c[static_cast<std::size_t>(r)];
        if (cr == 0.0 || t.hweight(r) != 2 * m) continue;
        const std::vector<int>& e = t.exponents(r);
        bool even = true;
        for (int ei : e)
            if (ei % 2 != 0) {
                even = false;
                break;
            }
        if (!even) continue;
        terms.push_back(cr * moments.get(e));
    }
    const double s = pairwise_sum(terms);
    return ((m % 2 == 0) ? 1.0 : -1.0) * factorial(m) * s;
}

std::shared_ptr<const MomentTable> psi_moment_table(const GroupConfig& g,
                                                    const PsiOptions& opt,
                                                    int max_weight) {
    static std::mutex mu;
    static std::map<std::uint64_t, std::shared_ptr<const MomentTable>> cache;
    std::uint64_t key = 1469598103934665603ull;
    key = fnv_mix(key, static_cast<std::uint64_t>(g.n));
    key = fnv_mix(key, static_cast<std::uint64_t>(max_weight));
    for (char ch : opt.moment_source) key = fnv_mix(key, static_cast<std::uint64_t>(ch));
    key = fnv_mix(key, g.n == 1 ? grid_digest(opt.grid) : sampler_digest(opt.sampler));
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    std::shared_ptr<const MomentTable> result;
    if (opt.moment_source == "reference") {
        result = std::make_shared<const MomentTable>(
            reference_moment_table(g, max_weight));
    } else if (opt.moment_source == "measured") {
        if (g.n == 1) {
            auto grid = GaugePolarGrid::shared(g, opt.grid);
            result = std::make_shared<const MomentTable>(
                moment_table_quadrature(g, *grid, max_weight));
        } else {
            auto cloud = shared_cloud(g, opt.sampler);
            const std::vector<Point> sym = symmetrized(*cloud, g);
            result = std::make_shared<const MomentTable>(
                moment_table_mc(g, sym, max_weight));
        }
    } else {
        throw std::invalid_argument("psi_moment_table: unknown moment source '" +
                                    opt.moment_source + "'");
    }
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.emplace(key, std::move(result));
    (void)inserted;
    return it->second;
}

// ---------------------------------------------------------------------------
// Dispatch.

namespace {

// Route used for the off-pole evaluations of the near-pole derivative.
PsiResult psi_offpole(const GroupConfig& g, const TestFunction& phi,
                      const Point& x, double alpha, const PsiOptions& opt) {
    if (g.n == 1) return psi_spatial(g, phi, x, alpha, opt);
    auto mt = psi_moment_table(g, opt, 12);
    return psi_time(g, phi, x, alpha, *mt, opt);
}

}  // namespace

PsiResult psi_eval(const GroupConfig& g, const TestFunction& phi, const Point& x,
                   double alpha, const PsiOptions& opt, const std::string& route) {
    const double Q = g.homogeneous_dim();
    const StripSelector sel = StripSelector::select(alpha, Q, opt.near_pole_eps);

    if (route == "pole" || (route == "auto" && sel.at_pole)) {
        if (!sel.at_pole)
            throw std::invalid_argument(
                "psi_eval: route 'pole' requires alpha = -2m exactly");
        const int m = sel.pole_index;
        auto mt = psi_moment_table(g, opt, std::max(12, 2 * m));
        PsiResult out;
        out.value = psi_pole(g, phi, x, m, *mt);
        out.route = "pole";
        out.provenance = "pole formula, " + mt->source + " moments";
        // Propagate the table's estimation errors through the linear formula.
        const Jet jet = ztaylor(g, phi, x, 2 * m, true);
        const MultiIndexSet& t = *jet.table;
        double err = 0.0;
        for (int r = 0; r < t.count_through_degree(jet.order); ++r) {
            if (t.hweight(r) != 2 * m) continue;
            auto it = mt->err.find(t.exponents(r));
            if (it != mt->err.end())
                err += std::abs(jet.c[static_cast<std::size_t>(r)]) * it->second;
        }
        out.std_error = factorial(m) * err;
        return out;
    }

    if (route == "auto" && sel.near_pole) {
        // First-order continuation from the pole: psi(-2l) from the pole
        // formula plus (alpha + 2l) times a symmetric-difference derivative.
        const int l = sel.pole_index;
        auto mt = psi_moment_table(g, opt, std::max(12, 2 * l));
        const double base = psi_pole(g, phi, x, l, *mt);
        const double d = opt.pole_deriv_delta;
        const PsiResult hi = psi_offpole(g, phi, x, -2.0 * l + d, opt);
        const PsiResult lo = psi_offpole(g, phi, x, -2.0 * l - d, opt);
        const double deriv = (hi.value - lo.value) / (2.0 * d);
        const double curv = (hi.value + lo.value - 2.0 * base) / (d * d);
        const double off = alpha + 2.0 * l;
        PsiResult out;
        out.value = base + off * deriv;
        out.route = "pole";
        out.near_pole_correction = true;
        out.std_error = std::abs(off) * (hi.std_error + lo.std_error) / (2.0 * d) +
                        0.5 * off * off * std::abs(curv);
        out.provenance = "near-pole: pole formula + first-order continuation";
        return out;
    }

    if (route == "spatial") return psi_spatial(g, phi, x, alpha, opt);
    if (route == "time") {
        auto mt = psi_moment_table(g, opt, 12);
        return psi_time(g, phi, x, alpha, *mt, opt);
    }
    if (route != "auto")
        throw std::invalid_argument("psi_eval: unknown route '" + route + "'");
    return psi_offpole(g, phi, x, alpha, opt);
}

PsiResult frac_power(const GroupConfig& g, const TestFunction& phi, double s,
                     const Point& x, const PsiOptions& opt) {
    const double Q = g.homogeneous_dim();
    if (!(s > -0.5 * Q))
        throw std::invalid_argument("frac_power: need s > -Q/2");
    if (s >= 0.0 && std::rint(s) == s) {
        const int m = static_cast<int>(std::rint(s));
        auto mt = psi_moment_table(g, opt, std::max(12, 2 * m));
        PsiResult out;
        out.value = psi_pole(g, phi, x, m, *mt);
        out.route = "pole";
        out.provenance = "integer power via pole formula, " + mt->source + " moments";
        return out;
    }
    return psi_eval(g, phi, x, -2.0 * s, opt, "auto");
}

// ---------------------------------------------------------------------------
// Verification helpers.

namespace {

// Uniform-grid table of a horizontally radial field in gauge-polar
// coordinates (rho, beta), cubic-interpolated in both axes, with the
// homogeneous-decay extension beyond the tabulated radius.
class RadialFieldTable {
  public:
    RadialFieldTable(double rho_max, int nrho, int nbeta, double decay_exp)
        : rho_max_(rho_max), nrho_(nrho), nbeta_(nbeta), decay_(decay_exp),
          vals_(static_cast<std::size_t>(nrho) * static_cast<std::size_t>(nbeta)) {}

    double& at(int ir, int ib) {
        return vals_[static_cast<std::size_t>(ir) * static_cast<std::size_t>(nbeta_) +
                     static_cast<std::size_t>(ib)];
    }
    double rho_of(int ir) const { return rho_max_ * ir / (nrho_ - 1); }
    double beta_of(int ib) const { return -0.5 * M_PI + M_PI * ib / (nbeta_ - 1); }

    double eval(const GroupConfig& g, const Point& y) const {
        const double R = koranyi_norm(g, y);
        if (R == 0.0) return interp(0.0, 0.0);
        const double su = std::min(std::max(y.u() / (R * R), -1.0), 1.0);
        const double beta = std::asin(su);
        if (R <= rho_max_) return interp(R, beta);
        return interp(rho_max_, beta) * std::pow(R / rho_max_, decay_);
    }

  private:
    static double cubic4(double y0, double y1, double y2, double y3, double u) {
        const double l0 = u * (u - 1.0) * (u - 2.0) / (-6.0);
        const double l1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        const double l2 = (u + 1.0) * u * (u - 2.0) / (-2.0);
        const double l3 = (u + 1.0) * u * (u - 1.0) / 6.0;
        return l0 * y0 + l1 * y1 + l2 * y2 + l3 * y3;
    }
    double row_interp(int ir, double sb) const {
        int j1 = static_cast<int>(std::floor(sb));
        j1 = std::min(std::max(j1, 1), nbeta_ - 3);
        const double u = sb - j1;
        const std::size_t base = static_cast<std::size_t>(ir) * static_cast<std::size_t>(nbeta_);
        return cubic4(vals_[base + static_cast<std::size_t>(j1 - 1)],
                      vals_[base + static_cast<std::size_t>(j1)],
                      vals_[base + static_cast<std::size_t>(j1 + 1)],
                      vals_[base + static_cast<std::size_t>(j1 + 2)], u);
    }
    double interp(double rho, double beta) const {
        double sr = rho / rho_max_ * (nrho_ - 1);
        sr = std::min(std::max(sr, 0.0), static_cast<double>(nrho_ - 1));
        double sb = (beta + 0.5 * M_PI) / M_PI * (nbeta_ - 1);
        sb = std::min(std::max(sb, 0.0), static_cast<double>(nbeta_ - 1));
        int i1 = static_cast<int>(std::floor(sr));
        i1 = std::min(std::max(i1, 1), nrho_ - 3);
        const double u = sr - i1;
        return cubic4(row_interp(i1 - 1, sb), row_interp(i1, sb),
                      row_interp(i1 + 1, sb), row_interp(i1 + 2, sb), u);
    }

    double rho_max_;
    int nrho_, nbeta_;
    double decay_;
    std::vector<double> vals_;
};

}  // namespace

SemigroupResult semigroup_check(const GroupConfig& g, const TestFunctionPtr& phi,
                                double s, double p, const Point& x,
                                const PsiOptions& opt) {
    if (!phi) throw std::invalid_argument("semigroup_check: null test function");
    if (g.n != 1)
        throw std::invalid_argument("semigroup_check: n = 1 only");
    check_point(g, x, "semigroup_check");

    SemigroupResult out;
    out.rhs_detail = frac_power(g, *phi, s + p, x, opt);
    out.rhs = out.rhs_detail.value;

    if (s >= 0.0 && std::rint(s) == s) {
        const int si = static_cast<int>(std::rint(s));
        if (si == 0) {
            out.lhs_detail = frac_power(g, *phi, p, x, opt);
            out.lhs = out.lhs_detail.value;
        } else if (si == 1) {
            // One sub-Laplacian applied by frame finite differences to the
            // inner field: L f = -sum_i Z_i^2 f, each Z_i^2 via the
            // second-order stencil along the frame flow x . (+-h e_i).
            const double h = 0.02;
            auto f = [&](const Point& y) {
                return frac_power(g, *phi, p, y, opt).value;
            };
            const double center = f(x);
            double acc = 0.0;
            for (int i = 0; i < 2; ++i) {
                Point ep(3), em(3);
                ep[static_cast<std::size_t>(i)] = h;
                em[static_cast<std::size_t>(i)] = -h;
                acc += f(group_mul(g, x, ep)) - 2.0 * center + f(group_mul(g, x, em));
            }
            out.lhs = -acc / (h * h);
            out.lhs_detail.value = out.lhs;
            out.lhs_detail.route = "fd";
            out.lhs_detail.std_error = 5e-3 * std::abs(out.lhs) + 1e-10;
            out.lhs_detail.provenance = "frame second differences, h = 0.02";
        } else {
            throw std::invalid_argument(
                "semigroup_check: integer outer order limited to s <= 1");
        }
    } else if (s > 0.0 && s < 1.0) {
        if (!phi->horizontally_radial())
            throw std::invalid_argument(
                "semigroup_check: fractional outer order needs a horizontally "
                "radial test function (the inner field is tabulated on "
                "(gauge, latitude))");
        // Inner field tabulated on gauge-polar coordinates with a reduced
        // direction set (the outer quadrature only needs ~1e-4 relative
        // accuracy of the inner values), then the outer singular integral in
        // field form.
        PsiOptions fast = opt;
        fast.grid.theta_nodes = 12;
        fast.grid.beta_central_panels = 3;
        fast.grid.beta_graded_panels = 4;
        fast.grid.beta_nodes_per_panel = 6;
        fast.radial.nodes = 12;
        const double Q = g.homogeneous_dim();
        RadialFieldTable table(14.0, 141, 49, -2.0 * p - Q);
        for (int ir = 0; ir < 141; ++ir) {
            const double rho = table.rho_of(ir);
            for (int ib = 0; ib < 49; ++ib) {
                const double beta = table.beta_of(ib);
                const double cb = std::max(0.0, std::cos(beta));
                Point y(3);
                y[0] = rho * std::sqrt(cb);
                y[2] = rho * rho * std::sin(beta);
                table.at(ir, ib) = frac_power(g, *phi, p, y, fast).value;
            }
        }
        auto field = [&](const Point& y) { return table.eval(g, y); };
        out.lhs_detail = psi_spatial_field(g, field, x, -2.0 * s, opt);
        out.lhs = out.lhs_detail.value;
        out.lhs_detail.std_error =
            std::max(out.lhs_detail.std_error, 2e-3 * std::abs(out.lhs));
        out.lhs_detail.provenance =
            "tabulated inner field (141 x 49 gauge-polar) + field-form outer";
    } else {
        throw std::invalid_argument(
            "semigroup_check: outer s must be 0, 1, or in (0,1)");
    }

    out.gap = std::abs(out.lhs - out.rhs) / std::max(std::abs(out.rhs), 1e-300);
    return out;
}

ContinuityResult strip_continuity_check(const GroupConfig& g,
                                        const TestFunctionPtr& phi,
                                        const Point& x, int m,
                                        const PsiOptions& opt) {
    if (!phi) throw std::invalid_argument("strip_continuity_check: null test function");
    const double d = opt.pole_deriv_delta;
    auto sym = [&](double dd) {
        const double hi = psi_eval(g, *phi, x, -2.0 * m + dd, opt).value;
        const double lo = psi_eval(g, *phi, x, -2.0 * m - dd, opt).value;
        return 0.5 * (hi + lo);
    };
    const double v1 = sym(d);
    const double v2 = sym(0.5 * d);
    ContinuityResult out;
    out.extrapolated = (4.0 * v2 - v1) / 3.0;  // Richardson in delta^2
    auto mt = psi_moment_table(g, opt, std::max(12, 2 * m));
    out.pole_value = psi_pole(g, *phi, x, m, *mt);
    out.gap = std::abs(out.extrapolated - out.pole_value);
    return out;
}

CollapseResult moment_collapse(const GroupConfig& g, const MomentTable& mt) {
    const int q = g.dim();
    auto gamma = [&](int i, int ei, int j, int ej) {
        std::vector<int> v(static_cast<std::size_t>(q), 0);
        v[static_cast<std::size_t>(i)] = ei;
        if (j >= 0) v[static_cast<std::size_t>(j)] = ej;
        return v;
    };
    auto err_of = [&](const std::vector<int>& gm) {
        auto it = mt.err.find(gm);
        return it == mt.err.end() ? 0.0 : it->second;
    };
    const int uc = q - 1;  // center coordinate index
    const auto g_u2 = gamma(uc, 2, -1, 0);
    const auto g_y14 = gamma(0, 4, -1, 0);
    const auto g_y16 = gamma(0, 6, -1, 0);
    const auto g_y12u2 = gamma(0, 2, uc, 2);

    CollapseResult out;
    const double c4 = 2.0 * g.n / 24.0;
    out.t2_comb = mt.get(g_u2) - c4 * mt.get(g_y14);
    out.t2_err = err_of(g_u2) + c4 * err_of(g_y14);
    const double c6 = (5.0 + 3.0 * (g.n - 1)) / 720.0;
    out.t2l_comb = 0.25 * mt.get(g_y12u2) - c6 * mt.get(g_y16);
    out.t2l_err = 0.25 * err_of(g_y12u2) + c6 * err_of(g_y16);
    return out;
}

}  // namespace subfrac
