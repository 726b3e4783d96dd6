#include "subfrac/heatkernel.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "subfrac/ccnorm.hpp"
#include "subfrac/quadrature.hpp"
#include "subfrac/rng.hpp"

namespace subfrac {

namespace {

// lam / sinh(lam * t), series-stable near 0, underflow-safe for large args.
inline double lam_over_sinh(double lam, double t) {
    const double w = lam * t;
    if (w < 1e-5) {
        const double w2 = w * w;
        return (1.0 - w2 / 6.0 * (1.0 - 7.0 * w2 / 60.0)) / t;
    }
    if (w > 700.0) return 2.0 * lam * std::exp(-w);
    return lam / std::sinh(w);
}

// lam * coth(lam * t), series-stable near 0.
inline double lam_coth(double lam, double t) {
    const double w = lam * t;
    if (w < 1e-5) return 1.0 / t + lam * w / 3.0 - lam * w * w * w / 45.0;
    if (w > 350.0) return lam;
    return lam * (1.0 + 2.0 / std::expm1(2.0 * w));
}

}  // namespace

double hk_eval(const GroupConfig& g, double t, const Point& x,
               const HkOptions& opt) {
    check_point(g, x, "hk_eval");
    if (!(t > 0.0)) throw std::invalid_argument("hk_eval: t must be > 0");
    const int n = g.n;
    const double zs = horizontal_norm_sq(g, x);
    const double u = x[2 * n];
    const double inv4pi = 1.0 / (4.0 * M_PI);

    // Center-decay short-circuit.  Shifting the contour to Im(lam) = pi/(2t)
    // (half the distance to the sinh poles) turns 1/|sinh| into 1/cosh and
    // keeps the Gaussian factor's modulus <= 1, so |h| <= K_n(t) e^{-pi|u|/(2t)}.
    // Far below the noise floor of the oscillatory sum the march would only
    // burn panels to produce cancellation dust; report a clean zero instead.
    if (M_PI * std::abs(u) / (2.0 * t) > 200.0) return 0.0;

    auto f = [&](double lam) {
        double env = 1.0;
        const double base = lam_over_sinh(lam, t) * inv4pi;
        for (int k = 0; k < n; ++k) env *= base;
        return env * std::exp(-0.25 * zs * lam_coth(lam, t)) *
               std::cos(lam * u);
    };

    // Panel width tied to the finest scale present: the cosine period
    // (2 pi / |u|), the sinh decay onset (~1/t), and the Gaussian factor's
    // lambda-scale (~4/|z|^2 once coth saturates).
    const double width =
        std::min(std::min(2.0, 3.0 / t),
                 std::min(M_PI / (2.0 * (std::abs(u) + 0.25)),
                          32.0 / (zs + 1.0)));
    bool ok = false;
    const double val = integrate_tail(f, 0.0, width, 1.0, opt.eps_rel,
                                      opt.panel_nodes, opt.max_panels, &ok);
    if (!ok)
        throw std::runtime_error("hk_eval: lambda integral did not settle");
    return val / M_PI;
}

// ---------------------------------------------------------------------------
// Diffusion sampler.

std::vector<Point> sample_cloud(const GroupConfig& g, const SamplerSpec& spec) {
    if (spec.paths < 1 || spec.steps < 1 || !(spec.t > 0.0))
        throw std::invalid_argument("sample_cloud: bad sampler spec");
    const int n = g.n;
    const int q = g.dim();
    const double dt = spec.t / spec.steps;
    const double sdt = std::sqrt(2.0 * dt);

    std::vector<Point> cloud(spec.paths, Point(static_cast<std::size_t>(q)));
    std::vector<double> xs(2 * n);
    for (std::int64_t p = 0; p < spec.paths; ++p) {
        Philox rng(spec.seed, static_cast<std::uint64_t>(p));
        std::fill(xs.begin(), xs.end(), 0.0);
        double u = 0.0;
        for (int k = 0; k < spec.steps; ++k) {
            for (int i = 0; i < n; ++i) {
                const double dx = sdt * ziggurat_normal(rng);
                const double dy = sdt * ziggurat_normal(rng);
                // midpoint (Stratonovich) rule for the Levy area
                u += 0.5 * ((xs[i] + 0.5 * dx) * dy - (xs[i + n] + 0.5 * dy) * dx);
                xs[i] += dx;
                xs[i + n] += dy;
            }
        }
        Point& pt = cloud[p];
        for (int i = 0; i < 2 * n; ++i) pt[i] = xs[i];
        pt[2 * n] = u;
    }
    return cloud;
}

namespace {

DiffusionMoments moments_from_cloud(const GroupConfig& g,
                                    const std::vector<Point>& cloud) {
    const int n = g.n;
    const std::int64_t N = static_cast<std::int64_t>(cloud.size());
    constexpr std::int64_t B = 8192;  // block size for the fixed reduction tree
    const std::int64_t nblocks = (N + B - 1) / B;

    const int nstat = 2 * n + 10;
    std::vector<std::vector<double>> blocks(nstat,
                                            std::vector<double>(nblocks, 0.0));
    for (std::int64_t b = 0; b < nblocks; ++b) {
        const std::int64_t lo = b * B, hi = std::min(N, lo + B);
        double acc[64] = {0.0};
        for (std::int64_t p = lo; p < hi; ++p) {
            const Point& pt = cloud[p];
            double hs = 0.0;
            for (int i = 0; i < 2 * n; ++i) hs += pt[i] * pt[i];
            const double x1s = pt[0] * pt[0];
            const double us = pt[2 * n] * pt[2 * n];
            const double v0 = hs, v1 = x1s * x1s, v2 = v1 * x1s, v3 = us,
                         v4 = x1s * us;
            acc[0] += v0;  acc[1] += v1;  acc[2] += v2;  acc[3] += v3;  acc[4] += v4;
            acc[5] += v0 * v0; acc[6] += v1 * v1; acc[7] += v2 * v2;
            acc[8] += v3 * v3; acc[9] += v4 * v4;
            for (int i = 0; i < 2 * n; ++i) acc[10 + i] += pt[i] * pt[i];
        }
        for (int s = 0; s < nstat; ++s) blocks[s][b] = acc[s];
    }

    DiffusionMoments m;
    m.paths = N;
    auto mean = [&](int s) { return pairwise_sum(blocks[s]) / N; };
    auto se = [&](double m1, double m2) {
        const double var = std::max(0.0, m2 - m1 * m1);
        return std::sqrt(var / N);
    };
    m.sum_horiz_sq = mean(0);
    m.x1_4 = mean(1);
    m.x1_6 = mean(2);
    m.u_2 = mean(3);
    m.x1_2_u_2 = mean(4);
    m.se_sum_horiz_sq = se(m.sum_horiz_sq, mean(5));
    m.se_x1_4 = se(m.x1_4, mean(6));
    m.se_x1_6 = se(m.x1_6, mean(7));
    m.se_u_2 = se(m.u_2, mean(8));
    m.se_x1_2_u_2 = se(m.x1_2_u_2, mean(9));
    m.coord_sq.resize(2 * n);
    for (int i = 0; i < 2 * n; ++i) m.coord_sq[i] = mean(10 + i);
    return m;
}

}  // namespace

DiffusionMoments simulate_moments(const GroupConfig& g, const SamplerSpec& spec) {
    return moments_from_cloud(g, sample_cloud(g, spec));
}

MeanResult heat_semigroup(const GroupConfig& g, const TestFunction& phi,
                          const Point& x, double t,
                          const std::vector<Point>& cloud) {
    if (!(t >= 0.0)) throw std::invalid_argument("heat_semigroup: t must be >= 0");
    if (t == 0.0) return {phi.value(g, x), 0.0};
    const double s = std::sqrt(t);
    const std::int64_t N = static_cast<std::int64_t>(cloud.size());
    constexpr std::int64_t B = 8192;
    const std::int64_t nblocks = (N + B - 1) / B;
    std::vector<double> b1(nblocks, 0.0), b2(nblocks, 0.0);
    for (std::int64_t b = 0; b < nblocks; ++b) {
        const std::int64_t lo = b * B, hi = std::min(N, lo + B);
        double a1 = 0.0, a2 = 0.0;
        for (std::int64_t p = lo; p < hi; ++p) {
            const double v = phi.value(g, group_mul(g, x, dilate(g, s, cloud[p])));
            a1 += v;
            a2 += v * v;
        }
        b1[b] = a1;
        b2[b] = a2;
    }
    const double m1 = pairwise_sum(b1) / N;
    const double m2 = pairwise_sum(b2) / N;
    return {m1, std::sqrt(std::max(0.0, m2 - m1 * m1) / N)};
}

MomentResult hk_moment_mc(const GroupConfig& g, const std::vector<int>& gamma,
                          double t, const SamplerSpec& spec) {
    if (gamma.size() != static_cast<std::size_t>(g.dim()))
        throw std::invalid_argument("hk_moment_mc: gamma dimension mismatch");
    for (int e : gamma)
        if (e % 2 != 0) return {0.0, 0.0, true};  // odd exponent: exact zero
    SamplerSpec unit = spec;
    unit.t = 1.0;
    const auto cloud = sample_cloud(g, unit);
    const std::int64_t N = static_cast<std::int64_t>(cloud.size());
    constexpr std::int64_t B = 8192;
    const std::int64_t nblocks = (N + B - 1) / B;
    std::vector<double> b1(nblocks, 0.0), b2(nblocks, 0.0);
    for (std::int64_t b = 0; b < nblocks; ++b) {
        const std::int64_t lo = b * B, hi = std::min(N, lo + B);
        double a1 = 0.0, a2 = 0.0;
        for (std::int64_t p = lo; p < hi; ++p) {
            const double v = eval_monomial(cloud[p], gamma);
            a1 += v;
            a2 += v * v;
        }
        b1[b] = a1;
        b2[b] = a2;
    }
    double m1 = pairwise_sum(b1) / N;
    const double m2 = pairwise_sum(b2) / N;
    double se = std::sqrt(std::max(0.0, m2 - m1 * m1) / N);
    // Dilation scaling moves the time-1 law to time t.
    const double scale = std::pow(t, 0.5 * monomial_weight(g, gamma));
    return {m1 * scale, se * scale, false};
}

// ---------------------------------------------------------------------------
// Deterministic n=1 gauge-polar grid.

std::vector<BetaNode> make_beta_nodes(const GaugeGridOptions& opt) {
    std::vector<std::pair<double, double>> panels;  // [lo, hi) in beta > 0
    const double half = 0.5 * M_PI;
    // central band [0, half - 0.35], then graded panels shrinking toward half
    const double band = half - 0.35;
    for (int k = 0; k < opt.beta_central_panels; ++k)
        panels.emplace_back(band * k / opt.beta_central_panels,
                            band * (k + 1) / opt.beta_central_panels);
    double lo = band;
    double w = 0.35 * 0.5;
    for (int k = 0; k < opt.beta_graded_panels; ++k) {
        const double hi = (k + 1 == opt.beta_graded_panels) ? half : lo + w;
        panels.emplace_back(lo, hi);
        lo = hi;
        w *= 0.5;
    }
    const GaussRule& r = gauss_rule(opt.beta_nodes_per_panel);
    std::vector<BetaNode> out;
    for (const auto& [a, b] : panels) {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int i = 0; i < opt.beta_nodes_per_panel; ++i) {
            const double beta = c + h * r.nodes[i];
            const double wt = h * r.weights[i];
            out.push_back({beta, wt});
            out.push_back({-beta, wt});  // symmetric southern hemisphere
        }
    }
    return out;
}

GaugePolarGrid::GaugePolarGrid(const GroupConfig& g, const GaugeGridOptions& opt,
                               const HkOptions& hk) {
    if (g.n != 1)
        throw std::invalid_argument("GaugePolarGrid: deterministic grid is n=1 only");

    // rho panels: dyadic below 1, uniform above.
    std::vector<std::pair<double, double>> rpanels;
    double hi = 1.0;
    for (int k = 0; k < opt.rho_dyadic_levels; ++k) {
        rpanels.emplace_back(0.5 * hi, hi);
        hi *= 0.5;
    }
    rpanels.emplace_back(0.0, hi);  // tiny residual panel at 0
    for (double lo = 1.0; lo < opt.rho_max - 1e-12; lo += opt.rho_linear_width)
        rpanels.emplace_back(lo, std::min(lo + opt.rho_linear_width, opt.rho_max));

    const GaussRule& rr = gauss_rule(opt.rho_nodes_per_panel);
    std::vector<std::pair<double, double>> rho_nodes;  // (rho, weight)
    for (const auto& [a, b] : rpanels) {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int i = 0; i < opt.rho_nodes_per_panel; ++i)
            rho_nodes.emplace_back(c + h * rr.nodes[i], h * rr.weights[i]);
    }

    const auto betas = make_beta_nodes(opt);
    cc_unit_.resize(betas.size());
    for (std::size_t ib = 0; ib < betas.size(); ++ib) {
        const double cb = std::cos(betas[ib].beta);
        Point sigma(std::vector<double>{std::sqrt(std::max(0.0, cb)), 0.0,
                                        std::sin(betas[ib].beta)});
        cc_unit_[ib] = cc_norm(g, sigma);
    }

    const int J = opt.theta_nodes;
    const double wtheta = 2.0 * M_PI / J;

    nodes_.reserve(rho_nodes.size() * betas.size() * J);
    for (std::size_t ib = 0; ib < betas.size(); ++ib) {
        const double beta = betas[ib].beta;
        const double cb = std::max(0.0, std::cos(beta));
        const double sb = std::sin(beta);
        const double zfac = std::sqrt(cb);
        for (const auto& [rho, wr] : rho_nodes) {
            const double zr = rho * zfac;
            const double uu = rho * rho * sb;
            const double h1 =
                hk_eval(g, 1.0, Point(std::vector<double>{zr, 0.0, uu}), hk);
            const double base_w =
                wr * betas[ib].weight * wtheta * rho * rho * rho * h1;
            if (base_w == 0.0 && h1 == 0.0) continue;
            for (int j = 0; j < J; ++j) {
                const double th = wtheta * j;
                GridNode nd;
                nd.y1 = zr * std::cos(th);
                nd.y2 = zr * std::sin(th);
                nd.u = uu;
                nd.w = base_w;
                nd.rho = rho;
                nd.ibeta = static_cast<int>(ib);
                nodes_.push_back(nd);
            }
        }
    }
}

double GaugePolarGrid::pairwise_sum_vec(const std::vector<double>& v) {
    return pairwise_sum(v);
}

double GaugePolarGrid::moment(const std::vector<int>& gamma) const {
    if (gamma.size() != 3)
        throw std::invalid_argument("GaugePolarGrid::moment: gamma must have length 3");
    return integrate([&](const GridNode& nd) {
        double m = 1.0;
        for (int k = 0; k < gamma[0]; ++k) m *= nd.y1;
        for (int k = 0; k < gamma[1]; ++k) m *= nd.y2;
        for (int k = 0; k < gamma[2]; ++k) m *= nd.u;
        return m;
    });
}

std::shared_ptr<const GaugePolarGrid> GaugePolarGrid::shared(
    const GroupConfig& g, const GaugeGridOptions& opt) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const GaugePolarGrid>> cache;
    std::ostringstream key;
    key << g.n << "|" << opt.rho_nodes_per_panel << "|" << opt.theta_nodes << "|"
        << opt.beta_central_panels << "|" << opt.beta_graded_panels << "|"
        << opt.beta_nodes_per_panel << "|" << opt.rho_max << "|"
        << opt.rho_dyadic_levels << "|" << opt.rho_linear_width;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key.str());
    if (it == cache.end())
        it = cache.emplace(key.str(), std::make_shared<GaugePolarGrid>(g, opt))
                 .first;
    return it->second;
}

// ---------------------------------------------------------------------------
// Moment tables.

namespace {

void enumerate_even_gammas(int q, int max_weight,
                           std::vector<std::vector<int>>& out) {
    // componentwise-even exponents with homogeneous weight <= max_weight
    // (center exponent counts twice)
    std::vector<int> cur(q, 0);
    std::function<void(int, int)> rec = [&](int pos, int wleft) {
        if (pos == q) {
            out.push_back(cur);
            return;
        }
        const int per_unit = (pos == q - 1) ? 2 : 1;
        for (int e = 0; per_unit * e <= wleft; e += 2) {
            cur[pos] = e;
            rec(pos + 1, wleft - per_unit * e);
        }
        cur[pos] = 0;
    };
    rec(0, max_weight);
}

}  // namespace

double MomentTable::get(const std::vector<int>& gamma) const {
    auto it = mu.find(gamma);
    if (it == mu.end())
        throw std::out_of_range("MomentTable: gamma not tabulated");
    return it->second;
}

MomentTable moment_table_quadrature(const GroupConfig& g,
                                    const GaugePolarGrid& grid, int max_weight) {
    MomentTable t;
    t.n = g.n;
    t.max_weight = max_weight;
    t.source = "quadrature";
    std::vector<std::vector<int>> gammas;
    enumerate_even_gammas(g.dim(), max_weight, gammas);
    for (const auto& gamma : gammas) {
        t.mu[gamma] = grid.moment(gamma);
        t.err[gamma] = 0.0;
    }
    return t;
}

MomentTable moment_table_mc(const GroupConfig& g, const std::vector<Point>& cloud,
                            int max_weight) {
    MomentTable t;
    t.n = g.n;
    t.max_weight = max_weight;
    t.source = "mc";
    std::vector<std::vector<int>> gammas;
    enumerate_even_gammas(g.dim(), max_weight, gammas);
    const std::int64_t N = static_cast<std::int64_t>(cloud.size());
    constexpr std::int64_t B = 8192;
    const std::int64_t nblocks = (N + B - 1) / B;
    std::vector<double> b1(nblocks), b2(nblocks);
    for (const auto& gamma : gammas) {
        for (std::int64_t b = 0; b < nblocks; ++b) {
            const std::int64_t lo = b * B, hi = std::min(N, lo + B);
            double a1 = 0.0, a2 = 0.0;
            for (std::int64_t p = lo; p < hi; ++p) {
                const double v = eval_monomial(cloud[p], gamma);
                a1 += v;
                a2 += v * v;
            }
            b1[b] = a1;
            b2[b] = a2;
        }
        const double m1 = pairwise_sum(b1) / N;
        const double m2 = pairwise_sum(b2) / N;
        t.mu[gamma] = m1;
        t.err[gamma] = std::sqrt(std::max(0.0, m2 - m1 * m1) / N);
    }
    return t;
}

}  // namespace subfrac
