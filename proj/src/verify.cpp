#include "subfrac/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "subfrac/ccnorm.hpp"
#include "subfrac/fraclap.hpp"
#include "subfrac/heatkernel.hpp"
#include "subfrac/hgroup.hpp"
#include "subfrac/riesz.hpp"
#include "subfrac/rng.hpp"
#include "subfrac/testfun.hpp"

namespace subfrac {

namespace {

CheckResult rel_check(std::string id, double value, double target, double rel_tol,
                      double err = 0.0, std::string note = "") {
    CheckResult c;
    c.id = std::move(id);
    c.value = value;
    c.target = target;
    c.tol = rel_tol * std::abs(target);
    c.err = err;
    c.pass = std::abs(value - target) <= c.tol;
    c.note = std::move(note);
    return c;
}

CheckResult abs_check(std::string id, double value, double target, double abs_tol,
                      double err = 0.0, std::string note = "") {
    CheckResult c;
    c.id = std::move(id);
    c.value = value;
    c.target = target;
    c.tol = abs_tol;
    c.err = err;
    c.pass = std::abs(value - target) <= c.tol;
    c.note = std::move(note);
    return c;
}

Point pt3(double a, double b, double c) { return Point(std::vector<double>{a, b, c}); }

std::string fmt_pt(const Point& x) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ")";
    return os.str();
}

double lsq_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return sxy / sxx;
}

// ---------------------------------------------------------------------------
// C1: diffusion moments, Monte Carlo.

SuiteResult suite_moments(const RunConfig& cfg) {
    SuiteResult r;
    r.suite = "moments";
    r.criterion = "C1";
    const GroupConfig g(cfg.n);
    SamplerSpec spec = sampler_spec(cfg);
    spec.t = 1.0;
    const DiffusionMoments dm = simulate_moments(g, spec);
    const double n = static_cast<double>(cfg.n);
    std::ostringstream sm;
    sm << "n=" << cfg.n << " paths=" << spec.paths << " steps=" << spec.steps
       << " seed=" << spec.seed;
    r.checks.push_back(rel_check("sum_i E[x_i^2]", dm.sum_horiz_sq, 4.0 * n, 0.01,
                                 dm.se_sum_horiz_sq, sm.str()));
    r.checks.push_back(rel_check("E[x_1^4]", dm.x1_4, 12.0, 0.02, dm.se_x1_4));
    r.checks.push_back(rel_check("E[u^2]", dm.u_2, n, 0.02, dm.se_u_2));
    r.checks.push_back(rel_check("E[x_1^6]", dm.x1_6, 120.0, 0.05, dm.se_x1_6));
    r.checks.push_back(rel_check("E[x_1^2 u^2]", dm.x1_2_u_2,
                                 (2.0 / 3.0) * (5.0 + 3.0 * (n - 1.0)), 0.05,
                                 dm.se_x1_2_u_2));
    return r;
}

// ---------------------------------------------------------------------------
// C2: the same five moments by deterministic quadrature (n = 1).

SuiteResult suite_moments_quad(const RunConfig& cfg) {
    SuiteResult r;
    r.suite = "moments_quad";
    r.criterion = "C2";
    const GroupConfig g(1);
    auto grid = GaugePolarGrid::shared(g, grid_options(cfg));
    const MomentTable mt = moment_table_quadrature(g, *grid, 6);
    const double sum2 = mt.get({2, 0, 0}) + mt.get({0, 2, 0});
    r.checks.push_back(rel_check("sum_i E[x_i^2]", sum2, 4.0, 0.005, 0.0,
                                 "n=1 gauge-polar grid"));
    r.checks.push_back(rel_check("E[x_1^4]", mt.get({4, 0, 0}), 12.0, 0.005));
    r.checks.push_back(rel_check("E[u^2]", mt.get({0, 0, 2}), 1.0, 0.005));
    r.checks.push_back(rel_check("E[x_1^6]", mt.get({6, 0, 0}), 120.0, 0.005));
    r.checks.push_back(
        rel_check("E[x_1^2 u^2]", mt.get({2, 0, 2}), 10.0 / 3.0, 0.005));
    return r;
}

// ---------------------------------------------------------------------------
// C3: kernel invariants (mass, homogeneity, symmetry, PDE residual order).

SuiteResult suite_kernel(const RunConfig& cfg) {
    SuiteResult r;
    r.suite = "kernel";
    r.criterion = "C3";
    const GroupConfig g(1);
    const double Q = static_cast<double>(g.homogeneous_dim());
    const HkOptions hk = hk_options(cfg);

    auto grid = GaugePolarGrid::shared(g, grid_options(cfg));
    r.checks.push_back(abs_check("grid mass of h(1,.)", grid->moment({0, 0, 0}),
                                 1.0, 1e-4, 0.0, "n=1"));

    {
        Philox rng(cfg.seed, 0x486f6d6fULL);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const double t = 0.5 + 1.5 * rng.next_unit();
            const double s = 0.6 + 1.2 * rng.next_unit();
            const Point x = pt3(-2.0 + 4.0 * rng.next_unit(),
                                -2.0 + 4.0 * rng.next_unit(),
                                -2.0 + 4.0 * rng.next_unit());
            const double lhs = hk_eval(g, s * s * t, dilate(g, s, x), hk);
            const double rhs = std::pow(s, -Q) * hk_eval(g, t, x, hk);
            worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
        }
        r.checks.push_back(abs_check("homogeneity max rel gap (100 triples)", worst,
                                     0.0, 1e-10));
    }

    {
        Philox rng(cfg.seed, 0x53796d6dULL);
        double worst = 0.0;
        for (int k = 0; k < 25; ++k) {
            const double t = 0.5 + 1.5 * rng.next_unit();
            const Point x = pt3(-2.0 + 4.0 * rng.next_unit(),
                                -2.0 + 4.0 * rng.next_unit(),
                                -2.0 + 4.0 * rng.next_unit());
            const double a = hk_eval(g, t, x, hk);
            const double b = hk_eval(g, t, group_inv(g, x), hk);
            worst = std::max(worst, std::abs(a - b) / std::abs(a));
        }
        r.checks.push_back(
            abs_check("symmetry max rel gap (25 points)", worst, 0.0, 1e-10));
    }

    // Heat-equation residual with all derivatives replaced by central
    // differences at step eps: residual(eps) = C eps^2 + O(eps^4), so halving
    // eps must shrink it by ~4 (slope 2 on a log2 scale).
    struct PdePoint {
        double t;
        Point x;
    };
    const PdePoint pts[5] = {{1.0, pt3(0.5, 0.3, 0.2)},
                             {0.8, pt3(1.0, 0.0, 0.4)},
                             {1.2, pt3(0.3, -0.7, -0.3)},
                             {1.0, pt3(0.9, 0.5, 0.0)},
                             {0.9, pt3(0.2, 0.1, 0.8)}};
    auto residual = [&](double t, const Point& x, double eps) {
        const double dt =
            (hk_eval(g, t + eps, x, hk) - hk_eval(g, t - eps, x, hk)) / (2.0 * eps);
        const double h0 = hk_eval(g, t, x, hk);
        double lap = 0.0;  // sum_i X_i^2 h by frame-direction second differences
        for (int i = 0; i < g.hdim(); ++i) {
            Point ep(static_cast<std::size_t>(g.dim()));
            ep[i] = eps;
            Point em(static_cast<std::size_t>(g.dim()));
            em[i] = -eps;
            lap += (hk_eval(g, t, group_mul(g, x, ep), hk) - 2.0 * h0 +
                    hk_eval(g, t, group_mul(g, x, em), hk)) /
                   (eps * eps);
        }
        return std::abs(dt - lap);  // d/dt h = sum_i X_i^2 h
    };
    for (int k = 0; k < 5; ++k) {
        const double r1 = residual(pts[k].t, pts[k].x, 0.1);
        const double r2 = residual(pts[k].t, pts[k].x, 0.05);
        const double slope = std::log2(r1 / r2);
        r.checks.push_back(abs_check("PDE residual slope at " + fmt_pt(pts[k].x),
                                     slope, 2.0, 0.3, 0.0,
                                     "t=" + std::to_string(pts[k].t)));
    }
    return r;
}

// ---------------------------------------------------------------------------
// C4: spectral anchors sigma(0) = 2 and d(-2) = 4.

SuiteResult suite_spectral(const RunConfig& cfg) {
    SuiteResult r;
    r.suite = "spectral";
    r.criterion = "C4";
    const GroupConfig g(1);
    auto grid = GaugePolarGrid::shared(g, grid_options(cfg));
    const SpectralResult s0 = sigma_quad(g, 0.0, *grid);
    r.checks.push_back(
        abs_check("sigma(0)", s0.value, 2.0, 1e-3, s0.std_error, "quadrature"));

    SamplerSpec spec = sampler_spec(cfg);
    spec.t = 1.0;
    const std::vector<Point> cloud = sample_cloud(g, spec);
    const SpectralResult d2 = d_alpha_mc(g, -2.0, 0, cloud);
    std::ostringstream note;
    note << "mc paths=" << spec.paths << " + cc norms";
    r.checks.push_back(
        rel_check("d(-2)", d2.value, 4.0, 0.01, d2.std_error, note.str()));
    return r;
}

// ---------------------------------------------------------------------------
// C5: fourth-moment ratio on the cc sphere (volume form), = 3 exactly.

SuiteResult suite_bmoment(const RunConfig& cfg) {
    SuiteResult r;
    r.suite = "bmoment";
    r.criterion = "C5";
    const GroupConfig g(cfg.n);
    SamplerSpec spec = sampler_spec(cfg);
    spec.t = 1.0;
    const std::vector<Point> cloud = sample_cloud(g, spec);
    std::vector<int> g4(static_cast<std::size_t>(g.dim()), 0);
    g4[0] = 4;
    std::vector<int> g22(static_cast<std::size_t>(g.dim()), 0);
    g22[0] = 2;
    g22[1] = 2;
    for (double alpha : {-4.0, 0.0, 2.0}) {
        const SpectralResult b4 = boundary_moment_mc(g, g4, alpha, cloud);
        const SpectralResult b22 = boundary_moment_mc(g, g22, alpha, cloud);
        const double ratio = b4.value / b22.value;
        const double se =
            std::abs(ratio) * std::hypot(b4.std_error / b4.value,
                                         b22.std_error / b22.value);
        std::ostringstream id;
        id << "B(4,0,..)/B(2,2,0,..) at alpha=" << alpha;
        std::ostringstream note;
        note << "n=" << cfg.n << " paths=" << spec.paths;
        r.checks.push_back(rel_check(id.str(), ratio, 3.0, 0.01, se, note.str()));
    }
    return r;
}

// ---------------------------------------------------------------------------
// C6: psi(x, -2m) limits against exact jet values of L^m phi.

SuiteResult suite_psi_limits(const RunConfig& cfg) {
    SuiteResult r;
    r.suite = "psi_limits";
    r.criterion = "C6";
    const GroupConfig g(1);
    const TestFunctionPtr phi = make_gaussian(1.0);
    const PsiOptions opt = psi_options(cfg);
    const Point pts[3] = {pt3(0.0, 0.0, 0.0), pt3(0.5, 0.2, 0.1),
                          pt3(-0.3, 0.4, -0.2)};
    const double rel_tol[4] = {1e-3, 0.01, 0.02, 0.05};
    for (int m = 0; m <= 3; ++m) {
        for (const Point& x : pts) {
            const double target = sublaplacian_power(g, *phi, m, x);
            const ContinuityResult c = strip_continuity_check(g, phi, x, m, opt);
            std::ostringstream id;
            id << "psi(" << fmt_pt(x) << ", " << -2 * m << ") vs L^" << m << " phi";
            r.checks.push_back(rel_check(id.str(), c.extrapolated, target,
                                         rel_tol[m], std::abs(c.gap),
                                         "Richardson limit across the pole"));
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// C7: spatial route vs Balakrishnan time route.

SuiteResult suite_routes(const RunConfig& cfg) {
    SuiteResult r;
    r.suite = "routes";
    r.criterion = "C7";
    const GroupConfig g(1);
    const TestFunctionPtr phi = make_gaussian(1.0);
    const PsiOptions opt = psi_options(cfg);
    const Point pts[3] = {pt3(0.4, 0.1, 0.2), pt3(-0.2, 0.5, -0.1),
                          pt3(0.1, -0.3, 0.3)};
    for (double alpha : {-1.0, -3.0, 1.0}) {
        for (const Point& x : pts) {
            const PsiResult s = psi_eval(g, *phi, x, alpha, opt, "spatial");
            const PsiResult t = psi_eval(g, *phi, x, alpha, opt, "time");
            const double scale = std::max(std::abs(s.value), std::abs(t.value));
            std::ostringstream id;
            id << "spatial vs time, alpha=" << alpha << " at " << fmt_pt(x);
            CheckResult c;
            c.id = id.str();
            c.value = s.value;
            c.target = t.value;
            c.err = std::hypot(s.std_error, t.std_error);
            c.tol = 0.02 * scale + 3.0 * c.err;
            c.pass = std::abs(s.value - t.value) <= c.tol;
            c.note = "2% of scale + 3x joint error";
            r.checks.push_back(c);
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// C8: semigroup property through nested evaluation.

SuiteResult suite_semigroup(const RunConfig& cfg) {
    SuiteResult r;
    r.suite = "semigroup";
    r.criterion = "C8";
    const GroupConfig g(1);
    const TestFunctionPtr phi = make_gaussian(1.0);
    const PsiOptions opt = psi_options(cfg);
    const Point x0 = pt3(0.3, 0.2, 0.1);

    const SemigroupResult a = semigroup_check(g, phi, 0.5, 0.5, x0, opt);
    CheckResult c1;
    c1.id = "L^1/2(L^1/2 phi) vs L phi at " + fmt_pt(x0);
    c1.value = a.lhs;
    c1.target = a.rhs;
    c1.tol = 0.05 * std::abs(a.rhs);
    c1.err = std::hypot(a.lhs_detail.std_error, a.rhs_detail.std_error);
    c1.pass = std::abs(a.lhs - a.rhs) <= c1.tol;
    c1.note = "outer " + a.lhs_detail.route + " over tabulated inner field";
    r.checks.push_back(c1);

    const SemigroupResult b = semigroup_check(g, phi, 1.0, -1.0, x0, opt);
    CheckResult c2;
    c2.id = "L(psi(., 2)) vs phi at " + fmt_pt(x0);
    c2.value = b.lhs;
    c2.target = b.rhs;
    c2.tol = 0.02 * std::abs(b.rhs);
    c2.err = std::hypot(b.lhs_detail.std_error, b.rhs_detail.std_error);
    c2.pass = std::abs(b.lhs - b.rhs) <= c2.tol;
    c2.note = "frame finite differences over psi(., 2)";
    r.checks.push_back(c2);
    return r;
}

// ---------------------------------------------------------------------------
// C9: homogeneous decay exponent of psi along a dilation ray.

SuiteResult suite_decay(const RunConfig& cfg) {
    SuiteResult r;
    r.suite = "decay";
    r.criterion = "C9";
    const GroupConfig g(1);
    const double Q = static_cast<double>(g.homogeneous_dim());
    const TestFunctionPtr phi = make_gaussian(1.0);
    const PsiOptions opt = psi_options(cfg);

    Point xhat = pt3(0.8, 0.3, 0.2);
    xhat = dilate(g, 1.0 / cc_norm(g, xhat), xhat);  // now ||xhat||_c = 1

    std::vector<double> radii;
    for (int k = 0; k <= 4; ++k) radii.push_back(5.0 * std::pow(8.0, k / 4.0));

    for (double alpha : {1.0, -1.0, -3.0}) {
        std::vector<double> lx, ly;
        for (double rad : radii) {
            const Point xk = dilate(g, rad, xhat);
            const PsiResult p = psi_eval(g, *phi, xk, alpha, opt);
            lx.push_back(std::log(rad));
            ly.push_back(std::log(std::abs(p.value)));
        }
        const double slope = lsq_slope(lx, ly);
        std::ostringstream id;
        id << "log|psi| slope, alpha=" << alpha;
        r.checks.push_back(abs_check(id.str(), slope, alpha - Q, 0.2, 0.0,
                                     "||x||_c from 5 to 40"));
    }
    return r;
}

// ---------------------------------------------------------------------------
// C10: convolution identity P_1 * P_1 = P_2.

SuiteResult suite_conv(const RunConfig& cfg) {
    SuiteResult r;
    r.suite = "conv";
    r.criterion = "C10";
    const GroupConfig g(1);
    ConvOptions co;
    co.samples = cfg.paths;
    co.seed = cfg.seed;
    co.radial = radial_options(cfg);
    const Point x = pt3(0.7, 0.2, 0.15);
    const ConvResult cr = convolution_check(g, 1.0, 1.0, x, co);
    CheckResult c;
    c.id = "P_1 * P_1 vs P_2 at " + fmt_pt(x);
    c.value = cr.rhs;
    c.target = cr.lhs;
    c.tol = 0.05 * std::abs(cr.lhs);
    c.err = cr.rhs_err;
    c.pass = std::abs(cr.rhs - cr.lhs) <= c.tol;
    std::ostringstream note;
    note << "mc samples=" << co.samples << " rel gap=" << cr.rel_gap;
    c.note = note.str();
    r.checks.push_back(c);
    return r;
}

// ---------------------------------------------------------------------------
// C11: sixth-order frame-derivative reorganization identity, exact jets.
//
// For i != j with [Z_i, Z_j] = +-T, the sum of all 15 orderings of the
// word multiset {Z_i x4, Z_j x2} equals
//   5 Z_i^4 Z_j^2 + 5 Z_i^2 Z_j^2 Z_i^2 + 5 Z_j^2 Z_i^4 - 25 T^2 Z_i^2,
// and the T^2 term drops when the pair commutes.

SuiteResult suite_commutator(const RunConfig& cfg) {
    SuiteResult r;
    r.suite = "commutator";
    r.criterion = "C11";
    const GroupConfig g(cfg.n);
    const TestFunctionPtr phi = make_gaussian(0.8);
    const int tidx = g.hdim();  // letter code of the center field T
    Philox rng(cfg.seed, 0x436f6d6dULL);

    for (int k = 0; k < 10; ++k) {
        Point x(static_cast<std::size_t>(g.dim()));
        for (int c = 0; c < g.hdim(); ++c) x[c] = -1.2 + 2.4 * rng.next_unit();
        x[g.hdim()] = -1.0 + 2.0 * rng.next_unit();

        int i = k % g.n;
        int j = i + g.n;  // [Z_i, Z_j] = T
        if (k & 1) std::swap(i, j);

        std::vector<int> word = {i, i, i, i, j, j};
        std::sort(word.begin(), word.end());
        double lhs = 0.0, scale = 0.0;
        int nperm = 0;
        do {
            const double v = apply_word(g, *phi, x, word);
            lhs += v;
            scale += std::abs(v);
            ++nperm;
        } while (std::next_permutation(word.begin(), word.end()));

        const double t2zi2 = apply_word(g, *phi, x, {tidx, tidx, i, i});
        const double rhs = 5.0 * apply_word(g, *phi, x, {i, i, i, i, j, j}) +
                           5.0 * apply_word(g, *phi, x, {i, i, j, j, i, i}) +
                           5.0 * apply_word(g, *phi, x, {j, j, i, i, i, i}) -
                           25.0 * t2zi2;
        scale += 25.0 * std::abs(t2zi2);

        const double resid = std::abs(lhs - rhs) / std::max(scale, 1e-30);
        std::ostringstream id;
        id << "perm-sum identity (i,j)=(" << i + 1 << "," << j + 1 << ") at "
           << fmt_pt(x);
        r.checks.push_back(abs_check(id.str(), resid, 0.0, 1e-8, 0.0,
                                     std::to_string(nperm) + " orderings"));
    }
    return r;
}

// ---------------------------------------------------------------------------
// C12: moment collapse of the anisotropic pole-formula coefficients.

SuiteResult suite_collapse(const RunConfig& cfg) {
    SuiteResult r;
    r.suite = "collapse";
    r.criterion = "C12";
    const GroupConfig g(cfg.n);
    MomentTable mt;
    std::string src;
    if (cfg.n == 1) {
        auto grid = GaugePolarGrid::shared(g, grid_options(cfg));
        mt = moment_table_quadrature(g, *grid, 6);
        src = "measured: quadrature";
    } else {
        SamplerSpec spec = sampler_spec(cfg);
        spec.t = 1.0;
        const std::vector<Point> cloud = sample_cloud(g, spec);
        mt = moment_table_mc(g, cloud, 6);
        std::ostringstream os;
        os << "measured: mc paths=" << spec.paths;
        src = os.str();
    }
    const CollapseResult cr = moment_collapse(g, mt);
    // Quadrature moments carry no sampling error; their budget is the grid
    // truncation (observed orders of magnitude below this bound).
    const double tol2 =
        (cfg.n == 1) ? 1e-5 : std::max(3.0 * cr.t2_err, 1e-12);
    const double tol2l =
        (cfg.n == 1) ? 1e-5 : std::max(3.0 * cr.t2l_err, 1e-12);
    r.checks.push_back(abs_check("T^2 phi coefficient combination (m=2)",
                                 cr.t2_comb, 0.0, tol2, cr.t2_err, src));
    r.checks.push_back(abs_check("T^2 L phi coefficient combination (m=3)",
                                 cr.t2l_comb, 0.0, tol2l, cr.t2l_err, src));
    return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "moments", "moments_quad", "kernel",    "spectral",
        "bmoment", "psi_limits",   "routes",    "semigroup",
        "decay",   "conv",         "commutator", "collapse"};
    return names;
}

SuiteResult run_suite(const std::string& name, const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult r;
    if (name == "moments")
        r = suite_moments(cfg);
    else if (name == "moments_quad")
        r = suite_moments_quad(cfg);
    else if (name == "kernel")
        r = suite_kernel(cfg);
    else if (name == "spectral")
        r = suite_spectral(cfg);
    else if (name == "bmoment")
        r = suite_bmoment(cfg);
    else if (name == "psi_limits")
        r = suite_psi_limits(cfg);
    else if (name == "routes")
        r = suite_routes(cfg);
    else if (name == "semigroup")
        r = suite_semigroup(cfg);
    else if (name == "decay")
        r = suite_decay(cfg);
    else if (name == "conv")
        r = suite_conv(cfg);
    else if (name == "commutator")
        r = suite_commutator(cfg);
    else if (name == "collapse")
        r = suite_collapse(cfg);
    else
        throw std::invalid_argument("verify: unknown suite '" + name + "'");
    r.pass = true;
    for (const CheckResult& c : r.checks) r.pass = r.pass && c.pass;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
    return r;
}

std::string format_suite(const SuiteResult& r) {
    std::ostringstream os;
    char head[160];
    std::snprintf(head, sizeof(head), "[%s] %s %s  (%zu checks, %.1f s)\n",
                  r.criterion.c_str(), r.suite.c_str(),
                  r.pass ? "PASS" : "FAIL", r.checks.size(), r.seconds);
    os << head;
    for (const CheckResult& c : r.checks) {
        char line[512];
        std::snprintf(line, sizeof(line),
                      "  %-4s %-52s value=% .10g target=% .10g |diff|=%.3g tol=%.3g",
                      c.pass ? "ok" : "FAIL", c.id.c_str(), c.value, c.target,
                      std::abs(c.value - c.target), c.tol);
        os << line;
        if (c.err > 0.0) {
            char e[48];
            std::snprintf(e, sizeof(e), " err=%.2g", c.err);
            os << e;
        }
        if (!c.note.empty()) os << "  [" << c.note << "]";
        os << '\n';
    }
    return os.str();
}

}  // namespace subfrac
