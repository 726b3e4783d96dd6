// Heat-kernel checks.  Closed-form anchors (Gaveau's formula specializes on
// the center axis to (1/16) sech^2(pi u / 2) at t = 1, n = 1), an
// independent fixed-step Simpson evaluation of the lambda integral, scaling
// and symmetry laws, and agreement between the three representations
// (pointwise quadrature, volume grid, Monte Carlo).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "subfrac/heatkernel.hpp"
#include "subfrac/hgroup.hpp"
#include "subfrac/rng.hpp"
#include "subfrac/testfun.hpp"

using namespace subfrac;

namespace {

Point pt(std::vector<double> v) { return Point(std::move(v)); }

// Independent oracle: fixed-step composite Simpson on the lambda integral,
// sharing no code with hk_eval's panel march.
double hk_simpson(int n, double t, double zsq, double u, double lam_max,
                  double step) {
    auto f = [&](double lam) {
        double ratio = (lam < 1e-8) ? 1.0 / t : lam / std::sinh(lam * t);
        double coth = (lam < 1e-8) ? 1.0 / (lam * t + lam * lam * lam * t * t * t / 3.0)
                                   : std::cosh(lam * t) / std::sinh(lam * t);
        if (lam < 1e-8) {
            // Removable limit: lam*coth(lam t) -> 1/t.
            return std::pow(1.0 / (4.0 * std::numbers::pi * t),
                            static_cast<double>(n)) *
                   std::exp(-zsq / (4.0 * t)) / std::numbers::pi;
        }
        double envelope = std::pow(ratio / (4.0 * std::numbers::pi),
                                   static_cast<double>(n));
        return envelope * std::exp(-0.25 * lam * zsq * coth) *
               std::cos(lam * u) / std::numbers::pi;
    };
    long m = static_cast<long>(lam_max / step);
    if (m % 2 == 1) ++m;
    double s = f(0.0) + f(m * step);
    for (long k = 1; k < m; ++k) s += f(k * step) * ((k % 2 == 1) ? 4.0 : 2.0);
    return s * step / 3.0;
}

}  // namespace

TEST_CASE("closed-form anchors at the origin and on the center axis") {
    GroupConfig g(1);
    CHECK(hk_eval(g, 1.0, pt({0, 0, 0})) ==
          doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    // h(1,(0,0,u)) = (1/16) sech^2(pi u / 2).
    for (double u : {0.25, 0.5, 1.0, 2.0, 5.0}) {
        double want = 1.0 / 16.0 /
                      std::pow(std::cosh(0.5 * std::numbers::pi * u), 2);
        CHECK(hk_eval(g, 1.0, pt({0, 0, u})) ==
              doctest::Approx(want).epsilon(1e-10));
    }
    // Far out on the axis the value is still the sech^2 tail...
    double u10 = 1.0 / 16.0 / std::pow(std::cosh(5.0 * std::numbers::pi), 2);
    CHECK(hk_eval(g, 1.0, pt({0, 0, 10.0})) ==
          doctest::Approx(u10).epsilon(1e-3));
    // ...and beyond the double-precision noise floor the evaluation reports
    // a clean zero instead of cancellation dust (true value ~ 1e-178).
    CHECK(hk_eval(g, 1.0, pt({0, 0, 130.0})) == 0.0);
    CHECK_THROWS_AS(hk_eval(g, 0.0, pt({0, 0, 0})), std::invalid_argument);
}

TEST_CASE("panel quadrature agrees with an independent Simpson evaluation") {
    GroupConfig g1(1);
    // Generic off-axis points, t = 1 and t != 1.
    CHECK(hk_eval(g1, 1.0, pt({1.0, 0.5, 0.3})) ==
          doctest::Approx(hk_simpson(1, 1.0, 1.25, 0.3, 80.0, 5e-4))
              .epsilon(1e-8));
    CHECK(hk_eval(g1, 0.7, pt({0.4, -0.8, -0.6})) ==
          doctest::Approx(hk_simpson(1, 0.7, 0.8, -0.6, 120.0, 5e-4))
              .epsilon(1e-8));
    GroupConfig g2(2);
    CHECK(hk_eval(g2, 1.0, pt({0.5, 0.3, -0.2, 0.1, 0.4})) ==
          doctest::Approx(hk_simpson(2, 1.0, 0.39, 0.4, 60.0, 5e-4))
              .epsilon(1e-8));
}

TEST_CASE("parabolic scaling and symmetries") {
    for (int n : {1, 2}) {
        GroupConfig g(n);
        const double Qhalf = 0.5 * g.homogeneous_dim();
        Philox rng(314, static_cast<std::uint64_t>(n));
        for (int rep = 0; rep < 8; ++rep) {
            Point x(static_cast<std::size_t>(g.dim()));
            for (int i = 0; i < g.dim(); ++i)
                x[static_cast<std::size_t>(i)] = 1.6 * (2 * rng.next_unit() - 1);
            double t = 0.5 + 1.5 * rng.next_unit();
            // h(t,x) = t^{-Q/2} h(1, delta_{1/sqrt t} x)
            double lhs = hk_eval(g, t, x);
            double rhs = std::pow(t, -Qhalf) *
                         hk_eval(g, 1.0, dilate(g, 1.0 / std::sqrt(t), x));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
            // Inversion symmetry.
            CHECK(lhs == doctest::Approx(hk_eval(g, t, group_inv(g, x)))
                             .epsilon(1e-12));
        }
    }
    // Horizontal rotations are automorphisms: h is invariant under them.
    GroupConfig g(1);
    Point x = pt({0.9, -0.4, 0.35});
    double base = hk_eval(g, 1.0, x);
    for (double th : {0.3, 1.1, 2.7}) {
        double c = std::cos(th), s = std::sin(th);
        Point r = pt({c * x[0] - s * x[1], s * x[0] + c * x[1], x[2]});
        CHECK(hk_eval(g, 1.0, r) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("volume grid integrates the kernel to unit mass and exact moments") {
    GroupConfig g(1);
    auto grid = GaugePolarGrid::shared(g, GaugeGridOptions{});
    CHECK(grid->moment({0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-9));
    // E[y_1^2] = 2, E[u^2] = 1 at t = 1 (n = 1).
    CHECK(grid->moment({2, 0, 0}) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(grid->moment({0, 2, 0}) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(grid->moment({0, 0, 2}) == doctest::Approx(1.0).epsilon(1e-7));
    // Odd moments vanish by symmetry (grid is symmetric by construction).
    CHECK(std::abs(grid->moment({1, 0, 0})) < 1e-10);
    CHECK(std::abs(grid->moment({0, 1, 1})) < 1e-10);
    // The quadrature moment table exposes the same numbers keyed by gamma.
    MomentTable tab = moment_table_quadrature(g, *grid, 6);
    CHECK(tab.source == "quadrature");
    CHECK(tab.get({4, 0, 0}) == doctest::Approx(12.0).epsilon(1e-7));
    CHECK(tab.get({6, 0, 0}) == doctest::Approx(120.0).epsilon(1e-6));
    CHECK(tab.get({2, 0, 2}) == doctest::Approx(10.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("sampler reproducibility and moment agreement with the grid") {
    GroupConfig g(1);
    SamplerSpec spec;
    spec.paths = 60000;
    spec.steps = 800;
    spec.t = 1.0;
    spec.seed = 777;
    auto cloud1 = sample_cloud(g, spec);
    auto cloud2 = sample_cloud(g, spec);
    REQUIRE(cloud1.size() == static_cast<std::size_t>(spec.paths));
    bool identical = true;
    for (std::size_t i = 0; i < cloud1.size(); ++i)
        for (std::size_t k = 0; k < 3; ++k)
            identical = identical && (cloud1[i][k] == cloud2[i][k]);
    CHECK(identical);  // bitwise replay under the same spec
    spec.seed = 778;
    auto cloud3 = sample_cloud(g, spec);
    CHECK(cloud3[0][0] != cloud1[0][0]);

    DiffusionMoments m = simulate_moments(g, spec);
    // Exact diffusion moments at t=1: E[x_i^2]=2, E[x1^4]=12, E[u^2]=1,
    // E[x1^6]=120, E[x1^2 u^2]=10/3.  Allow 5 SE plus a 1.5% slack for the
    // O(1/steps) discretization bias of the center coordinate.
    auto within = [](double got, double want, double se, double slack) {
        return std::abs(got - want) <= 5.0 * se + slack * std::abs(want);
    };
    CHECK(within(m.sum_horiz_sq, 4.0, m.se_sum_horiz_sq, 0.002));
    CHECK(within(m.x1_4, 12.0, m.se_x1_4, 0.005));
    CHECK(within(m.x1_6, 120.0, m.se_x1_6, 0.01));
    CHECK(within(m.u_2, 1.0, m.se_u_2, 0.015));
    CHECK(within(m.x1_2_u_2, 10.0 / 3.0, m.se_x1_2_u_2, 0.015));

    // hk_moment_mc: odd monomials short-circuit to an exact zero.
    MomentResult odd = hk_moment_mc(g, {1, 2, 0}, 1.0, spec);
    CHECK(odd.symmetry_zero);
    CHECK(odd.value == 0.0);
    CHECK(odd.std_error == 0.0);
    // Even monomial at t = 2: scaling gives E[y1^2] = 2t = 4.
    MomentResult even = hk_moment_mc(g, {2, 0, 0}, 2.0, spec);
    CHECK_FALSE(even.symmetry_zero);
    CHECK(std::abs(even.value - 4.0) <= 5.0 * even.std_error + 0.01);
}

TEST_CASE("heat semigroup: short-time limit and quadrature cross-check") {
    GroupConfig g(1);
    SamplerSpec spec;
    spec.paths = 50000;
    spec.steps = 600;
    spec.seed = 91;
    auto cloud = sample_cloud(g, spec);
    auto phi = make_gaussian(1.0);
    Point x = pt({0.4, 0.2, -0.1});
    // t -> 0 recovers phi(x).
    MeanResult tiny = heat_semigroup(g, *phi, x, 1e-6, cloud);
    CHECK(tiny.value == doctest::Approx(phi->value(g, x)).epsilon(5e-3));
    // At t = 1, MC expectation matches the grid integral of phi(x . y).
    auto grid = GaugePolarGrid::shared(g, GaugeGridOptions{});
    double quad = grid->integrate([&](const GridNode& nd) {
        return phi->value(g, group_mul(g, x, pt({nd.y1, nd.y2, nd.u})));
    });
    MeanResult mc = heat_semigroup(g, *phi, x, 1.0, cloud);
    CHECK(std::abs(mc.value - quad) <= 5.0 * mc.std_error + 2e-3);
}

TEST_CASE("PDE residual shrinks under stencil refinement") {
    GroupConfig g(1);
    Point x = pt({0.6, -0.3, 0.25});
    const double t = 0.9;
    auto frame_lap_fd = [&](double eps) {
        double acc = 0.0;
        for (int i = 0; i < 2; ++i) {
            Point e(3);
            e[static_cast<std::size_t>(i)] = eps;
            Point em(3);
            em[static_cast<std::size_t>(i)] = -eps;
            acc += (hk_eval(g, t, group_mul(g, x, e)) -
                    2.0 * hk_eval(g, t, x) +
                    hk_eval(g, t, group_mul(g, x, em))) / (eps * eps);
        }
        return acc;
    };
    auto residual = [&](double eps) {
        double dt = (hk_eval(g, t + eps, x) - hk_eval(g, t - eps, x)) /
                    (2.0 * eps);
        return std::abs(dt - frame_lap_fd(eps));
    };
    double r1 = residual(0.1), r2 = residual(0.05);
    // Second-order stencils: refinement by 2 should cut the residual by ~4.
    CHECK(r2 < r1);
    CHECK(std::log2(r1 / r2) == doctest::Approx(2.0).epsilon(0.35));
}
