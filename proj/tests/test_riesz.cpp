// Riesz-kernel layer.  Oracles: the standard library's tgamma for the
// Lanczos gamma, the closed-form fundamental solution of the sub-Laplacian
// on H^1 (Folland/Kaplan gauge form, constant fixed by the sech^2 center
// slice of the heat kernel), and a one-dimensional Simpson reduction of the
// center-axis profile for general alpha.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "subfrac/heatkernel.hpp"
#include "subfrac/hgroup.hpp"
#include "subfrac/riesz.hpp"
#include "subfrac/rng.hpp"

using namespace subfrac;

namespace {

Point pt(std::vector<double> v) { return Point(std::move(v)); }

// Simpson value of int_0^L s^{1 - alpha/2} sech^2(pi s / 2) ds.  With the
// center-axis slice h(t,(0,0,u)) = t^{-2} (1/16) sech^2(pi u/(2t)) this
// gives the exact one-dimensional reduction
//   I(alpha, (0,0,u)) = u^{alpha/2 - 2} / 16 * S(alpha),  u > 0.
double axis_profile_simpson(double alpha, double L = 40.0, double step = 1e-4) {
    // Substituting s = v^2 removes the integrable s^{1-alpha/2} singularity:
    // S = 2 int_0^{sqrt L} v^{3-alpha} sech^2(pi v^2 / 2) dv, smooth for
    // every alpha <= 3 used below.
    auto f = [&](double v) {
        double c = std::cosh(0.5 * std::numbers::pi * v * v);
        return 2.0 * std::pow(v, 3.0 - alpha) / (c * c);
    };
    const double vmax = std::sqrt(L);
    long m = static_cast<long>(vmax / step);
    if (m % 2 == 1) ++m;
    const double h = vmax / static_cast<double>(m);
    double acc = f(0.0) + f(vmax);
    for (long k = 1; k < m; ++k)
        acc += f(k * h) * ((k % 2 == 1) ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("gamma function against the standard library") {
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-13));
    CHECK(gamma_fn(-0.5) ==
          doctest::Approx(-2.0 * std::sqrt(std::numbers::pi)).epsilon(1e-13));
    Philox rng(31337, 0);
    for (int rep = 0; rep < 60; ++rep) {
        double z = -4.9 + 9.8 * rng.next_unit();
        if (std::abs(z - std::round(z)) < 0.05 && z < 0.5) continue;  // near poles
        CHECK(gamma_fn(z) == doctest::Approx(std::tgamma(z)).epsilon(1e-11));
    }
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-3.0), std::domain_error);
    CHECK(palpha_pole(0.0));
    CHECK(palpha_pole(-2.0));
    CHECK(palpha_pole(-8.0));
    CHECK_FALSE(palpha_pole(2.0));
    CHECK_FALSE(palpha_pole(-1.0));
    CHECK_FALSE(palpha_pole(-1.999999));
}

TEST_CASE("radial and direct-time profile forms agree") {
    GroupConfig g(1);
    std::vector<Point> pts = {pt({0.8, 0.3, 0.2}), pt({0.1, -0.4, 0.9}),
                              pt({1.5, 0.0, -0.7})};
    for (double alpha : {-3.0, -1.0, 1.0, 3.0})
        for (const Point& x : pts)
            CHECK(alpha_profile(g, alpha, x) ==
                  doctest::Approx(alpha_profile_direct(g, alpha, x))
                      .epsilon(1e-8));
}

TEST_CASE("profile homogeneity and the alpha norm") {
    GroupConfig g(1);
    const double Q = g.homogeneous_dim();
    Point x = pt({0.6, -0.2, 0.4});
    Philox rng(11, 0);
    for (double alpha : {-2.5, 0.5, 2.0}) {
        double base = alpha_profile(g, alpha, x);
        for (int rep = 0; rep < 3; ++rep) {
            double r = 0.4 + 2.0 * rng.next_unit();
            CHECK(alpha_profile(g, alpha, dilate(g, r, x)) ==
                  doctest::Approx(std::pow(r, alpha - Q) * base).epsilon(1e-8));
        }
        // ||x||_alpha is homogeneous of degree one and positive.
        double nx = alpha_norm(g, alpha, x);
        CHECK(nx > 0.0);
        CHECK(alpha_norm(g, alpha, dilate(g, 2.0, x)) ==
              doctest::Approx(2.0 * nx).epsilon(1e-8));
    }
}

TEST_CASE("P_2 is the closed-form fundamental solution on H^1") {
    GroupConfig g(1);
    // P_2(z,u) = (1/(2 pi)) (|z|^4 + 16 u^2)^{-1/2}: the Kaplan-gauge form,
    // with the constant fixed by integrating the sech^2 center slice in t.
    auto refp2 = [&](const Point& x) {
        double zs = horizontal_norm_sq(g, x);
        return 1.0 / (2.0 * std::numbers::pi *
                      std::sqrt(zs * zs + 16.0 * x.u() * x.u()));
    };
    for (const Point& x :
         {pt({1, 0, 0}), pt({0, 0, 0.5}), pt({0.7, -0.4, 0.3}),
          pt({0.2, 0.1, -1.1}), pt({2.0, 1.0, 0.8})})
        CHECK(p_alpha(g, 2.0, x) == doctest::Approx(refp2(x)).epsilon(1e-7));
}

TEST_CASE("center-axis profile against the 1D Simpson reduction") {
    GroupConfig g(1);
    for (double alpha : {-3.0, -1.0, 1.0, 3.0}) {
        double S = axis_profile_simpson(alpha);
        for (double u : {0.5, 2.0}) {
            double want = std::pow(u, 0.5 * alpha - 2.0) / 16.0 * S;
            CHECK(alpha_profile(g, alpha, pt({0, 0, u})) ==
                  doctest::Approx(want).epsilon(1e-7));
            // And the assembled kernel divides by Gamma(alpha/2).
            CHECK(p_alpha(g, alpha, pt({0, 0, u})) ==
                  doctest::Approx(want / gamma_fn(0.5 * alpha)).epsilon(1e-7));
        }
    }
}

TEST_CASE("kernel domain guards") {
    GroupConfig g(1);
    Point x = pt({1, 0, 0});
    CHECK_THROWS(p_alpha(g, 0.0, x));    // 1/Gamma pole
    CHECK_THROWS(p_alpha(g, -2.0, x));   // 1/Gamma pole
    CHECK_THROWS(p_alpha(g, 4.0, x));    // alpha >= Q diverges
    CHECK_THROWS(alpha_profile(g, 5.0, x));
    CHECK_THROWS(alpha_profile(g, 1.0, pt({0, 0, 0})));
}

TEST_CASE("sphere table matches direct kernel evaluations") {
    GroupConfig g(1);
    auto sph = palpha_sphere_shared(g, 1.0, 129);
    CHECK(palpha_sphere_shared(g, 1.0, 129).get() == sph.get());  // cached
    Philox rng(212, 4);
    for (int rep = 0; rep < 6; ++rep) {
        Point x(3);
        for (int i = 0; i < 3; ++i) x[static_cast<std::size_t>(i)] = 0.3 + rng.next_unit();
        CHECK(sph->eval(g, x) ==
              doctest::Approx(p_alpha(g, 1.0, x)).epsilon(2e-5));
    }
    // Homogeneity is exact in the table by construction.
    Point x = pt({0.9, 0.2, 0.3});
    CHECK(sph->eval(g, dilate(g, 3.0, x)) ==
          doctest::Approx(std::pow(3.0, 1.0 - 4.0) * sph->eval(g, x))
              .epsilon(1e-12));
}

TEST_CASE("spectral functions: anchors and backend agreement") {
    GroupConfig g(1);
    auto grid = GaugePolarGrid::shared(g, GaugeGridOptions{});
    // sigma(0) = 2 E[1] = 2 exactly.
    SpectralResult s0 = sigma_quad(g, 0.0, *grid);
    CHECK(s0.backend == "quadrature");
    CHECK(s0.value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(s0.std_error == 0.0);
    // d(-2) = 2 E[y_i^2] = 4 exactly (both horizontal slots).
    CHECK(d_alpha_quad(g, -2.0, 0, *grid).value ==
          doctest::Approx(4.0).epsilon(1e-8));
    CHECK(d_alpha_quad(g, -2.0, 1, *grid).value ==
          doctest::Approx(4.0).epsilon(1e-8));
    // Boundary moments: at alpha = -w(gamma) the cc weight drops out.
    CHECK(boundary_moment_quad(g, {4, 0, 0}, -4.0, *grid).value ==
          doctest::Approx(24.0).epsilon(1e-7));
    CHECK(boundary_moment_quad(g, {2, 2, 0}, -4.0, *grid).value ==
          doctest::Approx(8.0).epsilon(1e-7));
    // sigma is finite across the continuation range (alpha < Q).
    for (double a : {-4.0, -1.0, 1.0, 3.0}) {
        double v = sigma_quad(g, a, *grid).value;
        CHECK(std::isfinite(v));
        CHECK(v > 0.0);
    }

    // Monte Carlo backend agrees within joint error.
    SamplerSpec spec;
    spec.paths = 80000;
    spec.steps = 700;
    spec.seed = 4242;
    auto cloud = sample_cloud(g, spec);
    auto ccs = cloud_cc_norms(g, cloud);
    CHECK(cloud_cc_norms(g, cloud).get() == ccs.get());  // cached per cloud
    for (double a : {-2.0, 1.0}) {
        SpectralResult mq = sigma_quad(g, a, *grid);
        SpectralResult mm = sigma_mc(g, a, cloud);
        CHECK(mm.backend == "mc");
        CHECK(std::abs(mm.value - mq.value) <=
              5.0 * mm.std_error + 0.01 * std::abs(mq.value));
    }
    SpectralResult dm = d_alpha_mc(g, -2.0, 0, cloud);
    CHECK(std::abs(dm.value - 4.0) <= 5.0 * dm.std_error + 0.02);
    // Odd boundary moments vanish by symmetry on both backends.
    SpectralResult odd = boundary_moment_mc(g, {1, 0, 1}, 1.0, cloud);
    CHECK(odd.backend == "symmetry");
    CHECK(odd.value == 0.0);
    CHECK(std::abs(boundary_moment_quad(g, {1, 0, 1}, 1.0, *grid).value) < 1e-9);
}

TEST_CASE("convolution identity sanity at reduced sampling") {
    GroupConfig g(1);
    ConvOptions opt;
    opt.samples = 30000;
    opt.seed = 99;
    opt.sphere_pts = 129;
    ConvResult r = convolution_check(g, 1.0, 1.0, pt({0.7, 0.2, 0.15}), opt);
    CHECK(r.lhs > 0.0);
    CHECK(r.rhs_err > 0.0);
    CHECK(r.rel_gap == doctest::Approx(std::abs(r.lhs - r.rhs) /
                                       std::abs(r.lhs)).epsilon(1e-12));
    CHECK(std::abs(r.rhs - r.lhs) <= 6.0 * r.rhs_err + 0.02 * std::abs(r.lhs));
}
