// Group-level checks: the group law, dilations, gauges, and monomial
// bookkeeping on H^n.  Everything here is closed-form, so tolerances are
// at rounding level.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "subfrac/hgroup.hpp"
#include "subfrac/rng.hpp"

using namespace subfrac;

namespace {

Point pt(std::vector<double> v) { return Point(std::move(v)); }

Point random_point(const GroupConfig& g, Philox& rng, double scale) {
    Point a(static_cast<std::size_t>(g.dim()));
    for (int i = 0; i < g.dim(); ++i)
        a[i] = scale * (2.0 * rng.next_unit() - 1.0);
    return a;
}

double max_abs_diff(const Point& a, const Point& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("group law worked examples on H^1") {
    GroupConfig g(1);
    // Horizontal translations pick up half the symplectic area.
    Point c = group_mul(g, pt({1, 0, 0}), pt({0, 1, 0}));
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[1] == doctest::Approx(1.0));
    CHECK(c[2] == doctest::Approx(0.5));
    // Swapping the order flips the sign of the area term.
    Point d = group_mul(g, pt({0, 1, 0}), pt({1, 0, 0}));
    CHECK(d[2] == doctest::Approx(-0.5));
    // Central elements are, well, central: they just add.
    Point e = group_mul(g, pt({0.3, -0.2, 0.7}), pt({0, 0, 2}));
    CHECK(e[0] == doctest::Approx(0.3));
    CHECK(e[1] == doctest::Approx(-0.2));
    CHECK(e[2] == doctest::Approx(2.7));
}

TEST_CASE("group axioms hold at random points") {
    for (int n : {1, 2, 3}) {
        GroupConfig g(n);
        Philox rng(123, 7 + static_cast<std::uint64_t>(n));
        Point id(static_cast<std::size_t>(g.dim()));
        for (int rep = 0; rep < 25; ++rep) {
            Point a = random_point(g, rng, 2.0);
            Point b = random_point(g, rng, 2.0);
            Point c = random_point(g, rng, 2.0);
            // Associativity.
            Point lhs = group_mul(g, group_mul(g, a, b), c);
            Point rhs = group_mul(g, a, group_mul(g, b, c));
            CHECK(max_abs_diff(lhs, rhs) < 1e-14);
            // Identity and inverse.
            CHECK(max_abs_diff(group_mul(g, a, id), a) == 0.0);
            CHECK(max_abs_diff(group_mul(g, id, a), a) == 0.0);
            CHECK(max_abs_diff(group_mul(g, a, group_inv(g, a)), id) < 1e-15);
            CHECK(max_abs_diff(group_mul(g, group_inv(g, a), a), id) < 1e-15);
        }
    }
}

TEST_CASE("dilations are automorphisms and scale the gauge") {
    for (int n : {1, 2}) {
        GroupConfig g(n);
        Philox rng(99, static_cast<std::uint64_t>(n));
        for (int rep = 0; rep < 20; ++rep) {
            Point a = random_point(g, rng, 1.5);
            Point b = random_point(g, rng, 1.5);
            double r = 0.25 + 3.0 * rng.next_unit();
            // delta_r(a*b) = delta_r(a) * delta_r(b)
            Point lhs = dilate(g, r, group_mul(g, a, b));
            Point rhs = group_mul(g, dilate(g, r, a), dilate(g, r, b));
            CHECK(max_abs_diff(lhs, rhs) < 1e-13);
            // Gauge is homogeneous of degree 1.
            CHECK(koranyi_norm(g, dilate(g, r, a)) ==
                  doctest::Approx(r * koranyi_norm(g, a)).epsilon(1e-13));
        }
        // delta_r . delta_s = delta_{rs}
        Point a = random_point(g, rng, 1.0);
        CHECK(max_abs_diff(dilate(g, 2.0, dilate(g, 3.0, a)),
                           dilate(g, 6.0, a)) < 1e-13);
    }
    // The worked example: doubling (1,1,1) doubles horizontals, quadruples u.
    GroupConfig g1(1);
    Point d2 = dilate(g1, 2.0, pt({1, 1, 1}));
    CHECK(d2[0] == doctest::Approx(2.0));
    CHECK(d2[1] == doctest::Approx(2.0));
    CHECK(d2[2] == doctest::Approx(4.0));
}

TEST_CASE("Koranyi gauge values") {
    GroupConfig g(1);
    // Pure center: (0 + 16)^{1/4} = 2.
    CHECK(koranyi_norm(g, pt({0, 0, 4})) == doctest::Approx(2.0));
    // Pure horizontal: reduces to the Euclidean length.
    CHECK(koranyi_norm(g, pt({3, 4, 0})) == doctest::Approx(5.0));
    // Mixed: (|z|^4 + u^2)^{1/4} directly.
    CHECK(koranyi_norm(g, pt({1, 1, 1})) ==
          doctest::Approx(std::pow(4.0 + 1.0, 0.25)));
    // Symmetric under inversion.
    GroupConfig g2(2);
    Philox rng(7, 1);
    for (int rep = 0; rep < 10; ++rep) {
        Point a = random_point(g2, rng, 2.0);
        CHECK(koranyi_norm(g2, a) ==
              doctest::Approx(koranyi_norm(g2, group_inv(g2, a))).epsilon(1e-15));
    }
}

TEST_CASE("horizontal norms and dimension bookkeeping") {
    GroupConfig g(2);
    CHECK(g.dim() == 5);
    CHECK(g.hdim() == 4);
    CHECK(g.homogeneous_dim() == 6);
    Point a = pt({1, 2, 2, 4, 9});
    CHECK(horizontal_norm_sq(g, a) == doctest::Approx(25.0));
    CHECK(horizontal_norm(g, a) == doctest::Approx(5.0));
    CHECK(a.u() == doctest::Approx(9.0));
    CHECK_THROWS_AS(GroupConfig(0), std::invalid_argument);
    CHECK_THROWS_AS(dilate(g, -1.0, a), std::invalid_argument);
    CHECK_THROWS_AS(group_mul(g, a, Point(3)), std::invalid_argument);
}

TEST_CASE("monomial weight and evaluation") {
    GroupConfig g(1);
    // Center exponent counts twice.
    CHECK(monomial_weight(g, {2, 0, 0}) == 2);
    CHECK(monomial_weight(g, {0, 0, 1}) == 2);
    CHECK(monomial_weight(g, {1, 1, 1}) == 4);
    CHECK(monomial_weight(g, {4, 0, 0}) == 4);
    CHECK(monomial_weight(g, {2, 0, 1}) == 4);
    GroupConfig g2(2);
    CHECK(monomial_weight(g2, {1, 0, 0, 3, 2}) == 8);

    Point a = pt({2, -3, 5});
    CHECK(eval_monomial(a, {2, 0, 0}) == doctest::Approx(4.0));
    CHECK(eval_monomial(a, {1, 1, 0}) == doctest::Approx(-6.0));
    CHECK(eval_monomial(a, {0, 2, 1}) == doctest::Approx(45.0));
    CHECK(eval_monomial(a, {0, 0, 0}) == doctest::Approx(1.0));
    // Monomials are homogeneous of their weight under dilations.
    std::vector<int> gamma = {2, 1, 1};
    double r = 1.7;
    CHECK(eval_monomial(dilate(g, r, a), gamma) ==
          doctest::Approx(std::pow(r, monomial_weight(g, gamma)) *
                          eval_monomial(a, gamma)).epsilon(1e-13));
}
