// Heisenberg group H^n: coordinates, group law, dilations, gauges.
//
// A point carries q = 2n+1 real coordinates (x_1..x_n, x_{n+1}..x_{2n}, x_q).
// The first 2n are horizontal (weight 1 under dilations), the last is the
// center coordinate (weight 2). Homogeneous dimension Q = 2n + 2.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace subfrac {

struct GroupConfig {
    int n = 1;  // number of symplectic pairs

    explicit GroupConfig(int n_) : n(n_) {
        if (n < 1) throw std::invalid_argument("GroupConfig: n must be >= 1");
    }
    int dim() const { return 2 * n + 1; }           // topological dimension q
    int hdim() const { return 2 * n; }              // horizontal dimension
    int homogeneous_dim() const { return 2 * n + 2; }  // Q
};

struct Point {
    std::vector<double> x;  // size 2n+1

    Point() = default;
    explicit Point(std::size_t q) : x(q, 0.0) {}
    explicit Point(std::vector<double> coords) : x(std::move(coords)) {}

    std::size_t size() const { return x.size(); }
    double& operator[](std::size_t i) { return x[i]; }
    double operator[](std::size_t i) const { return x[i]; }
    double u() const { return x.back(); }  // center coordinate
};

inline void check_point(const GroupConfig& g, const Point& a, const char* where) {
    if (a.size() != static_cast<std::size_t>(g.dim()))
        throw std::invalid_argument(std::string(where) + ": point dimension mismatch");
}

// Group product: horizontal parts add; the center picks up half the
// standard symplectic form of the horizontal parts.
inline Point group_mul(const GroupConfig& g, const Point& a, const Point& b) {
    check_point(g, a, "group_mul");
    check_point(g, b, "group_mul");
    const int n = g.n;
    Point c(static_cast<std::size_t>(g.dim()));
    for (int i = 0; i < 2 * n; ++i) c[i] = a[i] + b[i];
    double omega = 0.0;
    for (int i = 0; i < n; ++i)
        omega += a[i] * b[i + n] - a[i + n] * b[i];
    c[2 * n] = a[2 * n] + b[2 * n] + 0.5 * omega;
    return c;
}

// Group inverse is coordinate negation.
inline Point group_inv(const GroupConfig& g, const Point& a) {
    check_point(g, a, "group_inv");
    Point c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = -a[i];
    return c;
}

// Anisotropic dilation: horizontal coordinates scale by r, center by r^2.
inline Point dilate(const GroupConfig& g, double r, const Point& a) {
    check_point(g, a, "dilate");
    if (!(r > 0.0)) throw std::invalid_argument("dilate: r must be > 0");
    Point c(a.size());
    for (int i = 0; i < 2 * g.n; ++i) c[i] = r * a[i];
    c[2 * g.n] = r * r * a[2 * g.n];
    return c;
}

inline double horizontal_norm_sq(const GroupConfig& g, const Point& a) {
    check_point(g, a, "horizontal_norm_sq");
    double s = 0.0;
    for (int i = 0; i < 2 * g.n; ++i) s += a[i] * a[i];
    return s;
}

inline double horizontal_norm(const GroupConfig& g, const Point& a) {
    return std::sqrt(horizontal_norm_sq(g, a));
}

// Koranyi gauge: (|z|^4 + u^2)^{1/4} up to the customary normalization
// (|z|^4 + 16 u^2)^{1/4} is also common; here the plain un-weighted form
// is used so that e.g. (0,0,4) has gauge 2.
inline double koranyi_norm(const GroupConfig& g, const Point& a) {
    check_point(g, a, "koranyi_norm");
    const double zs = horizontal_norm_sq(g, a);
    const double u = a[2 * g.n];
    return std::pow(zs * zs + u * u, 0.25);
}

// Euclidean norm of the raw coordinates (used only for grid bookkeeping).
inline double euclid_norm(const Point& a) {
    double s = 0.0;
    for (double v : a.x) s += v * v;
    return std::sqrt(s);
}

// Homogeneous weight of a coordinate monomial x^gamma:
// horizontal exponents count 1, the center exponent counts 2.
inline int monomial_weight(const GroupConfig& g, const std::vector<int>& gamma) {
    if (gamma.size() != static_cast<std::size_t>(g.dim()))
        throw std::invalid_argument("monomial_weight: gamma dimension mismatch");
    int w = 0;
    for (int i = 0; i < 2 * g.n; ++i) w += gamma[i];
    w += 2 * gamma[2 * g.n];
    return w;
}

inline double eval_monomial(const Point& a, const std::vector<int>& gamma) {
    double v = 1.0;
    for (std::size_t i = 0; i < gamma.size(); ++i)
        for (int k = 0; k < gamma[i]; ++k) v *= a[i];
    return v;
}

}  // namespace subfrac
