#include "subfrac/testfun.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace subfrac {

namespace {

std::string format_double(double v) {
    // Shortest representation that round-trips (good enough for descriptors).
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = std::strtod(buf, nullptr);
    if (back == v) {
        for (int prec = 1; prec <= 16; ++prec) {
            char b2[64];
            std::snprintf(b2, sizeof(b2), "%.*g", prec, v);
            if (std::strtod(b2, nullptr) == v) return b2;
        }
    }
    return buf;
}

Jet euclid_norm_sq_jet(const GroupConfig& g, const Point& x,
                       std::shared_ptr<const MultiIndexSet> t, int order) {
    auto coords = group_coordinate_jets(g, x, t, order);
    Jet s = jet_const(t, order, 0.0);
    for (const Jet& cj : coords) s = jet_add(s, jet_mul(cj, cj));
    return s;
}

class GaussianFn final : public TestFunction {
  public:
    explicit GaussianFn(double a) : a_(a) {
        if (!(a > 0.0)) throw std::invalid_argument("gaussian: a must be > 0");
    }
    double value(const GroupConfig& g, const Point& p) const override {
        check_point(g, p, "gaussian");
        double s = 0.0;
        for (double v : p.x) s += v * v;
        return std::exp(-a_ * s);
    }
    Jet jet(const GroupConfig& g, const Point& x, int order) const override {
        auto t = MultiIndexSet::get(g.dim(), order);
        return jet_exp(jet_scale(euclid_norm_sq_jet(g, x, t, order), -a_));
    }
    std::string descriptor() const override {
        return "gaussian(a=" + format_double(a_) + ")";
    }
    double support_radius() const override { return std::sqrt(45.0 / a_); }
    bool horizontally_radial() const override { return true; }

  private:
    double a_;
};

class PolyGaussFn final : public TestFunction {
  public:
    PolyGaussFn(std::vector<int> gamma, double a) : gamma_(std::move(gamma)), a_(a) {
        if (!(a > 0.0)) throw std::invalid_argument("poly_gauss: a must be > 0");
        for (int e : gamma_)
            if (e < 0) throw std::invalid_argument("poly_gauss: negative exponent");
    }
    double value(const GroupConfig& g, const Point& p) const override {
        check_point(g, p, "poly_gauss");
        check_gamma(g);
        double s = 0.0;
        for (double v : p.x) s += v * v;
        return eval_monomial(p, gamma_) * std::exp(-a_ * s);
    }
    Jet jet(const GroupConfig& g, const Point& x, int order) const override {
        check_gamma(g);
        auto t = MultiIndexSet::get(g.dim(), order);
        auto coords = group_coordinate_jets(g, x, t, order);
        Jet mono = jet_const(t, order, 1.0);
        for (std::size_t i = 0; i < gamma_.size(); ++i)
            for (int k = 0; k < gamma_[i]; ++k) mono = jet_mul(mono, coords[i]);
        Jet e = jet_exp(jet_scale(euclid_norm_sq_jet(g, x, t, order), -a_));
        return jet_mul(mono, e);
    }
    std::string descriptor() const override {
        std::ostringstream os;
        os << "poly_gauss(gamma=[";
        for (std::size_t i = 0; i < gamma_.size(); ++i)
            os << (i ? "," : "") << gamma_[i];
        os << "];a=" << format_double(a_) << ")";
        return os.str();
    }
    double support_radius() const override {
        int total = 0;
        for (int e : gamma_) total += e;
        return std::sqrt((45.0 + 3.0 * total) / a_);
    }
    bool horizontally_radial() const override {
        // Invariant under horizontal rotations only when no horizontal
        // coordinate appears in the monomial (the Gaussian factor is radial).
        for (std::size_t i = 0; i + 1 < gamma_.size(); ++i)
            if (gamma_[i] != 0) return false;
        return true;
    }

  private:
    void check_gamma(const GroupConfig& g) const {
        if (gamma_.size() != static_cast<std::size_t>(g.dim()))
            throw std::invalid_argument(
                "poly_gauss: gamma length must equal 2n+1 for the bound group");
    }
    std::vector<int> gamma_;
    double a_;
};

// Gauge^4 = (|z|^2)^2 + u^2 is a polynomial, so exp(-gauge^4) has exact jets.
Jet gauge4_jet(const GroupConfig& g, const Point& x,
               std::shared_ptr<const MultiIndexSet> t, int order) {
    auto coords = group_coordinate_jets(g, x, t, order);
    Jet zsq = jet_const(t, order, 0.0);
    for (int i = 0; i < 2 * g.n; ++i)
        zsq = jet_add(zsq, jet_mul(coords[i], coords[i]));
    Jet u = coords[2 * g.n];
    return jet_add(jet_mul(zsq, zsq), jet_mul(u, u));
}

double gauge4_value(const GroupConfig& g, const Point& p) {
    const double zs = horizontal_norm_sq(g, p);
    const double u = p[2 * g.n];
    return zs * zs + u * u;
}

class KoranyiGaussFn final : public TestFunction {
  public:
    double value(const GroupConfig& g, const Point& p) const override {
        check_point(g, p, "koranyi_gauss");
        return std::exp(-gauge4_value(g, p));
    }
    Jet jet(const GroupConfig& g, const Point& x, int order) const override {
        auto t = MultiIndexSet::get(g.dim(), order);
        return jet_exp(jet_scale(gauge4_jet(g, x, t, order), -1.0));
    }
    std::string descriptor() const override { return "koranyi_gauss()"; }
    // exp(-(|z|^4 + u^2)) < 1e-19 once |u| > 6.6 (the slowest direction).
    double support_radius() const override { return 7.0; }
    bool horizontally_radial() const override { return true; }
};

class KoranyiGaussX6Fn final : public TestFunction {
  public:
    double value(const GroupConfig& g, const Point& p) const override {
        check_point(g, p, "koranyi_gauss_x6");
        const double x1 = p[0];
        const double x6 = x1 * x1 * x1 * x1 * x1 * x1;
        return x6 * std::exp(-gauge4_value(g, p));
    }
    Jet jet(const GroupConfig& g, const Point& x, int order) const override {
        auto t = MultiIndexSet::get(g.dim(), order);
        auto coords = group_coordinate_jets(g, x, t, order);
        Jet mono = jet_const(t, order, 1.0);
        for (int k = 0; k < 6; ++k) mono = jet_mul(mono, coords[0]);
        return jet_mul(mono, jet_exp(jet_scale(gauge4_jet(g, x, t, order), -1.0)));
    }
    std::string descriptor() const override { return "koranyi_gauss_x6()"; }
    double support_radius() const override { return 7.5; }
};

class LeftTranslateFn final : public TestFunction {
  public:
    LeftTranslateFn(const GroupConfig& g, Point shift, TestFunctionPtr base)
        : g_(g), shift_(std::move(shift)), base_(std::move(base)) {
        check_point(g_, shift_, "left_translate");
    }
    double value(const GroupConfig& g, const Point& p) const override {
        return base_->value(g, group_mul(g, shift_, p));
    }
    Jet jet(const GroupConfig& g, const Point& x, int order) const override {
        // (phi o l_s)(x . eta) = phi((s x) . eta): same jet at shifted base.
        return base_->jet(g, group_mul(g, shift_, x), order);
    }
    std::string descriptor() const override {
        std::ostringstream os;
        os << "left_translate(shift=[";
        for (std::size_t i = 0; i < shift_.size(); ++i)
            os << (i ? "," : "") << format_double(shift_[i]);
        os << "];base=" << base_->descriptor() << ")";
        return os.str();
    }
    double support_radius() const override {
        // p lies in the support iff shift . p does for the base; the group
        // product can stretch the center coordinate by |shift_h| * r.
        const double r = base_->support_radius();
        double sh = 0.0, se = 0.0;
        for (std::size_t i = 0; i + 1 < shift_.size(); ++i) sh += shift_[i] * shift_[i];
        for (std::size_t i = 0; i < shift_.size(); ++i) se += shift_[i] * shift_[i];
        return r + std::sqrt(se) + 0.5 * std::sqrt(sh) * r;
    }

  private:
    GroupConfig g_;
    Point shift_;
    TestFunctionPtr base_;
};

}  // namespace

TestFunctionPtr make_gaussian(double a) { return std::make_shared<GaussianFn>(a); }

TestFunctionPtr make_poly_gauss(std::vector<int> gamma, double a) {
    return std::make_shared<PolyGaussFn>(std::move(gamma), a);
}

TestFunctionPtr make_koranyi_gauss() { return std::make_shared<KoranyiGaussFn>(); }

TestFunctionPtr make_koranyi_gauss_x6() {
    return std::make_shared<KoranyiGaussX6Fn>();
}

TestFunctionPtr make_left_translate(const GroupConfig& g, const Point& shift,
                                    TestFunctionPtr base) {
    return std::make_shared<LeftTranslateFn>(g, shift, std::move(base));
}

double apply_word(const GroupConfig& g, const TestFunction& phi, const Point& x,
                  const std::vector<int>& word) {
    const Jet j = phi.jet(g, x, static_cast<int>(word.size()));
    return apply_word_jet(g, j, word).value();
}

double sublaplacian_power(const GroupConfig& g, const TestFunction& phi, int m,
                          const Point& x) {
    if (m < 0) throw std::invalid_argument("sublaplacian_power: m must be >= 0");
    Jet j = phi.jet(g, x, 2 * m);
    for (int k = 0; k < m; ++k) j = sublap_jet(g, j);
    return j.value();
}

Jet ztaylor(const GroupConfig& g, const TestFunction& phi, const Point& x,
            int deg, bool allow_high_degree) {
    if (deg < 0) throw std::invalid_argument("ztaylor: deg must be >= 0");
    if (deg > 7 && !allow_high_degree)
        throw std::invalid_argument(
            "ztaylor: deg > 7 refused without the high-degree override");
    // Homogeneous weight <= deg implies Euclidean degree <= deg.
    Jet j = phi.jet(g, x, deg);
    const MultiIndexSet& t = *j.table;
    for (std::size_t r = 0; r < j.c.size(); ++r)
        if (t.hweight(static_cast<int>(r)) > deg) j.c[r] = 0.0;
    return j;
}

double jet_poly_eval(const Jet& jet, const Point& y) {
    const MultiIndexSet& t = *jet.table;
    if (y.size() != static_cast<std::size_t>(t.q()))
        throw std::invalid_argument("jet_poly_eval: dimension mismatch");
    double s = 0.0;
    for (std::size_t r = 0; r < jet.c.size(); ++r) {
        if (jet.c[r] == 0.0) continue;
        double m = jet.c[r];
        const std::vector<int>& e = t.exponents(static_cast<int>(r));
        for (int i = 0; i < t.q(); ++i)
            for (int k = 0; k < e[i]; ++k) m *= y[i];
        s += m;
    }
    return s;
}

}  // namespace subfrac
