// Schwartz-class test functions with exact jet support.
//
// Each family provides pointwise values and exact truncated Taylor jets of
// eta -> phi(x . eta) (via the polynomial coordinate jets of the group
// product composed with exp), so frame derivatives of any order up to the
// jet order are available without finite differencing.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "subfrac/hgroup.hpp"
#include "subfrac/jets.hpp"

namespace subfrac {

class TestFunction {
  public:
    virtual ~TestFunction() = default;
    virtual double value(const GroupConfig& g, const Point& p) const = 0;
    virtual Jet jet(const GroupConfig& g, const Point& x, int order) const = 0;
    // Canonical descriptor string (round-trips through the parser).
    virtual std::string descriptor() const = 0;
    // Euclidean coordinate half-width beyond which |phi| is numerically
    // negligible (~1e-18 of its peak).  Used to size far-field boxes.
    virtual double support_radius() const { return 8.0; }
    // True when phi(z, u) depends on z only through |z|, i.e. phi is
    // invariant under horizontal rotations (which are automorphisms).
    virtual bool horizontally_radial() const { return false; }
};

using TestFunctionPtr = std::shared_ptr<const TestFunction>;

// exp(-a |p|^2), Euclidean square of all 2n+1 coordinates.
TestFunctionPtr make_gaussian(double a);

// p^gamma exp(-a |p|^2); gamma must have length 2n+1 when bound to a group.
TestFunctionPtr make_poly_gauss(std::vector<int> gamma, double a);

// exp(-(|z|^4 + u^2)), i.e. exp(-gauge^4) for the Koranyi gauge.
TestFunctionPtr make_koranyi_gauss();

// x1^6 exp(-(|z|^4 + u^2)). Companion anisotropic example whose center
// derivatives do not vanish at the origin.
TestFunctionPtr make_koranyi_gauss_x6();

// phi composed with left translation: (shift . p) fed to the base function.
TestFunctionPtr make_left_translate(const GroupConfig& g, const Point& shift,
                                    TestFunctionPtr base);

// Frame-derivative scalar helpers built on jets.
double apply_word(const GroupConfig& g, const TestFunction& phi,
                  const Point& x, const std::vector<int>& word);
double sublaplacian_power(const GroupConfig& g, const TestFunction& phi,
                          int m, const Point& x);

// Z-Taylor polynomial of homogeneous degree <= deg as a Jet: jet coefficients
// with homogeneous weight > deg are zeroed.  deg > 7 is refused unless
// allow_high_degree (cost guard; the tables grow combinatorially).
Jet ztaylor(const GroupConfig& g, const TestFunction& phi, const Point& x,
            int deg, bool allow_high_degree = false);

// Evaluate a (filtered) jet polynomial at a group offset y.
double jet_poly_eval(const Jet& jet, const Point& y);

}  // namespace subfrac
