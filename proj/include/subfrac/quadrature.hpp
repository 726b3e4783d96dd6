// Panel-based Gauss-Legendre quadrature helpers.
//
// All improper integrals in the library reduce to one of three patterns:
//   * smooth decaying tails (march geometric panels until negligible),
//   * integrable endpoint singularities at 0 (march dyadic panels down),
//   * oscillatory-but-enveloped integrands (panel width tied to the period).
// Node/weight tables are computed once per rule order by Newton iteration
// on the Legendre polynomials.

#pragma once

#include <functional>
#include <vector>

namespace subfrac {

struct GaussRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;
};

// Gauss-Legendre rule of given order (cached; thread-safe initialization).
const GaussRule& gauss_rule(int npts);

// Integrate f over [a, b] with a single Gauss panel.
double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   int npts);

// Integrate f over [a, inf): panels [a + k*w0*growth^k ...] marched until
// |panel| < eps_rel * |accumulated| (with a floor to avoid premature stop)
// or max_panels is hit.  Returns the accumulated integral.
double integrate_tail(const std::function<double(double)>& f, double a,
                      double w0, double growth, double eps_rel, int npts,
                      int max_panels, bool* converged = nullptr);

// Integrate f over (0, b] where f may have an integrable singularity at 0:
// dyadic panels [b/2^{k+1}, b/2^k] marched down until negligible.
double integrate_to_zero(const std::function<double(double)>& f, double b,
                         double eps_rel, int npts, int max_levels,
                         bool* converged = nullptr);

// Fixed-order panels over [a, b] split into nseg equal segments.
double integrate_segments(const std::function<double(double)>& f, double a,
                          double b, int nseg, int npts);

// Deterministic pairwise sum of a vector (fixed reduction tree, independent
// of any threading of how the entries were produced).
double pairwise_sum(const std::vector<double>& v);

}  // namespace subfrac
