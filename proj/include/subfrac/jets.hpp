// Truncated Taylor-jet arithmetic on the Heisenberg group.
//
// A Jet holds the Taylor coefficients of eta -> phi(x . eta) around eta = 0,
// up to a total (Euclidean) degree 'order': phi(x . y) ~ sum_m c[m] y^m.
// Because the frame fields are left-invariant, applying a frame field to
// phi corresponds to applying its eta-coordinate form to the jet:
//   Z_j     -> d/d eta_j       - (1/2) eta_{j+n} d/d eta_u     (j <= n)
//   Z_{n+j} -> d/d eta_{n+j}   + (1/2) eta_j     d/d eta_u
//   T       -> d/d eta_u
// so exact iterated frame derivatives at the base point fall out of pure
// polynomial algebra.  Each application reduces the trusted order by one.

#pragma once

#include <memory>
#include <vector>

#include "subfrac/hgroup.hpp"

namespace subfrac {

// Enumeration of multi-indices m in N^q with |m| <= maxdeg, sorted by total
// degree then lexicographically, so degree-<=d coefficients form a prefix.
class MultiIndexSet {
  public:
    MultiIndexSet(int q, int maxdeg);

    int q() const { return q_; }
    int maxdeg() const { return maxdeg_; }
    int count() const { return static_cast<int>(exps_.size()); }
    int count_through_degree(int d) const { return prefix_[d]; }
    const std::vector<int>& exponents(int rank) const { return exps_[rank]; }
    int degree(int rank) const { return degree_[rank]; }
    int hweight(int rank) const { return hweight_[rank]; }  // homogeneous weight

    // Rank of a multi-index, or -1 if out of table.
    int rank(const std::vector<int>& m) const;
    // Rank after incrementing component i, or -1 if that exceeds maxdeg.
    int rank_plus(int rank, int i) const { return plus_[rank * q_ + i]; }
    // Rank after decrementing component i, or -1 if m_i == 0.
    int rank_minus(int rank, int i) const { return minus_[rank * q_ + i]; }

    static std::shared_ptr<const MultiIndexSet> get(int q, int maxdeg);

  private:
    int q_, maxdeg_;
    std::vector<std::vector<int>> exps_;
    std::vector<int> degree_;
    std::vector<int> hweight_;
    std::vector<int> prefix_;      // prefix_[d] = #indices with degree <= d
    std::vector<int> plus_, minus_;
    std::vector<int> lookup_;      // mixed-radix key -> rank
    int key(const std::vector<int>& m) const;
};

struct Jet {
    std::shared_ptr<const MultiIndexSet> table;
    int order = 0;                 // trusted total degree
    std::vector<double> c;         // size table->count_through_degree(order)

    Jet() = default;
    Jet(std::shared_ptr<const MultiIndexSet> t, int ord);

    double value() const { return c.empty() ? 0.0 : c[0]; }
    int q() const { return table->q(); }

    // Coefficient by multi-index (0 if beyond the stored order).
    double coeff(const std::vector<int>& m) const;
};

// Arithmetic (operands must share a table; orders need not match --
// the result's order is the min).
Jet jet_add(const Jet& a, const Jet& b);
Jet jet_sub(const Jet& a, const Jet& b);
Jet jet_scale(const Jet& a, double s);
Jet jet_mul(const Jet& a, const Jet& b);
// exp(a), composing the scalar series with the jet's nilpotent part.
Jet jet_exp(const Jet& a);

// Jet of the constant 1 and of the offset coordinate eta_i.
Jet jet_const(std::shared_ptr<const MultiIndexSet> t, int order, double v);
Jet jet_coord(std::shared_ptr<const MultiIndexSet> t, int order, int i);

// Jets of the ambient coordinates of x . eta as polynomials in eta
// (horizontal: x_i + eta_i; center picks up the symplectic cross terms).
std::vector<Jet> group_coordinate_jets(const GroupConfig& g, const Point& x,
                                       std::shared_ptr<const MultiIndexSet> t,
                                       int order);

// Frame-field application in jet space (left-invariant form; see header
// comment).  i in [0, 2n] with i == 2n meaning the center field T.
// The result's trusted order drops by one.
Jet apply_z(const GroupConfig& g, const Jet& a, int i);

// Apply a word of frame indices in classical operator order: word {i1, i2}
// computes Z_{i1} Z_{i2} phi, so the rightmost letter acts first on phi.
Jet apply_word_jet(const GroupConfig& g, const Jet& a,
                   const std::vector<int>& word);

// Sub-Laplacian as a jet operator: L = -sum_{i<2n} Z_i^2 (order drops by 2).
Jet sublap_jet(const GroupConfig& g, const Jet& a);

}  // namespace subfrac
