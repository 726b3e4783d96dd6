#include "subfrac/jets.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace subfrac {

namespace {

void enumerate_rec(int q, int maxdeg, std::vector<int>& cur, int pos, int left,
                   std::vector<std::vector<int>>& out) {
    if (pos == q) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e <= left; ++e) {
        cur[pos] = e;
        enumerate_rec(q, maxdeg, cur, pos + 1, left - e, out);
    }
    cur[pos] = 0;
}

}  // namespace

MultiIndexSet::MultiIndexSet(int q, int maxdeg) : q_(q), maxdeg_(maxdeg) {
    if (q < 1 || maxdeg < 0 || maxdeg > 16)
        throw std::invalid_argument("MultiIndexSet: bad parameters");
    std::vector<std::vector<int>> all;
    std::vector<int> cur(q, 0);
    enumerate_rec(q, maxdeg, cur, 0, maxdeg, all);
    std::sort(all.begin(), all.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  int da = 0, db = 0;
                  for (int v : a) da += v;
                  for (int v : b) db += v;
                  if (da != db) return da < db;
                  return a < b;
              });
    exps_ = std::move(all);
    const int count = static_cast<int>(exps_.size());
    degree_.resize(count);
    hweight_.resize(count);
    prefix_.assign(maxdeg + 1, 0);
    int radix = 1;
    for (int i = 0; i < q; ++i) radix *= (maxdeg + 1);
    lookup_.assign(radix, -1);
    for (int r = 0; r < count; ++r) {
        int d = 0;
        for (int v : exps_[r]) d += v;
        degree_[r] = d;
        hweight_[r] = d + exps_[r][q - 1];  // center exponent counts twice
        lookup_[key(exps_[r])] = r;
    }
    for (int d = 0; d <= maxdeg; ++d) {
        int cnt = 0;
        for (int r = 0; r < count; ++r)
            if (degree_[r] <= d) ++cnt;
        prefix_[d] = cnt;
    }
    plus_.assign(static_cast<std::size_t>(count) * q, -1);
    minus_.assign(static_cast<std::size_t>(count) * q, -1);
    for (int r = 0; r < count; ++r) {
        std::vector<int> m = exps_[r];
        for (int i = 0; i < q; ++i) {
            if (degree_[r] + 1 <= maxdeg) {
                ++m[i];
                plus_[static_cast<std::size_t>(r) * q + i] = lookup_[key(m)];
                --m[i];
            }
            if (m[i] > 0) {
                --m[i];
                minus_[static_cast<std::size_t>(r) * q + i] = lookup_[key(m)];
                ++m[i];
            }
        }
    }
}

int MultiIndexSet::key(const std::vector<int>& m) const {
    int k = 0;
    for (int i = q_ - 1; i >= 0; --i) k = k * (maxdeg_ + 1) + m[i];
    return k;
}

int MultiIndexSet::rank(const std::vector<int>& m) const {
    if (static_cast<int>(m.size()) != q_) return -1;
    int d = 0;
    for (int v : m) {
        if (v < 0) return -1;
        d += v;
    }
    if (d > maxdeg_) return -1;
    return lookup_[key(m)];
}

std::shared_ptr<const MultiIndexSet> MultiIndexSet::get(int q, int maxdeg) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const MultiIndexSet>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto k = std::make_pair(q, maxdeg);
    auto it = cache.find(k);
    if (it == cache.end())
        it = cache.emplace(k, std::make_shared<MultiIndexSet>(q, maxdeg)).first;
    return it->second;
}

Jet::Jet(std::shared_ptr<const MultiIndexSet> t, int ord)
    : table(std::move(t)), order(ord) {
    if (order < 0 || order > table->maxdeg())
        throw std::invalid_argument("Jet: order out of range of table");
    c.assign(table->count_through_degree(order), 0.0);
}

double Jet::coeff(const std::vector<int>& m) const {
    const int r = table->rank(m);
    if (r < 0 || r >= static_cast<int>(c.size())) return 0.0;
    return c[r];
}

namespace {

void check_same_table(const Jet& a, const Jet& b, const char* where) {
    if (a.table != b.table)
        throw std::invalid_argument(std::string(where) + ": jets from different tables");
}

}  // namespace

Jet jet_add(const Jet& a, const Jet& b) {
    check_same_table(a, b, "jet_add");
    Jet r(a.table, std::min(a.order, b.order));
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
}

Jet jet_sub(const Jet& a, const Jet& b) {
    check_same_table(a, b, "jet_sub");
    Jet r(a.table, std::min(a.order, b.order));
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
}

Jet jet_scale(const Jet& a, double s) {
    Jet r = a;
    for (double& v : r.c) v *= s;
    return r;
}

Jet jet_mul(const Jet& a, const Jet& b) {
    check_same_table(a, b, "jet_mul");
    const MultiIndexSet& t = *a.table;
    Jet r(a.table, std::min(a.order, b.order));
    const int q = t.q();
    const int na = static_cast<int>(a.c.size());
    const int nb = static_cast<int>(b.c.size());
    std::vector<int> sum(q);
    for (int ra = 0; ra < na; ++ra) {
        if (a.c[ra] == 0.0) continue;
        const int da = t.degree(ra);
        if (da > r.order) break;
        const std::vector<int>& ma = t.exponents(ra);
        for (int rb = 0; rb < nb; ++rb) {
            const int db = t.degree(rb);
            if (da + db > r.order) break;
            if (b.c[rb] == 0.0) continue;
            const std::vector<int>& mb = t.exponents(rb);
            for (int i = 0; i < q; ++i) sum[i] = ma[i] + mb[i];
            r.c[t.rank(sum)] += a.c[ra] * b.c[rb];
        }
    }
    return r;
}

Jet jet_exp(const Jet& a) {
    const double a0 = a.value();
    Jet n = a;  // nilpotent part
    if (!n.c.empty()) n.c[0] = 0.0;
    Jet acc = jet_const(a.table, a.order, 1.0);
    Jet term = jet_const(a.table, a.order, 1.0);
    for (int k = 1; k <= a.order; ++k) {
        term = jet_scale(jet_mul(term, n), 1.0 / k);
        acc = jet_add(acc, term);
    }
    return jet_scale(acc, std::exp(a0));
}

Jet jet_const(std::shared_ptr<const MultiIndexSet> t, int order, double v) {
    Jet r(std::move(t), order);
    if (!r.c.empty()) r.c[0] = v;
    return r;
}

Jet jet_coord(std::shared_ptr<const MultiIndexSet> t, int order, int i) {
    Jet r(std::move(t), order);
    std::vector<int> m(r.table->q(), 0);
    m[i] = 1;
    const int rank = r.table->rank(m);
    if (rank >= 0 && rank < static_cast<int>(r.c.size())) r.c[rank] = 1.0;
    return r;
}

std::vector<Jet> group_coordinate_jets(const GroupConfig& g, const Point& x,
                                       std::shared_ptr<const MultiIndexSet> t,
                                       int order) {
    check_point(g, x, "group_coordinate_jets");
    const int n = g.n;
    std::vector<Jet> out;
    out.reserve(g.dim());
    for (int i = 0; i < 2 * n; ++i) {
        Jet j = jet_coord(t, order, i);
        j.c[0] += x[i];
        out.push_back(std::move(j));
    }
    Jet ju = jet_coord(t, order, 2 * n);
    ju.c[0] += x[2 * n];
    // center of x . eta: x_u + eta_u + (1/2) sum (x_i eta_{i+n} - x_{i+n} eta_i)
    for (int i = 0; i < n; ++i) {
        Jet a = jet_coord(t, order, i + n);
        Jet b = jet_coord(t, order, i);
        ju = jet_add(ju, jet_scale(a, 0.5 * x[i]));
        ju = jet_add(ju, jet_scale(b, -0.5 * x[i + n]));
    }
    out.push_back(std::move(ju));
    return out;
}

namespace {

// Partial derivative d/d eta_i in jet space; trusted order drops by one.
Jet jet_deriv(const Jet& a, int i) {
    const MultiIndexSet& t = *a.table;
    Jet r(a.table, a.order - 1);
    const int nr = static_cast<int>(r.c.size());
    for (int rr = 0; rr < nr; ++rr) {
        const int up = t.rank_plus(rr, i);
        if (up >= 0 && up < static_cast<int>(a.c.size()))
            r.c[rr] = a.c[up] * (t.exponents(rr)[i] + 1);
    }
    return r;
}

// Multiply jet by the coordinate monomial eta_i (order preserved).
Jet jet_mul_coord(const Jet& a, int i) {
    const MultiIndexSet& t = *a.table;
    Jet r(a.table, a.order);
    const int nr = static_cast<int>(r.c.size());
    for (int rr = 0; rr < nr; ++rr) {
        const int down = t.rank_minus(rr, i);
        if (down >= 0 && down < static_cast<int>(a.c.size()))
            r.c[rr] = a.c[down];
    }
    return r;
}

}  // namespace

Jet apply_z(const GroupConfig& g, const Jet& a, int i) {
    if (a.order < 1) throw std::invalid_argument("apply_z: jet order exhausted");
    const int n = g.n;
    if (i < 0 || i > 2 * n) throw std::invalid_argument("apply_z: bad field index");
    const int uc = 2 * n;
    if (i == uc) return jet_deriv(a, uc);
    Jet du = jet_deriv(a, uc);
    if (i < n) {
        // Z_i = d_i - (1/2) eta_{i+n} d_u
        return jet_sub(jet_deriv(a, i), jet_scale(jet_mul_coord(du, i + n), 0.5));
    }
    // Z_{n+j} = d_{n+j} + (1/2) eta_j d_u, with j = i - n
    return jet_add(jet_deriv(a, i), jet_scale(jet_mul_coord(du, i - n), 0.5));
}

Jet apply_word_jet(const GroupConfig& g, const Jet& a,
                   const std::vector<int>& word) {
    Jet r = a;
    // Rightmost letter acts first: word {i1,...,ik} means Z_{i1}...Z_{ik} phi.
    for (auto it = word.rbegin(); it != word.rend(); ++it)
        r = apply_z(g, r, *it);
    return r;
}

Jet sublap_jet(const GroupConfig& g, const Jet& a) {
    if (a.order < 2) throw std::invalid_argument("sublap_jet: jet order exhausted");
    Jet acc(a.table, a.order - 2);
    for (int i = 0; i < 2 * g.n; ++i)
        acc = jet_add(acc, apply_z(g, apply_z(g, a, i), i));
    return jet_scale(acc, -1.0);
}

}  // namespace subfrac
