#include "subfrac/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace subfrac {

namespace {

GaussRule make_rule(int npts) {
    // Newton iteration on P_n with the usual Chebyshev initial guess.
    GaussRule r;
    r.nodes.resize(npts);
    r.weights.resize(npts);
    const int m = (npts + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (npts + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < npts; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = npts * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[npts - 1 - i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[npts - 1 - i] = r.weights[i];
    }
    return r;
}

std::mutex rule_mutex;
std::map<int, GaussRule> rule_cache;

}  // namespace

const GaussRule& gauss_rule(int npts) {
    if (npts < 1 || npts > 256) throw std::invalid_argument("gauss_rule: bad order");
    std::lock_guard<std::mutex> lock(rule_mutex);
    auto it = rule_cache.find(npts);
    if (it == rule_cache.end())
        it = rule_cache.emplace(npts, make_rule(npts)).first;
    return it->second;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   int npts) {
    const GaussRule& r = gauss_rule(npts);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < npts; ++i) s += r.weights[i] * f(c + h * r.nodes[i]);
    return s * h;
}

double integrate_tail(const std::function<double(double)>& f, double a,
                      double w0, double growth, double eps_rel, int npts,
                      int max_panels, bool* converged) {
    double acc = 0.0, scale = 0.0;
    double lo = a, w = w0;
    bool ok = false;
    for (int k = 0; k < max_panels; ++k) {
        const double hi = lo + w;
        const double p = gauss_panel(f, lo, hi, npts);
        acc += p;
        scale = std::max(scale, std::abs(p));
        // Require two consecutive negligible panels before stopping: a single
        // small panel can be an oscillation node.
        if (std::abs(p) < eps_rel * std::max(scale, std::abs(acc)) && k > 1) {
            const double q = gauss_panel(f, hi, hi + w * growth, npts);
            acc += q;
            if (std::abs(q) < eps_rel * std::max(scale, std::abs(acc))) {
                ok = true;
                break;
            }
            lo = hi + w * growth;
            w *= growth * growth;
            continue;
        }
        lo = hi;
        w *= growth;
    }
    if (converged) *converged = ok;
    return acc;
}

double integrate_to_zero(const std::function<double(double)>& f, double b,
                         double eps_rel, int npts, int max_levels,
                         bool* converged) {
    double acc = 0.0, scale = 0.0;
    double hi = b;
    bool ok = false;
    for (int k = 0; k < max_levels; ++k) {
        const double lo = 0.5 * hi;
        const double p = gauss_panel(f, lo, hi, npts);
        acc += p;
        scale = std::max(scale, std::abs(p));
        if (std::abs(p) < eps_rel * std::max(scale, std::abs(acc)) && k > 3) {
            ok = true;
            break;
        }
        hi = lo;
    }
    if (converged) *converged = ok;
    return acc;
}

double integrate_segments(const std::function<double(double)>& f, double a,
                          double b, int nseg, int npts) {
    double s = 0.0;
    const double h = (b - a) / nseg;
    for (int k = 0; k < nseg; ++k)
        s += gauss_panel(f, a + k * h, a + (k + 1) * h, npts);
    return s;
}

double pairwise_sum(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    std::vector<double> buf = v;
    std::size_t m = buf.size();
    while (m > 1) {
        std::size_t half = m / 2;
        for (std::size_t i = 0; i < half; ++i) buf[i] = buf[2 * i] + buf[2 * i + 1];
        if (m % 2) {
            buf[half] = buf[m - 1];
            m = half + 1;
        } else {
            m = half;
        }
    }
    return buf[0];
}

}  // namespace subfrac
