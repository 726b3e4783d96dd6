// Heat kernel of the sub-Laplacian on H^n and its sampling counterparts.
//
// Closed form used throughout (classical Fourier representation in the
// center variable):
//   h(t,(z,u)) = (1/pi) Int_0^inf (lam/(4 pi sinh(lam t)))^n
//                  exp(-(lam/4)|z|^2 coth(lam t)) cos(lam u) dlam,
// with the removable lam -> 0 limit handled by series-stable helpers.
// The integrand envelope decays like exp(-(n t + |z|^2/4) lam), so
// period-aware Gauss panels marched until negligible converge fast.
//
// The probabilistic counterpart: horizontal Brownian motion with
// E[x_i(t)^2] = 2t per coordinate plus the midpoint-rule Levy area in the
// center.  Streams are counter-based per path (bitwise thread-invariant).

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "subfrac/hgroup.hpp"
#include "subfrac/testfun.hpp"

namespace subfrac {

struct HkOptions {
    int panel_nodes = 16;       // Gauss order per lambda panel
    double eps_rel = 1e-15;     // tail stop threshold
    int max_panels = 8000;
};

// Pointwise heat kernel h(t, x); throws if t <= 0.
double hk_eval(const GroupConfig& g, double t, const Point& x,
               const HkOptions& opt = HkOptions{});

// ---------------------------------------------------------------------------
// Monte Carlo sampler.

struct SamplerSpec {
    std::int64_t paths = 200000;
    int steps = 2000;
    double t = 1.0;
    std::uint64_t seed = 20260816;
};

// Moment statistics accumulated in one pass over the diffusion
// (per-block partial sums reduced pairwise in fixed path order).
struct DiffusionMoments {
    std::int64_t paths = 0;
    std::vector<double> coord_sq;  // E[x_i^2] per horizontal coordinate
    double sum_horiz_sq = 0.0;     // E[sum_i x_i^2]
    double x1_4 = 0.0;             // E[x_1^4]
    double x1_6 = 0.0;             // E[x_1^6]
    double u_2 = 0.0;              // E[u^2]
    double x1_2_u_2 = 0.0;         // E[x_1^2 u^2]
    // Standard errors of the means above.
    double se_sum_horiz_sq = 0.0, se_x1_4 = 0.0, se_x1_6 = 0.0, se_u_2 = 0.0,
           se_x1_2_u_2 = 0.0;
};

DiffusionMoments simulate_moments(const GroupConfig& g, const SamplerSpec& spec);

// Terminal points of the diffusion at time spec.t (the "h(t,.) cloud").
std::vector<Point> sample_cloud(const GroupConfig& g, const SamplerSpec& spec);

// E[phi(x . delta_{sqrt(t)} Y)] over a cloud drawn from h(1,.); the law of
// the time-t point is the dilated time-1 law.  Returns mean and its SE.
struct MeanResult {
    double value = 0.0;
    double std_error = 0.0;
};
MeanResult heat_semigroup(const GroupConfig& g, const TestFunction& phi,
                          const Point& x, double t,
                          const std::vector<Point>& cloud);

// MC heat-kernel moment: E[y^gamma] at time t (odd gamma short-circuits
// to an exact 0, flagged by `symmetry_zero`).
struct MomentResult {
    double value = 0.0;
    double std_error = 0.0;
    bool symmetry_zero = false;
};
MomentResult hk_moment_mc(const GroupConfig& g, const std::vector<int>& gamma,
                          double t, const SamplerSpec& spec);

// ---------------------------------------------------------------------------
// Deterministic n=1 volume grid.
//
// Gauge-polar coordinates y = (rho sqrt(cos b) e^{i th}, rho^2 sin b) have
// volume element rho^{Q-1} drho db dth exactly, so a tensor grid with
// h(1,y) folded into the weights turns every integral against h(1,.) dy
// into a weighted sum.  beta panels are endpoint-graded because integrands
// carry (cos b)^{k/2} half-powers at b = +-pi/2.

struct GridNode {
    double y1, y2, u;   // coordinates
    double w;           // quadrature weight including h(1,y) rho^{Q-1}
    double rho;         // gauge radius
    int ibeta;          // latitude index (for per-beta lookups)
};

struct GaugeGridOptions {
    int rho_nodes_per_panel = 10;
    int theta_nodes = 24;
    int beta_central_panels = 6;
    int beta_graded_panels = 7;
    int beta_nodes_per_panel = 8;
    double rho_max = 16.0;
    int rho_dyadic_levels = 14;   // dyadic refinement below rho = 1
    double rho_linear_width = 1.0;
};

class GaugePolarGrid {
  public:
    GaugePolarGrid(const GroupConfig& g, const GaugeGridOptions& opt,
                   const HkOptions& hk = HkOptions{});

    const std::vector<GridNode>& nodes() const { return nodes_; }
    // cc norm of the unit-gauge direction at latitude index ibeta.
    double cc_unit(int ibeta) const { return cc_unit_[ibeta]; }
    int beta_count() const { return static_cast<int>(cc_unit_.size()); }

    // Integral of f(y) h(1,y) dy over H^1 (deterministic pairwise sum).
    template <typename F>
    double integrate(F&& f) const {
        std::vector<double> terms(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const GridNode& nd = nodes_[i];
            terms[i] = nd.w * f(nd);
        }
        return pairwise_sum_vec(terms);
    }

    // E[y^gamma] against h(1,.) dy.
    double moment(const std::vector<int>& gamma) const;

    // Process-wide shared grid for a given option set digest.
    static std::shared_ptr<const GaugePolarGrid> shared(const GroupConfig& g,
                                                        const GaugeGridOptions& opt);

  private:
    static double pairwise_sum_vec(const std::vector<double>& v);
    std::vector<GridNode> nodes_;
    std::vector<double> cc_unit_;
};

// Beta/theta direction sets (shared by the grid and the sphere splits).
struct BetaNode {
    double beta;
    double weight;
};
std::vector<BetaNode> make_beta_nodes(const GaugeGridOptions& opt);

// Moment table: E[y^gamma] for all componentwise-even gamma with
// homogeneous weight <= max_weight.
struct MomentTable {
    int n = 1;
    int max_weight = 6;
    std::map<std::vector<int>, double> mu;
    std::map<std::vector<int>, double> err;  // estimation error (0 for quad)
    std::string source;                      // "quadrature" or "mc"

    double get(const std::vector<int>& gamma) const;
};

MomentTable moment_table_quadrature(const GroupConfig& g,
                                    const GaugePolarGrid& grid,
                                    int max_weight = 6);
MomentTable moment_table_mc(const GroupConfig& g,
                            const std::vector<Point>& cloud,
                            int max_weight = 6);

}  // namespace subfrac
