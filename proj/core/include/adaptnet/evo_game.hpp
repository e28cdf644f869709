#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "adaptnet/rng.hpp"
#include "adaptnet/topology.hpp"

namespace adaptnet::evo {

// 2x2 payoff matrix over strategies S_r (combine from common nodes) and S_m
// (combine from good nodes):
//
//          S_r  S_m
//   S_r  ( u1   u2 )
//   S_m  ( u3   u4 )
//
// ordering_valid asserts u1 < u3 < u2 < u4, the ordering implied by the
// steady-EMSE model when the step size is below its bound.
struct UtilityMatrix2 {
  double u1 = 0.0, u2 = 0.0, u3 = 0.0, u4 = 0.0;
  bool ordering_valid = false;

  // payoff of a strategy (row) against a strategy (column); true = S_m
  double entry(bool row_m, bool col_m) const {
    return row_m ? (col_m ? u4 : u3) : (col_m ? u2 : u1);
  }
  double max_entry() const;
  UtilityMatrix2 scaled(double factor) const;
  bool check_ordering() const { return u1 < u3 && u3 < u2 && u2 < u4; }
};

// Steady EMSE pi(x, y) of a node with noise std x combining from a node with
// noise std y:
//   pi = c1 s1^2 + c2 x^4 / s2^2,  c1 = mu Tr(R_u)/4, c2 = mu^2 ||zeta||^2/2,
//   s1^2 = 2 x^2 y^2 / (x^2 + y^2), s2^2 = x^2 y^2 / 2.
double pi_emse(double x, double y, double mu, double trace_ru,
               double zeta_norm2);

// u_k = 1 / pi(.,.) per the matrix layout above. Requires sigma_m2 <
// sigma_r2; the ordering flag is false (not fatal) when the step-size
// condition fails.
UtilityMatrix2 utility_from_pi(double sigma_r2, double sigma_m2, double mu,
                               double trace_ru, double zeta_norm2);

// Largest step size keeping the pi ordering, tau = sigma_m^2 / sigma_r^2:
//   mu_max = tau Tr(R_u) sigma_r^2 / (4 (1 + tau) ||zeta||^2)
double step_size_bound(double tau, double trace_ru, double sigma_r2,
                       double zeta_norm2);

// Mean-field fitness values around a focal node of degree n with n_r + n_m
// strategy-split neighbors (f* when the focal plays S_r, g* when it plays
// S_m); baseline fitness normalized to 1.
struct LocalFitness {
  double f0, f_m, f_r;
  double g0, g_m, g_r;
};

struct Conditionals {
  double q_mm, q_mr, q_rm, q_rr;
};

LocalFitness local_fitnesses(int n, int n_r, int n_m, const Conditionals& q,
                             const UtilityMatrix2& u, double alpha);

// Pair-approximation conditionals on the slow manifold
// q_mm - q_mr = 1/(n-1).
Conditionals slow_manifold_conditionals(double p_m, int n);

// Leading-order drift of (p_m, q_mm) for the IM update on a degree-n regular
// graph of N nodes; O(alpha^2)/O(alpha) residuals dropped.
struct PairDynamics {
  double dp_m;
  double dq_mm;
};
PairDynamics pair_dynamics_rhs(double p_m, double q_mm, int n, int node_count,
                               const UtilityMatrix2& u, double alpha);

// xi coefficients of the closed-form diffusion probability.
std::array<double, 4> theorem1_xi(int n);

struct DiffusionPrediction {
  double value = 0.0;
  bool in_unit_interval = true;  // first-order value can leave [0,1]
};

// P = 1/(n+1) + alpha n N / (6 (n+1)^3) * (xi1 u1 + xi2 u2 + xi3 u3 + xi4 u4)
// Returned unclamped; the range flag marks approximation breakdown.
DiffusionPrediction theorem1_closed_form(int n, int node_count, double alpha,
                                         const UtilityMatrix2& u);

// a = (n-2)(n+3)(u1 - u2 - u3 + u4)
// b = -(n-1)(n+3) u1 - 3 u2 + (n^2 + n - 3) u3 + (n+3) u4
// a + 3b > 0 means good signals spread rather than shrink.
std::pair<double, double> appendix_coeffs(int n, const UtilityMatrix2& u);

// Backward-Kolmogorov fixation approximation
//   H(p) = p + alpha N / (6 (n+1)) p (1-p) ((a + 3b) + a p).
double fixation_kolmogorov(int n, int node_count, double alpha,
                           const UtilityMatrix2& u, double p_m0);

// --- strategy evolution Monte Carlo ---------------------------------------

enum class UpdateRule { im, bd, db };
std::string to_string(UpdateRule rule);

// Binary strategy field over a topology with incrementally maintained node,
// edge and conditional statistics. Strategy 1 = S_m.
class EvoState {
 public:
  EvoState(const Topology& topo, std::vector<std::uint8_t> strategies);

  std::uint8_t strategy(int i) const { return s_[i]; }
  std::span<const std::uint8_t> strategies() const { return s_; }
  int m_neighbors(int i) const { return m_nbrs_[i]; }

  int m_count() const { return static_cast<int>(m_count_); }
  bool absorbed() const {
    return m_count_ == 0 || m_count_ == topo_->node_count();
  }

  double p_m() const;
  double p_r() const { return 1.0 - p_m(); }
  // ordered-pair edge fractions; p_rm counts one orientation so that
  // p_mm + 2 p_rm + p_rr = 1 and p_XY = p_Y q_{X|Y} on regular graphs
  double p_mm() const;
  double p_rm() const;
  double p_rr() const;
  Conditionals conditionals() const;

  void set_strategy(int i, std::uint8_t s);

  const Topology& topology() const { return *topo_; }

 private:
  const Topology* topo_;
  std::vector<std::uint8_t> s_;
  std::vector<std::int32_t> m_nbrs_;
  std::int64_t m_count_ = 0;
  std::int64_t mm_pairs_ = 0;  // ordered (m,m) pairs
  std::int64_t rm_pairs_ = 0;  // ordered (r,m) + (m,r) pairs
  std::int64_t m_degree_sum_ = 0;
  std::int64_t r_degree_sum_ = 0;
};

// One strategy-update event. Fitness comes from realized local neighbor
// configurations: f_k = (1 - alpha) + alpha sum_{l ~ k} u(s_k, s_l).
void im_strategy_step(EvoState& state, const UtilityMatrix2& u, double alpha,
                      Rng& rng);
void bd_strategy_step(EvoState& state, const UtilityMatrix2& u, double alpha,
                      Rng& rng);
void db_strategy_step(EvoState& state, const UtilityMatrix2& u, double alpha,
                      Rng& rng);
void strategy_step(EvoState& state, const UtilityMatrix2& u, double alpha,
                   Rng& rng, UpdateRule rule);

// Initial strategy placements.
struct Placement {
  enum class Kind {
    evenly_spaced,    // S_m on every (n+1)-th node; requires (n+1) | N and
                      // every common node adjacent to exactly one good node
    random_fraction,  // S_m on a uniform random fraction of the nodes
    explicit_nodes,   // S_m exactly on the listed nodes
  };
  Kind kind = Kind::evenly_spaced;
  double m_fraction = 0.0;      // random_fraction
  std::vector<int> m_nodes;     // explicit_nodes

  static Placement evenly_spaced() { return {}; }
  static Placement random_fraction_of(double fraction);
  static Placement explicit_set(std::vector<int> nodes);
};

// Throws PlacementError when the evenly-spaced packing is infeasible.
std::vector<std::uint8_t> make_initial_strategies(const Topology& topo,
                                                  const Placement& placement,
                                                  Rng* rng = nullptr);

struct FixationResult {
  double estimate = 0.0;       // fixations / runs
  double stderr_ = 0.0;        // binomial
  bool degenerate_stderr = false;
  std::int64_t fixations = 0;  // S_m reached the whole network
  std::int64_t extinctions = 0;
  std::int64_t censored = 0;   // step-limit hits, never counted as fixation
  std::int64_t runs = 0;
  double mean_events = 0.0;    // strategy updates per run
};

struct FixationOptions {
  std::int64_t runs = 10000;
  std::int64_t step_limit = 10000000;
  std::uint64_t seed = 1;
  int threads = 0;
  UpdateRule rule = UpdateRule::im;
};

// Monte Carlo fixation probability: repeat strategy updates from the initial
// placement until absorption or the step limit. Runs are independent with
// per-run seeds derived from (seed, run index).
FixationResult fixation_probability(const Topology& topo,
                                    const UtilityMatrix2& u, double alpha,
                                    const Placement& placement,
                                    const FixationOptions& options);

struct RuleCompareResult {
  std::map<UpdateRule, FixationResult> by_rule;
  bool regular_topology = true;  // theorem scope; non-regular is a warning
};

RuleCompareResult strategy_evolution_rule_compare(
    const Topology& topo, const UtilityMatrix2& u, double alpha,
    const Placement& placement, const FixationOptions& options);

// --- evolutionarily stable strategy ---------------------------------------

struct EssVerdict {
  bool ess = false;
  std::string clause;  // which condition fired
};

// Complete graphs: S_m is ESS iff u4 > u2, or u4 == u2 and u3 > u1.
EssVerdict ess_complete(const UtilityMatrix2& u);

struct EssRegularVerdict {
  bool ess = false;
  double u_prime = 0.0;
  bool boundary = false;  // u4 == u2 + u'
};

// Regular graphs of degree n >= 3: S_m is ESS iff u4 > u2 + u', with the
// update-rule dependent pair-approximation correction u'.
EssRegularVerdict ess_regular(const UtilityMatrix2& u, int n, UpdateRule rule);

// Replicator dynamics with the primed payoffs u1' = u1, u2' = u2 + u',
// u3' = u3 - u', u4' = u4; explicit fixed-step integration, the simplex is
// renormalized every step.
struct ReplicatorPoint {
  double t, p_r, p_m;
};
std::vector<ReplicatorPoint> replicator_trajectory(const UtilityMatrix2& u,
                                                   double u_prime, double p_r0,
                                                   long steps, double dt,
                                                   long record_every = 1);

}  // namespace adaptnet::evo
