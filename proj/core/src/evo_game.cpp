#include "adaptnet/evo_game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "adaptnet/egt_combiners.hpp"
#include "adaptnet/errors.hpp"
#include "adaptnet/parallel.hpp"

namespace adaptnet::evo {

double UtilityMatrix2::max_entry() const {
  return std::max(std::max(u1, u2), std::max(u3, u4));
}

UtilityMatrix2 UtilityMatrix2::scaled(double factor) const {
  UtilityMatrix2 s{u1 * factor, u2 * factor, u3 * factor, u4 * factor,
                   ordering_valid};
  return s;
}

double pi_emse(double x, double y, double mu, double trace_ru,
               double zeta_norm2) {
  const double x2 = x * x, y2 = y * y;
  const double c1 = mu * trace_ru / 4.0;
  const double c2 = mu * mu * zeta_norm2 / 2.0;
  const double s1 = 2.0 * x2 * y2 / (x2 + y2);
  const double s2 = x2 * y2 / 2.0;
  return c1 * s1 + c2 * x2 * x2 / s2;
}

UtilityMatrix2 utility_from_pi(double sigma_r2, double sigma_m2, double mu,
                               double trace_ru, double zeta_norm2) {
  if (!(sigma_r2 > 0.0) || !(sigma_m2 > 0.0))
    throw std::invalid_argument("noise variances must be positive");
  if (sigma_m2 > sigma_r2)
    throw std::invalid_argument("good-node variance must not exceed sigma_r2");
  const double sr = std::sqrt(sigma_r2), sm = std::sqrt(sigma_m2);
  UtilityMatrix2 u;
  u.u1 = 1.0 / pi_emse(sr, sr, mu, trace_ru, zeta_norm2);
  u.u2 = 1.0 / pi_emse(sm, sr, mu, trace_ru, zeta_norm2);
  u.u3 = 1.0 / pi_emse(sr, sm, mu, trace_ru, zeta_norm2);
  u.u4 = 1.0 / pi_emse(sm, sm, mu, trace_ru, zeta_norm2);
  u.ordering_valid = u.check_ordering();
  return u;
}

double step_size_bound(double tau, double trace_ru, double sigma_r2,
                       double zeta_norm2) {
  return tau * trace_ru * sigma_r2 / (4.0 * (1.0 + tau) * zeta_norm2);
}

LocalFitness local_fitnesses(int n, int n_r, int n_m, const Conditionals& q,
                             const UtilityMatrix2& u, double alpha) {
  if (n_r + n_m != n || n_r < 0 || n_m < 0)
    throw std::invalid_argument("neighbor split must satisfy n_r + n_m = n");
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("alpha must be in [0, 1]");
  const double base = 1.0 - alpha;
  const double k = n - 1.0;
  LocalFitness f;
  f.f0 = base + alpha * (n_r * u.u1 + n_m * u.u2);
  f.f_m = base + alpha * ((k * q.q_rm + 1.0) * u.u3 + k * q.q_mm * u.u4);
  f.f_r = base + alpha * ((k * q.q_rr + 1.0) * u.u1 + k * q.q_mr * u.u2);
  f.g0 = base + alpha * (n_r * u.u2 + n_m * u.u3);
  f.g_m = base + alpha * (k * q.q_rm * u.u3 + (k * q.q_mm + 1.0) * u.u4);
  f.g_r = base + alpha * (k * q.q_rr * u.u1 + (k * q.q_mr + 1.0) * u.u2);
  return f;
}

Conditionals slow_manifold_conditionals(double p_m, int n) {
  if (n < 2) throw std::invalid_argument("slow manifold needs n >= 2");
  if (p_m < 0.0 || p_m > 1.0)
    throw std::invalid_argument("p_m must be in [0, 1]");
  const double k = n - 1.0;
  Conditionals q;
  q.q_mm = p_m + (1.0 - p_m) / k;
  q.q_mr = (n - 2.0) / k * p_m;
  q.q_rm = (n - 2.0) / k * (1.0 - p_m);
  q.q_rr = 1.0 - (n - 2.0) / k * p_m;
  return q;
}

PairDynamics pair_dynamics_rhs(double p_m, double q_mm, int n, int node_count,
                               const UtilityMatrix2& u, double alpha) {
  if (n <= 1) throw std::invalid_argument("pair dynamics needs n > 1");
  if (p_m < 0.0 || p_m > 1.0)
    throw std::invalid_argument("p_m must be in [0, 1]");
  const double n_d = n;
  const double big_n = node_count;
  const double q_rm = 1.0 - q_mm;
  const double p_rm = p_m * q_rm;
  const double p_r = 1.0 - p_m;
  const double q_mr = p_r > 0.0 ? p_rm / p_r : 0.0;
  const double q_rr = 1.0 - q_mr;

  const double shared = (n_d - 1.0) * (q_rr + q_mm);
  const double g1 = -q_rr * (shared + 3.0);
  const double g2 = -q_mm - q_mr * (shared + 2.0) - 2.0 / (n_d - 1.0);
  const double g3 = q_rr + q_rm * (shared + 2.0) + 2.0 / (n_d - 1.0);
  const double g4 = q_mm * (shared + 3.0);

  PairDynamics d;
  d.dp_m = alpha * n_d * (n_d - 1.0) * p_rm /
           (big_n * (n_d + 1.0) * (n_d + 1.0)) *
           (g1 * u.u1 + g2 * u.u2 + g3 * u.u3 + g4 * u.u4);
  d.dq_mm = p_m > 0.0
                ? 2.0 / ((n_d + 1.0) * big_n) * (p_rm / p_m) *
                      (1.0 + (n_d - 1.0) * (q_mr - q_mm))
                : 0.0;
  return d;
}

std::array<double, 4> theorem1_xi(int n) {
  const double nd = n;
  return {-2.0 * nd * nd - 5.0 * nd + 3.0, -nd * nd - nd - 3.0,
          2.0 * nd * nd + 2.0 * nd - 3.0, nd * nd + 4.0 * nd + 3.0};
}

DiffusionPrediction theorem1_closed_form(int n, int node_count, double alpha,
                                         const UtilityMatrix2& u) {
  if (n < 3) throw std::invalid_argument("theorem 1 needs degree n >= 3");
  if (node_count < n + 1)
    throw std::invalid_argument("theorem 1 needs N >= n + 1");
  const auto xi = theorem1_xi(n);
  const double np1 = n + 1.0;
  const double value =
      1.0 / np1 +
      alpha * n * node_count / (6.0 * np1 * np1 * np1) *
          (xi[0] * u.u1 + xi[1] * u.u2 + xi[2] * u.u3 + xi[3] * u.u4);
  return {value, value >= 0.0 && value <= 1.0};
}

std::pair<double, double> appendix_coeffs(int n, const UtilityMatrix2& u) {
  if (n < 3) throw std::invalid_argument("appendix coefficients need n >= 3");
  const double nd = n;
  const double a = (nd - 2.0) * (nd + 3.0) * (u.u1 - u.u2 - u.u3 + u.u4);
  const double b = -(nd - 1.0) * (nd + 3.0) * u.u1 - 3.0 * u.u2 +
                   (nd * nd + nd - 3.0) * u.u3 + (nd + 3.0) * u.u4;
  return {a, b};
}

double fixation_kolmogorov(int n, int node_count, double alpha,
                           const UtilityMatrix2& u, double p_m0) {
  if (p_m0 < 0.0 || p_m0 > 1.0)
    throw std::invalid_argument("p_m0 must be in [0, 1]");
  const auto [a, b] = appendix_coeffs(n, u);
  return p_m0 + alpha * node_count / (6.0 * (n + 1.0)) * p_m0 * (1.0 - p_m0) *
                    ((a + 3.0 * b) + a * p_m0);
}

std::string to_string(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::im: return "im";
    case UpdateRule::bd: return "bd";
    case UpdateRule::db: return "db";
  }
  return "?";
}

// --- EvoState ---------------------------------------------------------------

EvoState::EvoState(const Topology& topo, std::vector<std::uint8_t> strategies)
    : topo_(&topo), s_(std::move(strategies)) {
  if (static_cast<int>(s_.size()) != topo.node_count())
    throw std::invalid_argument("one strategy per node required");
  const int n = topo.node_count();
  m_nbrs_.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    if (s_[i] > 1) throw std::invalid_argument("strategies are binary");
    if (s_[i]) {
      ++m_count_;
      m_degree_sum_ += topo.degree(i);
    } else {
      r_degree_sum_ += topo.degree(i);
    }
    for (const int j : topo.neighbors(i)) m_nbrs_[i] += s_[j];
  }
  for (int i = 0; i < n; ++i) {
    if (s_[i])
      mm_pairs_ += m_nbrs_[i];
    else
      rm_pairs_ += m_nbrs_[i];
  }
  rm_pairs_ *= 2;  // (r,m) plus (m,r) orientations
}

double EvoState::p_m() const {
  return static_cast<double>(m_count_) / topo_->node_count();
}

double EvoState::p_mm() const {
  return static_cast<double>(mm_pairs_) / (2.0 * topo_->edge_count());
}

double EvoState::p_rm() const {
  return static_cast<double>(rm_pairs_) / 2.0 / (2.0 * topo_->edge_count());
}

double EvoState::p_rr() const { return 1.0 - p_mm() - 2.0 * p_rm(); }

Conditionals EvoState::conditionals() const {
  Conditionals q{};
  q.q_mm = m_degree_sum_ > 0
               ? static_cast<double>(mm_pairs_) / m_degree_sum_
               : 0.0;
  q.q_rm = m_degree_sum_ > 0 ? 1.0 - q.q_mm : 0.0;
  q.q_mr = r_degree_sum_ > 0
               ? static_cast<double>(rm_pairs_) / 2.0 / r_degree_sum_
               : 0.0;
  q.q_rr = r_degree_sum_ > 0 ? 1.0 - q.q_mr : 0.0;
  return q;
}

void EvoState::set_strategy(int i, std::uint8_t s) {
  if (s == s_[i]) return;
  const int deg = topo_->degree(i);
  if (s) {
    ++m_count_;
    m_degree_sum_ += deg;
    r_degree_sum_ -= deg;
  } else {
    --m_count_;
    m_degree_sum_ -= deg;
    r_degree_sum_ += deg;
  }
  for (const int j : topo_->neighbors(i)) {
    if (s) {  // r -> m
      if (s_[j]) {
        rm_pairs_ -= 2;
        mm_pairs_ += 2;
      } else {
        rm_pairs_ += 2;
      }
      ++m_nbrs_[j];
    } else {  // m -> r
      if (s_[j]) {
        mm_pairs_ -= 2;
        rm_pairs_ += 2;
      } else {
        rm_pairs_ -= 2;
      }
      --m_nbrs_[j];
    }
  }
  s_[i] = s;
}

// --- strategy update events -------------------------------------------------

namespace {

// baseline 1, utility summed over k's realized neighbor configuration (never
// the mean-field conditionals)
inline double node_fitness(const EvoState& st, const Topology& topo, int k,
                           const UtilityMatrix2& u, double alpha) {
  const int cm = st.m_neighbors(k);
  const int cr = topo.degree(k) - cm;
  const bool m = st.strategy(k) != 0;
  const egt::Fitness f{
      1.0, alpha, cr * u.entry(m, false) + cm * u.entry(m, true)};
  return f.value();
}

}  // namespace

void im_strategy_step(EvoState& state, const UtilityMatrix2& u, double alpha,
                      Rng& rng) {
  const Topology& topo = state.topology();
  const int focal = static_cast<int>(rng.uniform_int(topo.node_count()));
  const auto nb = topo.neighbors(focal);

  const double f_self = node_fitness(state, topo, focal, u, alpha);
  double total = f_self;
  // two passes keep the draw single-scan without storing fitness
  for (const int j : nb) total += node_fitness(state, topo, j, u, alpha);
  if (!(total > 0.0)) throw std::domain_error("nonpositive fitness total");

  double x = rng.uniform() * total - f_self;
  if (x < 0.0) return;  // keeps own strategy
  for (const int j : nb) {
    x -= node_fitness(state, topo, j, u, alpha);
    if (x < 0.0) {
      state.set_strategy(focal, state.strategy(j));
      return;
    }
  }
  // numerical tail: last neighbor
  state.set_strategy(focal, state.strategy(nb.back()));
}

void bd_strategy_step(EvoState& state, const UtilityMatrix2& u, double alpha,
                      Rng& rng) {
  const Topology& topo = state.topology();
  const int n_nodes = topo.node_count();
  // Reproduction probability proportional to fitness over the whole network;
  // rejection sampling against a uniform bound avoids a global scan.
  const double u_max = std::max(0.0, u.max_entry());
  const double f_ub = (1.0 - alpha) + alpha * (topo.n_max() - 1) * u_max;
  int parent = 0;
  for (;;) {
    parent = static_cast<int>(rng.uniform_int(n_nodes));
    const double f = node_fitness(state, topo, parent, u, alpha);
    if (rng.uniform() * f_ub <= f) break;
  }
  // offspring replaces a uniform member of N_parent (self included)
  const auto nb = topo.neighbors(parent);
  const std::uint64_t pick = rng.uniform_int(nb.size() + 1);
  const int target =
      pick == nb.size() ? parent : nb[static_cast<std::size_t>(pick)];
  state.set_strategy(target, state.strategy(parent));
}

void db_strategy_step(EvoState& state, const UtilityMatrix2& u, double alpha,
                      Rng& rng) {
  const Topology& topo = state.topology();
  const int focal = static_cast<int>(rng.uniform_int(topo.node_count()));
  const auto nb = topo.neighbors(focal);
  const double ni = topo.neighborhood_size(focal);

  double total = node_fitness(state, topo, focal, u, alpha);
  for (const int j : nb) total += node_fitness(state, topo, j, u, alpha);
  if (!(total > 0.0)) throw std::domain_error("nonpositive fitness total");

  // P(adopt j) = f_j / (n_i * total) for j != i, keep otherwise
  double x = rng.uniform() * ni * total;
  for (const int j : nb) {
    x -= node_fitness(state, topo, j, u, alpha);
    if (x < 0.0) {
      state.set_strategy(focal, state.strategy(j));
      return;
    }
  }
}

void strategy_step(EvoState& state, const UtilityMatrix2& u, double alpha,
                   Rng& rng, UpdateRule rule) {
  switch (rule) {
    case UpdateRule::im: im_strategy_step(state, u, alpha, rng); return;
    case UpdateRule::bd: bd_strategy_step(state, u, alpha, rng); return;
    case UpdateRule::db: db_strategy_step(state, u, alpha, rng); return;
  }
}

// --- placements and fixation -------------------------------------------------

Placement Placement::random_fraction_of(double fraction) {
  Placement p;
  p.kind = Kind::random_fraction;
  p.m_fraction = fraction;
  return p;
}

Placement Placement::explicit_set(std::vector<int> nodes) {
  Placement p;
  p.kind = Kind::explicit_nodes;
  p.m_nodes = std::move(nodes);
  return p;
}

std::vector<std::uint8_t> make_initial_strategies(const Topology& topo,
                                                  const Placement& placement,
                                                  Rng* rng) {
  const int n_nodes = topo.node_count();
  std::vector<std::uint8_t> s(n_nodes, 0);
  switch (placement.kind) {
    case Placement::Kind::evenly_spaced: {
      if (!topo.is_regular())
        throw PlacementError(
            "evenly spaced placement requires a regular topology");
      const int n = topo.degree(0);
      if (n_nodes % (n + 1) != 0)
        throw PlacementError("evenly spaced placement needs (n+1) | N: N = " +
                             std::to_string(n_nodes) + ", n = " +
                             std::to_string(n));
      for (int i = 0; i < n_nodes; i += n + 1) s[i] = 1;
      // worst-case initial state: every common node sees exactly one good node
      for (int i = 0; i < n_nodes; ++i) {
        if (s[i]) continue;
        int good = 0;
        for (const int j : topo.neighbors(i)) good += s[j];
        if (good != 1)
          throw PlacementError(
              "evenly spaced placement is not a perfect packing on this "
              "topology: node " +
              std::to_string(i) + " sees " + std::to_string(good) +
              " good neighbors");
      }
      return s;
    }
    case Placement::Kind::random_fraction: {
      if (!rng)
        throw std::invalid_argument("random placement needs an RNG stream");
      if (placement.m_fraction < 0.0 || placement.m_fraction > 1.0)
        throw PlacementError("placement fraction outside [0, 1]");
      const int count = static_cast<int>(
          std::lround(placement.m_fraction * n_nodes));
      std::vector<int> ids(n_nodes);
      std::iota(ids.begin(), ids.end(), 0);
      for (int k = 0; k < count; ++k) {
        const int j =
            k + static_cast<int>(rng->uniform_int(n_nodes - k));
        std::swap(ids[k], ids[j]);
        s[ids[k]] = 1;
      }
      return s;
    }
    case Placement::Kind::explicit_nodes: {
      for (const int i : placement.m_nodes) {
        if (i < 0 || i >= n_nodes)
          throw PlacementError("placement node out of range");
        s[i] = 1;
      }
      return s;
    }
  }
  throw PlacementError("unhandled placement kind");
}

FixationResult fixation_probability(const Topology& topo,
                                    const UtilityMatrix2& u, double alpha,
                                    const Placement& placement,
                                    const FixationOptions& options) {
  if (options.runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("alpha must be in [0, 1]");
  if (alpha > 0.0 &&
      std::min(std::min(u.u1, u.u2), std::min(u.u3, u.u4)) < 0.0)
    throw std::invalid_argument(
        "negative utilities break fitness positivity");
  const int n_nodes = topo.node_count();

  std::vector<std::uint8_t> fixed_init;
  if (placement.kind != Placement::Kind::random_fraction)
    fixed_init = make_initial_strategies(topo, placement);

  enum : std::uint8_t { kFixed, kExtinct, kCensored };
  std::vector<std::uint8_t> outcome(options.runs);
  std::vector<std::int64_t> events(options.runs);
  const std::uint64_t rule_salt =
      static_cast<std::uint64_t>(options.rule) + 0x51;

  parallel_for(options.runs, options.threads, [&](std::int64_t run) {
    Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(run), rule_salt));
    std::vector<std::uint8_t> init =
        placement.kind == Placement::Kind::random_fraction
            ? make_initial_strategies(topo, placement, &rng)
            : fixed_init;
    EvoState state(topo, std::move(init));
    std::int64_t ev = 0;
    while (!state.absorbed() && ev < options.step_limit) {
      strategy_step(state, u, alpha, rng, options.rule);
      ++ev;
    }
    events[run] = ev;
    outcome[run] = !state.absorbed() ? kCensored
                   : state.m_count() == n_nodes ? kFixed
                                                : kExtinct;
  });

  FixationResult res;
  res.runs = options.runs;
  double ev_total = 0.0;
  for (std::int64_t r = 0; r < options.runs; ++r) {
    ev_total += static_cast<double>(events[r]);
    if (outcome[r] == kFixed)
      ++res.fixations;
    else if (outcome[r] == kExtinct)
      ++res.extinctions;
    else
      ++res.censored;
  }
  res.mean_events = ev_total / static_cast<double>(options.runs);
  res.estimate =
      static_cast<double>(res.fixations) / static_cast<double>(options.runs);
  const double pq = res.estimate * (1.0 - res.estimate);
  res.degenerate_stderr = options.runs < 2 || pq == 0.0;
  res.stderr_ = std::sqrt(pq / static_cast<double>(options.runs));
  return res;
}

RuleCompareResult strategy_evolution_rule_compare(
    const Topology& topo, const UtilityMatrix2& u, double alpha,
    const Placement& placement, const FixationOptions& options) {
  RuleCompareResult out;
  out.regular_topology = topo.is_regular();
  for (const UpdateRule rule :
       {UpdateRule::im, UpdateRule::bd, UpdateRule::db}) {
    FixationOptions o = options;
    o.rule = rule;
    out.by_rule[rule] = fixation_probability(topo, u, alpha, placement, o);
  }
  return out;
}

// --- ESS ---------------------------------------------------------------------

EssVerdict ess_complete(const UtilityMatrix2& u) {
  if (u.u4 > u.u2) return {true, "u4 > u2"};
  if (u.u4 == u.u2 && u.u3 > u.u1) return {true, "u4 = u2 and u3 > u1"};
  return {false, u.u4 < u.u2 ? "u4 < u2" : "u4 = u2 and u3 <= u1"};
}

EssRegularVerdict ess_regular(const UtilityMatrix2& u, int n,
                              UpdateRule rule) {
  if (n < 3)
    throw std::invalid_argument(
        "pair approximation undefined for n <= 2");
  const double nd = n;
  double up = 0.0;
  switch (rule) {
    case UpdateRule::im:
      up = ((nd + 3.0) * u.u1 + u.u2 - u.u3 - (nd + 3.0) * u.u4) /
           ((nd + 3.0) * (nd - 2.0));
      break;
    case UpdateRule::bd:
      up = ((nd + 1.0) * u.u1 + u.u2 - u.u3 - (nd + 1.0) * u.u4) /
           ((nd + 1.0) * (nd - 2.0));
      break;
    case UpdateRule::db:
      up = (u.u1 + u.u2 - u.u3 - u.u4) / (nd - 2.0);
      break;
  }
  EssRegularVerdict v;
  v.u_prime = up;
  v.ess = u.u4 > u.u2 + up;
  v.boundary = u.u4 == u.u2 + up;
  return v;
}

std::vector<ReplicatorPoint> replicator_trajectory(const UtilityMatrix2& u,
                                                   double u_prime, double p_r0,
                                                   long steps, double dt,
                                                   long record_every) {
  if (p_r0 < 0.0 || p_r0 > 1.0)
    throw std::invalid_argument("p_r0 must be in [0, 1]");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (record_every < 1) record_every = 1;
  const double u1 = u.u1;
  const double u2 = u.u2 + u_prime;
  const double u3 = u.u3 - u_prime;
  const double u4 = u.u4;

  double p_r = p_r0, p_m = 1.0 - p_r0;
  std::vector<ReplicatorPoint> ts;
  ts.reserve(static_cast<std::size_t>(steps / record_every) + 2);
  ts.push_back({0.0, p_r, p_m});
  for (long k = 1; k <= steps; ++k) {
    const double phi = p_r * p_r * u1 + p_r * p_m * (u2 + u3) + p_m * p_m * u4;
    const double dpr = p_r * (p_r * u1 + p_m * u2 - phi);
    const double dpm = p_m * (p_r * u3 + p_m * u4 - phi);
    p_r = std::clamp(p_r + dt * dpr, 0.0, 1.0);
    p_m = std::clamp(p_m + dt * dpm, 0.0, 1.0);
    const double total = p_r + p_m;
    p_r /= total;
    p_m /= total;
    if (k % record_every == 0 || k == steps)
      ts.push_back({k * dt, p_r, p_m});
  }
  return ts;
}

}  // namespace adaptnet::evo
