#include "adaptnet/theory_check.hpp"

#include <chrono>
#include <limits>
#include <cmath>

#include "adaptnet/combiners.hpp"
#include "adaptnet/egt_combiners.hpp"
#include "adaptnet/errors.hpp"
#include "adaptnet/evo_game.hpp"
#include "adaptnet/rng.hpp"
#include "adaptnet/topology.hpp"

namespace adaptnet::theory {

bool TheoryReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

evo::UtilityMatrix2 random_matrix(Rng& rng, double lo, double hi) {
  evo::UtilityMatrix2 u;
  u.u1 = lo + (hi - lo) * rng.uniform();
  u.u2 = lo + (hi - lo) * rng.uniform();
  u.u3 = lo + (hi - lo) * rng.uniform();
  u.u4 = lo + (hi - lo) * rng.uniform();
  return u;
}

// draws with the ordering u1 < u3 < u2 < u4
evo::UtilityMatrix2 random_ordered_matrix(Rng& rng) {
  double v[4];
  for (double& x : v) x = 0.1 + 9.9 * rng.uniform();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (v[j] < v[i]) std::swap(v[i], v[j]);
  evo::UtilityMatrix2 u{v[0], v[2], v[1], v[3], true};
  return u;
}

}  // namespace

TheoryReport theory_check(const TheoryCheckOptions& opt) {
  if (opt.n_min < 3)
    throw ConfigError("theory check rejects n < 3 (pair approximation bound)");
  if (opt.n_max < opt.n_min) throw ConfigError("n_max must be >= n_min");
  TheoryReport report;

  const auto t0 = std::chrono::steady_clock::now();

  // closed form vs appendix coefficients: P(xi) ==
  // 1/(n+1) + alpha n N (a + 3b) / (6 (n+1)^3)
  {
    Rng rng(mix_seed(opt.seed, 1));
    IdentityCheck c{"theorem1_xi_vs_appendix_a3b", 0.0, 1e-12, false};
    for (long k = 0; k < opt.draws; ++k) {
      const int n =
          opt.n_min + static_cast<int>(rng.uniform_int(opt.n_max - opt.n_min + 1));
      const int big_n = n + 1 + static_cast<int>(rng.uniform_int(1000));
      const double alpha = 0.1 * rng.uniform();
      const evo::UtilityMatrix2 u = random_matrix(rng, 0.0, 10.0);

      auto xi = evo::theorem1_xi(n);
      xi[1] += opt.xi2_offset;
      const double np1 = n + 1.0;
      const double via_xi =
          1.0 / np1 + alpha * n * big_n / (6.0 * np1 * np1 * np1) *
                          (xi[0] * u.u1 + xi[1] * u.u2 + xi[2] * u.u3 +
                           xi[3] * u.u4);
      const auto [a, b] = evo::appendix_coeffs(n, u);
      const double via_ab =
          1.0 / np1 +
          alpha * n * big_n / (6.0 * np1 * np1 * np1) * (a + 3.0 * b);
      const double rel =
          std::abs(via_xi - via_ab) / std::max(1e-300, std::abs(via_ab));
      c.max_deviation = std::max(c.max_deviation, rel);
    }
    c.pass = c.max_deviation <= c.tolerance;
    report.checks.push_back(c);
  }

  // sum of xi coefficients vanishes identically
  {
    IdentityCheck c{"xi_sum_zero", 0.0, 0.0, false};
    for (int n = 3; n <= 200; ++n) {
      const auto xi = evo::theorem1_xi(n);
      const double s = xi[0] + xi[1] + xi[2] + xi[3];
      c.max_deviation = std::max(c.max_deviation, std::abs(s));
    }
    c.pass = c.max_deviation <= c.tolerance;
    report.checks.push_back(c);
  }

  report.identity_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  // IM weights over the per-rule fitness reproduce the static rules
  {
    Rng rng(mix_seed(opt.seed, 2));
    IdentityCheck c{"im_fitness_reproduces_static_rules", 0.0, 1e-12, false};
    const std::pair<egt::FitnessRule, rules::StaticRule> pairs[] = {
        {egt::FitnessRule::uniform, rules::StaticRule::uniform},
        {egt::FitnessRule::max_degree, rules::StaticRule::max_degree},
        {egt::FitnessRule::laplacian, rules::StaticRule::laplacian},
        {egt::FitnessRule::rel_degree, rules::StaticRule::rel_degree},
        {egt::FitnessRule::rel_degree_var, rules::StaticRule::rel_degree_var},
    };
    for (int t = 0; t < opt.topologies; ++t) {
      const int n_nodes = 4 + static_cast<int>(rng.uniform_int(
                                  std::max(1, opt.max_nodes - 3)));
      const double radius = 0.45 + 0.4 * rng.uniform();
      const auto geo =
          random_geometric(n_nodes, radius, mix_seed(opt.seed, 3, t), 2000);
      std::vector<NodeProfile> profiles(n_nodes);
      for (auto& p : profiles) {
        p.noise_variance = 0.2 + 1.8 * rng.uniform();
        p.regressor_spectrum = {1.0};
      }
      for (const auto& [frule, srule] : pairs) {
        for (int i = 0; i < n_nodes; ++i) {
          std::vector<int> nodes{i};
          const auto nb = geo.topology.neighbors(i);
          nodes.insert(nodes.end(), nb.begin(), nb.end());
          std::vector<double> fitness;
          fitness.reserve(nodes.size());
          for (const int j : nodes)
            fitness.push_back(
                egt::fitness_table2(frule, geo.topology, profiles, i, j));
          const WeightRow im = egt::im_weights(nodes, fitness);
          const WeightRow ref =
              rules::make_row(srule, geo.topology, profiles, i);
          for (std::size_t k = 0; k < im.nodes.size(); ++k) {
            // same support order: self first, then sorted neighbors
            const double dev = std::abs(im.weights[k] - ref.weights[k]);
            c.max_deviation = std::max(c.max_deviation, dev);
          }
        }
      }
    }
    c.pass = c.max_deviation <= c.tolerance;
    report.checks.push_back(c);
  }

  // steady-EMSE specializations of pi(x, y)
  {
    Rng rng(mix_seed(opt.seed, 4));
    IdentityCheck c{"pi_emse_specializations", 0.0, 1e-13, false};
    for (int k = 0; k < 200; ++k) {
      const double mu = 1e-4 + 0.05 * rng.uniform();
      const double tr = 1.0 + 19.0 * rng.uniform();
      const double z2 = 1.0 + 39.0 * rng.uniform();
      const double sr2 = 0.5 + 2.0 * rng.uniform();
      const double sm2 = sr2 * (0.05 + 0.9 * rng.uniform());
      const double sr = std::sqrt(sr2), sm = std::sqrt(sm2);
      const double c1 = mu * tr / 4.0, c2 = mu * mu * z2 / 2.0;
      const double cross = 2.0 * sm2 * sr2 / (sm2 + sr2);
      const double expect[4] = {
          c1 * sr2 + 2.0 * c2,
          c1 * cross + 2.0 * c2 * sr2 / sm2,
          c1 * cross + 2.0 * c2 * sm2 / sr2,
          c1 * sm2 + 2.0 * c2,
      };
      const double got[4] = {
          evo::pi_emse(sr, sr, mu, tr, z2),
          evo::pi_emse(sr, sm, mu, tr, z2),
          evo::pi_emse(sm, sr, mu, tr, z2),
          evo::pi_emse(sm, sm, mu, tr, z2),
      };
      for (int i = 0; i < 4; ++i) {
        const double rel = std::abs(got[i] - expect[i]) / expect[i];
        c.max_deviation = std::max(c.max_deviation, rel);
      }
    }
    c.pass = c.max_deviation <= c.tolerance;
    report.checks.push_back(c);
  }

  // u' < 0 for all update rules whenever u1 < u3 < u2 < u4
  {
    Rng rng(mix_seed(opt.seed, 5));
    IdentityCheck c{"u_prime_negative_for_ordered_matrices",
                    -std::numeric_limits<double>::infinity(), 0.0, false};
    bool ok = true;
    for (int k = 0; k < 500 && ok; ++k) {
      const evo::UtilityMatrix2 u = random_ordered_matrix(rng);
      const int n = opt.n_min + static_cast<int>(rng.uniform_int(
                                    opt.n_max - opt.n_min + 1));
      for (const auto rule :
           {evo::UpdateRule::im, evo::UpdateRule::bd, evo::UpdateRule::db}) {
        const auto v = evo::ess_regular(u, n, rule);
        if (!(v.u_prime < 0.0) || !v.ess) ok = false;
        // tracks the largest (least negative) u'
        c.max_deviation = std::max(c.max_deviation, v.u_prime);
      }
    }
    c.pass = ok && c.max_deviation < 0.0;
    report.checks.push_back(c);
  }

  // step-size bound is exactly the EMSE-ordering boundary
  {
    Rng rng(mix_seed(opt.seed, 6));
    IdentityCheck c{"step_size_bound_boundary", 0.0, 0.0, false};
    bool ok = true;
    for (int k = 0; k < 200 && ok; ++k) {
      const double tau = 0.05 + 0.9 * rng.uniform();
      const double sr2 = 0.5 + 2.0 * rng.uniform();
      const double tr = 1.0 + 19.0 * rng.uniform();
      const double z2 = 1.0 + 39.0 * rng.uniform();
      const double bound = evo::step_size_bound(tau, tr, sr2, z2);
      const double inside = bound * std::max(1e-6, rng.uniform() * 0.999);
      const auto anywhere_below =
          evo::utility_from_pi(sr2, tau * sr2, inside, tr, z2);
      const auto below =
          evo::utility_from_pi(sr2, tau * sr2, bound * 0.999, tr, z2);
      const auto above =
          evo::utility_from_pi(sr2, tau * sr2, bound * 1.001, tr, z2);
      if (!anywhere_below.ordering_valid || !below.ordering_valid ||
          above.ordering_valid)
        ok = false;
    }
    c.pass = ok;
    report.checks.push_back(c);
  }

  return report;
}

}  // namespace adaptnet::theory
