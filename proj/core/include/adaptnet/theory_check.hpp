#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace adaptnet::theory {

struct IdentityCheck {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct TheoryReport {
  std::vector<IdentityCheck> checks;
  double identity_seconds = 0.0;  // wall time of the closed-form block
  bool all_pass() const;
};

struct TheoryCheckOptions {
  std::uint64_t seed = 20240101;
  long draws = 1000;       // random (n, U, alpha, N) draws
  int topologies = 100;    // random connected topologies for the rule check
  int max_nodes = 30;
  int n_min = 3;           // pair approximation bound: must stay >= 3
  int n_max = 12;
  int xi2_offset = 0;      // nonzero injects a typo; self-test of the checker
};

// Bundled algebraic identities: the closed-form diffusion probability agrees
// with its (a, 3b) coefficient form, the xi coefficients sum to zero, IM
// weights over the per-rule fitness reproduce the static combination rules,
// the steady-EMSE specializations hold, the pair-approximation payoff
// correction is negative for validly ordered matrices, and the step-size
// bound is tight for the EMSE ordering.
TheoryReport theory_check(const TheoryCheckOptions& options);

}  // namespace adaptnet::theory
