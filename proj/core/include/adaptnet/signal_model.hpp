#pragma once

#include <span>
#include <vector>

#include "adaptnet/rng.hpp"

namespace adaptnet {

// Per-node statistical identity: noise variance sigma^2, LMS step size mu and
// the eigenvalue spectrum zeta of the regressor covariance R_u. R_u is
// realized as diag(zeta); the analysis only ever consumes Tr(R_u) and
// ||zeta||^2, so the eigenbasis carries no information.
struct NodeProfile {
  double noise_variance = 1.0;
  double step_size = 0.01;
  std::vector<double> regressor_spectrum;

  double trace_ru() const;
  double zeta_norm2() const;

  // sigma^2 >= 0 (0 = degenerate noiseless node, tests only), mu > 0,
  // zeta_k > 0
  void validate() const;
};

struct DataSample {
  std::vector<double> regressor;  // u, row vector of length M
  double measurement = 0.0;       // d = u . w0 + v
};

// w0 = 1_M / sqrt(2), so ||w0||^2 = M / 2
std::vector<double> make_true_parameter(int m);

// u ~ N(0, diag(zeta)), v ~ N(0, sigma^2), d = u . w0 + v
DataSample sample(const NodeProfile& profile, std::span<const double> w0,
                  Rng& rng);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace adaptnet
