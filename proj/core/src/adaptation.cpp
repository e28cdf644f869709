#include "adaptnet/adaptation.hpp"

#include <stdexcept>

#include "adaptnet/errors.hpp"

namespace adaptnet {

NetworkState NetworkState::zero(int node_count, int m) {
  NetworkState s;
  s.estimates.assign(node_count, std::vector<double>(m, 0.0));
  s.mse_estimates.assign(node_count, 1.0);
  s.time = 0;
  return s;
}

std::vector<double> lms_adapt(std::span<const double> w,
                              const DataSample& sample, double mu) {
  if (w.size() != sample.regressor.size())
    throw std::invalid_argument("lms_adapt: dimension mismatch");
  const double innovation = sample.measurement - dot(sample.regressor, w);
  std::vector<double> out(w.begin(), w.end());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] += mu * sample.regressor[k] * innovation;
  return out;
}

std::vector<double> combine(const std::vector<std::vector<double>>& adapted,
                            const WeightRow& row) {
  if (row.nodes.empty()) throw CombinerError("combine: empty weight row");
  std::vector<double> out(adapted[row.nodes[0]].size(), 0.0);
  for (std::size_t k = 0; k < row.nodes.size(); ++k) {
    const auto& v = adapted[row.nodes[k]];
    const double w = row.weights[k];
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += w * v[d];
  }
  return out;
}

std::vector<double> global_lms_step(std::span<const double> w,
                                    std::span<const DataSample> samples,
                                    double mu) {
  std::vector<double> out(w.begin(), w.end());
  for (const auto& s : samples) {
    const double innovation = s.measurement - dot(s.regressor, w);
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] += mu * s.regressor[k] * innovation;
  }
  return out;
}

ErrorAwarePolicy::ErrorAwarePolicy(const Topology& topo,
                                   egt::ErrorFitnessForm form, double lambda,
                                   double nu, double beta_floor)
    : topo_(&topo),
      form_(form),
      lambda_(lambda),
      nu_(nu),
      beta_floor_(beta_floor) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(nu > 0.0) || nu > 1.0)
    throw std::invalid_argument("nu must be in (0, 1]");
}

std::string ErrorAwarePolicy::name() const {
  return form_ == egt::ErrorFitnessForm::power ? "error_aware_pow"
                                               : "error_aware_exp";
}

void ErrorAwarePolicy::refresh_trackers(NetworkState& state,
                                        const Topology& topo,
                                        std::span<const NodeProfile>,
                                        std::span<const DataSample> samples) {
  // rho uses the estimate held before this step's adaptation, matching the
  // a-priori error that defines the EMSE.
  for (int i = 0; i < topo.node_count(); ++i) {
    const double rho =
        egt::instantaneous_error(state.estimates[i], samples[i]);
    state.mse_estimates[i] =
        (1.0 - nu_) * state.mse_estimates[i] + nu_ * rho;
  }
}

WeightRow ErrorAwarePolicy::row(int i, const NetworkState& state) const {
  std::vector<int> nodes;
  nodes.reserve(topo_->neighborhood_size(i));
  nodes.push_back(i);
  const auto nb = topo_->neighbors(i);
  nodes.insert(nodes.end(), nb.begin(), nb.end());
  std::vector<double> betas;
  betas.reserve(nodes.size());
  for (const int j : nodes) betas.push_back(state.mse_estimates[j]);
  return egt::im_weights(
      std::move(nodes),
      egt::error_aware_fitness(betas, form_, lambda_, beta_floor_));
}

RandomSelectionPolicy::RandomSelectionPolicy(
    std::unique_ptr<CombinerPolicy> inner, std::uint64_t seed)
    : inner_(std::move(inner)), rng_(seed) {}

std::string RandomSelectionPolicy::name() const {
  return inner_->name() + "+random_selection";
}

void RandomSelectionPolicy::refresh_trackers(
    NetworkState& state, const Topology& topo,
    std::span<const NodeProfile> profiles,
    std::span<const DataSample> samples) {
  inner_->refresh_trackers(state, topo, profiles, samples);
}

WeightRow RandomSelectionPolicy::row(int i, const NetworkState& state) const {
  WeightRow base = inner_->row(i, state);
  double x = rng_.uniform();
  std::size_t pick = base.nodes.size() - 1;
  for (std::size_t k = 0; k < base.weights.size(); ++k) {
    x -= base.weights[k];
    if (x < 0.0) {
      pick = k;
      break;
    }
  }
  WeightRow onehot;
  onehot.nodes.push_back(base.nodes[pick]);
  onehot.weights.push_back(1.0);
  return onehot;
}

void network_step(NetworkState& state, const Topology& topo,
                  std::span<const NodeProfile> profiles,
                  CombinerPolicy& policy,
                  std::span<const DataSample> samples) {
  const int n = topo.node_count();
  if (static_cast<int>(samples.size()) != n)
    throw std::invalid_argument("network_step: one sample per node required");

  policy.refresh_trackers(state, topo, profiles, samples);

  std::vector<std::vector<double>> adapted(n);
  for (int j = 0; j < n; ++j)
    adapted[j] =
        lms_adapt(state.estimates[j], samples[j], profiles[j].step_size);

  std::vector<std::vector<double>> next(n);
  for (int i = 0; i < n; ++i) {
    WeightRow row = policy.row(i, state);
    validate_row(row, topo, i);
    next[i] = combine(adapted, row);
  }

  state.estimates = std::move(next);
  state.time += 1;
}

void network_step(NetworkState& state, const Topology& topo,
                  std::span<const NodeProfile> profiles,
                  CombinerPolicy& policy, std::span<const double> w0,
                  std::span<Rng> node_rngs,
                  std::vector<DataSample>* samples_out) {
  const int n = topo.node_count();
  std::vector<DataSample> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i)
    samples.push_back(sample(profiles[i], w0, node_rngs[i]));
  network_step(state, topo, profiles, policy, samples);
  if (samples_out) *samples_out = std::move(samples);
}

}  // namespace adaptnet
