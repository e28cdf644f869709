#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adaptnet/combiners.hpp"
#include "adaptnet/egt_combiners.hpp"
#include "adaptnet/rng.hpp"
#include "adaptnet/signal_model.hpp"
#include "adaptnet/topology.hpp"

namespace adaptnet {

// Snapshot of the network at one time step: per-node estimates w_{i,t} and
// per-node running MSE estimates beta_{i,t}. Estimates start at zero, betas
// at 1 (no variance knowledge assumed).
struct NetworkState {
  std::vector<std::vector<double>> estimates;
  std::vector<double> mse_estimates;
  long time = 0;

  static NetworkState zero(int node_count, int m);
};

// F(w) = w + mu u^T (d - u w); the input is not modified.
std::vector<double> lms_adapt(std::span<const double> w,
                              const DataSample& sample, double mu);

// Convex combination of adapted vectors per the weight row. adapted[j] is the
// vector of node j. The row must already be validated against the topology.
std::vector<double> combine(const std::vector<std::vector<double>>& adapted,
                            const WeightRow& row);

// Centralized baseline: w + mu sum_i u_i^T (d_i - u_i w).
std::vector<double> global_lms_step(std::span<const double> w,
                                    std::span<const DataSample> samples,
                                    double mu);

// Produces one combination weight row per node per step. refresh_trackers is
// called with the pre-adaptation state and the step's samples, before any row
// is requested; error-aware policies update the beta estimates there.
class CombinerPolicy {
 public:
  virtual ~CombinerPolicy() = default;
  virtual std::string name() const = 0;
  virtual void refresh_trackers(NetworkState&, const Topology&,
                                std::span<const NodeProfile>,
                                std::span<const DataSample>) {}
  virtual WeightRow row(int i, const NetworkState& state) const = 0;
};

// Fixed row-stochastic matrix (Table rules, or BD/DB/IM over a static
// fitness).
class StaticPolicy : public CombinerPolicy {
 public:
  StaticPolicy(std::string name, CombinerMatrix matrix)
      : name_(std::move(name)), matrix_(std::move(matrix)) {}
  std::string name() const override { return name_; }
  WeightRow row(int i, const NetworkState&) const override {
    return matrix_.row(i);
  }

 private:
  std::string name_;
  CombinerMatrix matrix_;
};

// IM weights over the error-aware fitness of the current beta estimates.
class ErrorAwarePolicy : public CombinerPolicy {
 public:
  ErrorAwarePolicy(const Topology& topo, egt::ErrorFitnessForm form,
                   double lambda, double nu, double beta_floor = 0.0);
  std::string name() const override;
  void refresh_trackers(NetworkState& state, const Topology& topo,
                        std::span<const NodeProfile> profiles,
                        std::span<const DataSample> samples) override;
  WeightRow row(int i, const NetworkState& state) const override;

 private:
  const Topology* topo_;
  egt::ErrorFitnessForm form_;
  double lambda_;
  double nu_;
  double beta_floor_;
};

// Decorator realizing the random-selection variant: pick one neighbor with
// probability equal to its weight instead of deterministic mixing.
class RandomSelectionPolicy : public CombinerPolicy {
 public:
  RandomSelectionPolicy(std::unique_ptr<CombinerPolicy> inner,
                        std::uint64_t seed);
  std::string name() const override;
  void refresh_trackers(NetworkState& state, const Topology& topo,
                        std::span<const NodeProfile> profiles,
                        std::span<const DataSample> samples) override;
  WeightRow row(int i, const NetworkState& state) const override;

 private:
  std::unique_ptr<CombinerPolicy> inner_;
  mutable Rng rng_;
};

// One synchronous adapt-then-combine step: every node adapts on its sample,
// exchanges the adapted vector (plus beta for error-aware policies) with N_i,
// then applies its combiner row. Reads only the time-t state; node order
// cannot affect the result.
void network_step(NetworkState& state, const Topology& topo,
                  std::span<const NodeProfile> profiles,
                  CombinerPolicy& policy, std::span<const DataSample> samples);

// Same, drawing one sample per node from per-node streams.
void network_step(NetworkState& state, const Topology& topo,
                  std::span<const NodeProfile> profiles,
                  CombinerPolicy& policy, std::span<const double> w0,
                  std::span<Rng> node_rngs,
                  std::vector<DataSample>* samples_out = nullptr);

}  // namespace adaptnet
