#pragma once

#include <span>
#include <vector>

namespace adaptnet::metrics {

// MSD = ||w - w0||^2 for one realization
double msd(std::span<const double> w, std::span<const double> w0);

// EMSE = |u (w_prev - w0)|^2 for one realization (a-priori error)
double emse(std::span<const double> w_prev, std::span<const double> w0,
            std::span<const double> u);

double to_db(double x);

// Output of one Monte Carlo run: network transient curves (mean over nodes,
// one entry per time step) plus steady-state means over the final window.
struct RunCurve {
  std::vector<double> net_msd;
  std::vector<double> net_emse;
  std::vector<double> node_steady_msd;   // per node, window mean
  std::vector<double> node_steady_emse;  // per node, window mean
  double steady_net_msd = 0.0;
  double steady_net_emse = 0.0;
};

struct EnsembleStat {
  double mean = 0.0;
  double stderr_ = 0.0;  // stderr of the mean across runs
};

struct AggregateResult {
  std::vector<double> net_msd;   // mean over runs per t
  std::vector<double> net_emse;
  std::vector<double> net_msd_stderr;
  std::vector<double> net_emse_stderr;
  std::vector<double> node_steady_msd;   // per node, mean over runs
  std::vector<double> node_steady_emse;
  EnsembleStat steady_net_msd;
  EnsembleStat steady_net_emse;
  // dB-domain slope of the network MSD over the final window (least squares);
  // the horizon is considered converged when this is below 0.001 dB/step.
  double final_msd_slope_db = 0.0;
  int runs = 0;
};

// Mean over runs per time step, per-node steady-state means, and ensemble
// stderr of the steady network values. steady_window must fit the horizon.
AggregateResult aggregate(std::span<const RunCurve> curves, int steady_window);

}  // namespace adaptnet::metrics
