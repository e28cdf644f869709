#include "adaptnet/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "adaptnet/signal_model.hpp"

namespace adaptnet::metrics {

double msd(std::span<const double> w, std::span<const double> w0) {
  if (w.size() != w0.size()) throw std::invalid_argument("msd: dim mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double d = w[k] - w0[k];
    s += d * d;
  }
  return s;
}

double emse(std::span<const double> w_prev, std::span<const double> w0,
            std::span<const double> u) {
  if (w_prev.size() != w0.size() || u.size() != w0.size())
    throw std::invalid_argument("emse: dim mismatch");
  double e = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) e += u[k] * (w_prev[k] - w0[k]);
  return e * e;
}

double to_db(double x) { return 10.0 * std::log10(x); }

namespace {

EnsembleStat stat_of(const std::vector<double>& values) {
  EnsembleStat s;
  const std::size_t n = values.size();
  for (const double v : values) s.mean += v;
  s.mean /= static_cast<double>(n);
  if (n >= 2) {
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stderr_ = std::sqrt(ss / (static_cast<double>(n) - 1.0) /
                          static_cast<double>(n));
  }
  return s;
}

}  // namespace

AggregateResult aggregate(std::span<const RunCurve> curves,
                          int steady_window) {
  if (curves.empty()) throw std::invalid_argument("aggregate: no runs");
  const std::size_t horizon = curves[0].net_msd.size();
  const std::size_t nodes = curves[0].node_steady_msd.size();
  if (steady_window < 1 || static_cast<std::size_t>(steady_window) > horizon)
    throw std::invalid_argument("aggregate: steady window outside horizon");
  const double r = static_cast<double>(curves.size());

  AggregateResult out;
  out.runs = static_cast<int>(curves.size());
  out.net_msd.assign(horizon, 0.0);
  out.net_emse.assign(horizon, 0.0);
  out.net_msd_stderr.assign(horizon, 0.0);
  out.net_emse_stderr.assign(horizon, 0.0);
  out.node_steady_msd.assign(nodes, 0.0);
  out.node_steady_emse.assign(nodes, 0.0);

  for (const auto& c : curves) {
    if (c.net_msd.size() != horizon || c.node_steady_msd.size() != nodes)
      throw std::invalid_argument("aggregate: inconsistent run shapes");
    for (std::size_t t = 0; t < horizon; ++t) {
      out.net_msd[t] += c.net_msd[t];
      out.net_emse[t] += c.net_emse[t];
    }
    for (std::size_t i = 0; i < nodes; ++i) {
      out.node_steady_msd[i] += c.node_steady_msd[i];
      out.node_steady_emse[i] += c.node_steady_emse[i];
    }
  }
  for (std::size_t t = 0; t < horizon; ++t) {
    out.net_msd[t] /= r;
    out.net_emse[t] /= r;
  }
  for (std::size_t i = 0; i < nodes; ++i) {
    out.node_steady_msd[i] /= r;
    out.node_steady_emse[i] /= r;
  }

  if (curves.size() >= 2) {
    for (std::size_t t = 0; t < horizon; ++t) {
      double sm = 0.0, se = 0.0;
      for (const auto& c : curves) {
        sm += (c.net_msd[t] - out.net_msd[t]) * (c.net_msd[t] - out.net_msd[t]);
        se += (c.net_emse[t] - out.net_emse[t]) *
              (c.net_emse[t] - out.net_emse[t]);
      }
      const double denom = (r - 1.0) * r;
      out.net_msd_stderr[t] = std::sqrt(sm / denom);
      out.net_emse_stderr[t] = std::sqrt(se / denom);
    }
  }

  std::vector<double> run_steady_msd, run_steady_emse;
  run_steady_msd.reserve(curves.size());
  run_steady_emse.reserve(curves.size());
  for (const auto& c : curves) {
    run_steady_msd.push_back(c.steady_net_msd);
    run_steady_emse.push_back(c.steady_net_emse);
  }
  out.steady_net_msd = stat_of(run_steady_msd);
  out.steady_net_emse = stat_of(run_steady_emse);

  // least-squares slope in the dB domain over the final window
  const std::size_t w0 = horizon - static_cast<std::size_t>(steady_window);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t t = w0; t < horizon; ++t) {
    const double x = static_cast<double>(t - w0);
    const double y = to_db(out.net_msd[t]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nw = static_cast<double>(steady_window);
  const double denom = nw * sxx - sx * sx;
  out.final_msd_slope_db = denom != 0.0 ? (nw * sxy - sx * sy) / denom : 0.0;
  return out;
}

}  // namespace adaptnet::metrics
