#include "tcl/analysis.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "tcl/errors.hpp"

namespace tcl {

double standard_deviation(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

ErrorSeries tracking_error(std::span<const double> times, std::span<const double> realized,
                           std::span<const double> target, std::size_t n_devices) {
  if (realized.size() != target.size() || times.size() != realized.size()) {
    throw ValidationError("tracking_error: series lengths differ");
  }
  if (n_devices == 0) throw ValidationError("tracking_error: n_devices must be positive");
  ErrorSeries out;
  out.times.assign(times.begin(), times.end());
  out.error_w_per_device.resize(realized.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < realized.size(); ++i) {
    const double e = (realized[i] - target[i]) / static_cast<double>(n_devices);
    out.error_w_per_device[i] = e;
    ss += e * e;
  }
  out.std_w_per_device = standard_deviation(out.error_w_per_device);
  out.rms_w_per_device = realized.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(realized.size()));
  return out;
}

ErrorSeries tracking_error(const TraceSet& trace) {
  return tracking_error(trace.times, trace.aggregate_power, trace.target_power, trace.n_devices);
}

Autocorrelation autocorrelation(std::span<const double> series, std::size_t max_lag) {
  const std::size_t len = series.size();
  if (len <= max_lag) {
    throw ValidationError("autocorrelation: series length " + std::to_string(len) +
                          " must exceed max_lag " + std::to_string(max_lag));
  }
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(len);
  std::vector<double> centred(len);
  for (std::size_t i = 0; i < len; ++i) centred[i] = series[i] - mean;

  double c0 = 0.0;
  for (double x : centred) c0 += x * x;
  if (!(c0 > 0.0)) throw ValidationError("autocorrelation: series has zero variance");

  Autocorrelation out;
  out.acf.resize(max_lag + 1);
  out.acf[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t i = 0; i + k < len; ++i) ck += centred[i] * centred[i + k];
    out.acf[k] = ck / c0;
  }
  out.band = 1.96 / std::sqrt(static_cast<double>(len));
  return out;
}

std::vector<double> door_target_power(std::span<const double> times,
                                      std::span<const double> baseline,
                                      const ReferenceSignal& signal, double sum_p0) {
  if (times.size() != baseline.size()) {
    throw ValidationError("door_target_power: baseline and time series lengths differ");
  }
  std::vector<double> target(baseline.size());
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    target[i] = baseline[i] + (signal.value_after(times[i]) - 1.0) * sum_p0;
  }
  return target;
}

std::optional<double> log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("log_log_slope: length mismatch");
  if (std::set<double>(x.begin(), x.end()).size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceTable convergence_scan(const std::vector<std::size_t>& n_list, int repetitions,
                                  const FleetConfig& fleet, const SimConfig& sim,
                                  const ReferenceSignal& signal) {
  if (n_list.empty()) throw ValidationError("convergence_scan: empty population list");
  if (repetitions < 1) throw ValidationError("convergence_scan: repetitions must be >= 1");
  ConvergenceTable table;
  std::vector<double> xs, ys;
  for (std::size_t n : n_list) {
    ConvergenceRow row;
    row.n_devices = n;
    for (int r = 0; r < repetitions; ++r) {
      FleetConfig cfg = fleet;
      cfg.n_devices = n;
      cfg.master_seed = fleet.master_seed + static_cast<std::uint64_t>(r);
      const TraceSet trace = run_simulation(build_fleet(cfg), signal, sim);
      row.per_repetition.push_back(tracking_error(trace).std_w_per_device);
    }
    row.std_w_per_device =
        std::accumulate(row.per_repetition.begin(), row.per_repetition.end(), 0.0) / repetitions;
    xs.push_back(static_cast<double>(n));
    ys.push_back(row.std_w_per_device);
    table.rows.push_back(std::move(row));
  }
  table.log_log_slope = log_log_slope(xs, ys);
  return table;
}

}  // namespace tcl
