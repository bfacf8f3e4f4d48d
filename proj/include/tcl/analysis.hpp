#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "tcl/signals.hpp"
#include "tcl/simulator.hpp"

namespace tcl {

struct ErrorSeries {
  std::vector<double> times;
  std::vector<double> error_w_per_device;
  double std_w_per_device = 0.0;  ///< population standard deviation
  double rms_w_per_device = 0.0;
};

/// (realized - target) / n_devices at each record.
ErrorSeries tracking_error(std::span<const double> times, std::span<const double> realized,
                           std::span<const double> target, std::size_t n_devices);
ErrorSeries tracking_error(const TraceSet& trace);

/// Population standard deviation (divides by L).
double standard_deviation(std::span<const double> values);

struct Autocorrelation {
  std::vector<double> acf;  ///< lags 0..max_lag, acf[0] == 1
  double band = 0.0;        ///< 95% significance half-width, 1.96 / sqrt(L)

  bool significant(std::size_t lag) const { return std::abs(acf.at(lag)) > band; }
};

/// Sample autocorrelation with mean removal and the biased (1/L) estimator.
/// Requires series.size() > max_lag; throws ValidationError on a zero-variance
/// series.
Autocorrelation autocorrelation(std::span<const double> series, std::size_t max_lag);

/// target(t) = baseline(t) + (pi(t) - 1) * sum_p0, using the reference in
/// force after each record time. Throws ValidationError on length mismatch.
std::vector<double> door_target_power(std::span<const double> times,
                                      std::span<const double> baseline,
                                      const ReferenceSignal& signal, double sum_p0);

struct ConvergenceRow {
  std::size_t n_devices = 0;
  double std_w_per_device = 0.0;  ///< mean over repetitions
  std::vector<double> per_repetition;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::optional<double> log_log_slope;  ///< least-squares slope of log std vs log N
};

/// Least-squares slope of log(y) against log(x); nullopt with fewer than two
/// distinct x.
std::optional<double> log_log_slope(std::span<const double> x, std::span<const double> y);

/// Runs the same signal for each population size with `repetitions`
/// independent seeds (master_seed + r) and reports the per-appliance std.
ConvergenceTable convergence_scan(const std::vector<std::size_t>& n_list, int repetitions,
                                  const FleetConfig& fleet, const SimConfig& sim,
                                  const ReferenceSignal& signal);

}  // namespace tcl
