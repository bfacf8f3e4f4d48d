#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcl/controller.hpp"
#include "tcl/model.hpp"
#include "tcl/signals.hpp"

namespace tcl {

/// How the controller's model relates to the physics.
enum class ModelErrorMode {
  known,           ///< control model equals the physical model
  common_nominal,  ///< every controller uses the nominal model
  randomized,      ///< control model drawn independently of the physical one
};

std::string to_string(ModelErrorMode mode);
/// Accepts known, common, common_nominal, random, randomized.
ModelErrorMode parse_model_error_mode(const std::string& text);

struct FleetConfig {
  std::size_t n_devices = 1000;
  ApplianceModel nominal = kNominalRefrigerator;
  double hetero_lo = 0.8;
  double hetero_hi = 1.2;
  double w = 0.9;
  ModelErrorMode model_error_mode = ModelErrorMode::known;
  std::uint64_t master_seed = 1;
};

void validate(const FleetConfig& cfg);

struct Appliance {
  ApplianceModel physical;
  DerivedQuantities physical_dq;
  DeviceState state;
  ControllerState controller;
};

struct Fleet {
  FleetConfig config;
  std::vector<Appliance> devices;

  /// Sum of the physical steady-state powers (W).
  double sum_p0() const noexcept;
};

/// Heterogeneous physical models, control models per the model-error mode
/// (t_min/t_max always taken from the physics), steady-state initial states
/// and fresh controllers. Deterministic in cfg.master_seed.
Fleet build_fleet(const FleetConfig& cfg);

/// One merged door-open interval [start, end).
struct DoorEvent {
  double start = 0.0;
  double end = 0.0;
};

/// Poisson door openings with a piecewise-constant hourly rate (openings per
/// hour, repeated cyclically). Each event keeps the door open for duration_s;
/// overlapping events merge.
std::vector<DoorEvent> door_opening_schedule(const std::vector<double>& hourly_rates,
                                             double duration_s, double horizon_s, Rng& rng);

/// Profile of 24 equal hourly rates totalling `per_day` openings per day.
std::vector<double> constant_door_profile(double per_day);

struct SimConfig {
  double step_s = 10.0;
  double horizon_s = 3600.0;
  double skip_probability = 0.0;
  std::vector<double> door_profile;  ///< openings per hour; empty disables doors
  double door_duration_s = 20.0;
  double door_alpha_factor = 25.0;
  bool controlled = true;  ///< false runs every device on its hysteresis thermostat
  bool record_per_device = false;
  unsigned threads = 0;  ///< 0 picks the hardware concurrency
};

void validate(const SimConfig& sim);

struct TraceSet {
  std::vector<double> times;            ///< s
  std::vector<double> aggregate_power;  ///< W, after the decisions at each time
  std::vector<double> target_power;     ///< W, requested pi times sum of p_0
  std::vector<double> mean_z;
  std::vector<std::uint32_t> n_on;

  std::size_t n_devices = 0;
  double sum_p0 = 0.0;

  /// Row-major [record][device], filled only when record_per_device is set.
  std::vector<double> device_temperature;
  std::vector<std::uint8_t> device_compressor;

  /// Per device, the largest excursion above t_max and below t_min seen at
  /// any invocation time (0 when never outside).
  std::vector<double> max_above_tmax;
  std::vector<double> max_below_tmin;

  std::uint64_t controller_calls = 0;
  std::uint64_t energy_clip_events = 0;
  std::uint64_t power_clip_events = 0;
  std::uint64_t forced_switches = 0;
  std::uint64_t door_events = 0;

  std::size_t size() const noexcept { return times.size(); }
};

/// Runs the coupled physics/controller loop on ticks t_k = k * step_s,
/// k = 1..floor(horizon / step). Physics advances every tick; with
/// skip_probability > 0 each device independently skips controller calls.
/// The fleet is not modified. Results are bit-identical for any thread count.
TraceSet run_simulation(const Fleet& fleet, const ReferenceSignal& signal, const SimConfig& sim);

}  // namespace tcl
