#include "tcl/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "tcl/errors.hpp"

namespace tcl {

namespace {

// Devices per work unit. Fixed so that summation order, and hence the
// floating-point result, does not depend on the thread count.
constexpr std::size_t kChunkSize = 4096;

struct ChunkResult {
  std::vector<double> power;
  std::vector<double> z_sum;
  std::vector<std::uint32_t> n_on;
  std::uint64_t controller_calls = 0;
  std::uint64_t energy_clips = 0;
  std::uint64_t power_clips = 0;
  std::uint64_t forced = 0;
  std::uint64_t door_events = 0;
};

// Advances the physics over [a, b], splitting at door open/close times.
void advance_physics(DeviceState& state, const ApplianceModel& m, double a, double b,
                     const std::vector<DoorEvent>& doors, std::size_t& cursor,
                     double door_factor) {
  if (doors.empty()) {
    state = integrate_device(state, m, b - a);
    return;
  }
  double t = a;
  while (t < b) {
    while (cursor < doors.size() && doors[cursor].end <= t) ++cursor;
    double seg_end = b;
    if (cursor < doors.size() && doors[cursor].start <= t) {
      seg_end = std::min(b, doors[cursor].end);
      state.door_open = true;
      state = integrate_device(state, m, seg_end - t, door_factor);
    } else {
      if (cursor < doors.size()) seg_end = std::min(b, doors[cursor].start);
      state.door_open = false;
      state = integrate_device(state, m, seg_end - t);
    }
    t = seg_end;
  }
  while (cursor < doors.size() && doors[cursor].end <= b) ++cursor;
  state.door_open = cursor < doors.size() && doors[cursor].start <= b;
}

}  // namespace

std::string to_string(ModelErrorMode mode) {
  switch (mode) {
    case ModelErrorMode::known:
      return "known";
    case ModelErrorMode::common_nominal:
      return "common";
    case ModelErrorMode::randomized:
      return "random";
  }
  return "unknown";
}

ModelErrorMode parse_model_error_mode(const std::string& text) {
  if (text == "known") return ModelErrorMode::known;
  if (text == "common" || text == "common_nominal") return ModelErrorMode::common_nominal;
  if (text == "random" || text == "randomized") return ModelErrorMode::randomized;
  throw ValidationError("unknown model error mode '" + text + "' (expected known|common|random)");
}

void validate(const FleetConfig& cfg) {
  if (cfg.n_devices < 1) throw ValidationError("fleet needs at least one device");
  if (!(cfg.hetero_lo > 0.0) || !(cfg.hetero_lo <= cfg.hetero_hi)) {
    throw ValidationError("heterogeneity range requires 0 < lo <= hi");
  }
  if (!(cfg.w > 0.0 && cfg.w <= 1.0)) throw ValidationError("operating range w must lie in (0, 1]");
  validate(cfg.nominal);
}

double Fleet::sum_p0() const noexcept {
  double sum = 0.0;
  for (const Appliance& a : devices) sum += a.physical_dq.p_0;
  return sum;
}

Fleet build_fleet(const FleetConfig& cfg) {
  validate(cfg);
  Fleet fleet;
  fleet.config = cfg;
  fleet.devices.reserve(cfg.n_devices);
  for (std::size_t i = 0; i < cfg.n_devices; ++i) {
    Rng physical_rng(derive_seed(cfg.master_seed, i, Stream::physical_model));
    Rng control_rng(derive_seed(cfg.master_seed, i, Stream::control_model));
    Rng init_rng(derive_seed(cfg.master_seed, i, Stream::initial_state));

    Appliance a;
    a.physical = perturb_model(cfg.nominal, physical_rng, cfg.hetero_lo, cfg.hetero_hi);
    a.physical_dq = derive_quantities(a.physical);

    ApplianceModel control = a.physical;
    switch (cfg.model_error_mode) {
      case ModelErrorMode::known:
        break;
      case ModelErrorMode::common_nominal:
        control = cfg.nominal;
        break;
      case ModelErrorMode::randomized:
        control = perturb_model(cfg.nominal, control_rng, cfg.hetero_lo, cfg.hetero_hi);
        break;
    }
    control.t_min = a.physical.t_min;
    control.t_max = a.physical.t_max;

    a.state = sample_initial_state(a.physical, a.physical_dq, init_rng);
    a.controller = make_controller_state(control, cfg.w, 0.0, a.state.compressor);
    fleet.devices.push_back(std::move(a));
  }
  return fleet;
}

std::vector<double> constant_door_profile(double per_day) {
  return std::vector<double>(24, per_day / 24.0);
}

std::vector<DoorEvent> door_opening_schedule(const std::vector<double>& hourly_rates,
                                             double duration_s, double horizon_s, Rng& rng) {
  std::vector<DoorEvent> events;
  if (hourly_rates.empty() || !(horizon_s > 0.0)) return events;
  constexpr double hour = 3600.0;
  const auto hours = static_cast<std::size_t>(std::ceil(horizon_s / hour));
  for (std::size_t h = 0; h < hours; ++h) {
    const double rate = hourly_rates[h % hourly_rates.size()];
    if (rate < 0.0) throw ValidationError("door opening rates must be non-negative");
    if (rate == 0.0) continue;
    const double seg_start = h * hour;
    const double seg_end = std::min(horizon_s, seg_start + hour);
    // memoryless, so restarting the arrival clock at each hour is exact
    double t = seg_start + rng.exponential(rate / hour);
    while (t < seg_end) {
      const double end = t + duration_s;
      if (!events.empty() && t <= events.back().end) {
        events.back().end = std::max(events.back().end, end);
      } else {
        events.push_back({t, end});
      }
      t += rng.exponential(rate / hour);
    }
  }
  return events;
}

void validate(const SimConfig& sim) {
  if (!(sim.step_s > 0.0)) throw ValidationError("step_s must be positive");
  if (!(sim.horizon_s >= sim.step_s)) throw ValidationError("horizon_s must cover one step");
  if (!(sim.skip_probability >= 0.0 && sim.skip_probability < 1.0)) {
    throw ValidationError("skip_probability must lie in [0, 1)");
  }
  for (double r : sim.door_profile) {
    if (!(r >= 0.0)) throw ValidationError("door opening rates must be non-negative");
  }
  if (!sim.door_profile.empty() && !(sim.door_duration_s > 0.0)) {
    throw ValidationError("door_duration_s must be positive");
  }
  if (!(sim.door_alpha_factor >= 1.0)) throw ValidationError("door_alpha_factor must be >= 1");
}

TraceSet run_simulation(const Fleet& fleet, const ReferenceSignal& signal, const SimConfig& sim) {
  validate(sim);
  if (signal.horizon() < sim.horizon_s) {
    throw ValidationError("reference signal is shorter than the simulation horizon");
  }
  const std::size_t n = fleet.devices.size();
  const auto n_ticks = static_cast<std::size_t>(std::floor(sim.horizon_s / sim.step_s + 1e-9));

  std::vector<double> times(n_ticks);
  std::vector<double> pi_next(n_ticks);
  for (std::size_t k = 0; k < n_ticks; ++k) {
    times[k] = static_cast<double>(k + 1) * sim.step_s;
    pi_next[k] = signal.value_after(times[k]);
  }

  TraceSet trace;
  trace.n_devices = n;
  trace.sum_p0 = fleet.sum_p0();
  trace.max_above_tmax.assign(n, 0.0);
  trace.max_below_tmin.assign(n, 0.0);
  if (sim.record_per_device) {
    trace.device_temperature.assign(n_ticks * n, 0.0);
    trace.device_compressor.assign(n_ticks * n, 0);
  }

  const std::size_t n_chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkResult> chunks(n_chunks);
  const std::uint64_t seed = fleet.config.master_seed;

  auto run_chunk = [&](std::size_t c) {
    ChunkResult& res = chunks[c];
    res.power.assign(n_ticks, 0.0);
    res.z_sum.assign(n_ticks, 0.0);
    res.n_on.assign(n_ticks, 0);
    const std::size_t begin = c * kChunkSize;
    const std::size_t end = std::min(n, begin + kChunkSize);
    for (std::size_t i = begin; i < end; ++i) {
      const Appliance& src = fleet.devices[i];
      const ApplianceModel& phys = src.physical;
      DeviceState state = src.state;
      ControllerState ctl = src.controller;
      Rng rng(derive_seed(seed, i, Stream::switching));
      std::vector<DoorEvent> doors;
      if (!sim.door_profile.empty()) {
        Rng door_rng(derive_seed(seed, i, Stream::doors));
        doors = door_opening_schedule(sim.door_profile, sim.door_duration_s, sim.horizon_s,
                                      door_rng);
        res.door_events += doors.size();
      }
      std::size_t door_cursor = 0;
      double above = 0.0;
      double below = 0.0;
      double t_last = 0.0;

      for (std::size_t k = 0; k < n_ticks; ++k) {
        const double t = times[k];
        advance_physics(state, phys, t_last, t, doors, door_cursor, sim.door_alpha_factor);
        t_last = t;
        above = std::max(above, state.temperature - phys.t_max);
        below = std::max(below, phys.t_min - state.temperature);

        if (!sim.controlled) {
          if (state.temperature >= phys.t_max) {
            state.compressor = true;
          } else if (state.temperature <= phys.t_min) {
            state.compressor = false;
          }
        } else if (sim.skip_probability == 0.0 || rng.uniform() >= sim.skip_probability) {
          ctl.compressor = state.compressor;
          const SwitchOutcome out =
              update_compressor_state(pi_next[k], state.temperature, t, ctl, rng);
          state.compressor = out.compressor;
          ++res.controller_calls;
          res.energy_clips += out.energy_clipped;
          res.power_clips += out.power_clipped;
          res.forced += out.forced;
        }

        if (state.compressor) {
          res.power[k] += phys.p_on;
          ++res.n_on[k];
        }
        res.z_sum[k] += ctl.z;
        if (sim.record_per_device) {
          trace.device_temperature[k * n + i] = state.temperature;
          trace.device_compressor[k * n + i] = state.compressor ? 1 : 0;
        }
      }
      trace.max_above_tmax[i] = above;
      trace.max_below_tmin[i] = below;
    }
  };

  unsigned threads = sim.threads == 0 ? std::thread::hardware_concurrency() : sim.threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_chunks)));
  std::atomic<std::size_t> next_chunk{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t c = next_chunk++; c < n_chunks; c = next_chunk++) {
      try {
        run_chunk(c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next_chunk = n_chunks;
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  trace.times = times;
  trace.aggregate_power.assign(n_ticks, 0.0);
  trace.target_power.resize(n_ticks);
  trace.mean_z.assign(n_ticks, 0.0);
  trace.n_on.assign(n_ticks, 0);
  for (const ChunkResult& res : chunks) {
    for (std::size_t k = 0; k < n_ticks; ++k) {
      trace.aggregate_power[k] += res.power[k];
      trace.mean_z[k] += res.z_sum[k];
      trace.n_on[k] += res.n_on[k];
    }
    trace.controller_calls += res.controller_calls;
    trace.energy_clip_events += res.energy_clips;
    trace.power_clip_events += res.power_clips;
    trace.forced_switches += res.forced;
    trace.door_events += res.door_events;
  }
  for (std::size_t k = 0; k < n_ticks; ++k) {
    trace.mean_z[k] /= static_cast<double>(n);
    trace.target_power[k] = pi_next[k] * trace.sum_p0;
  }
  return trace;
}

}  // namespace tcl
