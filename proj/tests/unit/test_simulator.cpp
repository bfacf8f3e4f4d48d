#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "tcl/errors.hpp"
#include "tcl/simulator.hpp"

using namespace tcl;

namespace {

FleetConfig small_fleet(std::size_t n, std::uint64_t seed = 1) {
  FleetConfig cfg;
  cfg.n_devices = n;
  cfg.master_seed = seed;
  return cfg;
}

SimConfig short_sim(double horizon = 1800.0) {
  SimConfig sim;
  sim.horizon_s = horizon;
  sim.threads = 1;
  return sim;
}

}  // namespace

TEST(FleetConfig, Validation) {
  auto cfg = small_fleet(0);
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = small_fleet(10);
  cfg.hetero_lo = 1.3;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = small_fleet(10);
  cfg.w = 0.0;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg.w = 1.0;
  EXPECT_NO_THROW(validate(cfg));
}

TEST(SimConfig, Validation) {
  SimConfig sim;
  sim.step_s = 0.0;
  EXPECT_THROW(validate(sim), ValidationError);
  sim = SimConfig{};
  sim.skip_probability = 1.0;
  EXPECT_THROW(validate(sim), ValidationError);
  sim = SimConfig{};
  sim.door_profile = {-1.0};
  EXPECT_THROW(validate(sim), ValidationError);
}

TEST(ModelErrorMode, ParseAndPrint) {
  EXPECT_EQ(parse_model_error_mode("known"), ModelErrorMode::known);
  EXPECT_EQ(parse_model_error_mode("common"), ModelErrorMode::common_nominal);
  EXPECT_EQ(parse_model_error_mode("random"), ModelErrorMode::randomized);
  EXPECT_THROW(parse_model_error_mode("other"), ValidationError);
  for (auto m : {ModelErrorMode::known, ModelErrorMode::common_nominal,
                 ModelErrorMode::randomized}) {
    EXPECT_EQ(parse_model_error_mode(to_string(m)), m);
  }
}

TEST(BuildFleet, ControlModelFollowsMode) {
  auto cfg = small_fleet(200);
  const Fleet known = build_fleet(cfg);
  for (const auto& a : known.devices) EXPECT_EQ(a.controller.control_model, a.physical);

  cfg.model_error_mode = ModelErrorMode::common_nominal;
  const Fleet common = build_fleet(cfg);
  for (const auto& a : common.devices) {
    EXPECT_EQ(a.controller.control_model.alpha, cfg.nominal.alpha);
    EXPECT_EQ(a.controller.control_model.t_on, cfg.nominal.t_on);
    EXPECT_EQ(a.controller.control_model.t_max, a.physical.t_max);
    EXPECT_EQ(a.controller.control_model.t_min, a.physical.t_min);
  }

  cfg.model_error_mode = ModelErrorMode::randomized;
  const Fleet random = build_fleet(cfg);
  int differing = 0;
  for (std::size_t i = 0; i < random.devices.size(); ++i) {
    // physics is independent of the model-error mode
    EXPECT_EQ(random.devices[i].physical, known.devices[i].physical);
    differing += random.devices[i].controller.control_model.alpha != random.devices[i].physical.alpha;
  }
  EXPECT_EQ(differing, 200);
}

TEST(BuildFleet, DeterministicInSeed) {
  const Fleet a = build_fleet(small_fleet(50, 9));
  const Fleet b = build_fleet(small_fleet(50, 9));
  const Fleet c = build_fleet(small_fleet(50, 10));
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(a.devices[i].physical, b.devices[i].physical);
    EXPECT_EQ(a.devices[i].state.temperature, b.devices[i].state.temperature);
  }
  EXPECT_NE(a.devices[0].physical, c.devices[0].physical);
}

TEST(DoorSchedule, ZeroRatesEmpty) {
  Rng rng(1);
  EXPECT_TRUE(door_opening_schedule(std::vector<double>(24, 0.0), 20.0, 86400.0, rng).empty());
  EXPECT_TRUE(door_opening_schedule({}, 20.0, 86400.0, rng).empty());
}

TEST(DoorSchedule, MergedEventsAreDisjointAndBounded) {
  Rng rng(4);
  const auto profile = constant_door_profile(2000.0);  // dense enough to overlap
  const auto events = door_opening_schedule(profile, 20.0, 86400.0, rng);
  ASSERT_FALSE(events.empty());
  for (std::size_t i = 1; i < events.size(); ++i) EXPECT_GT(events[i].start, events[i - 1].end);
  double open = 0.0;
  for (const auto& e : events) open += e.end - e.start;
  EXPECT_LT(events.size() * 20.0, 2000.0 * 20.0 * 1.1);
  EXPECT_LE(open, 2000.0 * 20.0 * 1.1);
  EXPECT_GE(open, events.size() * 20.0);
}

TEST(DoorSchedule, PoissonCountOverLargeFleet) {
  const auto profile = constant_door_profile(20.0);
  std::size_t total = 0;
  const std::size_t n = 100000;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(3, i, Stream::doors));
    // 1 ms events so that merging cannot hide arrivals
    total += door_opening_schedule(profile, 1e-3, 86400.0, rng).size();
  }
  const double expected = 20.0 * n;
  EXPECT_NEAR(static_cast<double>(total), expected, 3.0 * std::sqrt(expected));
}

TEST(RunSimulation, RecordsOnTickGrid) {
  const Fleet fleet = build_fleet(small_fleet(20));
  const TraceSet tr = run_simulation(fleet, ReferenceSignal::constant(1.0, 1800.0), short_sim());
  ASSERT_EQ(tr.size(), 180u);
  EXPECT_EQ(tr.times.front(), 10.0);
  EXPECT_EQ(tr.times.back(), 1800.0);
  EXPECT_EQ(tr.aggregate_power.size(), tr.size());
  EXPECT_EQ(tr.target_power.size(), tr.size());
  EXPECT_EQ(tr.mean_z.size(), tr.size());
  EXPECT_EQ(tr.controller_calls, 20u * 180u);
  EXPECT_DOUBLE_EQ(tr.target_power[0], fleet.sum_p0());
}

TEST(RunSimulation, SignalShorterThanHorizonThrows) {
  const Fleet fleet = build_fleet(small_fleet(5));
  EXPECT_THROW(run_simulation(fleet, ReferenceSignal::constant(1.0, 600.0), short_sim()),
               ValidationError);
}

TEST(RunSimulation, AggregateIsWeightedOnCount) {
  const Fleet fleet = build_fleet(small_fleet(300));
  SimConfig sim = short_sim(3600.0);
  sim.record_per_device = true;
  const TraceSet tr = run_simulation(fleet, canonical_test_signal(), sim);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    double power = 0.0;
    std::uint32_t on = 0;
    for (std::size_t i = 0; i < tr.n_devices; ++i) {
      if (tr.device_compressor[k * tr.n_devices + i]) {
        power += fleet.devices[i].physical.p_on;
        ++on;
      }
    }
    EXPECT_DOUBLE_EQ(tr.aggregate_power[k], power);
    EXPECT_EQ(tr.n_on[k], on);
  }
}

TEST(RunSimulation, DeterministicAcrossThreadCounts) {
  const Fleet fleet = build_fleet(small_fleet(10000, 5));
  SimConfig sim = short_sim(1200.0);
  sim.skip_probability = 0.3;
  sim.door_profile = constant_door_profile(200.0);
  const auto signal = canonical_test_signal();
  sim.threads = 1;
  const TraceSet a = run_simulation(fleet, signal, sim);
  sim.threads = 3;
  const TraceSet b = run_simulation(fleet, signal, sim);
  EXPECT_EQ(a.aggregate_power, b.aggregate_power);
  EXPECT_EQ(a.mean_z, b.mean_z);
  EXPECT_EQ(a.n_on, b.n_on);
  EXPECT_EQ(a.max_above_tmax, b.max_above_tmax);
  EXPECT_EQ(a.controller_calls, b.controller_calls);
  EXPECT_EQ(a.door_events, b.door_events);
}

TEST(RunSimulation, TemperatureStaysWithinOneStepDrift) {
  const Fleet fleet = build_fleet(small_fleet(2000, 17));
  SimConfig sim = short_sim(5 * 3600.0);
  const TraceSet tr = run_simulation(fleet, canonical_test_signal(), sim);
  for (std::size_t i = 0; i < tr.n_devices; ++i) {
    const auto& m = fleet.devices[i].physical;
    EXPECT_LE(tr.max_above_tmax[i], drift_above_tmax(m, sim.step_s) + 1e-12) << i;
    EXPECT_LE(tr.max_below_tmin[i], drift_below_tmin(m, sim.step_s) + 1e-12) << i;
  }
}

TEST(RunSimulation, HomogeneousMeanZMatchesControllerReplay) {
  auto cfg = small_fleet(500);
  cfg.hetero_lo = cfg.hetero_hi = 1.0;
  const Fleet fleet = build_fleet(cfg);
  const auto signal = canonical_test_signal();
  const SimConfig sim = short_sim(5 * 3600.0);
  const TraceSet tr = run_simulation(fleet, signal, sim);

  ControllerState st = make_controller_state(cfg.nominal, cfg.w, 0.0, false);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const StepQuantities q = population_step(st, signal.value_after(tr.times[k]), tr.times[k]);
    st.z = q.z;
    st.pi_prev = q.pi_next;
    st.t_prev = tr.times[k];
    EXPECT_NEAR(tr.mean_z[k], st.z, 1e-12);
  }
}

TEST(RunSimulation, UncontrolledSteadyPower) {
  const Fleet fleet = build_fleet(small_fleet(5000, 2));
  SimConfig sim = short_sim(3 * 3600.0);
  sim.controlled = false;
  const TraceSet tr = run_simulation(fleet, ReferenceSignal::constant(1.0, sim.horizon_s), sim);
  EXPECT_EQ(tr.controller_calls, 0u);
  const double mean =
      std::accumulate(tr.aggregate_power.begin(), tr.aggregate_power.end(), 0.0) / tr.size();
  EXPECT_NEAR(mean / tr.sum_p0, 1.0, 0.03);
}

TEST(RunSimulation, SkippedCallsFollowProbability) {
  const Fleet fleet = build_fleet(small_fleet(1000));
  SimConfig sim = short_sim(3600.0);
  sim.skip_probability = 0.5;
  const TraceSet tr = run_simulation(fleet, canonical_test_signal(), sim);
  const double expected = 0.5 * 1000 * 360;
  EXPECT_NEAR(static_cast<double>(tr.controller_calls), expected,
              4.0 * std::sqrt(expected * 0.5));
}

TEST(RunSimulation, ControlledSteadyStateTracksSumP0) {
  const Fleet fleet = build_fleet(small_fleet(4000, 6));
  const SimConfig sim = short_sim(2 * 3600.0);
  const TraceSet tr = run_simulation(fleet, ReferenceSignal::constant(1.0, sim.horizon_s), sim);
  const double mean =
      std::accumulate(tr.aggregate_power.begin(), tr.aggregate_power.end(), 0.0) / tr.size();
  // binomial snapshot scale: sqrt(N duty (1 - duty)) p_on over sum p0
  EXPECT_NEAR(mean / tr.sum_p0, 1.0, 0.03);
}

TEST(RunSimulation, DoorsRaiseUncontrolledPower) {
  const Fleet fleet = build_fleet(small_fleet(3000, 8));
  SimConfig sim = short_sim(6 * 3600.0);
  sim.controlled = false;
  const auto signal = ReferenceSignal::constant(1.0, sim.horizon_s);
  const TraceSet closed = run_simulation(fleet, signal, sim);
  sim.door_profile = constant_door_profile(20.0);
  const TraceSet open = run_simulation(fleet, signal, sim);
  EXPECT_GT(open.door_events, 0u);
  const double a = std::accumulate(closed.aggregate_power.begin(), closed.aggregate_power.end(), 0.0);
  const double b = std::accumulate(open.aggregate_power.begin(), open.aggregate_power.end(), 0.0);
  EXPECT_GT(b, a);
}
