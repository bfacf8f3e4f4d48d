#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tcl/errors.hpp"
#include "tcl/model.hpp"

using namespace tcl;

namespace {

constexpr ApplianceModel kNominal = kNominalRefrigerator;

// Reference values evaluated independently in extended precision.
constexpr double kK = 149.3210662748021;
constexpr double kP0 = 16.852040819026584;
constexpr double kTBar0 = 4.592419822604265;
constexpr double kZetaTmax = -0.1562594612311585;
constexpr double kZetaTmin = 0.16825613060301134;

// Closed-form conditional CDFs of the steady-state temperature density.
double cdf_on(const ApplianceModel& m, double t) {
  return std::log((t - m.t_on) / (m.t_min - m.t_on)) /
         std::log((m.t_max - m.t_on) / (m.t_min - m.t_on));
}
double cdf_off(const ApplianceModel& m, double t) {
  return std::log((m.t_off - m.t_min) / (m.t_off - t)) /
         std::log((m.t_off - m.t_min) / (m.t_off - m.t_max));
}

template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

}  // namespace

TEST(ModelValidate, AcceptsNominal) { EXPECT_NO_THROW(validate(kNominal)); }

TEST(ModelValidate, RejectsBadParameters) {
  auto m = kNominal;
  m.alpha = 0.0;
  EXPECT_THROW(validate(m), ValidationError);
  m = kNominal;
  m.p_on = -1.0;
  EXPECT_THROW(validate(m), ValidationError);
  m = kNominal;
  m.t_min = 8.0;
  EXPECT_THROW(validate(m), ValidationError);
  m = kNominal;
  m.t_on = 3.0;
  EXPECT_THROW(validate(m), ValidationError);
  m = kNominal;
  m.t_off = NAN;
  EXPECT_THROW(validate(m), ValidationError);
}

TEST(DerivedQuantities, NominalOracle) {
  const auto dq = derive_quantities(kNominal);
  EXPECT_NEAR(dq.k, kK, 1e-9);
  EXPECT_NEAR(dq.p_0, kP0, 1e-10);
  EXPECT_NEAR(dq.t_bar_0, kTBar0, 1e-10);
  EXPECT_NEAR(dq.zeta_at_tmax, kZetaTmax, 1e-12);
  EXPECT_NEAR(dq.zeta_at_tmin, kZetaTmin, 1e-12);
  EXPECT_NEAR(dq.duty(kNominal), kP0 / 70.0, 1e-12);
}

TEST(DerivedQuantities, ZetaSigns) {
  const auto dq = derive_quantities(kNominal);
  EXPECT_LT(dq.zeta_at_tmax, 0.0);
  EXPECT_GT(dq.zeta_at_tmin, 0.0);
  EXPECT_DOUBLE_EQ(zeta(kNominal, dq, dq.t_bar_0), 0.0);
  EXPECT_DOUBLE_EQ(zeta(kNominal, dq, kNominal.t_max), dq.zeta_at_tmax);
}

TEST(DerivedQuantities, OutOfOrderThrowsDomainError) {
  auto m = kNominal;
  m.t_max = 30.0;
  EXPECT_THROW(derive_quantities(m), std::domain_error);
}

TEST(DerivedQuantities, MeanTemperatureInsideBand) {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const auto m = perturb_model(kNominal, rng);
    const auto dq = derive_quantities(m);
    EXPECT_GT(dq.t_bar_0, m.t_min);
    EXPECT_LT(dq.t_bar_0, m.t_max);
    EXPECT_GT(dq.p_0, 0.0);
    EXPECT_LT(dq.p_0, m.p_on);
  }
}

TEST(IntegrateDevice, FixedPointsExact) {
  const DeviceState off{kNominal.t_off, false, false};
  const DeviceState on{kNominal.t_on, true, false};
  for (double dt : {0.1, 1.0, 10.0, 100.0}) {
    EXPECT_EQ(integrate_device(off, kNominal, dt).temperature, kNominal.t_off);
    EXPECT_EQ(integrate_device(on, kNominal, dt).temperature, kNominal.t_on);
  }
}

TEST(IntegrateDevice, EulerStepOracle) {
  const DeviceState s{5.0, false, false};
  const double expected = 5.0 + 10.0 * kNominal.alpha * (kNominal.t_off - 5.0);
  EXPECT_DOUBLE_EQ(integrate_device(s, kNominal, 10.0).temperature, expected);
  EXPECT_NEAR(expected, 5.020833333333333, 1e-12);
  // first-order agreement with the exact exponential
  const double exact = kNominal.t_off - 15.0 * std::exp(-kNominal.alpha * 10.0);
  EXPECT_NEAR(expected, exact, 2e-5);
}

TEST(IntegrateDevice, MonotoneContraction) {
  for (double t = -40.0; t <= 19.0; t += 0.5) {
    for (bool c : {false, true}) {
      const double target = c ? kNominal.t_on : kNominal.t_off;
      const DeviceState s{t, c, false};
      for (double dt : {1.0, 10.0, 7200.0}) {
        const double next = integrate_device(s, kNominal, dt).temperature;
        EXPECT_LE(std::abs(next - target), std::abs(t - target));
        if (t != target) {
          EXPECT_LT(std::abs(next - target), std::abs(t - target));
          EXPECT_GE((next - target) * (t - target), 0.0);
        }
      }
    }
  }
}

TEST(IntegrateDevice, DoorOpenSubsteps) {
  const double factor = 25.0;
  const double dt = 10.0;
  for (bool c : {false, true}) {
    DeviceState s{4.0, c, true};
    // door open: alpha grows by the factor, on-state cooling alpha (t_off - t_on) kept
    const double a = kNominal.alpha * factor;
    const double target = c ? kNominal.t_off - (kNominal.t_off - kNominal.t_on) / factor
                            : kNominal.t_off;
    double t = s.temperature;
    for (int i = 0; i < 25; ++i) t += (dt / 25.0) * a * (target - t);
    EXPECT_NEAR(integrate_device(s, kNominal, dt, factor).temperature, t, 1e-12);
  }
}

TEST(IntegrateDevice, DoorOpenOnStateCoolingRateUnchanged) {
  // At T = t_off the closed-door and open-door on-state rates coincide.
  const DeviceState s{kNominal.t_off, true, true};
  const double dt = 1e-3;
  const double closed = integrate_device(s, kNominal, dt, 1.0).temperature;
  const double open = integrate_device(s, kNominal, dt, 25.0).temperature;
  EXPECT_NEAR((closed - kNominal.t_off) / dt, (open - kNominal.t_off) / dt, 1e-6);
}

TEST(HysteresisStep, SwitchesAtBounds) {
  DeviceState s{kNominal.t_max + 1e-6, false, false};
  EXPECT_TRUE(hysteresis_step(s, kNominal, 1.0).compressor);
  s = {kNominal.t_min - 1e-6, true, false};
  EXPECT_FALSE(hysteresis_step(s, kNominal, 1.0).compressor);
  for (bool c : {false, true}) {
    s = {4.5, c, false};
    EXPECT_EQ(hysteresis_step(s, kNominal, 1.0).compressor, c);
  }
}

TEST(HysteresisStep, LongRunPowerMatchesP0) {
  DeviceState s{4.0, false, false};
  const double dt = 1.0;
  const auto steps = static_cast<long>(48 * 3600 / dt);
  long on = 0;
  for (long i = 0; i < steps; ++i) {
    s = hysteresis_step(s, kNominal, dt);
    on += s.compressor;
  }
  const double mean_power = kNominal.p_on * static_cast<double>(on) / static_cast<double>(steps);
  EXPECT_NEAR(mean_power / kP0, 1.0, 0.02);
}

TEST(PerturbModel, OrderingHoldsOverManyDraws) {
  Rng rng(42);
  for (int i = 0; i < 1'000'000; ++i) {
    const auto m = perturb_model(kNominal, rng, 0.8, 1.2);
    ASSERT_LT(m.t_on, m.t_min);
    ASSERT_LT(m.t_min, m.t_max);
    ASSERT_LT(m.t_max, m.t_off);
    ASSERT_EQ(m.p_on, kNominal.p_on);
  }
}

TEST(PerturbModel, FactorsWithinRange) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const auto m = perturb_model(kNominal, rng, 0.8, 1.2);
    EXPECT_GE(m.alpha / kNominal.alpha, 0.8 - 1e-12);
    EXPECT_LE(m.alpha / kNominal.alpha, 1.2 + 1e-12);
    EXPECT_GE(m.t_on / kNominal.t_on, 0.8 - 1e-12);
    EXPECT_LE(m.t_on / kNominal.t_on, 1.2 + 1e-12);
  }
}

TEST(PerturbModel, UnitRangeIsIdentity) {
  Rng rng(1);
  EXPECT_EQ(perturb_model(kNominal, rng, 1.0, 1.0), kNominal);
}

TEST(PerturbModel, NarrowBandStillOrdered) {
  // t_min and t_max close together, so many raw draws break the ordering
  ApplianceModel m = kNominal;
  m.t_min = 6.5;
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const auto p = perturb_model(m, rng, 0.8, 1.2);
    ASSERT_LT(p.t_min, p.t_max);
  }
}

TEST(PerturbModel, InvalidRangeThrows) {
  Rng rng(1);
  EXPECT_THROW(perturb_model(kNominal, rng, 1.2, 0.8), ValidationError);
  EXPECT_THROW(perturb_model(kNominal, rng, 0.0, 1.2), ValidationError);
}

TEST(InitialState, InverseCdfEndpoints) {
  EXPECT_NEAR(inverse_cdf_on(kNominal, 0.0), kNominal.t_min, 1e-12);
  EXPECT_NEAR(inverse_cdf_on(kNominal, 1.0), kNominal.t_max, 1e-12);
  EXPECT_NEAR(inverse_cdf_off(kNominal, 0.0), kNominal.t_min, 1e-12);
  EXPECT_NEAR(inverse_cdf_off(kNominal, 1.0), kNominal.t_max, 1e-12);
  for (double u = 0.05; u < 1.0; u += 0.05) {
    EXPECT_NEAR(cdf_on(kNominal, inverse_cdf_on(kNominal, u)), u, 1e-12);
    EXPECT_NEAR(cdf_off(kNominal, inverse_cdf_off(kNominal, u)), u, 1e-12);
  }
}

TEST(InitialState, KolmogorovSmirnovAgainstClosedForm) {
  const auto dq = derive_quantities(kNominal);
  Rng rng(2024);
  std::vector<double> on, off;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const auto s = sample_initial_state(kNominal, dq, rng);
    ASSERT_GE(s.temperature, kNominal.t_min);
    ASSERT_LE(s.temperature, kNominal.t_max);
    ASSERT_FALSE(s.door_open);
    (s.compressor ? on : off).push_back(s.temperature);
  }
  const double duty = static_cast<double>(on.size()) / n;
  const double se = std::sqrt(dq.duty(kNominal) * (1 - dq.duty(kNominal)) / n);
  EXPECT_NEAR(duty, dq.duty(kNominal), 4 * se);
  // 1% critical value of the one-sample KS statistic
  const double d_on = ks_statistic(on, [](double t) { return cdf_on(kNominal, t); });
  const double d_off = ks_statistic(off, [](double t) { return cdf_off(kNominal, t); });
  EXPECT_LT(d_on, 1.63 / std::sqrt(static_cast<double>(on.size())));
  EXPECT_LT(d_off, 1.63 / std::sqrt(static_cast<double>(off.size())));
}

TEST(InitialState, MeanTemperatureMatchesTBar0) {
  const auto dq = derive_quantities(kNominal);
  Rng rng(99);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += sample_initial_state(kNominal, dq, rng).temperature;
  EXPECT_NEAR(sum / n, kTBar0, 0.01);
}

TEST(DriftBound, OneStepValues) {
  EXPECT_DOUBLE_EQ(drift_above_tmax(kNominal, 10.0), kNominal.alpha * 10.0 * 13.0);
  EXPECT_DOUBLE_EQ(drift_below_tmin(kNominal, 10.0), kNominal.alpha * 10.0 * 46.0);
  // a device parked at t_max in the off state moves exactly the bound in one step
  const DeviceState s{kNominal.t_max, false, false};
  EXPECT_NEAR(integrate_device(s, kNominal, 10.0).temperature - kNominal.t_max,
              drift_above_tmax(kNominal, 10.0), 1e-12);
}
