#include "tcl/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tcl/errors.hpp"

namespace tcl {

namespace {

// Guard for the divisions by X, Y and P*Q, in model temperature units.
constexpr double kGeometryTolerance = 1e-9;
// Guard for z - zeta(R).
constexpr double kContractionTolerance = 1e-12;

double clamp01(double p) noexcept { return std::clamp(p, 0.0, 1.0); }

}  // namespace

double pivot_temperature(Mode mode, const ApplianceModel& m) noexcept {
  return mode == Mode::provision ? m.t_max : m.t_min;
}

double pivot_zeta(Mode mode, const DerivedQuantities& dq) noexcept {
  return mode == Mode::provision ? dq.zeta_at_tmax : dq.zeta_at_tmin;
}

ControllerState make_controller_state(const ApplianceModel& control_model, double w,
                                      double t_start, bool compressor) {
  validate(control_model);
  if (!(w > 0.0 && w <= 1.0)) throw ValidationError("operating range w must lie in (0, 1]");
  ControllerState st;
  st.control_model = control_model;
  st.dq = derive_quantities(control_model);
  st.w = w;
  st.t_prev = t_start;
  st.compressor = compressor;
  return st;
}

double update_z(double z_prev, double pi, double alpha, double dt) noexcept {
  const double decay = std::exp(-alpha * dt);
  return z_prev * decay + (pi - 1.0) * (1.0 - decay);
}

Mode select_mode(double z) noexcept { return z <= 0.0 ? Mode::provision : Mode::absorption; }

double clip_energy(double pi_next, double z, double w, const DerivedQuantities& dq) noexcept {
  const double floor = w * dq.zeta_at_tmax;
  const double ceiling = w * dq.zeta_at_tmin;
  if (z <= floor) return std::max(pi_next, 1.0 + floor);
  if (z >= ceiling) return std::min(pi_next, 1.0 + ceiling);
  return pi_next;
}

PowerLimits power_limits(double zeta_plus, double pivot_plus, const ApplianceModel& m) noexcept {
  const double denom = m.t_min + m.t_max - 2.0 * pivot_plus;
  const double a = 1.0 + zeta_plus * ((m.t_min + m.t_max - m.t_off - pivot_plus) / denom);
  const double b = 1.0 + zeta_plus * ((m.t_min + m.t_max - m.t_on - pivot_plus) / denom);
  return {std::min(a, b), std::max(a, b)};
}

double clip_power(double pi_next, double zeta_plus, double pivot_plus,
                  const ApplianceModel& m) noexcept {
  const PowerLimits lim = power_limits(zeta_plus, pivot_plus, m);
  return std::clamp(pi_next, lim.lower, lim.upper);
}

PivotSide make_side(double z, double pi_effective, Mode mode, const ApplianceModel& m,
                    const DerivedQuantities& dq) {
  PivotSide side;
  side.mode = mode;
  side.pivot = pivot_temperature(mode, m);
  side.zeta = pivot_zeta(mode, dq);
  const double gap = z - side.zeta;
  if (std::abs(gap) < kContractionTolerance) {
    throw DegenerateStateError("population fully contracted onto pivot " +
                               std::to_string(side.pivot) + " (z = " + std::to_string(z) + ")");
  }
  side.contraction = z / side.zeta;
  side.scale = 1.0 - side.contraction;
  side.beta = ((pi_effective - 1.0) - z) / gap;
  return side;
}

SwitchingGeometry switching_geometry(double T, const PivotSide& side,
                                     const ApplianceModel& m) noexcept {
  const double offset = T - side.pivot;
  SwitchingGeometry g;
  g.p = (side.pivot - m.t_off) * side.scale + offset;
  g.q = (side.pivot - m.t_on) * side.scale + offset;
  g.x = (T - m.t_off) + offset * side.beta;
  g.y = (T - m.t_on) + offset * side.beta;
  return g;
}

SwitchingRates switching_rates(double T, const PivotSide& side, const ApplianceModel& m) noexcept {
  SwitchingRates rates;
  const SwitchingGeometry g = switching_geometry(T, side, m);
  if (std::abs(g.p * g.q) < kGeometryTolerance) return rates;

  // Xi / alpha^2 = X Y (P + Q) / (P Q) - (1 + beta)(X + Y), rearranged so that
  // the steady state (contraction = beta = 0) yields exactly zero.
  const double offset_beta = (T - side.pivot) * side.beta;
  const double y_minus_q = offset_beta + (side.pivot - m.t_on) * side.contraction;
  const double x_minus_p = offset_beta + (side.pivot - m.t_off) * side.contraction;
  const double xi = g.x * y_minus_q / g.q + g.y * x_minus_p / g.p - side.beta * (g.x + g.y);
  const bool xi_vanishes = std::abs(xi) < kGeometryTolerance;

  if (std::abs(g.x) < kGeometryTolerance) {
    rates.force10 = !xi_vanishes;
  } else {
    rates.r10 = std::max(0.0, -m.alpha * xi / g.x);
  }
  if (std::abs(g.y) < kGeometryTolerance) {
    rates.force01 = !xi_vanishes;
  } else {
    rates.r01 = std::max(0.0, -m.alpha * xi / g.y);
  }
  return rates;
}

double continuous_switch_prob(double r_prev_plus, double r_now_minus, double dt) noexcept {
  return clamp01(0.5 * dt * (r_prev_plus + r_now_minus));
}

double instantaneous_switch_prob(double x_minus, double x_plus, double y_minus, double y_plus,
                                 bool compressor) noexcept {
  const double before = compressor ? x_minus : y_minus;
  const double after = compressor ? x_plus : y_plus;
  if (std::abs(before) < kGeometryTolerance) return 0.0;
  return clamp01(1.0 - after / before);
}

TemperatureBounds temperature_bounds(double pivot_plus, double scale_plus,
                                     const ApplianceModel& m) noexcept {
  return {pivot_plus - (pivot_plus - m.t_min) * scale_plus,
          pivot_plus - (pivot_plus - m.t_max) * scale_plus};
}

StepQuantities population_step(const ControllerState& st, double pi_requested, double t) {
  const ApplianceModel& m = st.control_model;
  StepQuantities q;
  q.dt = t - st.t_prev;
  q.z = update_z(st.z, st.pi_prev, m.alpha, q.dt);
  q.pi_requested = pi_requested;

  const Mode mode_minus = select_mode(st.z);
  const Mode mode_plus = select_mode(q.z);

  const double after_energy = clip_energy(pi_requested, q.z, st.w, st.dq);
  q.energy_clipped = after_energy != pi_requested;
  const double zeta_plus = pivot_zeta(mode_plus, st.dq);
  q.pi_next = clip_power(after_energy, zeta_plus, pivot_temperature(mode_plus, m), m);
  q.power_clipped = q.pi_next != after_energy;

  q.minus = make_side(q.z, st.pi_prev, mode_minus, m, st.dq);
  q.plus = make_side(q.z, q.pi_next, mode_plus, m, st.dq);
  return q;
}

SwitchOutcome update_compressor_state(double pi_next, double T, double t, ControllerState& st,
                                      Rng& rng) {
  if (!(t > st.t_prev)) {
    throw ValidationError("controller invoked at t = " + std::to_string(t) +
                          " which does not follow t_prev = " + std::to_string(st.t_prev));
  }
  const ApplianceModel& m = st.control_model;
  const StepQuantities q = population_step(st, pi_next, t);

  const SwitchingRates minus = switching_rates(T, q.minus, m);
  const SwitchingRates plus = switching_rates(T, q.plus, m);
  const SwitchingGeometry gm = switching_geometry(T, q.minus, m);
  const SwitchingGeometry gp = switching_geometry(T, q.plus, m);

  SwitchOutcome out;
  out.energy_clipped = q.energy_clipped;
  out.power_clipped = q.power_clipped;

  const double inst10 = instantaneous_switch_prob(gm.x, gp.x, gm.y, gp.y, true);
  const double inst01 = instantaneous_switch_prob(gm.x, gp.x, gm.y, gp.y, false);
  out.pr10 = minus.force10 ? 1.0
                           : clamp01(continuous_switch_prob(st.r10_prev_plus, minus.r10, q.dt) +
                                     inst10);
  out.pr01 = minus.force01 ? 1.0
                           : clamp01(continuous_switch_prob(st.r01_prev_plus, minus.r01, q.dt) +
                                     inst01);

  const TemperatureBounds bounds = temperature_bounds(q.plus.pivot, q.plus.scale, m);
  // The bounds act on every device, whatever its current state: below the low
  // bound the compressor must be off and above the high bound it must be on.
  bool next = st.compressor;
  if (T <= bounds.low) {
    next = false;
    out.forced = st.compressor;
  } else if (T >= bounds.high) {
    next = true;
    out.forced = !st.compressor;
  } else if (st.compressor) {
    if (rng.uniform() < out.pr10) next = false;
  } else {
    if (rng.uniform() < out.pr01) next = true;
  }
  out.compressor = next;

  st.z = q.z;
  st.pi_prev = q.pi_next;
  st.t_prev = t;
  st.r10_prev_plus = plus.r10;
  st.r01_prev_plus = plus.r01;
  st.compressor = next;
  return out;
}

}  // namespace tcl
