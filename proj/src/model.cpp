#include "tcl/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tcl/errors.hpp"

namespace tcl {

namespace {

constexpr int kPerturbRetries = 1000;

bool ordered(const ApplianceModel& m) noexcept {
  return m.t_on < m.t_min && m.t_min < m.t_max && m.t_max < m.t_off;
}

}  // namespace

void validate(const ApplianceModel& m) {
  const bool finite = std::isfinite(m.alpha) && std::isfinite(m.p_on) && std::isfinite(m.t_off) &&
                      std::isfinite(m.t_on) && std::isfinite(m.t_min) && std::isfinite(m.t_max);
  if (!finite) throw ValidationError("appliance model has non-finite parameters");
  if (!(m.alpha > 0.0)) throw ValidationError("appliance model requires alpha > 0");
  if (!(m.p_on > 0.0)) throw ValidationError("appliance model requires p_on > 0");
  if (!ordered(m)) {
    throw ValidationError("appliance model requires t_on < t_min < t_max < t_off");
  }
}

DerivedQuantities derive_quantities(const ApplianceModel& m) {
  const double on_ratio = (m.t_max - m.t_on) / (m.t_min - m.t_on);
  const double cycle_ratio =
      ((m.t_max - m.t_on) * (m.t_min - m.t_off)) / ((m.t_min - m.t_on) * (m.t_max - m.t_off));
  if (!(on_ratio > 0.0) || !(cycle_ratio > 0.0)) {
    throw std::domain_error("derive_quantities: non-positive log argument, model is mis-ordered");
  }
  const double log_on = std::log(on_ratio);
  const double log_cycle = std::log(cycle_ratio);
  if (!(log_cycle > 0.0)) {
    throw std::domain_error("derive_quantities: degenerate hysteresis band");
  }

  DerivedQuantities dq;
  dq.k = (m.t_off - m.t_on) / log_cycle;
  dq.p_0 = log_on / log_cycle * m.p_on;
  dq.t_bar_0 = m.t_off - dq.k * log_on;
  dq.zeta_at_tmax = zeta(m, dq, m.t_max);
  dq.zeta_at_tmin = zeta(m, dq, m.t_min);
  return dq;
}

double zeta(const ApplianceModel& m, const DerivedQuantities& dq, double pivot) noexcept {
  return (dq.t_bar_0 - pivot) / (m.t_off - dq.t_bar_0);
}

DeviceState integrate_device(const DeviceState& state, const ApplianceModel& m, double dt,
                             double door_alpha_factor) noexcept {
  DeviceState next = state;
  if (door_alpha_factor <= 1.0) {
    const double asymptote = state.compressor ? m.t_on : m.t_off;
    next.temperature += dt * m.alpha * (asymptote - state.temperature);
    return next;
  }

  const double alpha = m.alpha * door_alpha_factor;
  const double asymptote =
      state.compressor ? m.t_off - (m.t_off - m.t_on) / door_alpha_factor : m.t_off;
  const int substeps = static_cast<int>(std::ceil(door_alpha_factor));
  const double h = dt / substeps;
  double t = state.temperature;
  for (int i = 0; i < substeps; ++i) t += h * alpha * (asymptote - t);
  next.temperature = t;
  return next;
}

DeviceState hysteresis_step(const DeviceState& state, const ApplianceModel& m, double dt) noexcept {
  DeviceState next = integrate_device(state, m, dt);
  if (next.temperature >= m.t_max) {
    next.compressor = true;
  } else if (next.temperature <= m.t_min) {
    next.compressor = false;
  }
  return next;
}

ApplianceModel perturb_model(const ApplianceModel& nominal, Rng& rng, double lo, double hi) {
  if (!(lo <= hi) || !(lo > 0.0)) {
    throw ValidationError("perturb_model requires 0 < lo <= hi");
  }
  for (int attempt = 0; attempt < kPerturbRetries; ++attempt) {
    ApplianceModel m = nominal;
    m.alpha *= rng.uniform(lo, hi);
    m.t_max *= rng.uniform(lo, hi);
    m.t_min *= rng.uniform(lo, hi);
    m.t_on *= rng.uniform(lo, hi);
    m.t_off *= rng.uniform(lo, hi);
    if (ordered(m)) return m;
  }
  throw ValidationError("perturb_model: heterogeneity range [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "] keeps violating t_on < t_min < t_max < t_off");
}

double inverse_cdf_on(const ApplianceModel& m, double u) noexcept {
  return m.t_on + (m.t_min - m.t_on) * std::pow((m.t_max - m.t_on) / (m.t_min - m.t_on), u);
}

double inverse_cdf_off(const ApplianceModel& m, double u) noexcept {
  return m.t_off - (m.t_off - m.t_min) * std::pow((m.t_off - m.t_max) / (m.t_off - m.t_min), u);
}

DeviceState sample_initial_state(const ApplianceModel& m, const DerivedQuantities& dq,
                                 Rng& rng) noexcept {
  DeviceState s;
  s.compressor = rng.uniform() < dq.duty(m);
  const double u = rng.uniform();
  s.temperature = s.compressor ? inverse_cdf_on(m, u) : inverse_cdf_off(m, u);
  // pow rounding can land a hair outside the band
  s.temperature = std::min(std::max(s.temperature, m.t_min), m.t_max);
  s.door_open = false;
  return s;
}

double drift_above_tmax(const ApplianceModel& m, double dt) noexcept {
  return m.alpha * dt * (m.t_off - m.t_max);
}

double drift_below_tmin(const ApplianceModel& m, double dt) noexcept {
  return m.alpha * dt * (m.t_min - m.t_on);
}

}  // namespace tcl
