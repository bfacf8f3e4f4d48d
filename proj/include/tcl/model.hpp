#pragma once

#include "tcl/random.hpp"

namespace tcl {

/// First-order thermal model of one appliance.
///
///   dT/dt = -alpha * (T - t_off + c * (t_off - t_on))
///
/// Temperatures in degrees C, alpha in 1/s, p_on in W. Required ordering:
/// t_on < t_min < t_max < t_off.
struct ApplianceModel {
  double alpha = 1.0 / 7200.0;
  double p_on = 70.0;
  double t_off = 20.0;
  double t_on = -44.0;
  double t_min = 2.0;
  double t_max = 7.0;

  bool operator==(const ApplianceModel&) const = default;
};

/// Domestic refrigerator used throughout the experiments.
inline constexpr ApplianceModel kNominalRefrigerator{};

/// Steady-state constants of a model under hysteresis control.
struct DerivedQuantities {
  double k = 0.0;             ///< normalisation of the steady-state density (degC)
  double t_bar_0 = 0.0;       ///< mean temperature (degC)
  double p_0 = 0.0;           ///< mean power (W)
  double zeta_at_tmax = 0.0;  ///< energy coordinate of full contraction onto t_max (< 0)
  double zeta_at_tmin = 0.0;  ///< energy coordinate of full contraction onto t_min (> 0)

  /// Duty cycle p_0 / p_on.
  double duty(const ApplianceModel& m) const noexcept { return p_0 / m.p_on; }
};

struct DeviceState {
  double temperature = 0.0;
  bool compressor = false;
  bool door_open = false;
};

/// Throws ValidationError unless alpha > 0, p_on > 0 and the temperatures are
/// strictly ordered and finite.
void validate(const ApplianceModel& model);

/// Closed-form steady-state quantities. Throws std::domain_error when a log
/// argument is not positive (temperatures out of order).
DerivedQuantities derive_quantities(const ApplianceModel& model);

/// zeta(R) = (t_bar_0 - R) / (t_off - t_bar_0).
double zeta(const ApplianceModel& model, const DerivedQuantities& dq, double pivot) noexcept;

/// One explicit Euler step of the thermal ODE over dt.
///
/// door_alpha_factor > 1 models an open door: the thermal resistance drops by
/// that factor, so alpha grows by it while the compressor's cooling rate
/// alpha * (t_off - t_on) is unchanged. The step is then split into
/// ceil(door_alpha_factor) equal Euler substeps.
DeviceState integrate_device(const DeviceState& state, const ApplianceModel& model, double dt,
                             double door_alpha_factor = 1.0) noexcept;

/// Uncontrolled thermostat: integrate, then switch on at t_max and off at t_min.
DeviceState hysteresis_step(const DeviceState& state, const ApplianceModel& model,
                            double dt) noexcept;

/// Multiplies alpha, t_max, t_min, t_on and t_off by independent U[lo, hi]
/// factors; p_on is kept. Draws that break the temperature ordering are
/// redrawn up to a fixed budget, after which ValidationError is thrown.
ApplianceModel perturb_model(const ApplianceModel& nominal, Rng& rng, double lo = 0.8,
                             double hi = 1.2);

/// Draws a state from the steady-state distribution: compressor on with
/// probability p_0 / p_on, temperature from the conditional density
/// proportional to 1/(T - t_on) when on and 1/(t_off - T) when off, on
/// [t_min, t_max]. The door is closed.
DeviceState sample_initial_state(const ApplianceModel& model, const DerivedQuantities& dq,
                                 Rng& rng) noexcept;

/// Inverse CDFs used by sample_initial_state, u in [0, 1].
double inverse_cdf_on(const ApplianceModel& model, double u) noexcept;
double inverse_cdf_off(const ApplianceModel& model, double u) noexcept;

/// Largest distance a device can travel past t_max (off state) or below t_min
/// (on state) during one interval of length dt.
double drift_above_tmax(const ApplianceModel& model, double dt) noexcept;
double drift_below_tmin(const ApplianceModel& model, double dt) noexcept;

}  // namespace tcl
