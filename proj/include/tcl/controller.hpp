#pragma once

#include "tcl/model.hpp"
#include "tcl/random.hpp"

namespace tcl {

/// Which temperature the population distribution pivots around.
enum class Mode {
  provision,   ///< pivot t_max, the population gives energy back (z <= 0)
  absorption,  ///< pivot t_min, the population stores cooling energy (z > 0)
};

double pivot_temperature(Mode mode, const ApplianceModel& model) noexcept;
double pivot_zeta(Mode mode, const DerivedQuantities& dq) noexcept;

/// Persistent memory of one device's controller between invocations.
///
/// The controller only ever sees `control_model`. A mismatch with the physics
/// model is how model error enters a simulation.
struct ControllerState {
  double z = 0.0;              ///< population energy coordinate at t_prev
  double pi_prev = 1.0;        ///< reference applied over the interval ending now
  double t_prev = 0.0;         ///< time of the previous invocation (s)
  double r10_prev_plus = 0.0;  ///< on->off rate just after t_prev (1/s)
  double r01_prev_plus = 0.0;  ///< off->on rate just after t_prev (1/s)
  bool compressor = false;     ///< compressor state over the interval ending now
  ApplianceModel control_model;
  DerivedQuantities dq;
  double w = 0.9;  ///< usable fraction of the energy band, in (0, 1]
};

/// Steady-state controller: z = 0, previous reference 1, zero rates.
ControllerState make_controller_state(const ApplianceModel& control_model, double w,
                                      double t_start, bool compressor);

/// Quantities of the temperature distribution on one side (left or right
/// limit) of an invocation time.
struct PivotSide {
  Mode mode = Mode::provision;
  double pivot = 0.0;        ///< R (degC)
  double zeta = 0.0;         ///< zeta(R)
  double contraction = 0.0;  ///< z / zeta, so that scale = 1 - contraction
  double scale = 1.0;        ///< s
  double beta = 0.0;         ///< control parameter
};

/// Temperature-dependent intermediates of the switching rates at one side.
struct SwitchingGeometry {
  double p = 0.0;
  double q = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct SwitchingRates {
  double r10 = 0.0;  ///< on->off (1/s)
  double r01 = 0.0;  ///< off->on (1/s)
  /// The rate formula divides by |X| or |Y| below tolerance with a
  /// non-vanishing numerator; the device must switch now.
  bool force10 = false;
  bool force01 = false;
};

struct PowerLimits {
  double lower = 0.0;
  double upper = 0.0;
};

struct TemperatureBounds {
  double low = 0.0;
  double high = 0.0;
};

/// Population-level state of one invocation; independent of the device's
/// own temperature and compressor.
struct StepQuantities {
  double z = 0.0;
  double dt = 0.0;
  PivotSide minus;
  PivotSide plus;
  double pi_requested = 1.0;
  double pi_next = 1.0;  ///< after energy and power clipping
  bool energy_clipped = false;
  bool power_clipped = false;
};

/// Result of one invocation for one device.
struct SwitchOutcome {
  bool compressor = false;
  double pr10 = 0.0;  ///< combined on->off probability evaluated for this step
  double pr01 = 0.0;  ///< combined off->on probability evaluated for this step
  bool forced = false;
  bool energy_clipped = false;
  bool power_clipped = false;
};

/// z_i = z_{i-1} exp(-alpha dt) + (pi - 1)(1 - exp(-alpha dt)).
double update_z(double z_prev, double pi, double alpha, double dt) noexcept;

/// provision when z <= 0, absorption otherwise.
Mode select_mode(double z) noexcept;

/// Restricts pi_next so an excursion outside [w zeta(t_max), w zeta(t_min)]
/// is not made worse.
double clip_energy(double pi_next, double z, double w, const DerivedQuantities& dq) noexcept;

/// Closed interval of references the on/off heating rates can realise at the
/// far edge of the contracted distribution.
PowerLimits power_limits(double zeta_plus, double pivot_plus, const ApplianceModel& model) noexcept;
double clip_power(double pi_next, double zeta_plus, double pivot_plus,
                  const ApplianceModel& model) noexcept;

/// zeta, scale and beta for one side. Throws DegenerateStateError when z
/// coincides with zeta(R).
PivotSide make_side(double z, double pi_effective, Mode mode, const ApplianceModel& model,
                    const DerivedQuantities& dq);

SwitchingGeometry switching_geometry(double temperature, const PivotSide& side,
                                     const ApplianceModel& model) noexcept;

/// Continuous-time on->off and off->on rates at the given temperature.
SwitchingRates switching_rates(double temperature, const PivotSide& side,
                               const ApplianceModel& model) noexcept;

/// Trapezoid of the interval's inner edge rates, clamped to [0, 1].
double continuous_switch_prob(double r_prev_plus, double r_now_minus, double dt) noexcept;

/// Probability of an immediate toggle caused by a jump of the heating-rate
/// field at the invocation time.
double instantaneous_switch_prob(double x_minus, double x_plus, double y_minus, double y_plus,
                                 bool compressor) noexcept;

TemperatureBounds temperature_bounds(double pivot_plus, double scale_plus,
                                     const ApplianceModel& model) noexcept;

/// Distribution-control half of an invocation at time t: advances z, picks the
/// modes, clips the requested reference, and computes both sides.
StepQuantities population_step(const ControllerState& st, double pi_requested, double t);

/// One controller invocation at time t with measured temperature. Returns the
/// compressor state for the upcoming interval and advances `st`.
///
/// Throws ValidationError when t <= st.t_prev and DegenerateStateError from
/// make_side.
SwitchOutcome update_compressor_state(double pi_next, double temperature, double t,
                                      ControllerState& st, Rng& rng);

}  // namespace tcl
