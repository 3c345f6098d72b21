#pragma once

#include <cmath>
#include <span>
#include <utility>

#include "fcsmpc/converter.hpp"
#include "fcsmpc/runlog.hpp"

namespace fcsmpc {

/// Load star point wiring. kTied bonds the load neutral to the link midpoint
/// so the three phases are fully decoupled; kFloating leaves it unconnected,
/// which subtracts the common-mode voltage and enforces zero-sum currents.
enum class NeutralMode {
  kTied,
  kFloating,
};

struct PlantParams {
  double R = 30.0;     ///< per-phase resistance, ohm (R = 0 allowed: pure integrator)
  double L = 5e-3;     ///< per-phase inductance, H
  double C = 1e-3;     ///< per-capacitor capacitance, F
  double V_dc = 750.0; ///< total link voltage, V

  /// When true the pole voltages are computed from the true (possibly
  /// unbalanced) capacitor voltages; when false from the nominal V_dc/4
  /// quarters, decoupling the current path from the stored imbalance.
  bool capacitor_coupling = true;

  NeutralMode neutral = NeutralMode::kTied;

  /// Variant of the charge map driving the capacitor differences.
  CouplingTable coupling_table = CouplingTable::kEquations;

  void validate() const {
    if (!(R >= 0.0)) throw std::invalid_argument("PlantParams: R must be >= 0");
    if (!(L > 0.0)) throw std::invalid_argument("PlantParams: L must be > 0");
    if (!(C > 0.0)) throw std::invalid_argument("PlantParams: C must be > 0");
    if (!(V_dc > 0.0)) throw std::invalid_argument("PlantParams: V_dc must be > 0");
  }
};

struct PlantState {
  double t = 0.0;                ///< absolute simulation time, s
  Vec3 i = Vec3::Zero();         ///< phase currents, A
  CapacitorDifferences v_d{};    ///< capacitor voltage differences, V

  [[nodiscard]] bool finite() const {
    return std::isfinite(t) && i.allFinite() && std::isfinite(v_d.vd1) &&
           std::isfinite(v_d.vd2) && std::isfinite(v_d.vd3);
  }
};

/// Pole voltages applied for a given state/input pair, honoring the coupling
/// flag and neutral mode. This is the voltage the plant holds constant over a
/// switching interval (capacitor feedback is refreshed at switching instants,
/// not continuously).
[[nodiscard]] Vec3 applied_voltages(const PlantState& state, const PlantParams& params,
                                    const SwitchingState& u);

/// Advances the plant by holding switching state `u` for `dt` seconds.
///
/// The phase currents follow the exact RL solution for the held voltage and
/// the capacitor differences advance by the closed-form integral of that
/// exponential current through the charge map. There is no integration error:
/// with a state-independent drive (capacitor_coupling off) composing two
/// holds of the same input equals one longer hold to roundoff. With coupling
/// on, splitting a hold refreshes the capacitor feedback at the split point,
/// which is a (deliberately) different switching schedule, not an error.
[[nodiscard]] PlantState hold_input(const PlantState& state, const PlantParams& params,
                                    const SwitchingState& u, double dt);

struct Hold {
  SwitchingState u;
  double dt = 0.0;
};

/// Applies `u` for `dt` seconds like hold_input while appending every log
/// sample falling inside [state.t, state.t + dt) to `log`. Sample instants
/// are t0 + n/rate; a sample landing on the leading edge records this hold's
/// level. State at sample instants is evaluated with the same closed form
/// used for the full step.
[[nodiscard]] PlantState hold_input_logged(const PlantState& state, const PlantParams& params,
                                           const SwitchingState& u, double dt, RunLog& log);

/// Runs a fixed switching schedule and records a log sampled at `log_rate`.
/// An empty schedule returns the input state and an empty log.
[[nodiscard]] std::pair<PlantState, RunLog> run_schedule(const PlantState& state,
                                                         std::span<const Hold> schedule,
                                                         const PlantParams& params,
                                                         double log_rate);

}  // namespace fcsmpc
