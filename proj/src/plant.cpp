#include "fcsmpc/plant.hpp"

#include <cmath>

namespace fcsmpc {

namespace {

/// Current and its time integral after holding voltage v for tau seconds,
/// starting from i0, for one RL phase.
struct PhaseHold {
  double i_end;
  double charge;  // integral of i over [0, tau]
};

PhaseHold advance_phase(double i0, double v, double R, double L, double tau) {
  if (R == 0.0) {
    // Lossless limit: linear ramp.
    const double slope = v / L;
    return {i0 + slope * tau, i0 * tau + 0.5 * slope * tau * tau};
  }
  const double tau_rl = L / R;
  const double decay = std::exp(-tau / tau_rl);
  const double i_inf = v / R;
  const double i_end = i_inf + (i0 - i_inf) * decay;
  const double charge = i_inf * tau + (i0 - i_inf) * tau_rl * (1.0 - decay);
  return {i_end, charge};
}

}  // namespace

Vec3 applied_voltages(const PlantState& state, const PlantParams& params, const SwitchingState& u) {
  const CapacitorVoltages caps = params.capacitor_coupling
                                     ? CapacitorVoltages::from_differences(params.V_dc, state.v_d)
                                     : CapacitorVoltages::balanced(params.V_dc);
  Vec3 v;
  for (int k = 0; k < 3; ++k) v[k] = phase_voltage(u.phase(k), caps);
  if (params.neutral == NeutralMode::kFloating) {
    const double common = (v[0] + v[1] + v[2]) / 3.0;
    v.array() -= common;
  }
  return v;
}

PlantState hold_input(const PlantState& state, const PlantParams& params, const SwitchingState& u,
                      double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("hold_input: dt must be > 0");
  params.validate();

  const Vec3 v = applied_voltages(state, params, u);

  PlantState next = state;
  next.t = state.t + dt;

  Vec3 charge;
  for (int k = 0; k < 3; ++k) {
    const PhaseHold ph = advance_phase(state.i[k], v[k], params.R, params.L, dt);
    next.i[k] = ph.i_end;
    charge[k] = ph.charge;
  }

  // vd' = vd + (1/C) * sum_k column(u_k) * integral(i_k)
  Vec3 dv = Vec3::Zero();
  for (int k = 0; k < 3; ++k) dv += balancing_column(u.phase(k), params.coupling_table) * charge[k];
  dv /= params.C;
  next.v_d = CapacitorDifferences::from_vec(state.v_d.vec() + dv);
  return next;
}

PlantState hold_input_logged(const PlantState& state, const PlantParams& params,
                             const SwitchingState& u, double dt, RunLog& log) {
  // Samples within half a picosecond of the hold end belong to the next hold.
  constexpr double kEdgeTol = 1e-12;
  const double t_end = state.t + dt;
  const std::array<std::int8_t, 3> levels = {static_cast<std::int8_t>(u.level(0)),
                                             static_cast<std::int8_t>(u.level(1)),
                                             static_cast<std::int8_t>(u.level(2))};
  for (;;) {
    const double ts = log.next_sample_time();
    if (ts >= t_end - kEdgeTol) break;
    const double tau = ts - state.t;
    PlantState at = tau > 0.0 ? hold_input(state, params, u, tau) : state;
    log.push_sample(ts, {at.i[0], at.i[1], at.i[2]}, levels,
                    {at.v_d.vd1, at.v_d.vd2, at.v_d.vd3});
  }
  return hold_input(state, params, u, dt);
}

std::pair<PlantState, RunLog> run_schedule(const PlantState& state, std::span<const Hold> schedule,
                                           const PlantParams& params, double log_rate) {
  if (!(log_rate > 0.0)) throw std::invalid_argument("run_schedule: log_rate must be > 0");
  RunLog log;
  log.sample_rate = log_rate;
  log.t0 = state.t;
  PlantState s = state;
  for (const Hold& h : schedule) s = hold_input_logged(s, params, h.u, h.dt, log);
  log.check_consistent();
  return {s, log};
}

}  // namespace fcsmpc
