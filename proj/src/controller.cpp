#include "fcsmpc/controller.hpp"

#include <cmath>

#include "fcsmpc/scan.hpp"

namespace fcsmpc {

double stage_cost(const Vec3& i_pred, const Vec3& i_ref, const SwitchingState& u,
                  const SwitchingState& u_prev, const CapacitorDifferences& vd_pred,
                  const CapacitorDifferences& v_dm, const CostWeights& w, TrackingNorm norm) {
  double track = 0.0;
  if (norm == TrackingNorm::kL1) {
    track = std::abs(i_pred[0] - i_ref[0]) + std::abs(i_pred[1] - i_ref[1]) +
            std::abs(i_pred[2] - i_ref[2]);
  } else {
    const double e0 = i_pred[0] - i_ref[0];
    const double e1 = i_pred[1] - i_ref[1];
    const double e2 = i_pred[2] - i_ref[2];
    track = e0 * e0 + e1 * e1 + e2 * e2;
  }
  const double sw = static_cast<double>(u.distance(u_prev));
  const double bal = (vd_pred.vd1 - v_dm.vd1) * v_dm.vd1 + (vd_pred.vd2 - v_dm.vd2) * v_dm.vd2 +
                     (vd_pred.vd3 - v_dm.vd3) * v_dm.vd3;
  return w.lambda_I * track + w.lambda_S * sw + w.lambda_C * bal;
}

namespace {

struct StageEval {
  Vec3 i_next;
  CapacitorDifferences vd_next;
  double cost;
};

/// Evaluates one candidate state for one stage. Shared by all three
/// controllers so that identical stages produce identical floating point.
StageEval eval_stage(const PredictionModel& m, const Vec3& i_prev, const SwitchingState& u_prev,
                     const CapacitorDifferences& vd_prev, const Vec3& i_ref,
                     const CapacitorDifferences& v_dm, const CostWeights& w, double capacitance,
                     const CostOptions& opt, const SwitchingState& u) {
  StageEval e;
  e.i_next = predict_current(m, i_prev, u);
  e.vd_next = predict_vd(vd_prev, u, e.i_next, m.dt, capacitance, opt.coupling_table);
  e.cost = stage_cost(e.i_next, i_ref, u, u_prev, e.vd_next, v_dm, w, opt.tracking_norm);
  return e;
}

void check_common(const CostWeights& w, double capacitance) {
  w.validate();
  if (!(capacitance > 0.0))
    throw std::invalid_argument("controller: capacitance must be > 0");
}

const Vec3& stage_reference(const ControllerInputs& in, int stage) {
  if (in.i_ref_sub.empty()) return in.i_ref;
  return in.i_ref_sub.at(static_cast<std::size_t>(stage));
}

}  // namespace

ControlDecision standard_mpc_step(const ControllerInputs& in, const PredictionModel& model,
                                  const CostWeights& w, double controller_capacitance,
                                  const CostOptions& options) {
  model.validate();
  check_common(w, controller_capacitance);

  const auto candidate_cost = [&](std::int64_t k) {
    const SwitchingState u = SwitchingState::from_index(static_cast<int>(k));
    return eval_stage(model, in.i_m, in.u_m, in.v_dm, in.i_ref, in.v_dm, w,
                      controller_capacitance, options, u)
        .cost;
  };
  const ScanResult best = argmin_scan_serial(kSwitchingStateCount, candidate_cost);

  ControlDecision d;
  d.actions = {{SwitchingState::from_index(static_cast<int>(best.index)), 0.0}};
  d.costs = {best.cost};
  d.candidates_evaluated = kSwitchingStateCount;
  return d;
}

ControlDecision multirate_mpc_step(const ControllerInputs& in,
                                   std::span<const PredictionModel> models,
                                   const SubintervalGrid& grid, const CostWeights& w,
                                   double controller_capacitance, const CostOptions& options) {
  check_common(w, controller_capacitance);
  const int n = grid.count();
  if (static_cast<int>(models.size()) != n)
    throw std::invalid_argument("multirate_mpc_step: one model per subinterval required");
  if (!in.i_ref_sub.empty() && static_cast<int>(in.i_ref_sub.size()) != n)
    throw std::invalid_argument("multirate_mpc_step: per-subinterval reference count mismatch");
  for (const auto& m : models) m.validate();

  ControlDecision d;
  d.actions.reserve(static_cast<std::size_t>(n));
  d.costs.reserve(static_cast<std::size_t>(n));

  Vec3 i_chain = in.i_m;
  SwitchingState u_prev = in.u_m;
  CapacitorDifferences vd_chain = in.v_dm;

  for (int p = 0; p < n; ++p) {
    const PredictionModel& m = models[static_cast<std::size_t>(p)];
    const Vec3& ref = stage_reference(in, p);
    const auto candidate_cost = [&](std::int64_t k) {
      const SwitchingState u = SwitchingState::from_index(static_cast<int>(k));
      return eval_stage(m, i_chain, u_prev, vd_chain, ref, in.v_dm, w, controller_capacitance,
                        options, u)
          .cost;
    };
    const ScanResult best = argmin_scan_serial(kSwitchingStateCount, candidate_cost);
    const SwitchingState u_star = SwitchingState::from_index(static_cast<int>(best.index));
    const StageEval e = eval_stage(m, i_chain, u_prev, vd_chain, ref, in.v_dm, w,
                                   controller_capacitance, options, u_star);
    d.actions.push_back({u_star, grid.offset(p)});
    d.costs.push_back(e.cost);
    i_chain = e.i_next;
    vd_chain = e.vd_next;
    u_prev = u_star;
  }
  d.candidates_evaluated = static_cast<std::uint64_t>(n) * kSwitchingStateCount;
  return d;
}

ControlDecision exhaustive_multirate_step(const ControllerInputs& in,
                                          std::span<const PredictionModel> models,
                                          const SubintervalGrid& grid, const CostWeights& w,
                                          double controller_capacitance, const CostOptions& options,
                                          bool parallel) {
  check_common(w, controller_capacitance);
  const int n = grid.count();
  if (static_cast<int>(models.size()) != n)
    throw std::invalid_argument("exhaustive_multirate_step: one model per subinterval required");
  if (!in.i_ref_sub.empty() && static_cast<int>(in.i_ref_sub.size()) != n)
    throw std::invalid_argument("exhaustive_multirate_step: per-subinterval reference count mismatch");
  if (n > 3)
    throw std::invalid_argument("exhaustive_multirate_step: refusing more than 3 subintervals");
  for (const auto& m : models) m.validate();

  std::int64_t total = 1;
  for (int p = 0; p < n; ++p) total *= kSwitchingStateCount;

  // Decodes sequence index digits with stage 0 most significant, so index
  // order equals lexicographic order over (u(1), ..., u(n)).
  const auto sequence_cost = [&](std::int64_t seq) {
    Vec3 i_chain = in.i_m;
    SwitchingState u_prev = in.u_m;
    CapacitorDifferences vd_chain = in.v_dm;
    double acc = 0.0;
    std::int64_t radix = total;
    for (int p = 0; p < n; ++p) {
      radix /= kSwitchingStateCount;
      const int digit = static_cast<int>((seq / radix) % kSwitchingStateCount);
      const SwitchingState u = SwitchingState::from_index(digit);
      const StageEval e = eval_stage(models[static_cast<std::size_t>(p)], i_chain, u_prev, vd_chain,
                                     stage_reference(in, p), in.v_dm, w, controller_capacitance,
                                     options, u);
      acc += e.cost;
      i_chain = e.i_next;
      vd_chain = e.vd_next;
      u_prev = u;
    }
    return acc;
  };

  const ScanResult best =
      parallel ? argmin_scan_parallel(total, sequence_cost) : argmin_scan_serial(total, sequence_cost);

  // Re-walk the winning sequence to recover per-stage actions and costs.
  ControlDecision d;
  d.actions.reserve(static_cast<std::size_t>(n));
  d.costs.reserve(static_cast<std::size_t>(n));
  {
    Vec3 i_chain = in.i_m;
    SwitchingState u_prev = in.u_m;
    CapacitorDifferences vd_chain = in.v_dm;
    std::int64_t radix = total;
    for (int p = 0; p < n; ++p) {
      radix /= kSwitchingStateCount;
      const int digit = static_cast<int>((best.index / radix) % kSwitchingStateCount);
      const SwitchingState u = SwitchingState::from_index(digit);
      const StageEval e = eval_stage(models[static_cast<std::size_t>(p)], i_chain, u_prev, vd_chain,
                                     stage_reference(in, p), in.v_dm, w, controller_capacitance,
                                     options, u);
      d.actions.push_back({u, grid.offset(p)});
      d.costs.push_back(e.cost);
      i_chain = e.i_next;
      vd_chain = e.vd_next;
      u_prev = u;
    }
  }
  d.candidates_evaluated = static_cast<std::uint64_t>(total);
  return d;
}

}  // namespace fcsmpc
