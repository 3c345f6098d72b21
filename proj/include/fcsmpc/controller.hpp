#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fcsmpc/converter.hpp"
#include "fcsmpc/predictor.hpp"

namespace fcsmpc {

struct CostWeights {
  double lambda_I = 100.0;  ///< weight per ampere of tracking error
  double lambda_C = 2e-4;   ///< weight of the balancing contraction term
  double lambda_S = 1.0;    ///< weight per level step of switching effort

  void validate() const {
    if (!(lambda_I >= 0.0 && lambda_C >= 0.0 && lambda_S >= 0.0))
      throw std::invalid_argument("CostWeights: weights must be >= 0");
  }
};

enum class TrackingNorm {
  kL1,         ///< sum of absolute per-phase errors
  kL2Squared,  ///< sum of squared per-phase errors
};

/// Cost-evaluation switches shared by all controllers.
struct CostOptions {
  TrackingNorm tracking_norm = TrackingNorm::kL1;
  CouplingTable coupling_table = CouplingTable::kEquations;
};

/// Everything a controller may use at one decision instant. All fields are
/// measurements (or the reference) taken at the same sampling instant; the
/// decision never peeks at later data.
struct ControllerInputs {
  Vec3 i_m = Vec3::Zero();        ///< measured phase currents
  CapacitorDifferences v_dm{};    ///< measured capacitor differences
  SwitchingState u_m{};           ///< switching state currently applied
  Vec3 i_ref = Vec3::Zero();      ///< reference currents for this period

  /// Optional per-subinterval references (one per subinterval). Empty means
  /// i_ref is held for the whole period, which is the default behavior.
  std::vector<Vec3> i_ref_sub{};
};

struct Action {
  SwitchingState u;
  double offset = 0.0;  ///< application time relative to the period start, s
};

struct ControlDecision {
  std::vector<Action> actions;          ///< strictly ascending offsets, first 0
  std::vector<double> costs;            ///< achieved cost per stage
  std::uint64_t candidates_evaluated = 0;

  [[nodiscard]] double total_cost() const {
    double s = 0.0;
    for (double c : costs) s += c;
    return s;
  }
};

/// Single-stage cost: tracking + switching effort + balancing contraction.
/// The balancing term lambda_C * <vd_pred - v_dm, v_dm> rewards predicted
/// movement of the differences against their measured direction and can make
/// the total negative.
[[nodiscard]] double stage_cost(const Vec3& i_pred, const Vec3& i_ref, const SwitchingState& u,
                                const SwitchingState& u_prev, const CapacitorDifferences& vd_pred,
                                const CapacitorDifferences& v_dm, const CostWeights& w,
                                TrackingNorm norm = TrackingNorm::kL1);

/// Picks the best of the 125 switching states over one full period.
/// Enumeration is lexicographic from (-2,-2,-2) to (2,2,2); ties keep the
/// first minimum. Exactly one action at offset 0.
[[nodiscard]] ControlDecision standard_mpc_step(const ControllerInputs& in,
                                                const PredictionModel& model, const CostWeights& w,
                                                double controller_capacitance,
                                                const CostOptions& options = {});

/// Greedy stage-by-stage optimization over the subintervals of one period:
/// each stage scans the 125 states against its own subinterval model, commits
/// the winner, and chains the predicted current/differences into the next
/// stage. The measured v_dm stays fixed in the cost while the predicted
/// differences chain forward. Cost work is 125 * count subproblems instead
/// of 125^count.
[[nodiscard]] ControlDecision multirate_mpc_step(const ControllerInputs& in,
                                                 std::span<const PredictionModel> models,
                                                 const SubintervalGrid& grid, const CostWeights& w,
                                                 double controller_capacitance,
                                                 const CostOptions& options = {});

/// Exact reference for multirate_mpc_step: enumerates every sequence of
/// switching states over the subintervals (125^count candidates) and returns
/// the total-cost argmin. Ties resolve to the lexicographically first
/// sequence (stage 1 most significant). Refuses more than 3 subintervals.
/// `parallel` selects the OpenMP scan; results are bit-identical either way.
[[nodiscard]] ControlDecision exhaustive_multirate_step(const ControllerInputs& in,
                                                        std::span<const PredictionModel> models,
                                                        const SubintervalGrid& grid,
                                                        const CostWeights& w,
                                                        double controller_capacitance,
                                                        const CostOptions& options = {},
                                                        bool parallel = true);

}  // namespace fcsmpc
