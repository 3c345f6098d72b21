#pragma once

#include <vector>

#include "fcsmpc/converter.hpp"
#include "fcsmpc/plant.hpp"

namespace fcsmpc {

/// One-step scalar prediction model, identical for the three phases:
///   i(k+1) = A * i(k) + B * u(k)
/// with u an integer level. A = 1 - R*dt/L, B = V_dc*dt/(4L); the B scaling
/// assumes a balanced link where each level step is worth V_dc/4.
struct PredictionModel {
  double A = 0.0;
  double B = 0.0;
  double dt = 0.0;  ///< horizon of this model, s

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("PredictionModel: dt must be > 0");
    if (!(A > 0.0 && A <= 1.0))
      throw std::invalid_argument("PredictionModel: need 0 < A <= 1 (R*dt/L must be < 1)");
    if (!(B > 0.0)) throw std::invalid_argument("PredictionModel: B must be > 0");
  }
};

/// Normalized split points of one sampling period, 0 < alpha_1 < ... <
/// alpha_N = 1. Subinterval p covers (alpha_{p-1}, alpha_p] with alpha_0 = 0.
/// The absolute subinterval lengths dt(p) are adjusted in the last entry so
/// they sum to Ts exactly in floating point.
class SubintervalGrid {
 public:
  SubintervalGrid(std::vector<double> alphas, double Ts) : alphas_(std::move(alphas)), Ts_(Ts) {
    if (!(Ts_ > 0.0)) throw std::invalid_argument("SubintervalGrid: Ts must be > 0");
    if (alphas_.empty()) throw std::invalid_argument("SubintervalGrid: need at least one split");
    double prev = 0.0;
    for (double a : alphas_) {
      if (!(a > prev)) throw std::invalid_argument("SubintervalGrid: splits must be strictly ascending in (0,1]");
      prev = a;
    }
    if (alphas_.back() != 1.0)
      throw std::invalid_argument("SubintervalGrid: last split must be exactly 1");
    dts_.resize(alphas_.size());
    double acc = 0.0;
    for (std::size_t p = 0; p + 1 < alphas_.size(); ++p) {
      dts_[p] = alphas_[p] * Ts_ - (p == 0 ? 0.0 : alphas_[p - 1] * Ts_);
      acc += dts_[p];
    }
    dts_.back() = Ts_ - acc;  // forces exact telescoping
    for (double d : dts_)
      if (!(d > 0.0)) throw std::invalid_argument("SubintervalGrid: degenerate subinterval");
  }

  [[nodiscard]] int count() const { return static_cast<int>(alphas_.size()); }
  [[nodiscard]] double Ts() const { return Ts_; }
  [[nodiscard]] double alpha(int p) const { return alphas_.at(static_cast<std::size_t>(p)); }
  [[nodiscard]] double dt(int p) const { return dts_.at(static_cast<std::size_t>(p)); }

  /// Start offset of subinterval p within the period: alpha_{p-1} * Ts.
  [[nodiscard]] double offset(int p) const {
    return p == 0 ? 0.0 : alphas_.at(static_cast<std::size_t>(p) - 1) * Ts_;
  }

  [[nodiscard]] const std::vector<double>& alphas() const { return alphas_; }

 private:
  std::vector<double> alphas_;
  double Ts_;
  std::vector<double> dts_;
};

/// Model spanning one full sampling period.
[[nodiscard]] PredictionModel full_period_model(const PlantParams& params, double Ts);

/// One model per subinterval of the grid, each spanning its own dt.
[[nodiscard]] std::vector<PredictionModel> subinterval_models(const PlantParams& params,
                                                              const SubintervalGrid& grid);

/// Applies the scalar model to all three phases.
[[nodiscard]] inline Vec3 predict_current(const PredictionModel& m, const Vec3& i,
                                          const SwitchingState& u) {
  return Vec3(m.A * i[0] + m.B * static_cast<double>(u.level(0)),
              m.A * i[1] + m.B * static_cast<double>(u.level(1)),
              m.A * i[2] + m.B * static_cast<double>(u.level(2)));
}

/// Forward-Euler update of the capacitor differences driven by the predicted
/// end-of-interval current: vd' = vd + coupling_matrix(u, dt, C) * i_next.
[[nodiscard]] inline CapacitorDifferences predict_vd(const CapacitorDifferences& vd,
                                                     const SwitchingState& u, const Vec3& i_next,
                                                     double dt, double capacitance,
                                                     CouplingTable table) {
  const Vec3 next = vd.vec() + coupling_matrix(u, dt, capacitance, table) * i_next;
  return CapacitorDifferences::from_vec(next);
}

}  // namespace fcsmpc
