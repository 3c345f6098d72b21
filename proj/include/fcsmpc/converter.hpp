#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fcsmpc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr int kMinLevel = -2;
inline constexpr int kMaxLevel = 2;
inline constexpr int kLevelCount = 5;
inline constexpr int kSwitchingStateCount = 125;  // 5^3

/// Output level of one phase leg of the five-level bridge, in {-2..2}.
class PhaseLevel {
 public:
  constexpr PhaseLevel() = default;
  constexpr explicit PhaseLevel(int value) : value_(static_cast<std::int8_t>(value)) {
    if (value < kMinLevel || value > kMaxLevel)
      throw std::invalid_argument("phase level must be in {-2..2}, got " + std::to_string(value));
  }
  [[nodiscard]] constexpr int value() const { return value_; }
  constexpr bool operator==(const PhaseLevel&) const = default;

 private:
  std::int8_t value_ = 0;
};

/// One switching state of the three-phase bridge: a level per phase.
///
/// States carry a canonical index in 0..124 given by lexicographic order over
/// (phase a, phase b, phase c), i.e. index 0 is (-2,-2,-2), index 124 is
/// (2,2,2) and phase c varies fastest. Every enumeration in this library
/// walks states in that order, and argmin ties are broken toward the lower
/// index, so results are reproducible bit for bit.
class SwitchingState {
 public:
  constexpr SwitchingState() = default;
  constexpr SwitchingState(PhaseLevel a, PhaseLevel b, PhaseLevel c) : levels_{a, b, c} {}
  constexpr SwitchingState(int a, int b, int c)
      : levels_{PhaseLevel(a), PhaseLevel(b), PhaseLevel(c)} {}

  [[nodiscard]] static constexpr SwitchingState from_index(int index) {
    if (index < 0 || index >= kSwitchingStateCount)
      throw std::invalid_argument("switching state index must be in 0..124");
    const int a = index / 25;
    const int b = (index / 5) % 5;
    const int c = index % 5;
    return SwitchingState(a + kMinLevel, b + kMinLevel, c + kMinLevel);
  }

  [[nodiscard]] constexpr int index() const {
    return (levels_[0].value() - kMinLevel) * 25 + (levels_[1].value() - kMinLevel) * 5 +
           (levels_[2].value() - kMinLevel);
  }

  [[nodiscard]] constexpr PhaseLevel phase(int i) const { return levels_.at(static_cast<size_t>(i)); }
  [[nodiscard]] constexpr int level(int i) const { return levels_.at(static_cast<size_t>(i)).value(); }

  /// Total switching effort to reach `to`: sum over phases of |level change|.
  [[nodiscard]] constexpr int distance(const SwitchingState& to) const {
    int d = 0;
    for (int i = 0; i < 3; ++i) {
      const int delta = levels_[static_cast<size_t>(i)].value() - to.levels_[static_cast<size_t>(i)].value();
      d += delta < 0 ? -delta : delta;
    }
    return d;
  }

  constexpr bool operator==(const SwitchingState&) const = default;

 private:
  std::array<PhaseLevel, 3> levels_{};
};

/// Pairwise differences of the four DC-link capacitor voltages:
///   vd1 = vc1 - vc4,  vd2 = vc2 - vc3,  vd3 = vc3 - vc4.
/// All three are zero when the link is perfectly balanced.
struct CapacitorDifferences {
  double vd1 = 0.0;
  double vd2 = 0.0;
  double vd3 = 0.0;

  [[nodiscard]] Vec3 vec() const { return Vec3(vd1, vd2, vd3); }
  [[nodiscard]] static CapacitorDifferences from_vec(const Vec3& v) { return {v[0], v[1], v[2]}; }
  bool operator==(const CapacitorDifferences&) const = default;
};

/// The four series DC-link capacitor voltages, numbered from the positive
/// rail down. Their sum is the total link voltage.
struct CapacitorVoltages {
  double vc1 = 0.0;
  double vc2 = 0.0;
  double vc3 = 0.0;
  double vc4 = 0.0;

  /// Reconstructs the unique voltage set with total `v_dc` realizing the
  /// given pairwise differences. Inverse of `differences()`.
  [[nodiscard]] static CapacitorVoltages from_differences(double v_dc, const CapacitorDifferences& d) {
    CapacitorVoltages v;
    v.vc4 = (v_dc - d.vd1 - d.vd2 - 2.0 * d.vd3) / 4.0;
    v.vc3 = v.vc4 + d.vd3;
    v.vc2 = v.vc3 + d.vd2;
    v.vc1 = v.vc4 + d.vd1;
    return v;
  }

  [[nodiscard]] static CapacitorVoltages balanced(double v_dc) {
    const double q = v_dc / 4.0;
    return {q, q, q, q};
  }

  [[nodiscard]] double total() const { return vc1 + vc2 + vc3 + vc4; }

  [[nodiscard]] CapacitorDifferences differences() const {
    return {vc1 - vc4, vc2 - vc3, vc3 - vc4};
  }

  /// True when every capacitor holds a positive voltage. A false result is a
  /// sign the simulated operating point has left the physically meaningful
  /// region; callers report it as a warning rather than a hard error.
  [[nodiscard]] bool physical() const {
    return vc1 > 0.0 && vc2 > 0.0 && vc3 > 0.0 && vc4 > 0.0;
  }
};

/// Pole voltage of one phase against the link midpoint for a given level.
///
///   level  2 ->  vc1 + vc2
///   level  1 ->  vc2
///   level  0 ->  0
///   level -1 -> -vc3
///   level -2 -> -(vc3 + vc4)
[[nodiscard]] inline double phase_voltage(PhaseLevel level, const CapacitorVoltages& caps) {
  switch (level.value()) {
    case 2: return caps.vc1 + caps.vc2;
    case 1: return caps.vc2;
    case 0: return 0.0;
    case -1: return -caps.vc3;
    default: return -(caps.vc3 + caps.vc4);
  }
}

/// Selects which variant of the level-to-difference charge map is used.
///
/// The two published variants of this map disagree on which of levels -1/+1
/// drives vd3: `kEquations` follows the per-capacitor charge-balance
/// equations, `kPrintedTable` follows the tabulated map (equivalent to the
/// tap KCL redone from the voltage map). They are mirror images in that one
/// assigns the vd3 transfer to level +1 and the other to level -1; vd1/vd2
/// rows are identical.
enum class CouplingTable {
  kEquations,
  kPrintedTable,
};

/// Per-ampere influence of one phase held at `level` on (vd1, vd2, vd3),
/// before scaling by dt/C. Columns for levels +2/-2 coincide, so a state and
/// its negation drive vd1/vd2 identically.
[[nodiscard]] inline Vec3 balancing_column(PhaseLevel level, CouplingTable table) {
  const bool eq = table == CouplingTable::kEquations;
  switch (level.value()) {
    case -2: return Vec3(-1.0, -1.0, 0.0);
    case -1: return eq ? Vec3(0.0, -1.0, 0.0) : Vec3(0.0, -1.0, 1.0);
    case 0: return Vec3(0.0, 0.0, 0.0);
    case 1: return eq ? Vec3(0.0, -1.0, 1.0) : Vec3(0.0, -1.0, 0.0);
    default: return Vec3(-1.0, -1.0, 0.0);
  }
}

/// Charge-transfer matrix of a full switching state: column i is the
/// balancing column of phase i scaled by dt/C, so that
/// vd(k+1) = vd(k) + coupling_matrix(u, dt, C) * i(k+1).
[[nodiscard]] inline Mat3 coupling_matrix(const SwitchingState& u, double dt, double capacitance,
                                          CouplingTable table) {
  if (!(dt > 0.0)) throw std::invalid_argument("coupling_matrix: dt must be > 0");
  if (!(capacitance > 0.0)) throw std::invalid_argument("coupling_matrix: C must be > 0");
  const double s = dt / capacitance;
  Mat3 m;
  for (int i = 0; i < 3; ++i) m.col(i) = s * balancing_column(u.phase(i), table);
  return m;
}

}  // namespace fcsmpc
