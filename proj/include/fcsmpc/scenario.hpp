#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fcsmpc/controller.hpp"
#include "fcsmpc/plant.hpp"

namespace fcsmpc {

/// Three-phase sinusoidal current reference.
struct ReferenceSpec {
  double amplitude = 0.0;      ///< peak amplitude, A
  double frequency = 50.0;     ///< fundamental, Hz
  std::array<double, 3> phase_rad{0.0, -2.0943951023931953, -4.1887902047863905};

  [[nodiscard]] Vec3 at(double t) const {
    Vec3 r;
    for (int k = 0; k < 3; ++k)
      r[k] = amplitude * std::sin(6.283185307179586476925286766559 * frequency * t +
                                  phase_rad[static_cast<std::size_t>(k)]);
    return r;
  }
};

/// One closed-loop experiment: plant, controller, reference, run window and
/// metric settings. Parsed from a flat key-value file; unknown or duplicate
/// keys are hard errors so misspelled settings cannot silently fall back to
/// defaults.
struct Scenario {
  std::string name = "scenario";

  PlantParams plant{};

  double Ts = 20e-6;                        ///< controller sampling period, s
  std::optional<std::vector<double>> alphas;  ///< subinterval splits; absent = single-rate
  CostWeights weights{};
  std::optional<double> controller_C;       ///< defaults to plant.C
  CostOptions cost_options{};
  bool per_subinterval_reference = false;

  ReferenceSpec reference{};

  double duration = 0.1;       ///< simulated time, s
  int warmup_periods = 2;      ///< fundamental periods excluded from steady-state metrics
  double log_rate = 1e6;       ///< log samples per second
  Vec3 initial_i = Vec3::Zero();
  CapacitorDifferences initial_vd{};

  int max_order = 1000;        ///< highest harmonic order for distortion metrics
  double band = 1.0;           ///< balance band, V

  [[nodiscard]] bool multirate() const { return alphas.has_value(); }
  [[nodiscard]] double effective_controller_C() const {
    return controller_C.value_or(plant.C);
  }

  /// Controller decision instants in the run.
  [[nodiscard]] long steps() const { return std::lround(duration / Ts); }
  [[nodiscard]] long samples_per_period() const {
    return std::lround(log_rate / reference.frequency);
  }
  [[nodiscard]] long periods() const { return std::lround(duration * reference.frequency); }

  void validate() const;
};

/// Parses scenario text. `fallback_name` seeds the name when the file does
/// not set one (callers pass the file stem).
[[nodiscard]] Scenario parse_scenario(const std::string& text, const std::string& fallback_name);

[[nodiscard]] Scenario load_scenario_file(const std::string& path);

}  // namespace fcsmpc
