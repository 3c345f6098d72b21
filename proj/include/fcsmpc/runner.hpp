#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fcsmpc/metrics.hpp"
#include "fcsmpc/scenario.hpp"

namespace fcsmpc {

struct StepTimeStats {
  double mean_us = 0.0;
  double median_us = 0.0;
  double p99_us = 0.0;
  std::uint64_t count = 0;
};

/// Everything derived from one closed-loop run. All fields except the
/// wall-clock ones are functions of the (quantized) log alone, so a report
/// regenerated from the saved CSV matches bit for bit.
struct RunMetrics {
  long analysis_begin = 0;  ///< first sample of the steady-state window
  long analysis_end = 0;    ///< one past the last sample
  int analysis_periods = 0;
  int max_order_used = 0;

  std::array<std::optional<double>, 3> thd;  ///< per phase, ratio (not percent)
  std::optional<double> thd_mean;

  double window_s = 0.0;                  ///< commutation window (one fundamental period)
  double commutations_per_window = 0.0;   ///< mean per phase per window
  long commutations_total = 0;            ///< all phases, whole analysis range

  double tracking_rms_A = 0.0;
  BalanceStats balance{};

  std::uint64_t candidates_per_step = 0;
  long nonphysical_cap_samples = 0;

  // wall-clock fields, excluded from determinism guarantees
  StepTimeStats step_time{};
  double wall_seconds = 0.0;
};

struct RunResult {
  Scenario scenario;
  RunLog log;
  RunMetrics metrics;
  PlantState final_state{};
};

/// Runs the scenario's closed loop: measure, decide, apply the decided holds,
/// log continuously, then compute metrics over the post-warm-up window.
/// Aborts with std::runtime_error (mentioning the simulated time) if the
/// state leaves the finite range.
[[nodiscard]] RunResult run_closed_loop(const Scenario& sc);

/// Metrics block recomputed from a log alone (the `metrics` subcommand and
/// report regeneration path). `warmup_periods` samples are skipped from the
/// spectrum/commutation/tracking window exactly like in run_closed_loop.
[[nodiscard]] RunMetrics metrics_from_log(const RunLog& log, double fundamental_hz, int max_order,
                                          double band, int warmup_periods);

struct ComparisonRow {
  std::string name;
  std::string controller;  ///< "standard" or "multirate(n)"
  bool failed = false;
  std::string error;
  RunMetrics metrics{};
  long steps = 0;
  double Ts = 0.0;
  double duration = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  [[nodiscard]] bool any_failed() const {
    for (const auto& r : rows)
      if (r.failed) return true;
    return false;
  }
};

/// Runs every scenario, collecting per-scenario failures instead of aborting
/// the batch. Optionally writes each run's log next to `log_dir`.
[[nodiscard]] ComparisonReport compare(const std::vector<Scenario>& scenarios,
                                       const std::string& log_dir = "");

[[nodiscard]] std::string format_run_text(const RunResult& r);
[[nodiscard]] std::string format_metrics_text(const RunMetrics& m, double fundamental_hz);
[[nodiscard]] std::string format_comparison_text(const ComparisonReport& rep);
[[nodiscard]] std::string comparison_csv_header();
[[nodiscard]] std::string format_comparison_csv(const ComparisonReport& rep);

/// One timed engine in a benchmark run.
struct BenchRow {
  std::string engine;      ///< e.g. "standard", "multirate(3)", "exhaustive(2,omp)"
  int subintervals = 1;
  std::uint64_t candidates_per_step = 0;
  StepTimeStats time{};
  double candidates_per_second = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  /// Median multirate step time for subinterval counts 1..8 (uniform grids),
  /// plus the least-squares fit used to judge linear scaling.
  std::vector<double> sweep_median_us;
  double sweep_slope_us = 0.0;       ///< fitted time per extra subinterval
  double sweep_intercept_us = 0.0;
  double sweep_per_unit_us = 0.0;    ///< mean of median/n, the ideal linear slope
  bool sweep_monotone = false;
};

/// Times the decision engines on `iters` randomized controller inputs drawn
/// from `seed`. Random states exercise the cost paths without a plant in the
/// loop. The exhaustive engine is included only for grids of at most 3
/// subintervals, in both serial and OpenMP variants.
[[nodiscard]] BenchReport bench_enumeration(const Scenario& sc, int iters, std::uint64_t seed);

[[nodiscard]] std::string format_bench_text(const BenchReport& rep);

}  // namespace fcsmpc
