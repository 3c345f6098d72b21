#include "fcsmpc/runner.hpp"

#include <sstream>
#include <string>

#include "doctest.h"
#include "fcsmpc/csv.hpp"

using namespace fcsmpc;

namespace {

// 3 fundamental periods, 1 analyzed: enough to exercise every code path fast.
const std::string kBase =
    "plant.R = 30\n"
    "plant.L = 5e-3\n"
    "plant.Vdc = 750\n"
    "controller.Ts = 20e-6\n"
    "controller.lambda_I = 100\n"
    "controller.lambda_C = 2e-4\n"
    "reference.amplitude = 12\n"
    "reference.frequency = 50\n"
    "run.duration = 0.06\n";

std::string csv_text(const RunLog& log) {
  std::ostringstream os;
  write_runlog_csv(log, os);
  return os.str();
}

}  // namespace

TEST_CASE("closed loop is deterministic: two runs give byte-identical logs") {
  const Scenario sc = parse_scenario(kBase, "det");
  const RunResult a = run_closed_loop(sc);
  const RunResult b = run_closed_loop(sc);
  CHECK(csv_text(a.log) == csv_text(b.log));
  CHECK(a.metrics.commutations_total == b.metrics.commutations_total);
  REQUIRE(a.metrics.thd_mean.has_value());
  REQUIRE(b.metrics.thd_mean.has_value());
  CHECK(*a.metrics.thd_mean == *b.metrics.thd_mean);
}

TEST_CASE("single full-width subinterval runs byte-identical to the single-rate loop") {
  const Scenario standard = parse_scenario(kBase, "single");
  const Scenario degenerate = parse_scenario(kBase + "controller.alphas = 1.0\n", "single");
  const RunResult a = run_closed_loop(standard);
  const RunResult b = run_closed_loop(degenerate);
  CHECK(csv_text(a.log) == csv_text(b.log));
}

TEST_CASE("multirate loop with three subintervals runs and switches more often") {
  const Scenario sc = parse_scenario(kBase + "controller.alphas = 0.45, 0.75, 1.0\n", "mr");
  const RunResult r = run_closed_loop(sc);
  CHECK(r.metrics.candidates_per_step == 3 * 125);
  CHECK(r.log.size() == 60000);
  const RunResult single = run_closed_loop(parse_scenario(kBase, "sr"));
  CHECK(r.metrics.commutations_total > single.metrics.commutations_total);
  REQUIRE(r.metrics.thd_mean.has_value());
  REQUIRE(single.metrics.thd_mean.has_value());
  CHECK(*r.metrics.thd_mean < *single.metrics.thd_mean);
}

TEST_CASE("per-subinterval reference option is accepted in the loop") {
  const Scenario sc = parse_scenario(kBase +
                                         "controller.alphas = 0.5, 1.0\n"
                                         "controller.per_subinterval_reference = on\n",
                                     "subref");
  const RunResult r = run_closed_loop(sc);
  CHECK(r.metrics.candidates_per_step == 2 * 125);
  CHECK(r.final_state.finite());
}

TEST_CASE("metrics recomputed from the saved CSV match the live run bitwise") {
  const Scenario sc = parse_scenario(kBase + "controller.alphas = 0.45, 0.75, 1.0\n", "replay");
  const RunResult live = run_closed_loop(sc);

  std::istringstream is(csv_text(live.log));
  const RunLog back = read_runlog_csv(is);
  const RunMetrics again =
      metrics_from_log(back, sc.reference.frequency, sc.max_order, sc.band, sc.warmup_periods);

  CHECK(again.analysis_begin == live.metrics.analysis_begin);
  CHECK(again.analysis_end == live.metrics.analysis_end);
  CHECK(again.max_order_used == live.metrics.max_order_used);
  for (int k = 0; k < 3; ++k) {
    REQUIRE(again.thd[static_cast<std::size_t>(k)].has_value());
    CHECK(*again.thd[static_cast<std::size_t>(k)] ==
          *live.metrics.thd[static_cast<std::size_t>(k)]);
  }
  CHECK(again.commutations_total == live.metrics.commutations_total);
  CHECK(again.commutations_per_window == live.metrics.commutations_per_window);
  CHECK(again.tracking_rms_A == live.metrics.tracking_rms_A);
  for (int k = 0; k < 3; ++k) {
    CHECK(again.balance.max_abs[static_cast<std::size_t>(k)] ==
          live.metrics.balance.max_abs[static_cast<std::size_t>(k)]);
  }
  CHECK(again.balance.time_to_band == live.metrics.balance.time_to_band);
}

TEST_CASE("analysis window drops the warm-up and uses the full period count") {
  const Scenario sc = parse_scenario(kBase, "win");
  const RunResult r = run_closed_loop(sc);
  CHECK(r.metrics.analysis_begin == 40000);  // 2 warm-up periods at 20000 samples
  CHECK(r.metrics.analysis_end == 60000);
  CHECK(r.metrics.analysis_periods == 1);
  CHECK(r.metrics.window_s == doctest::Approx(0.02));
  // 1 MHz log and 50 Hz fundamental cap the usable order at 9999; the default
  // request of 1000 fits
  CHECK(r.metrics.max_order_used == 1000);
}

TEST_CASE("comparison collects failures without aborting the batch") {
  Scenario bad = parse_scenario(kBase, "bad");
  bad.warmup_periods = 99;  // validates only at run time
  const std::vector<Scenario> scenarios = {parse_scenario(kBase, "good"), bad};
  const ComparisonReport rep = compare(scenarios);
  REQUIRE(rep.rows.size() == 2);
  CHECK_FALSE(rep.rows[0].failed);
  CHECK(rep.rows[1].failed);
  CHECK(rep.any_failed());
  CHECK(!rep.rows[1].error.empty());

  const std::string text = format_comparison_text(rep);
  CHECK(text.find("good") != std::string::npos);
  CHECK(text.find("FAILED") != std::string::npos);

  const std::string csv = format_comparison_csv(rep);
  CHECK(csv.rfind("name,controller,status", 0) == 0);
  CHECK(csv.find("\ngood,standard,ok,") != std::string::npos);
  CHECK(csv.find("\nbad,standard,failed,") != std::string::npos);
}

TEST_CASE("run report text names the scenario and the key metrics") {
  const Scenario sc = parse_scenario(kBase, "report");
  const RunResult r = run_closed_loop(sc);
  const std::string text = format_run_text(r);
  CHECK(text.find("report") != std::string::npos);
  CHECK(text.find("standard") != std::string::npos);
  CHECK(text.find("THD") != std::string::npos);
  CHECK(text.find("commutations") != std::string::npos);
  CHECK(text.find("candidates per step") != std::string::npos);
}

TEST_CASE("benchmark reports every engine and the scaling sweep") {
  const Scenario sc = parse_scenario(kBase + "controller.alphas = 0.5, 1.0\n", "bench");
  const BenchReport rep = bench_enumeration(sc, 3, 7);
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.rows[0].engine == "standard");
  CHECK(rep.rows[0].candidates_per_step == 125);
  CHECK(rep.rows[1].engine == "multirate(2)");
  CHECK(rep.rows[1].candidates_per_step == 250);
  CHECK(rep.rows[2].engine == "exhaustive(2,serial)");
  CHECK(rep.rows[2].candidates_per_step == 125 * 125);
  CHECK(rep.rows[3].engine == "exhaustive(2,omp)");
  REQUIRE(rep.sweep_median_us.size() == 8);
  for (double v : rep.sweep_median_us) CHECK(v > 0.0);
  CHECK(rep.sweep_per_unit_us > 0.0);
  const std::string text = format_bench_text(rep);
  CHECK(text.find("exhaustive(2,omp)") != std::string::npos);
  CHECK(text.find("sweep") != std::string::npos);
}
