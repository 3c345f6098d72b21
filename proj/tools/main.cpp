// Command-line front end: run one scenario, compare several, benchmark the
// candidate-enumeration kernels, or recompute metrics from a saved run log.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fcsmpc/csv.hpp"
#include "fcsmpc/runner.hpp"
#include "fcsmpc/scenario.hpp"

namespace {

int run_one(const std::string& scenario_path, const std::string& log_path) {
  const fcsmpc::Scenario sc = fcsmpc::load_scenario_file(scenario_path);
  const fcsmpc::RunResult r = fcsmpc::run_closed_loop(sc);
  std::cout << fcsmpc::format_run_text(r);
  if (!log_path.empty()) {
    fcsmpc::write_runlog_csv(r.log, log_path);
    std::cout << "run log               " << log_path << " (" << r.log.size() << " samples)\n";
  }
  return 0;
}

int run_compare(const std::vector<std::string>& paths, const std::string& csv_path,
                const std::string& log_dir) {
  std::vector<fcsmpc::Scenario> scenarios;
  scenarios.reserve(paths.size());
  for (const auto& p : paths) scenarios.push_back(fcsmpc::load_scenario_file(p));
  const fcsmpc::ComparisonReport rep = fcsmpc::compare(scenarios, log_dir);
  std::cout << fcsmpc::format_comparison_text(rep);
  if (!csv_path.empty()) {
    std::ofstream os(csv_path);
    if (!os) throw std::runtime_error("cannot open " + csv_path + " for writing");
    os << fcsmpc::format_comparison_csv(rep);
    std::cout << "report written to " << csv_path << "\n";
  }
  for (const auto& row : rep.rows)
    if (row.failed) std::cerr << "scenario " << row.name << " failed: " << row.error << "\n";
  return rep.any_failed() ? 1 : 0;
}

int run_bench(const std::string& scenario_path, int iters, std::uint64_t seed) {
  fcsmpc::Scenario sc;
  if (!scenario_path.empty()) {
    sc = fcsmpc::load_scenario_file(scenario_path);
  } else {
    sc.name = "bench-defaults";
    sc.reference.amplitude = 12.0;
  }
  const fcsmpc::BenchReport rep = fcsmpc::bench_enumeration(sc, iters, seed);
  std::cout << fcsmpc::format_bench_text(rep);
  return 0;
}

int run_metrics(const std::string& csv_path, double fundamental_hz, int max_order, double band,
                int warmup_periods) {
  const fcsmpc::RunLog log = fcsmpc::read_runlog_csv(csv_path);
  const fcsmpc::RunMetrics m =
      fcsmpc::metrics_from_log(log, fundamental_hz, max_order, band, warmup_periods);
  std::cout << fcsmpc::format_metrics_text(m, fundamental_hz);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"five-level diode-clamped inverter: predictive current control sandbox"};
  app.require_subcommand(1);
  int rc = 0;

  auto* run = app.add_subcommand("run", "simulate one scenario and print its metrics");
  std::string run_scenario;
  std::string run_log;
  run->add_option("scenario", run_scenario, "scenario file")->required();
  run->add_option("--log", run_log, "write the sampled run log to this CSV file");
  run->callback([&] { rc = run_one(run_scenario, run_log); });

  auto* cmp = app.add_subcommand("compare", "run several scenarios and tabulate the results");
  std::vector<std::string> cmp_paths;
  std::string cmp_csv;
  std::string cmp_log_dir;
  cmp->add_option("scenarios", cmp_paths, "scenario files")->required()->expected(-1);
  cmp->add_option("--csv", cmp_csv, "also write the table to this CSV file");
  cmp->add_option("--log-dir", cmp_log_dir, "write each run log to <dir>/<name>_runlog.csv");
  cmp->callback([&] { rc = run_compare(cmp_paths, cmp_csv, cmp_log_dir); });

  auto* bench = app.add_subcommand("bench", "time the candidate-enumeration kernels");
  std::string bench_scenario;
  int bench_iters = 200;
  std::uint64_t bench_seed = 1;
  bench->add_option("scenario", bench_scenario, "optional scenario file for plant/grid settings");
  bench->add_option("--iters", bench_iters, "controller calls per engine")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "random input seed");
  bench->callback([&] { rc = run_bench(bench_scenario, bench_iters, bench_seed); });

  auto* met = app.add_subcommand("metrics", "recompute metrics from a saved run log CSV");
  std::string met_csv;
  double met_fund = 50.0;
  int met_order = 1000;
  double met_band = 1.0;
  int met_warmup = 0;
  met->add_option("runlog", met_csv, "run log CSV written by run/compare")->required();
  met->add_option("--fundamental-hz", met_fund, "fundamental frequency of the reference");
  met->add_option("--max-order", met_order, "highest harmonic order");
  met->add_option("--band", met_band, "balance band, V");
  met->add_option("--warmup-periods", met_warmup, "periods to drop before steady-state metrics");
  met->callback([&] { rc = run_metrics(met_csv, met_fund, met_order, met_band, met_warmup); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
