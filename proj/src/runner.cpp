#include "fcsmpc/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fcsmpc/csv.hpp"
#include "fcsmpc/predictor.hpp"

namespace fcsmpc {

namespace {

using Clock = std::chrono::steady_clock;

double us_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::micro>(b - a).count();
}

StepTimeStats summarize_times(std::vector<double> us) {
  StepTimeStats s;
  s.count = us.size();
  if (us.empty()) return s;
  double acc = 0.0;
  for (double v : us) acc += v;
  s.mean_us = acc / static_cast<double>(us.size());
  std::sort(us.begin(), us.end());
  s.median_us = us[us.size() / 2];
  const std::size_t p99 = std::min(us.size() - 1, static_cast<std::size_t>(
                                                      std::ceil(0.99 * static_cast<double>(us.size())) - 1));
  s.p99_us = us[p99];
  return s;
}

int highest_resolvable_order(double sample_rate, double fundamental_hz) {
  int ord = static_cast<int>(std::floor(sample_rate / (2.0 * fundamental_hz)));
  while (ord > 1 && !(sample_rate > 2.0 * static_cast<double>(ord) * fundamental_hz)) --ord;
  return ord;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g9(double v) { return fmt("%.9g", v); }

std::string controller_label(const Scenario& sc) {
  if (!sc.multirate()) return "standard";
  return "multirate(" + std::to_string(sc.alphas->size()) + ")";
}

}  // namespace

RunMetrics metrics_from_log(const RunLog& log, double fundamental_hz, int max_order, double band,
                            int warmup_periods) {
  log.check_consistent();
  if (!(fundamental_hz > 0.0)) throw std::invalid_argument("metrics: fundamental must be > 0");
  if (warmup_periods < 0) throw std::invalid_argument("metrics: warmup must be >= 0");

  const long n = static_cast<long>(log.size());
  const double spp_exact = log.sample_rate / fundamental_hz;
  const long spp = std::lround(spp_exact);
  if (spp < 2 || std::abs(spp_exact - static_cast<double>(spp)) > 1e-3)
    throw std::invalid_argument("metrics: log rate is not a whole number of samples per period");

  RunMetrics m;
  m.analysis_begin = static_cast<long>(warmup_periods) * spp;
  if (n - m.analysis_begin < spp)
    throw std::invalid_argument("metrics: no full fundamental period after the warm-up");
  m.analysis_periods = static_cast<int>((n - m.analysis_begin) / spp);
  m.analysis_end = m.analysis_begin + static_cast<long>(m.analysis_periods) * spp;

  m.max_order_used = std::min(max_order, highest_resolvable_order(log.sample_rate, fundamental_hz));
  if (m.max_order_used < 1) throw std::invalid_argument("metrics: log rate too low for harmonics");

  const auto begin = static_cast<std::size_t>(m.analysis_begin);
  const auto end = static_cast<std::size_t>(m.analysis_end);

  bool all_thd = true;
  double thd_acc = 0.0;
  for (int k = 0; k < 3; ++k) {
    const SpectrumReport rep =
        harmonic_spectrum(log, k, fundamental_hz, m.max_order_used, begin, end);
    m.thd[static_cast<std::size_t>(k)] = rep.thd;
    if (rep.thd)
      thd_acc += *rep.thd;
    else
      all_thd = false;
  }
  if (all_thd) m.thd_mean = thd_acc / 3.0;

  m.window_s = static_cast<double>(spp) / log.sample_rate;
  const CommutationStats cs = commutation_count(log, m.window_s, begin, end);
  // per-window stats sum all three legs; the headline figure is per phase
  m.commutations_per_window = cs.mean_per_window / 3.0;
  m.commutations_total = cs.total;

  m.tracking_rms_A = tracking_rms(log, begin, end);
  m.balance = balance_stats(log, band, 0, static_cast<std::size_t>(n));
  return m;
}

RunResult run_closed_loop(const Scenario& sc) {
  sc.validate();
  const PlantParams& pp = sc.plant;
  const long steps = sc.steps();

  std::optional<SubintervalGrid> grid;
  std::vector<PredictionModel> models;
  if (sc.multirate()) {
    grid.emplace(*sc.alphas, sc.Ts);
    models = subinterval_models(pp, *grid);
  } else {
    models = {full_period_model(pp, sc.Ts)};
  }
  const double controller_C = sc.effective_controller_C();

  RunResult out;
  out.scenario = sc;
  RunLog& log = out.log;
  log.sample_rate = sc.log_rate;
  log.t0 = 0.0;
  log.reserve(static_cast<std::size_t>(sc.duration * sc.log_rate) + 2);

  PlantState state;
  state.t = 0.0;
  state.i = sc.initial_i;
  state.v_d = sc.initial_vd;
  SwitchingState u_applied(0, 0, 0);

  std::vector<double> step_us;
  step_us.reserve(static_cast<std::size_t>(steps));
  long nonphysical = 0;
  std::uint64_t candidates = 0;

  const auto wall0 = Clock::now();
  for (long k = 0; k < steps; ++k) {
    ControllerInputs in;
    in.i_m = state.i;
    in.v_dm = state.v_d;
    in.u_m = u_applied;
    in.i_ref = sc.reference.at(state.t);
    if (grid && sc.per_subinterval_reference) {
      in.i_ref_sub.resize(static_cast<std::size_t>(grid->count()));
      for (int p = 0; p < grid->count(); ++p)
        in.i_ref_sub[static_cast<std::size_t>(p)] = sc.reference.at(state.t + grid->offset(p));
    }

    const auto t0 = Clock::now();
    const ControlDecision decision =
        grid ? multirate_mpc_step(in, models, *grid, sc.weights, controller_C, sc.cost_options)
             : standard_mpc_step(in, models.front(), sc.weights, controller_C, sc.cost_options);
    step_us.push_back(us_between(t0, Clock::now()));
    candidates = decision.candidates_evaluated;

    for (std::size_t p = 0; p < decision.actions.size(); ++p) {
      if (pp.capacitor_coupling &&
          !CapacitorVoltages::from_differences(pp.V_dc, state.v_d).physical())
        ++nonphysical;
      const double dt = grid ? grid->dt(static_cast<int>(p)) : sc.Ts;
      state = hold_input_logged(state, pp, decision.actions[p].u, dt, log);
      if (!state.finite())
        throw std::runtime_error("run '" + sc.name + "' aborted: non-finite state at t = " +
                                 g9(state.t) + " s");
      u_applied = decision.actions[p].u;
    }
  }
  const double wall = std::chrono::duration<double>(Clock::now() - wall0).count();

  log.set_reference([&](double t) { return sc.reference.at(t); });
  log.check_consistent();

  out.final_state = state;
  out.metrics = metrics_from_log(log, sc.reference.frequency, sc.max_order, sc.band,
                                 sc.warmup_periods);
  out.metrics.candidates_per_step = candidates;
  out.metrics.nonphysical_cap_samples = nonphysical;
  out.metrics.step_time = summarize_times(std::move(step_us));
  out.metrics.wall_seconds = wall;
  return out;
}

std::string format_metrics_text(const RunMetrics& m, double fundamental_hz) {
  std::ostringstream os;
  os << "analysis window       samples " << m.analysis_begin << ".." << m.analysis_end << " ("
     << m.analysis_periods << " periods of " << g9(fundamental_hz) << " Hz)\n";
  auto pct = [](const std::optional<double>& v) {
    return v ? fmt("%.4g%%", *v * 100.0) : std::string("n/a");
  };
  os << "THD a/b/c             " << pct(m.thd[0]) << " / " << pct(m.thd[1]) << " / "
     << pct(m.thd[2]) << "  (mean " << pct(m.thd_mean) << ", orders 2.." << m.max_order_used
     << ")\n";
  os << "commutations          " << fmt("%.6g", m.commutations_per_window) << " per phase per "
     << g9(m.window_s) << " s window (total " << m.commutations_total << ")\n";
  os << "tracking RMS          " << fmt("%.6g", m.tracking_rms_A) << " A\n";
  os << "|vd| max              (" << fmt("%.6g", m.balance.max_abs[0]) << ", "
     << fmt("%.6g", m.balance.max_abs[1]) << ", " << fmt("%.6g", m.balance.max_abs[2]) << ") V\n";
  os << "|vd| terminal         (" << fmt("%.6g", m.balance.terminal_abs[0]) << ", "
     << fmt("%.6g", m.balance.terminal_abs[1]) << ", " << fmt("%.6g", m.balance.terminal_abs[2])
     << ") V\n";
  os << "time to +/-" << fmt("%.3g", m.balance.band) << " V band  "
     << (m.balance.time_to_band ? g9(*m.balance.time_to_band) + " s" : std::string("never"))
     << "\n";
  if (m.nonphysical_cap_samples > 0)
    os << "WARNING               " << m.nonphysical_cap_samples
       << " holds started from a non-physical capacitor state\n";
  return os.str();
}

std::string format_run_text(const RunResult& r) {
  std::ostringstream os;
  const Scenario& sc = r.scenario;
  os << "scenario              " << sc.name << "\n";
  os << "controller            " << controller_label(sc) << "\n";
  os << "steps                 " << sc.steps() << " x Ts = " << g9(sc.Ts) << " s (duration "
     << g9(sc.duration) << " s)\n";
  os << format_metrics_text(r.metrics, sc.reference.frequency);
  os << "candidates per step   " << r.metrics.candidates_per_step << "\n";
  os << "step time             mean " << fmt("%.4g", r.metrics.step_time.mean_us)
     << " us | median " << fmt("%.4g", r.metrics.step_time.median_us) << " us | p99 "
     << fmt("%.4g", r.metrics.step_time.p99_us) << " us\n";
  os << "wall clock            " << fmt("%.4g", r.metrics.wall_seconds) << " s\n";
  return os.str();
}

ComparisonReport compare(const std::vector<Scenario>& scenarios, const std::string& log_dir) {
  ComparisonReport rep;
  rep.rows.reserve(scenarios.size());
  for (const Scenario& sc : scenarios) {
    ComparisonRow row;
    row.name = sc.name;
    row.controller = controller_label(sc);
    row.Ts = sc.Ts;
    row.duration = sc.duration;
    try {
      const RunResult r = run_closed_loop(sc);
      row.metrics = r.metrics;
      row.steps = sc.steps();
      if (!log_dir.empty())
        write_runlog_csv(r.log, log_dir + "/" + sc.name + "_runlog.csv");
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string format_comparison_text(const ComparisonReport& rep) {
  std::ostringstream os;
  os << "name                         controller      thd_mean  commut/ph/win  track_rms_A  "
        "|vd|max_V   time_to_band_s\n";
  for (const auto& r : rep.rows) {
    char line[256];
    if (r.failed) {
      std::snprintf(line, sizeof line, "%-28s %-15s FAILED: %s", r.name.c_str(),
                    r.controller.c_str(), r.error.c_str());
      os << line << "\n";
      continue;
    }
    const double vdmax =
        std::max({r.metrics.balance.max_abs[0], r.metrics.balance.max_abs[1],
                  r.metrics.balance.max_abs[2]});
    std::snprintf(line, sizeof line, "%-28s %-15s %-9s %-14.6g %-12.6g %-11.6g %s",
                  r.name.c_str(), r.controller.c_str(),
                  r.metrics.thd_mean ? fmt("%.4g%%", *r.metrics.thd_mean * 100.0).c_str() : "n/a",
                  r.metrics.commutations_per_window, r.metrics.tracking_rms_A, vdmax,
                  r.metrics.balance.time_to_band ? g9(*r.metrics.balance.time_to_band).c_str()
                                                 : "never");
    os << line << "\n";
  }
  return os.str();
}

std::string comparison_csv_header() {
  return "name,controller,status,steps,Ts_s,duration_s,analysis_periods,max_order,"
         "thd_a_pct,thd_b_pct,thd_c_pct,thd_mean_pct,commutations_per_window,"
         "commutations_total,window_s,tracking_rms_A,vd1_max_V,vd2_max_V,vd3_max_V,"
         "vd1_terminal_V,vd2_terminal_V,vd3_terminal_V,time_to_band_s,band_V,"
         "candidates_per_step,nonphysical_cap_samples,step_mean_us,step_median_us,"
         "step_p99_us,error";
}

std::string format_comparison_csv(const ComparisonReport& rep) {
  std::ostringstream os;
  os << comparison_csv_header() << "\n";
  auto opt_pct = [](const std::optional<double>& v) {
    return v ? g9(*v * 100.0) : std::string();
  };
  for (const auto& r : rep.rows) {
    os << r.name << ',' << r.controller << ',' << (r.failed ? "failed" : "ok") << ',';
    if (r.failed) {
      // keep the column count: 26 empty metric fields, then the message
      for (int k = 0; k < 26; ++k) os << ',';
      std::string msg = r.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      os << msg << "\n";
      continue;
    }
    const RunMetrics& m = r.metrics;
    os << r.steps << ',' << g9(r.Ts) << ',' << g9(r.duration) << ',' << m.analysis_periods << ','
       << m.max_order_used << ',' << opt_pct(m.thd[0]) << ',' << opt_pct(m.thd[1]) << ','
       << opt_pct(m.thd[2]) << ',' << opt_pct(m.thd_mean) << ',' << g9(m.commutations_per_window)
       << ',' << m.commutations_total << ',' << g9(m.window_s) << ',' << g9(m.tracking_rms_A)
       << ',' << g9(m.balance.max_abs[0]) << ',' << g9(m.balance.max_abs[1]) << ','
       << g9(m.balance.max_abs[2]) << ',' << g9(m.balance.terminal_abs[0]) << ','
       << g9(m.balance.terminal_abs[1]) << ',' << g9(m.balance.terminal_abs[2]) << ','
       << (m.balance.time_to_band ? g9(*m.balance.time_to_band) : std::string()) << ','
       << g9(m.balance.band) << ',' << m.candidates_per_step << ',' << m.nonphysical_cap_samples
       << ',' << g9(m.step_time.mean_us) << ',' << g9(m.step_time.median_us) << ','
       << g9(m.step_time.p99_us) << ",\n";
  }
  return os.str();
}

namespace {

struct RandomInputs {
  std::vector<ControllerInputs> inputs;
};

RandomInputs make_random_inputs(int iters, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> di(-15.0, 15.0);
  std::uniform_real_distribution<double> dv(-20.0, 20.0);
  std::uniform_real_distribution<double> dr(-12.0, 12.0);
  std::uniform_int_distribution<int> du(0, kSwitchingStateCount - 1);
  RandomInputs out;
  out.inputs.reserve(static_cast<std::size_t>(iters));
  for (int k = 0; k < iters; ++k) {
    ControllerInputs in;
    in.i_m = Vec3(di(rng), di(rng), di(rng));
    in.v_dm = {dv(rng), dv(rng), dv(rng)};
    in.u_m = SwitchingState::from_index(du(rng));
    in.i_ref = Vec3(dr(rng), dr(rng), dr(rng));
    out.inputs.push_back(std::move(in));
  }
  return out;
}

template <class StepFn>
BenchRow time_engine(const std::string& label, int subintervals,
                     const std::vector<ControllerInputs>& inputs, StepFn&& step) {
  BenchRow row;
  row.engine = label;
  row.subintervals = subintervals;
  std::vector<double> us;
  us.reserve(inputs.size());
  double total_us = 0.0;
  std::uint64_t total_candidates = 0;
  for (const auto& in : inputs) {
    const auto t0 = Clock::now();
    const ControlDecision d = step(in);
    const double dt = us_between(t0, Clock::now());
    us.push_back(dt);
    total_us += dt;
    total_candidates += d.candidates_evaluated;
    row.candidates_per_step = d.candidates_evaluated;
  }
  row.time = summarize_times(std::move(us));
  if (total_us > 0.0)
    row.candidates_per_second = static_cast<double>(total_candidates) / (total_us * 1e-6);
  return row;
}

std::vector<double> uniform_alphas(int n) {
  std::vector<double> a(static_cast<std::size_t>(n));
  for (int p = 1; p <= n; ++p)
    a[static_cast<std::size_t>(p - 1)] = static_cast<double>(p) / static_cast<double>(n);
  a.back() = 1.0;
  return a;
}

}  // namespace

BenchReport bench_enumeration(const Scenario& sc, int iters, std::uint64_t seed) {
  if (iters < 1) throw std::invalid_argument("bench: iters must be >= 1");
  sc.validate();
  const PlantParams& pp = sc.plant;
  const double controller_C = sc.effective_controller_C();
  const RandomInputs rnd = make_random_inputs(iters, seed);

  BenchReport rep;

  const PredictionModel full = full_period_model(pp, sc.Ts);
  rep.rows.push_back(time_engine("standard", 1, rnd.inputs, [&](const ControllerInputs& in) {
    return standard_mpc_step(in, full, sc.weights, controller_C, sc.cost_options);
  }));

  const std::vector<double> grid_alphas =
      sc.alphas ? *sc.alphas : uniform_alphas(3);
  const SubintervalGrid grid(grid_alphas, sc.Ts);
  const auto models = subinterval_models(pp, grid);
  rep.rows.push_back(time_engine("multirate(" + std::to_string(grid.count()) + ")", grid.count(),
                                 rnd.inputs, [&](const ControllerInputs& in) {
                                   return multirate_mpc_step(in, models, grid, sc.weights,
                                                             controller_C, sc.cost_options);
                                 }));

  if (grid.count() <= 3) {
    const int ex_iters = std::min<int>(iters, grid.count() == 3 ? 10 : 40);
    const std::vector<ControllerInputs> ex_inputs(rnd.inputs.begin(),
                                                  rnd.inputs.begin() + ex_iters);
    rep.rows.push_back(time_engine("exhaustive(" + std::to_string(grid.count()) + ",serial)",
                                   grid.count(), ex_inputs, [&](const ControllerInputs& in) {
                                     return exhaustive_multirate_step(in, models, grid, sc.weights,
                                                                      controller_C,
                                                                      sc.cost_options, false);
                                   }));
    rep.rows.push_back(time_engine("exhaustive(" + std::to_string(grid.count()) + ",omp)",
                                   grid.count(), ex_inputs, [&](const ControllerInputs& in) {
                                     return exhaustive_multirate_step(in, models, grid, sc.weights,
                                                                      controller_C,
                                                                      sc.cost_options, true);
                                   }));
  }

  // Linear-scaling sweep: uniform grids with 1..8 subintervals.
  rep.sweep_median_us.resize(8, 0.0);
  for (int n = 1; n <= 8; ++n) {
    const SubintervalGrid g(uniform_alphas(n), sc.Ts);
    const auto ms = subinterval_models(pp, g);
    const BenchRow row = time_engine("sweep", n, rnd.inputs, [&](const ControllerInputs& in) {
      return multirate_mpc_step(in, ms, g, sc.weights, controller_C, sc.cost_options);
    });
    rep.sweep_median_us[static_cast<std::size_t>(n - 1)] = row.time.median_us;
  }
  {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double per_unit = 0.0;
    for (int n = 1; n <= 8; ++n) {
      const double x = n;
      const double y = rep.sweep_median_us[static_cast<std::size_t>(n - 1)];
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      per_unit += y / x;
    }
    const double denom = 8.0 * sxx - sx * sx;
    rep.sweep_slope_us = (8.0 * sxy - sx * sy) / denom;
    rep.sweep_intercept_us = (sy - rep.sweep_slope_us * sx) / 8.0;
    rep.sweep_per_unit_us = per_unit / 8.0;
    rep.sweep_monotone = true;
    for (int n = 1; n < 8; ++n)
      rep.sweep_monotone = rep.sweep_monotone &&
                           rep.sweep_median_us[static_cast<std::size_t>(n)] >
                               rep.sweep_median_us[static_cast<std::size_t>(n - 1)];
  }
  return rep;
}

std::string format_bench_text(const BenchReport& rep) {
  std::ostringstream os;
  os << "engine                 candidates/step  mean_us    median_us  p99_us     Mcand/s\n";
  for (const auto& r : rep.rows) {
    char line[192];
    std::snprintf(line, sizeof line, "%-22s %-16llu %-10.4g %-10.4g %-10.4g %.4g",
                  r.engine.c_str(), static_cast<unsigned long long>(r.candidates_per_step),
                  r.time.mean_us, r.time.median_us, r.time.p99_us,
                  r.candidates_per_second / 1e6);
    os << line << "\n";
  }
  os << "multirate sweep (median us per step, 1..8 subintervals):";
  for (double v : rep.sweep_median_us) os << " " << fmt("%.4g", v);
  os << "\n";
  os << "sweep fit             slope " << fmt("%.4g", rep.sweep_slope_us) << " us/subinterval, "
     << "intercept " << fmt("%.4g", rep.sweep_intercept_us) << " us, per-unit "
     << fmt("%.4g", rep.sweep_per_unit_us) << " us, "
     << (rep.sweep_monotone ? "monotone" : "NOT monotone") << "\n";
  return os.str();
}

}  // namespace fcsmpc
