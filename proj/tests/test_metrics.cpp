#include "fcsmpc/metrics.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#ifdef _OPENMP
#include <omp.h>
#endif

using namespace fcsmpc;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

std::vector<double> sampled(double rate, std::size_t n, auto&& f) {
  std::vector<double> x(n);
  for (std::size_t m = 0; m < n; ++m) x[m] = f(static_cast<double>(m) / rate);
  return x;
}

/// Builds a log by hand; only the columns a test reads need real values.
RunLog toy_log(double rate, std::size_t n) {
  RunLog log;
  log.sample_rate = rate;
  for (std::size_t m = 0; m < n; ++m)
    log.push_sample(static_cast<double>(m) / rate, {0.0, 0.0, 0.0}, {0, 0, 0}, {0.0, 0.0, 0.0});
  return log;
}

}  // namespace

TEST_CASE("two-tone record recovers both amplitudes and their ratio") {
  const double rate = 1e6;
  const double f = 50.0;
  const double a1 = 12.0;
  const double a5 = 0.9;
  const auto x = sampled(rate, 40000, [&](double t) {
    return a1 * std::sin(kTau * f * t + 0.3) + a5 * std::sin(kTau * 5.0 * f * t - 1.1);
  });
  const SpectrumReport rep = harmonic_spectrum(x, rate, f, 25);
  CHECK(rep.periods == 2);
  CHECK(rep.samples == 40000);
  CHECK(std::abs(rep.amplitude[1] - a1) < 1e-9);
  CHECK(std::abs(rep.amplitude[5] - a5) < 1e-9);
  for (int h : {2, 3, 4, 6, 7, 11, 25}) CHECK(rep.amplitude[static_cast<std::size_t>(h)] < 1e-9);
  REQUIRE(rep.thd.has_value());
  CHECK(std::abs(*rep.thd - a5 / a1) < 1e-9);
}

TEST_CASE("synthesized harmonic stack satisfies Parseval and exact recovery") {
  const double rate = 2000.0;
  const double f = 50.0;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> damp(0.1, 3.0);
  std::uniform_real_distribution<double> dph(0.0, kTau);
  std::vector<double> amp(11, 0.0);
  std::vector<double> ph(11, 0.0);
  for (int h = 1; h <= 10; ++h) {
    amp[static_cast<std::size_t>(h)] = damp(rng);
    ph[static_cast<std::size_t>(h)] = dph(rng);
  }
  const double dc = 0.37;
  const auto x = sampled(rate, 120, [&](double t) {  // 3 periods
    double v = dc;
    for (int h = 1; h <= 10; ++h)
      v += amp[static_cast<std::size_t>(h)] *
           std::sin(kTau * static_cast<double>(h) * f * t + ph[static_cast<std::size_t>(h)]);
    return v;
  });
  const SpectrumReport rep = harmonic_spectrum(x, rate, f, 15);
  CHECK(rep.amplitude[0] == doctest::Approx(dc).epsilon(1e-10));
  for (int h = 1; h <= 10; ++h)
    CHECK(rep.amplitude[static_cast<std::size_t>(h)] ==
          doctest::Approx(amp[static_cast<std::size_t>(h)]).epsilon(1e-9));
  for (int h = 11; h <= 15; ++h) CHECK(rep.amplitude[static_cast<std::size_t>(h)] < 1e-10);

  // Parseval: mean power equals dc^2 + sum of a_h^2 / 2
  double power = 0.0;
  for (double v : x) power += v * v;
  power /= static_cast<double>(x.size());
  double want = dc * dc;
  for (int h = 1; h <= 10; ++h) {
    const double a = amp[static_cast<std::size_t>(h)];
    want += a * a / 2.0;
  }
  CHECK(power == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("distortion ratio is absent without a fundamental") {
  const double rate = 10000.0;
  const auto x = sampled(rate, 200, [&](double t) { return std::sin(kTau * 150.0 * t); });
  const SpectrumReport rep = harmonic_spectrum(x, rate, 50.0, 5);
  CHECK(rep.amplitude[3] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(rep.thd.has_value());
}

TEST_CASE("spectrum input validation") {
  const auto x = sampled(1000.0, 20, [](double t) { return std::sin(kTau * 50.0 * t); });
  CHECK_THROWS_AS((void)harmonic_spectrum(x, 1000.0, 50.0, 10), std::invalid_argument);  // 2*10*50 = rate
  CHECK_THROWS_AS((void)harmonic_spectrum(x, 1000.0, 50.0, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)harmonic_spectrum(std::vector<double>{}, 1000.0, 50.0, 2),
                  std::invalid_argument);
  // 20 samples at 1 kHz is one 50 Hz period; 30 samples is 1.5 periods
  CHECK_NOTHROW((void)harmonic_spectrum(x, 1000.0, 50.0, 9));
  const auto bad = sampled(1000.0, 30, [](double t) { return std::sin(kTau * 50.0 * t); });
  CHECK_THROWS_AS((void)harmonic_spectrum(bad, 1000.0, 50.0, 9), std::invalid_argument);
}

TEST_CASE("parallel and serial spectra are bit-identical") {
#ifdef _OPENMP
  omp_set_num_threads(4);
#endif
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  std::vector<double> x(6000);
  for (auto& v : x) v = d(rng);
  const double rate = 100000.0;  // 6000 samples = 3 periods of 50 Hz
  const SpectrumReport a = harmonic_spectrum(x, rate, 50.0, 400, false);
  const SpectrumReport b = harmonic_spectrum(x, rate, 50.0, 400, true);
  REQUIRE(a.amplitude.size() == b.amplitude.size());
  for (std::size_t h = 0; h < a.amplitude.size(); ++h) CHECK(a.amplitude[h] == b.amplitude[h]);
  CHECK(a.thd == b.thd);
}

TEST_CASE("commutation windows sum weighted level changes") {
  RunLog log = toy_log(1e6, 8);
  const std::array<std::int8_t, 8> a{0, 1, 1, -1, -1, -1, 0, 2};
  const std::array<std::int8_t, 8> c{2, 2, 0, 0, 0, 1, 1, 0};
  for (std::size_t m = 0; m < 8; ++m) {
    log.u[0][m] = a[m];
    log.u[2][m] = c[m];
  }
  const CommutationStats s = commutation_count(log, 4e-6, 0, 8);
  REQUIRE(s.per_window.size() == 2);
  CHECK(s.per_window[0] == 5);
  CHECK(s.per_window[1] == 5);
  CHECK(s.total == 10);
  CHECK(s.mean_per_window == 5.0);

  SUBCASE("transition into the range start is not counted") {
    const CommutationStats tail = commutation_count(log, 4e-6, 4, 8);
    CHECK(tail.total == 5);  // the 3->4 step (zero here) plus in-window moves
  }
  SUBCASE("range must tile into whole windows") {
    CHECK_THROWS_AS((void)commutation_count(log, 3e-6, 0, 8), std::invalid_argument);
    CHECK_THROWS_AS((void)commutation_count(log, 0.4e-6, 0, 8), std::invalid_argument);
  }
}

TEST_CASE("tracking error of one offset phase is d over sqrt(3)") {
  RunLog log = toy_log(1e6, 50);
  const double d = 0.42;
  for (std::size_t m = 0; m < 50; ++m) {
    log.i[0][m] = 1.0 + d;
    log.i_ref[0][m] = 1.0;
    log.i[1][m] = -2.0;
    log.i_ref[1][m] = -2.0;
  }
  CHECK(tracking_rms(log, 0, 50) == doctest::Approx(d / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("balance statistics") {
  RunLog log = toy_log(1e6, 10);
  // vd1 walks out of the 1 V band and comes back at sample 6
  const std::array<double, 10> vd1{0.2, 1.4, 2.0, 1.2, 1.01, 1.5, 0.9, 0.5, 0.1, 0.3};
  for (std::size_t m = 0; m < 10; ++m) log.vd[0][m] = vd1[m];

  SUBCASE("entry time is the first sample of the final in-band stretch") {
    const BalanceStats s = balance_stats(log, 1.0, 0, 10);
    CHECK(s.max_abs[0] == 2.0);
    CHECK(s.terminal_abs[0] == doctest::Approx(0.3));
    REQUIRE(s.time_to_band.has_value());
    CHECK(*s.time_to_band == doctest::Approx(6e-6));
    CHECK(s.max_abs[1] == 0.0);
  }
  SUBCASE("band violated at the end means no entry time") {
    log.vd[0][9] = -3.0;
    const BalanceStats s = balance_stats(log, 1.0, 0, 10);
    CHECK_FALSE(s.time_to_band.has_value());
    CHECK(s.terminal_abs[0] == 3.0);
  }
  SUBCASE("in-band throughout reports the range start") {
    const BalanceStats s = balance_stats(log, 5.0, 0, 10);
    REQUIRE(s.time_to_band.has_value());
    CHECK(*s.time_to_band == 0.0);
  }
  SUBCASE("bad band rejected") {
    CHECK_THROWS_AS((void)balance_stats(log, 0.0, 0, 10), std::invalid_argument);
  }
}
