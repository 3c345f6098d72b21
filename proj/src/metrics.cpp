#include "fcsmpc/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace fcsmpc {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

inline void kahan_add(double& sum, double& comp, double v) {
  const double y = v - comp;
  const double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

/// DFT bin k of an N-sample record via direct summation against a shared
/// cis table, indexed by the exact integer phase (k*m mod N). Returns the
/// peak amplitude of that bin (2|X_k|/N, or |X_0|/N for DC).
///
/// A Goertzel recurrence is cheaper but its resonator states grow to ~N*a/2
/// and re-amplify early rounding; at 1e5 samples that noise floor sits near
/// 1e-8, too coarse for the calibration checks. Direct compensated summation
/// with exact phase stays near 1e-13.
double bin_amplitude(std::span<const double> x, std::size_t bin, std::span<const double> cos_tab,
                     std::span<const double> sin_tab) {
  const std::size_t n = x.size();
  double re = 0.0, im = 0.0, re_c = 0.0, im_c = 0.0;
  std::size_t idx = 0;
  for (std::size_t m = 0; m < n; ++m) {
    kahan_add(re, re_c, x[m] * cos_tab[idx]);
    kahan_add(im, im_c, x[m] * sin_tab[idx]);
    idx += bin;  // bin < n/2 by the Nyquist check, one wrap suffices
    if (idx >= n) idx -= n;
  }
  const double mag = std::sqrt(re * re + im * im);
  const double scale = bin == 0 ? 1.0 : 2.0;
  return scale * mag / static_cast<double>(n);
}

}  // namespace

SpectrumReport harmonic_spectrum(std::span<const double> x, double sample_rate,
                                 double fundamental_hz, int max_order, bool parallel) {
  if (x.empty()) throw std::invalid_argument("harmonic_spectrum: empty record");
  if (!(sample_rate > 0.0) || !(fundamental_hz > 0.0))
    throw std::invalid_argument("harmonic_spectrum: rates must be > 0");
  if (max_order < 1) throw std::invalid_argument("harmonic_spectrum: max_order must be >= 1");
  if (!(sample_rate > 2.0 * static_cast<double>(max_order) * fundamental_hz))
    throw std::invalid_argument(
        "harmonic_spectrum: undersampled (need sample_rate > 2*max_order*fundamental)");

  const double periods_exact =
      static_cast<double>(x.size()) * fundamental_hz / sample_rate;
  const double periods_rounded = std::round(periods_exact);
  if (periods_rounded < 1.0 || std::abs(periods_exact - periods_rounded) > 1e-6)
    throw std::invalid_argument(
        "harmonic_spectrum: record must span a whole number of fundamental periods");
  const int periods = static_cast<int>(periods_rounded);

  SpectrumReport rep;
  rep.fundamental_hz = fundamental_hz;
  rep.max_order = max_order;
  rep.periods = periods;
  rep.samples = x.size();
  rep.amplitude.assign(static_cast<std::size_t>(max_order) + 1, 0.0);

  const std::size_t n = x.size();
  std::vector<double> cos_tab(n), sin_tab(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double ang = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    cos_tab[j] = std::cos(ang);
    sin_tab[j] = std::sin(ang);
  }

  // Each harmonic is one independent pass over the shared table, so the
  // parallel loop is bit-identical to the serial one.
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int h = 0; h <= max_order; ++h)
      rep.amplitude[static_cast<std::size_t>(h)] = bin_amplitude(
          x, static_cast<std::size_t>(h) * static_cast<std::size_t>(periods), cos_tab, sin_tab);
  } else {
    for (int h = 0; h <= max_order; ++h)
      rep.amplitude[static_cast<std::size_t>(h)] = bin_amplitude(
          x, static_cast<std::size_t>(h) * static_cast<std::size_t>(periods), cos_tab, sin_tab);
  }

  double scale = 0.0;
  for (double a : rep.amplitude) scale = std::max(scale, a);
  const double fundamental_amp = rep.amplitude[1];
  if (fundamental_amp > 1e-12 * scale && fundamental_amp > 0.0) {
    double acc = 0.0;
    for (int h = 2; h <= max_order; ++h) {
      const double a = rep.amplitude[static_cast<std::size_t>(h)];
      acc += a * a;
    }
    rep.thd = std::sqrt(acc) / fundamental_amp;
  }
  return rep;
}

SpectrumReport harmonic_spectrum(const RunLog& log, int phase, double fundamental_hz,
                                 int max_order, std::size_t begin, std::size_t end, bool parallel) {
  if (phase < 0 || phase > 2) throw std::invalid_argument("harmonic_spectrum: phase must be 0..2");
  if (begin >= end || end > log.size())
    throw std::invalid_argument("harmonic_spectrum: bad sample range");
  const auto& col = log.i[static_cast<std::size_t>(phase)];
  return harmonic_spectrum(std::span<const double>(col).subspan(begin, end - begin),
                           log.sample_rate, fundamental_hz, max_order, parallel);
}

CommutationStats commutation_count(const RunLog& log, double window_s, std::size_t begin,
                                   std::size_t end) {
  if (begin >= end || end > log.size())
    throw std::invalid_argument("commutation_count: bad sample range");
  const double w_exact = window_s * log.sample_rate;
  const double w_rounded = std::round(w_exact);
  if (w_rounded < 1.0 || std::abs(w_exact - w_rounded) > 1e-6)
    throw std::invalid_argument("commutation_count: window must be a whole number of samples");
  const std::size_t w = static_cast<std::size_t>(w_rounded);
  const std::size_t n = end - begin;
  if (n % w != 0)
    throw std::invalid_argument("commutation_count: range must be a whole number of windows");

  CommutationStats stats;
  stats.per_window.assign(n / w, 0);
  for (std::size_t m = begin + 1; m < end; ++m) {
    long d = 0;
    for (int k = 0; k < 3; ++k) {
      const auto& lv = log.u[static_cast<std::size_t>(k)];
      d += std::labs(static_cast<long>(lv[m]) - static_cast<long>(lv[m - 1]));
    }
    stats.per_window[(m - begin) / w] += d;
  }
  for (long c : stats.per_window) stats.total += c;
  stats.mean_per_window =
      static_cast<double>(stats.total) / static_cast<double>(stats.per_window.size());
  return stats;
}

double tracking_rms(const RunLog& log, std::size_t begin, std::size_t end) {
  if (begin >= end || end > log.size())
    throw std::invalid_argument("tracking_rms: bad sample range");
  double acc = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto& im = log.i[static_cast<std::size_t>(k)];
    const auto& ir = log.i_ref[static_cast<std::size_t>(k)];
    for (std::size_t m = begin; m < end; ++m) {
      const double e = im[m] - ir[m];
      acc += e * e;
    }
  }
  return std::sqrt(acc / (3.0 * static_cast<double>(end - begin)));
}

BalanceStats balance_stats(const RunLog& log, double band, std::size_t begin, std::size_t end) {
  if (begin >= end || end > log.size())
    throw std::invalid_argument("balance_stats: bad sample range");
  if (!(band > 0.0)) throw std::invalid_argument("balance_stats: band must be > 0");

  BalanceStats out;
  out.band = band;
  for (int k = 0; k < 3; ++k) {
    const auto& col = log.vd[static_cast<std::size_t>(k)];
    double mx = 0.0;
    for (std::size_t m = begin; m < end; ++m) mx = std::max(mx, std::abs(col[m]));
    out.max_abs[static_cast<std::size_t>(k)] = mx;
    out.terminal_abs[static_cast<std::size_t>(k)] = std::abs(col[end - 1]);
  }

  // Walk backward to the last out-of-band sample; the band entry point is the
  // sample right after it.
  std::size_t entry = begin;
  for (std::size_t m = end; m-- > begin;) {
    bool in_band = true;
    for (int k = 0; k < 3; ++k)
      in_band = in_band && std::abs(log.vd[static_cast<std::size_t>(k)][m]) <= band;
    if (!in_band) {
      entry = m + 1;
      break;
    }
  }
  if (entry < end) out.time_to_band = log.t[entry];
  return out;
}

}  // namespace fcsmpc
