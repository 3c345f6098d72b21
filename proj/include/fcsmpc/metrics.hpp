#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fcsmpc/runlog.hpp"

namespace fcsmpc {

struct SpectrumReport {
  double fundamental_hz = 0.0;
  int max_order = 0;       ///< highest harmonic order evaluated
  int periods = 0;         ///< fundamental periods covered by the record
  std::size_t samples = 0;

  /// Peak amplitude per harmonic order; amplitude[ ord 0 ] is |mean|,
  /// amplitude[h] the amplitude of the h-th harmonic of the fundamental.
  std::vector<double> amplitude;

  /// sqrt(sum of squared amplitudes of orders 2..max_order) / amplitude[1].
  /// Absent when the fundamental amplitude vanishes.
  std::optional<double> thd;
};

/// Single-bin DFT amplitudes of `x` at integer multiples of the fundamental,
/// summed against an exact integer-phase cis table with compensated
/// accumulation (amplitude error stays near 1e-13 even on 1e5-sample
/// records). The record must span a whole number of fundamental periods and
/// sample_rate must exceed 2 * max_order * fundamental. `parallel` selects
/// the OpenMP per-harmonic loop; results are bit-identical to the serial
/// loop.
[[nodiscard]] SpectrumReport harmonic_spectrum(std::span<const double> x, double sample_rate,
                                               double fundamental_hz, int max_order,
                                               bool parallel = true);

/// Spectrum of one logged phase current over sample range [begin, end).
[[nodiscard]] SpectrumReport harmonic_spectrum(const RunLog& log, int phase, double fundamental_hz,
                                               int max_order, std::size_t begin, std::size_t end,
                                               bool parallel = true);

struct CommutationStats {
  std::vector<long> per_window;  ///< summed |level change| over all phases
  long total = 0;
  double mean_per_window = 0.0;
};

/// Counts level transitions, weighted by |level change|, over consecutive
/// windows of `window_s` seconds tiling the sample range [begin, end).
/// A transition between samples n-1 and n belongs to the window holding n;
/// the transition into `begin` is not counted. The range must tile exactly.
[[nodiscard]] CommutationStats commutation_count(const RunLog& log, double window_s,
                                                 std::size_t begin, std::size_t end);

/// Root-mean-square tracking error over all three phases in [begin, end).
[[nodiscard]] double tracking_rms(const RunLog& log, std::size_t begin, std::size_t end);

struct BalanceStats {
  std::array<double, 3> max_abs{};       ///< per-difference max |vd| over the range
  std::array<double, 3> terminal_abs{};  ///< |vd| at the last sample
  /// First sample time from which every |vd_j| stays within the band through
  /// the end of the range; absent if the band is violated at the end.
  std::optional<double> time_to_band;
  double band = 0.0;
};

[[nodiscard]] BalanceStats balance_stats(const RunLog& log, double band, std::size_t begin,
                                         std::size_t end);

}  // namespace fcsmpc
