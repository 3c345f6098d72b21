#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace fcsmpc {

/// Rounds to 9 significant decimal digits, the resolution of the on-disk log
/// format. Logged samples are quantized at emission time so that metrics
/// computed from an in-memory log and from a reloaded CSV are bit-identical.
[[nodiscard]] inline double quantize9(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

/// Uniformly sampled recording of one closed-loop run. Sample n is taken at
/// t0 + n / sample_rate; the level columns hold the switching state active
/// immediately after that instant (a sample landing on a switching edge shows
/// the new level). All real-valued columns are quantized to 9 significant
/// digits (see quantize9).
struct RunLog {
  double sample_rate = 1e6;  ///< samples per second
  double t0 = 0.0;

  std::vector<double> t;
  std::array<std::vector<double>, 3> i;       ///< phase currents, A
  std::array<std::vector<std::int8_t>, 3> u;  ///< phase levels, -2..2
  std::array<std::vector<double>, 3> vd;      ///< capacitor differences, V
  std::array<std::vector<double>, 3> i_ref;   ///< reference currents, A

  [[nodiscard]] std::size_t size() const { return t.size(); }

  /// Time of the next sample to be emitted.
  [[nodiscard]] double next_sample_time() const {
    return t0 + static_cast<double>(size()) / sample_rate;
  }

  void reserve(std::size_t n) {
    t.reserve(n);
    for (auto& v : i) v.reserve(n);
    for (auto& v : u) v.reserve(n);
    for (auto& v : vd) v.reserve(n);
    for (auto& v : i_ref) v.reserve(n);
  }

  void push_sample(double time, const std::array<double, 3>& currents,
                   const std::array<std::int8_t, 3>& levels,
                   const std::array<double, 3>& differences) {
    t.push_back(quantize9(time));
    for (int k = 0; k < 3; ++k) {
      i[static_cast<std::size_t>(k)].push_back(quantize9(currents[static_cast<std::size_t>(k)]));
      u[static_cast<std::size_t>(k)].push_back(levels[static_cast<std::size_t>(k)]);
      vd[static_cast<std::size_t>(k)].push_back(quantize9(differences[static_cast<std::size_t>(k)]));
      i_ref[static_cast<std::size_t>(k)].push_back(0.0);  // filled by set_reference
    }
  }

  /// Fills the reference columns by evaluating `ref(t)` at every sample
  /// instant. Kept separate from sampling because the plant does not know the
  /// reference; the runner applies it after (or during) a run.
  template <class RefFn>
  void set_reference(RefFn&& ref) {
    for (std::size_t n = 0; n < size(); ++n) {
      const auto r = ref(t0 + static_cast<double>(n) / sample_rate);
      for (int k = 0; k < 3; ++k)
        i_ref[static_cast<std::size_t>(k)][n] = quantize9(r[static_cast<std::size_t>(k)]);
    }
  }

  void check_consistent() const {
    const std::size_t n = t.size();
    for (const auto& v : i)
      if (v.size() != n) throw std::logic_error("RunLog: ragged current columns");
    for (const auto& v : u)
      if (v.size() != n) throw std::logic_error("RunLog: ragged level columns");
    for (const auto& v : vd)
      if (v.size() != n) throw std::logic_error("RunLog: ragged vd columns");
    for (const auto& v : i_ref)
      if (v.size() != n) throw std::logic_error("RunLog: ragged reference columns");
  }
};

}  // namespace fcsmpc
