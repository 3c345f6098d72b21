#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fcsmpc {

struct ScanResult {
  std::int64_t index = -1;
  double cost = std::numeric_limits<double>::infinity();
};

/// Sequential first-minimum scan: evaluates cost(0..count-1) in order and
/// keeps the first index attaining the minimum. This is the reference
/// semantics every parallel variant must reproduce exactly.
template <class CostFn>
[[nodiscard]] ScanResult argmin_scan_serial(std::int64_t count, CostFn&& cost) {
  if (count <= 0) throw std::invalid_argument("argmin_scan: empty candidate set");
  ScanResult best;
  for (std::int64_t k = 0; k < count; ++k) {
    const double c = cost(k);
    if (c < best.cost) best = {k, c};
  }
  return best;
}

/// Parallel scan over disjoint index chunks. Each thread keeps its local
/// first minimum; merging prefers strictly lower cost and, on exact ties,
/// the lower index. Because each candidate's cost is computed by the same
/// self-contained evaluation in either variant, the result is bit-identical
/// to argmin_scan_serial for any thread count.
template <class CostFn>
[[nodiscard]] ScanResult argmin_scan_parallel(std::int64_t count, CostFn&& cost) {
  if (count <= 0) throw std::invalid_argument("argmin_scan: empty candidate set");
#ifdef _OPENMP
  ScanResult best;
#pragma omp parallel
  {
    ScanResult local;
#pragma omp for schedule(static) nowait
    for (std::int64_t k = 0; k < count; ++k) {
      const double c = cost(k);
      if (c < local.cost) local = {k, c};
    }
#pragma omp critical(fcsmpc_argmin_merge)
    {
      if (local.index >= 0 &&
          (local.cost < best.cost || (local.cost == best.cost && local.index < best.index) ||
           best.index < 0))
        best = local;
    }
  }
  return best;
#else
  return argmin_scan_serial(count, std::forward<CostFn>(cost));
#endif
}

}  // namespace fcsmpc
