#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gsde {

// threads == 0 means "use all available"; 1 means serial; n means n.
inline int resolve_threads(int requested) noexcept {
#ifdef _OPENMP
  if (requested <= 0) return omp_get_max_threads();
  return requested;
#else
  (void)requested;
  return 1;
#endif
}

// Data-parallel index loop. body(i) must write only to slot i of its output
// so the result is independent of scheduling; reductions are the caller's
// job (fixed-order block merges). The first exception thrown by the lowest
// index is rethrown after the loop so error reporting is deterministic too.
template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
#ifdef _OPENMP
  const int width = resolve_threads(threads);
  if (width > 1 && n > 1) {
    std::exception_ptr error;
    std::int64_t error_index = -1;
#pragma omp parallel for schedule(static) num_threads(width)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(gsde_parallel_for_error)
        {
          if (error_index < 0 || i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
        }
      }
    }
    if (error) std::rethrow_exception(error);
    return;
  }
#else
  (void)threads;
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

// Serial reference with identical semantics, kept so tests can pin the
// parallel kernels against it bit-for-bit.
template <class F>
void serial_for(std::size_t n, F&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace gsde
