#pragma once

#include "spdlab/core.hpp"

#include <omp.h>

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <memory>
#include <string>
#include <vector>

namespace spdlab {

/// Samples per reduction chunk. Fixed so that the merge tree, and therefore
/// every floating-point result, is independent of the worker count.
inline constexpr std::size_t kChunkSize = 256;

/// Worker count: `requested` if positive, else SPDLAB_WORKERS, else the
/// OpenMP default.
int resolve_workers(int requested);

/// Deterministic parallel map-reduce over indices [0, n).
///
/// Indices are cut into chunks of kChunkSize. Each chunk is reduced into a
/// fresh accumulator by one thread; chunk accumulators are merged into the
/// result strictly in chunk order. `body(acc, workspace, i)` gets a
/// default-constructed Workspace private to its thread. The first exception
/// in chunk order is rethrown after the window it occurred in finishes.
template <class Acc, class Workspace, class MakeAcc, class Body>
Acc ordered_reduce(std::size_t n, int workers, MakeAcc make_acc, Body body) {
  workers = std::max(1, workers);
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  const std::size_t window = static_cast<std::size_t>(workers) * 4;

  std::vector<std::unique_ptr<Workspace>> spaces;
  for (int t = 0; t < workers; ++t) spaces.push_back(std::make_unique<Workspace>());

  Acc total = make_acc();
  for (std::size_t first = 0; first < chunks; first += window) {
    const std::size_t count = std::min(window, chunks - first);
    std::vector<Acc> parts;
    parts.reserve(count);
    for (std::size_t k = 0; k < count; ++k) parts.push_back(make_acc());
    std::vector<std::exception_ptr> errors(count);

#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(count); ++k) {
      Workspace& ws = *spaces[omp_get_thread_num()];
      const std::size_t begin = (first + k) * kChunkSize;
      const std::size_t end = std::min(n, begin + kChunkSize);
      try {
        for (std::size_t i = begin; i < end; ++i) body(parts[k], ws, i);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }

    for (std::size_t k = 0; k < count; ++k) {
      if (errors[k]) std::rethrow_exception(errors[k]);
      total.merge(parts[k]);
    }
  }
  return total;
}

/// Deterministic parallel fill: out[i] = f(i), each slot written by one thread.
template <class T, class F>
void parallel_fill(std::vector<T>& out, int workers, F f) {
  const std::size_t n = out.size();
  workers = std::max(1, workers);
  std::exception_ptr error;
  std::size_t error_index = n;
#pragma omp parallel for schedule(dynamic, 64) num_threads(workers)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      out[i] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(spdlab_parallel_fill)
      {
        if (static_cast<std::size_t>(i) < error_index) {
          error_index = static_cast<std::size_t>(i);
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPDLAB_WORKERS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    require(end && *end == '\0' && v > 0 && v <= 4096,
            "SPDLAB_WORKERS must be an integer in [1, 4096]");
    return static_cast<int>(v);
  }
  return std::max(1, omp_get_max_threads());
}

}  // namespace spdlab
