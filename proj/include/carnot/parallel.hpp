#pragma once

#include <cstdint>
#include <vector>
#include <algorithm>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace carnot {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

template <class F>
inline void parallel_for(std::int64_t n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

// Deterministic sum: the range is split into fixed-size chunks, each chunk
// is accumulated serially, and the chunk partials are combined in index
// order.  The result is bit-identical for any thread count.
template <class F>
inline double deterministic_sum(std::int64_t n, F&& term,
                                std::int64_t chunk = 1024) {
  if (n <= 0) return 0.0;
  const std::int64_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(std::size_t(nchunks), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t lo = c * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += term(i);
    partial[std::size_t(c)] = s;
  }
  double total = 0.0;
  for (std::int64_t c = 0; c < nchunks; ++c) total += partial[std::size_t(c)];
  return total;
}

// Deterministic max with the index of the first attaining sample.
struct MaxLoc {
  double value = -std::numeric_limits<double>::infinity();
  std::int64_t index = -1;
};

template <class F>
inline MaxLoc deterministic_max(std::int64_t n, F&& term,
                                std::int64_t chunk = 1024) {
  MaxLoc best;
  if (n <= 0) return best;
  const std::int64_t nchunks = (n + chunk - 1) / chunk;
  std::vector<MaxLoc> partial(std::size_t(nchunks));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t lo = c * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    MaxLoc loc;
    for (std::int64_t i = lo; i < hi; ++i) {
      double v = term(i);
      if (v > loc.value) {
        loc.value = v;
        loc.index = i;
      }
    }
    partial[std::size_t(c)] = loc;
  }
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const MaxLoc& loc = partial[std::size_t(c)];
    if (loc.value > best.value) best = loc;
  }
  return best;
}

// Count of failing samples plus the smallest failing index; order-independent.
struct ViolationCount {
  std::uint64_t violations = 0;
  std::int64_t first_index = -1;
};

template <class F>
inline ViolationCount count_violations(std::int64_t n, F&& is_violation,
                                       std::int64_t chunk = 4096) {
  ViolationCount out;
  if (n <= 0) return out;
  const std::int64_t nchunks = (n + chunk - 1) / chunk;
  std::vector<ViolationCount> partial(std::size_t(nchunks));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t lo = c * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    ViolationCount vc;
    for (std::int64_t i = lo; i < hi; ++i) {
      if (is_violation(i)) {
        ++vc.violations;
        if (vc.first_index < 0) vc.first_index = i;
      }
    }
    partial[std::size_t(c)] = vc;
  }
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const ViolationCount& vc = partial[std::size_t(c)];
    out.violations += vc.violations;
    if (out.first_index < 0) out.first_index = vc.first_index;
  }
  return out;
}

// Single-pass scan used by the randomized suites: a sample's margin is
// positive when the property fails.  Violations, the first failing index and
// the worst margin are reduced deterministically.
struct ScanResult {
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  std::int64_t first_index = -1;
  double worst_margin = -std::numeric_limits<double>::infinity();
};

template <class F>
inline ScanResult margin_scan(std::int64_t n, F&& margin, double tol = 0.0,
                              std::int64_t chunk = 1024) {
  ScanResult out;
  out.samples = std::uint64_t(n > 0 ? n : 0);
  if (n <= 0) return out;
  const std::int64_t nchunks = (n + chunk - 1) / chunk;
  std::vector<ScanResult> partial(std::size_t(nchunks));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t lo = c * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    ScanResult r;
    for (std::int64_t i = lo; i < hi; ++i) {
      double m = margin(i);
      if (m > r.worst_margin) r.worst_margin = m;
      if (m > tol) {
        ++r.violations;
        if (r.first_index < 0) r.first_index = i;
      }
    }
    partial[std::size_t(c)] = r;
  }
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const ScanResult& r = partial[std::size_t(c)];
    out.violations += r.violations;
    if (out.first_index < 0) out.first_index = r.first_index;
    if (r.worst_margin > out.worst_margin) out.worst_margin = r.worst_margin;
  }
  return out;
}

}  // namespace carnot
