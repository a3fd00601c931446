#pragma once

#include <cstdint>
#include <vector>

// Low-level lattice kernels. Every kernel exists in two variants:
//
//   kernels::serial::*  -- straightforward single-thread reference
//   kernels::*          -- OpenMP-parallel, bit-identical to the serial variant
//
// Reductions use a fixed pairwise tree over index order (blocks of
// kReduceBlock, combined pairwise), so the result does not depend on the
// number of worker threads.  tools/bench_kernels compares the two variants.

namespace dwlab::kernels {

inline constexpr std::int64_t kReduceBlock = 4096;

int max_threads();
void set_threads(int n);  // n <= 0 restores the library default

namespace detail {

template <class Term>
double pairwise_range(std::int64_t lo, std::int64_t hi, const Term& term) {
  const std::int64_t n = hi - lo;
  if (n <= 32) {
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  const std::int64_t mid = lo + n / 2;
  return pairwise_range(lo, mid, term) + pairwise_range(mid, hi, term);
}

inline double pairwise_combine(const std::vector<double>& part) {
  return pairwise_range(0, static_cast<std::int64_t>(part.size()),
                        [&](std::int64_t i) { return part[i]; });
}

}  // namespace detail

namespace serial {

template <class Term>
double reduce_sum(std::int64_t n, const Term& term) {
  if (n <= kReduceBlock) return detail::pairwise_range(0, n, term);
  const std::int64_t nb = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> part(static_cast<std::size_t>(nb));
  for (std::int64_t b = 0; b < nb; ++b) {
    const std::int64_t lo = b * kReduceBlock;
    const std::int64_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
    part[static_cast<std::size_t>(b)] = detail::pairwise_range(lo, hi, term);
  }
  return detail::pairwise_combine(part);
}

double pairwise_sum(const double* x, std::int64_t n);
double pairwise_dot(const double* a, const double* b, std::int64_t n);
double max_abs(const double* x, std::int64_t n);

// One centered stencil sweep along one axis of a flattened lattice.
// Lattice values outside [0, n) along the axis count as zero.
//   out[p] (+)= scale * sum_k w[k+radius] * f[p + k*stride]
void axis_stencil(const double* f, double* out, std::int64_t npoints, int n,
                  std::int64_t stride, const double* w, int radius,
                  double scale, bool accumulate);

}  // namespace serial

template <class Term>
double reduce_sum(std::int64_t n, const Term& term) {
  if (n <= kReduceBlock) return detail::pairwise_range(0, n, term);
  const std::int64_t nb = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> part(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < nb; ++b) {
    const std::int64_t lo = b * kReduceBlock;
    const std::int64_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
    part[static_cast<std::size_t>(b)] = detail::pairwise_range(lo, hi, term);
  }
  return detail::pairwise_combine(part);
}

double pairwise_sum(const double* x, std::int64_t n);
double pairwise_dot(const double* a, const double* b, std::int64_t n);
double max_abs(const double* x, std::int64_t n);

void axis_stencil(const double* f, double* out, std::int64_t npoints, int n,
                  std::int64_t stride, const double* w, int radius,
                  double scale, bool accumulate);

// Data-parallel loop over [0, n); body must be free of cross-iteration
// dependencies.  Used for pointwise field updates.
template <class F>
void parallel_for(std::int64_t n, const F& f) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) f(i);
}

}  // namespace dwlab::kernels
