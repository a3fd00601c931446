#include "dwlab/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dwlab::kernels {

namespace {

int g_default_threads = 0;

// Shared per-line stencil body.  A "line" is one 1-d fiber of the lattice
// along the swept axis; interior nodes skip the bounds checks.
inline void stencil_line(const double* f, double* out, std::int64_t base,
                         int n, std::int64_t stride, const double* w,
                         int radius, double scale, bool accumulate) {
  const int lo_edge = std::min<int>(radius, n);
  const int hi_edge = std::max<int>(n - radius, lo_edge);
  auto emit = [&](std::int64_t p, double s) {
    if (accumulate)
      out[p] += scale * s;
    else
      out[p] = scale * s;
  };
  for (int i = 0; i < lo_edge; ++i) {
    double s = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      const int j = i + k;
      if (j >= 0 && j < n) s += w[k + radius] * f[base + j * stride];
    }
    emit(base + i * stride, s);
  }
  for (int i = lo_edge; i < hi_edge; ++i) {
    double s = 0.0;
    const double* fp = f + base + i * stride;
    for (int k = -radius; k <= radius; ++k) s += w[k + radius] * fp[k * stride];
    emit(base + i * stride, s);
  }
  for (int i = hi_edge; i < n; ++i) {
    double s = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      const int j = i + k;
      if (j >= 0 && j < n) s += w[k + radius] * f[base + j * stride];
    }
    emit(base + i * stride, s);
  }
}

inline std::int64_t line_base(std::int64_t line, int n, std::int64_t stride) {
  const std::int64_t hi = line / stride;
  const std::int64_t lo = line % stride;
  return hi * (static_cast<std::int64_t>(n) * stride) + lo;
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (g_default_threads == 0) g_default_threads = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : g_default_threads);
#else
  (void)n;
  (void)g_default_threads;
#endif
}

namespace serial {

double pairwise_sum(const double* x, std::int64_t n) {
  return reduce_sum(n, [&](std::int64_t i) { return x[i]; });
}

double pairwise_dot(const double* a, const double* b, std::int64_t n) {
  return reduce_sum(n, [&](std::int64_t i) { return a[i] * b[i]; });
}

double max_abs(const double* x, std::int64_t n) {
  double m = 0.0;
  for (std::int64_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

void axis_stencil(const double* f, double* out, std::int64_t npoints, int n,
                  std::int64_t stride, const double* w, int radius,
                  double scale, bool accumulate) {
  const std::int64_t nlines = npoints / n;
  for (std::int64_t line = 0; line < nlines; ++line)
    stencil_line(f, out, line_base(line, n, stride), n, stride, w, radius,
                 scale, accumulate);
}

}  // namespace serial

double pairwise_sum(const double* x, std::int64_t n) {
  return reduce_sum(n, [&](std::int64_t i) { return x[i]; });
}

double pairwise_dot(const double* a, const double* b, std::int64_t n) {
  return reduce_sum(n, [&](std::int64_t i) { return a[i] * b[i]; });
}

double max_abs(const double* x, std::int64_t n) {
  const std::int64_t nb = (n + kReduceBlock - 1) / kReduceBlock;
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::int64_t b = 0; b < nb; ++b) {
    const std::int64_t lo = b * kReduceBlock;
    const std::int64_t hi = std::min(lo + kReduceBlock, n);
    double local = 0.0;
    for (std::int64_t i = lo; i < hi; ++i)
      local = std::max(local, std::fabs(x[i]));
    m = std::max(m, local);
  }
  return m;
}

void axis_stencil(const double* f, double* out, std::int64_t npoints, int n,
                  std::int64_t stride, const double* w, int radius,
                  double scale, bool accumulate) {
  const std::int64_t nlines = npoints / n;
#pragma omp parallel for schedule(static)
  for (std::int64_t line = 0; line < nlines; ++line)
    stencil_line(f, out, line_base(line, n, stride), n, stride, w, radius,
                 scale, accumulate);
}

}  // namespace dwlab::kernels
