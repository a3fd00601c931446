// Benchmark comparing the serial reference kernels against the OpenMP
// variants.  Verifies bit-identical results, then reports throughput for the
// reductions, the dot product, and one stencil sweep at a few sizes.
#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <random>
#include <vector>

#include "dwlab/kernels.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

template <class F>
double time_best_of(int reps, const F& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = clock_type::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

std::vector<double> random_values(std::int64_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& v : out)
    v = static_cast<double>(eng() >> 11) * 0x1p-53 * 2.0 - 1.0;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t n = std::int64_t{1} << 22;
  int reps = 5;
  if (argc > 1) n = std::strtoll(argv[1], nullptr, 10);
  if (argc > 2) reps = static_cast<int>(std::strtol(argv[2], nullptr, 10));
  if (n < 1 || reps < 1) {
    std::fprintf(stderr, "usage: bench_kernels [npoints] [reps]\n");
    return 2;
  }

  namespace k = dwlab::kernels;
  std::printf("threads: %d, npoints: %" PRId64 ", reps: %d\n",
              k::max_threads(), n, reps);

  const auto a = random_values(n, 1);
  const auto b = random_values(n, 2);
  std::vector<double> out_s(a.size()), out_p(a.size());
  const double w[5] = {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};

  bool identical = true;
  double r_serial = 0, r_parallel = 0;

  // pairwise sum
  r_serial = k::serial::pairwise_sum(a.data(), n);
  r_parallel = k::pairwise_sum(a.data(), n);
  identical = identical && std::memcmp(&r_serial, &r_parallel, 8) == 0;
  {
    const double ts = time_best_of(
        reps, [&] { r_serial = k::serial::pairwise_sum(a.data(), n); });
    const double tp =
        time_best_of(reps, [&] { r_parallel = k::pairwise_sum(a.data(), n); });
    std::printf("pairwise_sum   serial %8.3f ms   parallel %8.3f ms   x%.2f\n",
                ts * 1e3, tp * 1e3, ts / tp);
  }

  // dot product
  r_serial = k::serial::pairwise_dot(a.data(), b.data(), n);
  r_parallel = k::pairwise_dot(a.data(), b.data(), n);
  identical = identical && std::memcmp(&r_serial, &r_parallel, 8) == 0;
  {
    const double ts = time_best_of(reps, [&] {
      r_serial = k::serial::pairwise_dot(a.data(), b.data(), n);
    });
    const double tp = time_best_of(
        reps, [&] { r_parallel = k::pairwise_dot(a.data(), b.data(), n); });
    std::printf("pairwise_dot   serial %8.3f ms   parallel %8.3f ms   x%.2f\n",
                ts * 1e3, tp * 1e3, ts / tp);
  }

  // generic blocked reduction
  const double* pa = a.data();
  const double* pb = b.data();
  r_serial = k::serial::reduce_sum(
      n, [=](std::int64_t i) { return pa[i] * pa[i] + pb[i]; });
  r_parallel =
      k::reduce_sum(n, [=](std::int64_t i) { return pa[i] * pa[i] + pb[i]; });
  identical = identical && std::memcmp(&r_serial, &r_parallel, 8) == 0;
  {
    const double ts = time_best_of(reps, [&] {
      r_serial = k::serial::reduce_sum(
          n, [=](std::int64_t i) { return pa[i] * pa[i] + pb[i]; });
    });
    const double tp = time_best_of(reps, [&] {
      r_parallel = k::reduce_sum(
          n, [=](std::int64_t i) { return pa[i] * pa[i] + pb[i]; });
    });
    std::printf("reduce_sum     serial %8.3f ms   parallel %8.3f ms   x%.2f\n",
                ts * 1e3, tp * 1e3, ts / tp);
  }

  // stencil sweep (1d layout: stride 1, one long axis)
  k::serial::axis_stencil(a.data(), out_s.data(), n, static_cast<int>(n), 1, w,
                          2, 1.0, false);
  k::axis_stencil(a.data(), out_p.data(), n, static_cast<int>(n), 1, w, 2, 1.0,
                  false);
  identical = identical &&
              std::memcmp(out_s.data(), out_p.data(), a.size() * 8) == 0;
  {
    const double ts = time_best_of(reps, [&] {
      k::serial::axis_stencil(a.data(), out_s.data(), n, static_cast<int>(n),
                              1, w, 2, 1.0, false);
    });
    const double tp = time_best_of(reps, [&] {
      k::axis_stencil(a.data(), out_p.data(), n, static_cast<int>(n), 1, w, 2,
                      1.0, false);
    });
    std::printf("axis_stencil   serial %8.3f ms   parallel %8.3f ms   x%.2f\n",
                ts * 1e3, tp * 1e3, ts / tp);
  }

  std::printf("bitwise identical results: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
