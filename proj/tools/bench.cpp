// Benchmark comparing the serial reference kernels against the
// OpenMP-parallel path, verifying bit-identical output along the way.

#include "mlmda/kernels.hpp"
#include "mlmda/rng.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using mlmda::Exec;
using mlmda::Plane;

Plane random_plane(int w, int h, std::uint64_t seed) {
  Plane p(w, h);
  mlmda::Rng rng(seed);
  for (auto& v : p.data) v = static_cast<float>(rng.uniform(0.0, 255.0));
  return p;
}

double time_ms(const std::function<void()>& fn, int reps) {
  fn(); // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

bool identical(const Plane& a, const Plane& b) {
  return a.w == b.w && a.h == b.h && a.data == b.data;
}

void report(const std::string& name, double serial_ms, double parallel_ms, bool match) {
  std::printf("%-22s serial %8.2f ms   parallel %8.2f ms   speedup %5.2fx   %s\n", name.c_str(),
              serial_ms, parallel_ms, serial_ms / parallel_ms,
              match ? "bit-identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 5;
  const int w = 1024, h = 1024;
  const Plane src = random_plane(w, h, 42);

#ifdef _OPENMP
  std::printf("OpenMP threads: %d, image %dx%d, %d reps per case\n", omp_get_max_threads(), w, h,
              reps);
#else
  std::printf("OpenMP disabled, image %dx%d, %d reps per case\n", w, h, reps);
#endif

  int failures = 0;
  {
    Plane out_s, out_p;
    const double ts = time_ms([&] { out_s = mlmda::gaussian_blur(src, 4.0, Exec::Serial); }, reps);
    const double tp = time_ms([&] { out_p = mlmda::gaussian_blur(src, 4.0, Exec::Parallel); }, reps);
    const bool ok = identical(out_s, out_p);
    failures += !ok;
    report("gaussian_blur s=4", ts, tp, ok);
  }
  {
    std::vector<float> kernel;
    int size = 0;
    mlmda::disk_kernel(8, kernel, size);
    Plane out_s, out_p;
    const double ts = time_ms([&] { out_s = mlmda::convolve(src, kernel, size, size, Exec::Serial); }, reps);
    const double tp = time_ms([&] { out_p = mlmda::convolve(src, kernel, size, size, Exec::Parallel); }, reps);
    const bool ok = identical(out_s, out_p);
    failures += !ok;
    report("convolve disk r=8", ts, tp, ok);
  }
  {
    std::vector<float> kernel;
    int size = 0;
    mlmda::line_kernel(21, 0.6, kernel, size);
    Plane out_s, out_p;
    const double ts = time_ms([&] { out_s = mlmda::convolve(src, kernel, size, size, Exec::Serial); }, reps);
    const double tp = time_ms([&] { out_p = mlmda::convolve(src, kernel, size, size, Exec::Parallel); }, reps);
    const bool ok = identical(out_s, out_p);
    failures += !ok;
    report("convolve line l=21", ts, tp, ok);
  }
  {
    Plane out_s, out_p;
    const double ts = time_ms([&] { out_s = mlmda::resize_bilinear(src, 2048, 2048, Exec::Serial); }, reps);
    const double tp = time_ms([&] { out_p = mlmda::resize_bilinear(src, 2048, 2048, Exec::Parallel); }, reps);
    const bool ok = identical(out_s, out_p);
    failures += !ok;
    report("resize 1024->2048", ts, tp, ok);
  }
  return failures == 0 ? 0 : 1;
}
