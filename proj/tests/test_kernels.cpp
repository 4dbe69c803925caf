#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mlmda/kernels.hpp"
#include "mlmda/rng.hpp"

#include <cmath>
#include <numeric>

using mlmda::Exec;
using mlmda::Plane;

namespace {

Plane random_plane(int w, int h, std::uint64_t seed) {
  Plane p(w, h);
  mlmda::Rng rng(seed);
  for (auto& v : p.data) v = static_cast<float>(rng.uniform(0.0, 255.0));
  return p;
}

} // namespace

TEST_CASE("gaussian taps are normalized, symmetric, odd-sized") {
  for (const double sigma : {0.3, 1.0, 2.5, 6.0}) {
    const auto taps = mlmda::gaussian_taps(sigma);
    CHECK(taps.size() % 2 == 1);
    CHECK(taps.size() >= 3);
    const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    for (std::size_t i = 0; i < taps.size() / 2; ++i) {
      CHECK(taps[i] == taps[taps.size() - 1 - i]);
    }
  }
  CHECK_THROWS_AS(mlmda::gaussian_taps(0.0), std::invalid_argument);
}

TEST_CASE("blur of a constant plane is constant") {
  Plane p(17, 9, 42.f);
  const Plane out = mlmda::gaussian_blur(p, 2.0, Exec::Serial);
  for (const float v : out.data) CHECK(v == doctest::Approx(42.f).epsilon(1e-5));
}

TEST_CASE("convolve with identity kernel returns input") {
  const Plane p = random_plane(13, 7, 1);
  const std::vector<float> identity = {0, 0, 0, 0, 1, 0, 0, 0, 0};
  const Plane out = mlmda::convolve(p, identity, 3, 3, Exec::Serial);
  CHECK(out.data == p.data);
  CHECK_THROWS_AS(mlmda::convolve(p, {1, 1}, 2, 1, Exec::Serial), std::invalid_argument);
}

TEST_CASE("disk and line kernels are normalized") {
  std::vector<float> k;
  int size = 0;
  mlmda::disk_kernel(5, k, size);
  CHECK(size == 11);
  CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-6));
  mlmda::line_kernel(15, 0.7, k, size);
  CHECK(size == 15);
  CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("serial and parallel paths are bit-identical") {
  const Plane p = random_plane(61, 47, 2);
  SUBCASE("gaussian_blur") {
    for (const double sigma : {0.8, 2.0, 5.0}) {
      const Plane s = mlmda::gaussian_blur(p, sigma, Exec::Serial);
      const Plane q = mlmda::gaussian_blur(p, sigma, Exec::Parallel);
      CHECK(s.data == q.data);
    }
  }
  SUBCASE("convolve") {
    std::vector<float> k;
    int size = 0;
    mlmda::disk_kernel(4, k, size);
    CHECK(mlmda::convolve(p, k, size, size, Exec::Serial).data ==
          mlmda::convolve(p, k, size, size, Exec::Parallel).data);
  }
  SUBCASE("resize") {
    CHECK(mlmda::resize_bilinear(p, 100, 30, Exec::Serial).data ==
          mlmda::resize_bilinear(p, 100, 30, Exec::Parallel).data);
  }
}

TEST_CASE("resize to the same dims is exact") {
  const Plane p = random_plane(23, 31, 3);
  const Plane out = mlmda::resize_bilinear(p, 23, 31, Exec::Serial);
  CHECK(out.data == p.data);
}

TEST_CASE("bilinear 2x2 -> 4x4 matches the hand-computed oracle") {
  Plane p(2, 2);
  p.at(0, 0) = 10;
  p.at(1, 0) = 20;
  p.at(0, 1) = 30;
  p.at(1, 1) = 40;
  const Plane out = mlmda::resize_bilinear(p, 4, 4, Exec::Serial);
  // Pixel centers map to source coords {-0.25, 0.25, 0.75, 1.25}, edge
  // clamped; interior weights are 0.75/0.25 blends.
  const float expect[4][4] = {{10, 12.5, 17.5, 20},
                              {15, 17.5, 22.5, 25},
                              {25, 27.5, 32.5, 35},
                              {30, 32.5, 37.5, 40}};
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      CHECK(out.at(x, y) == doctest::Approx(expect[y][x]).epsilon(1e-6));
    }
  }
}

TEST_CASE("blur preserves the mean of an interior-supported image") {
  // All mass away from the border: edge clamping cannot change the sum.
  Plane p(41, 41, 0.f);
  p.at(20, 20) = 1000.f;
  const Plane out = mlmda::gaussian_blur(p, 2.0, Exec::Serial);
  const double sum = std::accumulate(out.data.begin(), out.data.end(), 0.0);
  CHECK(sum == doctest::Approx(1000.0).epsilon(1e-4));
}
