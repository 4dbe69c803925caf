#include "mlmda/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlmda {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

} // namespace

std::vector<float> gaussian_taps(double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("gaussian_taps: sigma must be > 0");
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<float> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    taps[i + radius] = static_cast<float>(v);
    sum += v;
  }
  for (float& t : taps) t = static_cast<float>(t / sum);
  return taps;
}

Plane gaussian_blur(const Plane& src, double sigma, Exec exec) {
  const std::vector<float> taps = gaussian_taps(sigma);
  const int radius = static_cast<int>(taps.size()) / 2;
  Plane tmp(src.w, src.h);
  Plane dst(src.w, src.h);

  // Horizontal pass.
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      float acc = 0.f;
      for (int k = -radius; k <= radius; ++k) {
        acc += taps[k + radius] * src.at(clampi(x + k, 0, src.w - 1), y);
      }
      tmp.at(x, y) = acc;
    }
  }
  // Vertical pass.
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      float acc = 0.f;
      for (int k = -radius; k <= radius; ++k) {
        acc += taps[k + radius] * tmp.at(x, clampi(y + k, 0, src.h - 1));
      }
      dst.at(x, y) = acc;
    }
  }
  return dst;
}

Plane convolve(const Plane& src, const std::vector<float>& kernel, int kw, int kh,
               Exec exec) {
  if (kw % 2 == 0 || kh % 2 == 0 || kernel.size() != static_cast<std::size_t>(kw) * kh) {
    throw std::invalid_argument("convolve: kernel dims must be odd and match size");
  }
  const int rx = kw / 2;
  const int ry = kh / 2;
  Plane dst(src.w, src.h);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      float acc = 0.f;
      for (int ky = -ry; ky <= ry; ++ky) {
        const int sy = clampi(y + ky, 0, src.h - 1);
        for (int kx = -rx; kx <= rx; ++kx) {
          const int sx = clampi(x + kx, 0, src.w - 1);
          acc += kernel[static_cast<std::size_t>(ky + ry) * kw + (kx + rx)] * src.at(sx, sy);
        }
      }
      dst.at(x, y) = acc;
    }
  }
  return dst;
}

void disk_kernel(int radius, std::vector<float>& kernel, int& size) {
  if (radius < 1) throw std::invalid_argument("disk_kernel: radius must be >= 1");
  size = 2 * radius + 1;
  kernel.assign(static_cast<std::size_t>(size) * size, 0.f);
  double sum = 0.0;
  for (int y = -radius; y <= radius; ++y) {
    for (int x = -radius; x <= radius; ++x) {
      if (x * x + y * y <= radius * radius) {
        kernel[static_cast<std::size_t>(y + radius) * size + (x + radius)] = 1.f;
        sum += 1.0;
      }
    }
  }
  for (float& v : kernel) v = static_cast<float>(v / sum);
}

void line_kernel(int length, double angle_rad, std::vector<float>& kernel, int& size) {
  if (length < 1) throw std::invalid_argument("line_kernel: length must be >= 1");
  const int radius = length / 2;
  size = 2 * radius + 1;
  kernel.assign(static_cast<std::size_t>(size) * size, 0.f);
  const double dx = std::cos(angle_rad);
  const double dy = std::sin(angle_rad);
  double sum = 0.0;
  // Rasterize the line through the kernel center with sub-steps so steep
  // angles stay connected.
  const int steps = 4 * radius + 1;
  for (int i = 0; i < steps; ++i) {
    const double t = (i - (steps - 1) / 2.0) * (2.0 * radius) / std::max(1, steps - 1);
    const int x = clampi(static_cast<int>(std::lround(t * dx)) + radius, 0, size - 1);
    const int y = clampi(static_cast<int>(std::lround(t * dy)) + radius, 0, size - 1);
    float& cell = kernel[static_cast<std::size_t>(y) * size + x];
    if (cell == 0.f) {
      cell = 1.f;
      sum += 1.0;
    }
  }
  for (float& v : kernel) v = static_cast<float>(v / sum);
}

float sample_bilinear(const Plane& p, double x, double y) {
  const int x0 = clampi(static_cast<int>(std::floor(x)), 0, p.w - 1);
  const int y0 = clampi(static_cast<int>(std::floor(y)), 0, p.h - 1);
  const int x1 = clampi(x0 + 1, 0, p.w - 1);
  const int y1 = clampi(y0 + 1, 0, p.h - 1);
  const double fx = std::clamp(x - x0, 0.0, 1.0);
  const double fy = std::clamp(y - y0, 0.0, 1.0);
  const double top = p.at(x0, y0) * (1.0 - fx) + p.at(x1, y0) * fx;
  const double bot = p.at(x0, y1) * (1.0 - fx) + p.at(x1, y1) * fx;
  return static_cast<float>(top * (1.0 - fy) + bot * fy);
}

Plane resize_bilinear(const Plane& src, int out_w, int out_h, Exec exec) {
  if (out_w < 1 || out_h < 1) throw std::invalid_argument("resize_bilinear: dims must be >= 1");
  Plane dst(out_w, out_h);
  const double sx = static_cast<double>(src.w) / out_w;
  const double sy = static_cast<double>(src.h) / out_h;
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int y = 0; y < out_h; ++y) {
    const double srcy = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < out_w; ++x) {
      const double srcx = (x + 0.5) * sx - 0.5;
      dst.at(x, y) = sample_bilinear(src, srcx, srcy);
    }
  }
  return dst;
}

} // namespace mlmda
