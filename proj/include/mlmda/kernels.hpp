#ifndef MLMDA_KERNELS_HPP_INCLUDED
#define MLMDA_KERNELS_HPP_INCLUDED

#include <vector>

namespace mlmda {

/// Execution policy for the data-parallel kernels. Parallel and Serial
/// produce bit-identical results; Serial is kept as the reference path
/// for tests and the benchmark.
enum class Exec { Serial, Parallel };

/// Single-channel float plane, values in [0, 255] by convention.
struct Plane {
  int w = 0;
  int h = 0;
  std::vector<float> data;

  Plane() = default;
  Plane(int width, int height, float fill = 0.f)
      : w(width), h(height), data(static_cast<std::size_t>(width) * height, fill) {}

  float at(int x, int y) const { return data[static_cast<std::size_t>(y) * w + x]; }
  float& at(int x, int y) { return data[static_cast<std::size_t>(y) * w + x]; }
};

/// 1-D Gaussian taps, normalized, truncated at 3 sigma (radius >= 1).
std::vector<float> gaussian_taps(double sigma);

/// Separable Gaussian blur with edge clamping.
Plane gaussian_blur(const Plane& src, double sigma, Exec exec = Exec::Parallel);

/// Dense 2-D convolution with edge clamping; kernel dims must be odd.
Plane convolve(const Plane& src, const std::vector<float>& kernel, int kw, int kh,
               Exec exec = Exec::Parallel);

/// Normalized disk kernel of the given radius (defocus blur).
void disk_kernel(int radius, std::vector<float>& kernel, int& size);

/// Normalized line kernel of the given length and angle (motion blur).
void line_kernel(int length, double angle_rad, std::vector<float>& kernel, int& size);

/// Bilinear sample with edge clamping.
float sample_bilinear(const Plane& p, double x, double y);

/// Bilinear resize with pixel-center alignment and edge clamping.
Plane resize_bilinear(const Plane& src, int out_w, int out_h, Exec exec = Exec::Parallel);

} // namespace mlmda

#endif
