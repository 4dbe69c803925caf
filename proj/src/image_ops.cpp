#include "mlmda/image_ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mlmda {

std::vector<Plane> to_planes(const ImageBuffer& img) {
  const int nc = img.modality == Modality::Infrared ? 1 : 3;
  std::vector<Plane> planes(nc, Plane(img.width, img.height));
  for (int c = 0; c < nc; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        planes[c].at(x, y) = static_cast<float>(img.at(x, y, c));
      }
    }
  }
  return planes;
}

ImageBuffer from_planes(const std::vector<Plane>& planes, Modality modality) {
  if (planes.empty()) throw std::invalid_argument("from_planes: no planes");
  const int w = planes[0].w;
  const int h = planes[0].h;
  ImageBuffer out(w, h, modality);
  const bool replicate = planes.size() == 1;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        const Plane& p = replicate ? planes[0] : planes.at(c);
        out.at(x, y, c) = clamp_round(p.at(x, y));
      }
    }
  }
  return out;
}

ImageBuffer resize(const ImageBuffer& img, int w, int h, Exec exec) {
  if (w < 1 || h < 1) throw std::invalid_argument("resize: dims must be >= 1");
  std::vector<Plane> planes = to_planes(img);
  for (Plane& p : planes) p = resize_bilinear(p, w, h, exec);
  return from_planes(planes, img.modality);
}

ImageBuffer random_crop_with_padding(const ImageBuffer& img, int pad, Rng& rng) {
  if (pad < 0) throw std::invalid_argument("random_crop_with_padding: pad must be >= 0");
  if (pad == 0) return img;
  const int dx = static_cast<int>(rng.uniform_int(0, 2 * pad));
  const int dy = static_cast<int>(rng.uniform_int(0, 2 * pad));
  ImageBuffer out(img.width, img.height, img.modality);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      // Window position (dx, dy) in the zero-padded image.
      const int sx = x + dx - pad;
      const int sy = y + dy - pad;
      if (sx >= 0 && sx < img.width && sy >= 0 && sy < img.height) {
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(sx, sy, c);
      }
    }
  }
  return out;
}

ImageBuffer flip_horizontal(const ImageBuffer& img) {
  ImageBuffer out(img.width, img.height, img.modality);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(img.width - 1 - x, y, c);
    }
  }
  return out;
}

ImageBuffer horizontal_flip(const ImageBuffer& img, double p, Rng& rng) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("horizontal_flip: p outside [0,1]");
  return rng.bernoulli(p) ? flip_horizontal(img) : img;
}

ImageBuffer to_grayscale(const ImageBuffer& img) {
  ImageBuffer out(img.width, img.height, img.modality);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double lum = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                         0.114 * img.at(x, y, 2);
      const std::uint8_t v = clamp_round(lum);
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = v;
    }
  }
  return out;
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_dims(b)) throw std::invalid_argument("psnr: dimension mismatch");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.pixels.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

} // namespace mlmda
