#ifndef MLMDA_IMAGE_HPP_INCLUDED
#define MLMDA_IMAGE_HPP_INCLUDED

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlmda {

enum class Modality { Visible, Infrared };

inline const char* to_string(Modality m) {
  return m == Modality::Visible ? "V" : "I";
}

inline Modality modality_from_string(const std::string& s) {
  if (s == "V" || s == "visible" || s == "Visible") return Modality::Visible;
  if (s == "I" || s == "infrared" || s == "Infrared") return Modality::Infrared;
  throw std::invalid_argument("unknown modality: " + s);
}

/// Axis-aligned rectangle in pixel coordinates.
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool operator==(const Rect&) const = default;
};

/**
 * 8-bit image, always stored as 3 interleaved channels (row-major RGB).
 * Infrared images keep the three channels equal at every pixel.
 */
struct ImageBuffer {
  int width = 0;
  int height = 0;
  Modality modality = Modality::Visible;
  std::vector<std::uint8_t> pixels; // width * height * 3

  ImageBuffer() = default;
  ImageBuffer(int w, int h, Modality m, std::uint8_t fill = 0)
      : width(w), height(h), modality(m) {
    if (w < 1 || h < 1) throw std::invalid_argument("ImageBuffer: dims must be >= 1");
    pixels.assign(static_cast<std::size_t>(w) * h * 3, fill);
  }

  static constexpr int channels = 3;

  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * 3 + c;
  }
  std::uint8_t at(int x, int y, int c) const { return pixels[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c) { return pixels[index(x, y, c)]; }

  bool same_dims(const ImageBuffer& o) const {
    return width == o.width && height == o.height;
  }

  bool contains(const Rect& r) const {
    return r.w >= 1 && r.h >= 1 && r.x >= 0 && r.y >= 0 &&
           r.x + r.w <= width && r.y + r.h <= height;
  }

  /// True when R=G=B everywhere (the infrared storage invariant).
  bool is_single_channel() const {
    for (std::size_t i = 0; i + 2 < pixels.size(); i += 3) {
      if (pixels[i] != pixels[i + 1] || pixels[i] != pixels[i + 2]) return false;
    }
    return true;
  }

  bool operator==(const ImageBuffer&) const = default;
};

/// Co-indexed visible + infrared images of one identity.
struct ImagePair {
  ImageBuffer visible;   // modality Visible
  ImageBuffer infrared;  // modality Infrared
  std::int64_t identity = 0;
  std::string camera_v;
  std::string camera_i;

  bool operator==(const ImagePair&) const = default;
};

/// Round-half-up to byte range.
inline std::uint8_t clamp_round(double v) {
  const double r = std::floor(v + 0.5);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

} // namespace mlmda

#endif
