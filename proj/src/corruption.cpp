#include "mlmda/corruption.hpp"

#include "mlmda/image_ops.hpp"
#include "mlmda/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mlmda {

namespace {

const char* const kKindNames[kCorruptionKindCount] = {
    "gaussian_noise", "shot_noise",  "impulse_noise", "speckle_noise", "defocus_blur",
    "glass_blur",     "motion_blur", "zoom_blur",     "gaussian_blur", "snow",
    "frost",          "fog",         "rain",          "spatter",       "brightness",
    "contrast",       "elastic_transform", "pixelate", "jpeg_compression", "saturate"};

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

} // namespace

const char* to_string(CorruptionKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

CorruptionKind corruption_kind_from_string(const std::string& name) {
  for (int i = 0; i < kCorruptionKindCount; ++i) {
    if (name == kKindNames[i]) return static_cast<CorruptionKind>(i);
  }
  throw std::invalid_argument("unknown corruption kind: " + name);
}

const CorruptionParams& CorruptionParams::defaults() {
  static const CorruptionParams p = {
      /*gaussian_noise_sigma=*/{0.08, 0.12, 0.18, 0.26, 0.38},
      /*shot_noise_photons=*/{60, 25, 12, 5, 3},
      /*impulse_amount=*/{0.03, 0.06, 0.09, 0.17, 0.27},
      /*speckle_sigma=*/{0.15, 0.20, 0.35, 0.45, 0.60},
      /*defocus_radius=*/{3, 4, 6, 8, 10},
      /*glass_sigma=*/{0.7, 0.9, 1.0, 1.1, 1.5},
      /*glass_delta=*/{1, 2, 2, 3, 4},
      /*glass_iters=*/{2, 1, 3, 2, 2},
      /*motion_length=*/{9, 13, 17, 21, 25},
      /*zoom_max=*/{1.11, 1.16, 1.21, 1.26, 1.31},
      /*gaussian_blur_sigma=*/{1, 2, 3, 4, 6},
      /*snow_density=*/{0.010, 0.020, 0.030, 0.045, 0.060},
      /*frost_strength=*/{0.25, 0.35, 0.45, 0.55, 0.65},
      /*fog_strength=*/{0.4, 0.7, 1.0, 1.4, 1.9},
      /*rain_density=*/{0.004, 0.008, 0.012, 0.018, 0.025},
      /*spatter_coverage=*/{0.05, 0.09, 0.14, 0.20, 0.27},
      /*brightness_shift=*/{0.1, 0.2, 0.3, 0.4, 0.5},
      /*contrast_scale=*/{0.4, 0.3, 0.2, 0.1, 0.05},
      /*elastic_alpha=*/{6, 8, 10, 14, 18},
      /*elastic_sigma=*/{5, 5, 4, 4, 3},
      /*pixelate_factor=*/{0.60, 0.50, 0.40, 0.30, 0.25},
      /*jpeg_quality=*/{25, 18, 15, 10, 7},
      /*saturate_scale=*/{0.3, 0.1, 2, 5, 10},
      /*saturate_shift=*/{0, 0, 0, 0.1, 0.2},
  };
  return p;
}

namespace {

using nlohmann::json;

template <typename T, std::size_t N>
void put(json& j, const char* key, const std::array<T, N>& a) {
  j[key] = std::vector<T>(a.begin(), a.end());
}

template <typename T, std::size_t N>
void get(const json& j, const char* key, std::array<T, N>& a) {
  const auto v = j.at(key).get<std::vector<T>>();
  if (v.size() != N) throw std::invalid_argument(std::string("corruption params: ") + key +
                                                 " must have 5 entries");
  std::copy(v.begin(), v.end(), a.begin());
}

json params_to_json(const CorruptionParams& p) {
  json j;
  put(j, "gaussian_noise_sigma", p.gaussian_noise_sigma);
  put(j, "shot_noise_photons", p.shot_noise_photons);
  put(j, "impulse_amount", p.impulse_amount);
  put(j, "speckle_sigma", p.speckle_sigma);
  put(j, "defocus_radius", p.defocus_radius);
  put(j, "glass_sigma", p.glass_sigma);
  put(j, "glass_delta", p.glass_delta);
  put(j, "glass_iters", p.glass_iters);
  put(j, "motion_length", p.motion_length);
  put(j, "zoom_max", p.zoom_max);
  put(j, "gaussian_blur_sigma", p.gaussian_blur_sigma);
  put(j, "snow_density", p.snow_density);
  put(j, "frost_strength", p.frost_strength);
  put(j, "fog_strength", p.fog_strength);
  put(j, "rain_density", p.rain_density);
  put(j, "spatter_coverage", p.spatter_coverage);
  put(j, "brightness_shift", p.brightness_shift);
  put(j, "contrast_scale", p.contrast_scale);
  put(j, "elastic_alpha", p.elastic_alpha);
  put(j, "elastic_sigma", p.elastic_sigma);
  put(j, "pixelate_factor", p.pixelate_factor);
  put(j, "jpeg_quality", p.jpeg_quality);
  put(j, "saturate_scale", p.saturate_scale);
  put(j, "saturate_shift", p.saturate_shift);
  return j;
}

} // namespace

CorruptionParams CorruptionParams::load(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open corruption params: " + json_path);
  json j;
  in >> j;
  CorruptionParams p = defaults();
  get(j, "gaussian_noise_sigma", p.gaussian_noise_sigma);
  get(j, "shot_noise_photons", p.shot_noise_photons);
  get(j, "impulse_amount", p.impulse_amount);
  get(j, "speckle_sigma", p.speckle_sigma);
  get(j, "defocus_radius", p.defocus_radius);
  get(j, "glass_sigma", p.glass_sigma);
  get(j, "glass_delta", p.glass_delta);
  get(j, "glass_iters", p.glass_iters);
  get(j, "motion_length", p.motion_length);
  get(j, "zoom_max", p.zoom_max);
  get(j, "gaussian_blur_sigma", p.gaussian_blur_sigma);
  get(j, "snow_density", p.snow_density);
  get(j, "frost_strength", p.frost_strength);
  get(j, "fog_strength", p.fog_strength);
  get(j, "rain_density", p.rain_density);
  get(j, "spatter_coverage", p.spatter_coverage);
  get(j, "brightness_shift", p.brightness_shift);
  get(j, "contrast_scale", p.contrast_scale);
  get(j, "elastic_alpha", p.elastic_alpha);
  get(j, "elastic_sigma", p.elastic_sigma);
  get(j, "pixelate_factor", p.pixelate_factor);
  get(j, "jpeg_quality", p.jpeg_quality);
  get(j, "saturate_scale", p.saturate_scale);
  get(j, "saturate_shift", p.saturate_shift);
  return p;
}

void CorruptionParams::save(const std::string& json_path) const {
  std::ofstream out(json_path);
  if (!out) throw std::runtime_error("cannot write corruption params: " + json_path);
  out << params_to_json(*this).dump(2) << '\n';
}

std::vector<CorruptionKind> applicable_kinds(Modality modality) {
  std::vector<CorruptionKind> kinds;
  kinds.reserve(kCorruptionKindCount);
  for (int i = 0; i < kCorruptionKindCount; ++i) {
    const auto kind = static_cast<CorruptionKind>(i);
    if (modality == Modality::Infrared && kind == CorruptionKind::Brightness) continue;
    kinds.push_back(kind);
  }
  return kinds;
}

// ---------------------------------------------------------------------------
// Per-kind implementations. Each operates on float planes in [0, 255];
// Infrared images run as a single plane so additive noise and masks are
// grayscale by construction. All rng draws happen in serial loops so the
// result is independent of thread schedule.
// ---------------------------------------------------------------------------
namespace {

using Planes = std::vector<Plane>;

void add_gaussian_noise(Planes& planes, double sigma_frac, Rng& rng) {
  const double sigma = sigma_frac * 255.0;
  for (Plane& p : planes) {
    for (float& v : p.data) v = static_cast<float>(v + rng.normal(0.0, sigma));
  }
}

void add_shot_noise(Planes& planes, double photons, Rng& rng) {
  for (Plane& p : planes) {
    for (float& v : p.data) {
      const double lam = std::max(0.0, static_cast<double>(v)) / 255.0 * photons;
      v = static_cast<float>(static_cast<double>(rng.poisson(lam)) / photons * 255.0);
    }
  }
}

void add_impulse_noise(Planes& planes, double amount, Rng& rng) {
  const int w = planes[0].w;
  const int h = planes[0].h;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!rng.bernoulli(amount)) continue;
      const float v = rng.bernoulli(0.5) ? 255.f : 0.f;
      for (Plane& p : planes) p.at(x, y) = v;
    }
  }
}

void add_speckle_noise(Planes& planes, double sigma, Rng& rng) {
  for (Plane& p : planes) {
    for (float& v : p.data) v = static_cast<float>(v * (1.0 + rng.normal(0.0, sigma)));
  }
}

void apply_defocus(Planes& planes, int radius) {
  std::vector<float> kernel;
  int size = 0;
  disk_kernel(radius, kernel, size);
  for (Plane& p : planes) p = convolve(p, kernel, size, size);
}

void apply_glass(Planes& planes, double sigma, int delta, int iters, Rng& rng) {
  for (Plane& p : planes) p = gaussian_blur(p, sigma);
  const int w = planes[0].w;
  const int h = planes[0].h;
  for (int it = 0; it < iters; ++it) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int dx = static_cast<int>(rng.uniform_int(-delta, delta));
        const int dy = static_cast<int>(rng.uniform_int(-delta, delta));
        const int sx = clampi(x + dx, 0, w - 1);
        const int sy = clampi(y + dy, 0, h - 1);
        for (Plane& p : planes) std::swap(p.at(x, y), p.at(sx, sy));
      }
    }
  }
  for (Plane& p : planes) p = gaussian_blur(p, sigma);
}

void apply_motion_blur(Planes& planes, int length, Rng& rng) {
  const double angle = rng.uniform(-M_PI / 4.0, M_PI / 4.0);
  std::vector<float> kernel;
  int size = 0;
  line_kernel(length, angle, kernel, size);
  for (Plane& p : planes) p = convolve(p, kernel, size, size);
}

void apply_zoom_blur(Planes& planes, double zoom_max) {
  const int w = planes[0].w;
  const int h = planes[0].h;
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  std::vector<double> factors;
  for (double z = 1.0 + 0.02; z <= zoom_max + 1e-9; z += 0.02) factors.push_back(z);
  if (factors.empty()) factors.push_back(zoom_max);
  for (Plane& p : planes) {
    Plane acc = p;
    for (const double z : factors) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          acc.at(x, y) += sample_bilinear(p, cx + (x - cx) / z, cy + (y - cy) / z);
        }
      }
    }
    const float inv = 1.0f / static_cast<float>(factors.size() + 1);
    for (std::size_t i = 0; i < acc.data.size(); ++i) p.data[i] = acc.data[i] * inv;
  }
}

void apply_gaussian_blur_kind(Planes& planes, double sigma) {
  for (Plane& p : planes) p = gaussian_blur(p, sigma);
}

/// Sparse bright points, streaked by a short motion blur.
Plane particle_mask(int w, int h, double density, int streak_len, double angle, Rng& rng) {
  Plane pts(w, h, 0.f);
  for (float& v : pts.data) v = rng.bernoulli(density) ? 255.f : 0.f;
  std::vector<float> kernel;
  int size = 0;
  line_kernel(streak_len, angle, kernel, size);
  Plane streaked = convolve(pts, kernel, size, size);
  // Normalize so isolated streaks reach full opacity.
  float peak = 0.f;
  for (const float v : streaked.data) peak = std::max(peak, v);
  if (peak > 0.f) {
    for (float& v : streaked.data) v = std::min(1.f, v / peak * 2.f);
  }
  return streaked;
}

void apply_snow(Planes& planes, double density, Rng& rng) {
  const int w = planes[0].w;
  const int h = planes[0].h;
  const double angle = rng.uniform(M_PI / 3.0, 2.0 * M_PI / 3.0); // mostly downward
  const Plane mask = particle_mask(w, h, density, 9, angle, rng);
  for (Plane& p : planes) {
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      const float m = mask.data[i];
      p.data[i] = p.data[i] * (1.f - m) + 255.f * m;
    }
  }
}

void apply_rain(Planes& planes, double density, Rng& rng) {
  const int w = planes[0].w;
  const int h = planes[0].h;
  // Long, steep streaks; grayscale mask so the IR path stays single-channel.
  const double angle = rng.uniform(M_PI / 2.0 - 0.3, M_PI / 2.0 + 0.3);
  const Plane mask = particle_mask(w, h, density, 15, angle, rng);
  for (Plane& p : planes) {
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      const float m = 0.8f * mask.data[i];
      p.data[i] = p.data[i] * (1.f - m) + 220.f * m;
    }
  }
}

/// Smooth noise field in [0, 1].
Plane smooth_noise(int w, int h, double sigma, Rng& rng) {
  Plane noise(w, h);
  for (float& v : noise.data) v = static_cast<float>(rng.uniform());
  Plane smoothed = gaussian_blur(noise, sigma);
  float lo = smoothed.data[0];
  float hi = smoothed.data[0];
  for (const float v : smoothed.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const float span = std::max(1e-6f, hi - lo);
  for (float& v : smoothed.data) v = (v - lo) / span;
  return smoothed;
}

void apply_frost(Planes& planes, double strength, Rng& rng) {
  const int w = planes[0].w;
  const int h = planes[0].h;
  // Procedurally generated icy texture, kept grayscale so both modalities
  // receive the same colorless mask.
  Plane tex = smooth_noise(w, h, 2.5, rng);
  for (float& v : tex.data) {
    v = std::clamp((v - 0.5f) * 3.f + 0.65f, 0.f, 1.f);
  }
  for (Plane& p : planes) {
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      p.data[i] = static_cast<float>((1.0 - strength) * p.data[i] +
                                     strength * 255.0 * tex.data[i]);
    }
  }
}

void apply_fog(Planes& planes, double strength, Rng& rng) {
  const int w = planes[0].w;
  const int h = planes[0].h;
  const Plane fog = smooth_noise(w, h, 8.0, rng);
  const double scale = 255.0 / (255.0 + strength * 255.0);
  for (Plane& p : planes) {
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      p.data[i] = static_cast<float>((p.data[i] + strength * 255.0 * fog.data[i]) * scale);
    }
  }
}

void apply_spatter(Planes& planes, double coverage, Rng& rng) {
  const int w = planes[0].w;
  const int h = planes[0].h;
  Plane field = smooth_noise(w, h, 1.5, rng);
  // Threshold at the requested coverage quantile to form blobs.
  std::vector<float> sorted = field.data;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t idx = static_cast<std::size_t>((1.0 - coverage) * (sorted.size() - 1));
  const float thr = sorted[idx];
  Plane mask(w, h, 0.f);
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    mask.data[i] = field.data[i] >= thr ? 1.f : 0.f;
  }
  mask = gaussian_blur(mask, 0.8);
  // Muddy tint on visible images; mid-gray deposit on infrared.
  const float color[3] = {110.f, 86.f, 58.f};
  const bool gray = planes.size() == 1;
  for (std::size_t c = 0; c < planes.size(); ++c) {
    const float tint = gray ? 96.f : color[c];
    Plane& p = planes[c];
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      const float m = std::min(1.f, mask.data[i]);
      p.data[i] = p.data[i] * (1.f - m) + tint * m;
    }
  }
}

void apply_brightness(Planes& planes, double shift_frac) {
  const float shift = static_cast<float>(shift_frac * 255.0);
  for (Plane& p : planes) {
    for (float& v : p.data) v += shift;
  }
}

void apply_contrast(Planes& planes, double scale) {
  double mean = 0.0;
  std::size_t n = 0;
  if (planes.size() == 3) {
    for (std::size_t i = 0; i < planes[0].data.size(); ++i) {
      mean += 0.299 * planes[0].data[i] + 0.587 * planes[1].data[i] + 0.114 * planes[2].data[i];
    }
    n = planes[0].data.size();
  } else {
    for (const float v : planes[0].data) mean += v;
    n = planes[0].data.size();
  }
  mean /= static_cast<double>(n);
  for (Plane& p : planes) {
    for (float& v : p.data) v = static_cast<float>((v - mean) * scale + mean);
  }
}

void apply_elastic(Planes& planes, double alpha, double sigma, Rng& rng) {
  const int w = planes[0].w;
  const int h = planes[0].h;
  Plane dx(w, h);
  Plane dy(w, h);
  for (float& v : dx.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  for (float& v : dy.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  dx = gaussian_blur(dx, sigma);
  dy = gaussian_blur(dy, sigma);
  // Renormalize post-blur so alpha is the peak displacement in pixels.
  float peak = 1e-6f;
  for (std::size_t i = 0; i < dx.data.size(); ++i) {
    peak = std::max({peak, std::abs(dx.data[i]), std::abs(dy.data[i])});
  }
  const float gain = static_cast<float>(alpha) / peak;
  for (Plane& p : planes) {
    Plane out(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        out.at(x, y) = sample_bilinear(p, x + dx.at(x, y) * gain, y + dy.at(x, y) * gain);
      }
    }
    p = std::move(out);
  }
}

void apply_pixelate(Planes& planes, double factor) {
  const int w = planes[0].w;
  const int h = planes[0].h;
  const int dw = std::max(1, static_cast<int>(std::lround(w * factor)));
  const int dh = std::max(1, static_cast<int>(std::lround(h * factor)));
  for (Plane& p : planes) {
    const Plane small = resize_bilinear(p, dw, dh);
    Plane out(w, h);
    for (int y = 0; y < h; ++y) {
      const int sy = clampi(y * dh / h, 0, dh - 1);
      for (int x = 0; x < w; ++x) {
        const int sx = clampi(x * dw / w, 0, dw - 1);
        out.at(x, y) = small.at(sx, sy);
      }
    }
    p = std::move(out);
  }
}

void apply_saturate_visible(Planes& planes, double scale, double shift_frac) {
  const float shift = static_cast<float>(shift_frac * 255.0);
  for (std::size_t i = 0; i < planes[0].data.size(); ++i) {
    const double gray = 0.299 * planes[0].data[i] + 0.587 * planes[1].data[i] +
                        0.114 * planes[2].data[i];
    for (int c = 0; c < 3; ++c) {
      planes[c].data[i] = static_cast<float>(gray + scale * (planes[c].data[i] - gray)) + shift;
    }
  }
}

} // namespace

ImageBuffer apply_corruption(const ImageBuffer& img, CorruptionKind kind,
                             Severity severity, Rng& rng, const CorruptionParams& params) {
  const auto kinds = applicable_kinds(img.modality);
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
    throw NotApplicableError(std::string(to_string(kind)) + " is not applicable to " +
                             (img.modality == Modality::Infrared ? "infrared" : "visible") +
                             " images");
  }
  const int s = severity.level - 1;

  // JPEG works on the encoded byte stream, not on planes.
  if (kind == CorruptionKind::JpegCompression) {
    const bool gray = img.modality == Modality::Infrared;
    const auto bytes = encode_jpeg(img, params.jpeg_quality[s], gray);
    return decode_jpeg(bytes, img.modality);
  }

  Planes planes = to_planes(img);
  switch (kind) {
    case CorruptionKind::GaussianNoise:
      add_gaussian_noise(planes, params.gaussian_noise_sigma[s], rng);
      break;
    case CorruptionKind::ShotNoise:
      add_shot_noise(planes, params.shot_noise_photons[s], rng);
      break;
    case CorruptionKind::ImpulseNoise:
      add_impulse_noise(planes, params.impulse_amount[s], rng);
      break;
    case CorruptionKind::SpeckleNoise:
      add_speckle_noise(planes, params.speckle_sigma[s], rng);
      break;
    case CorruptionKind::DefocusBlur:
      apply_defocus(planes, params.defocus_radius[s]);
      break;
    case CorruptionKind::GlassBlur:
      apply_glass(planes, params.glass_sigma[s], params.glass_delta[s], params.glass_iters[s],
                  rng);
      break;
    case CorruptionKind::MotionBlur:
      apply_motion_blur(planes, params.motion_length[s], rng);
      break;
    case CorruptionKind::ZoomBlur:
      apply_zoom_blur(planes, params.zoom_max[s]);
      break;
    case CorruptionKind::GaussianBlur:
      apply_gaussian_blur_kind(planes, params.gaussian_blur_sigma[s]);
      break;
    case CorruptionKind::Snow:
      apply_snow(planes, params.snow_density[s], rng);
      break;
    case CorruptionKind::Frost:
      apply_frost(planes, params.frost_strength[s], rng);
      break;
    case CorruptionKind::Fog:
      apply_fog(planes, params.fog_strength[s], rng);
      break;
    case CorruptionKind::Rain:
      apply_rain(planes, params.rain_density[s], rng);
      break;
    case CorruptionKind::Spatter:
      apply_spatter(planes, params.spatter_coverage[s], rng);
      break;
    case CorruptionKind::Brightness:
      apply_brightness(planes, params.brightness_shift[s]);
      break;
    case CorruptionKind::Contrast:
      apply_contrast(planes, params.contrast_scale[s]);
      break;
    case CorruptionKind::ElasticTransform:
      apply_elastic(planes, params.elastic_alpha[s], params.elastic_sigma[s], rng);
      break;
    case CorruptionKind::Pixelate:
      apply_pixelate(planes, params.pixelate_factor[s]);
      break;
    case CorruptionKind::Saturate:
      if (img.modality == Modality::Infrared) {
        // Thermal saturation is expressed through the brightness transfer.
        apply_brightness(planes, params.brightness_shift[s]);
      } else {
        apply_saturate_visible(planes, params.saturate_scale[s], params.saturate_shift[s]);
      }
      break;
    case CorruptionKind::JpegCompression:
      break; // handled above
  }
  return from_planes(planes, img.modality);
}

CorruptionMode corruption_mode_from_string(const std::string& s) {
  if (s == "clean") return CorruptionMode::Clean;
  if (s == "c") return CorruptionMode::RgbOnly_C;
  if (s == "c-star" || s == "cstar" || s == "c*") return CorruptionMode::Both_Cstar;
  throw std::invalid_argument("unknown corruption mode: " + s);
}

const char* to_string(CorruptionMode mode) {
  switch (mode) {
    case CorruptionMode::Clean: return "clean";
    case CorruptionMode::RgbOnly_C: return "c";
    case CorruptionMode::Both_Cstar: return "c-star";
  }
  return "?";
}

std::string CorruptionRecord::to_line() const {
  std::ostringstream os;
  os << image_id << '\t' << mlmda::to_string(modality) << '\t' << mlmda::to_string(kind)
     << '\t' << severity << '\t' << seed;
  return os.str();
}

CorruptionRecord CorruptionRecord::from_line(const std::string& line) {
  std::istringstream is(line);
  std::string id, mod, kind, sev, seed;
  if (!std::getline(is, id, '\t') || !std::getline(is, mod, '\t') ||
      !std::getline(is, kind, '\t') || !std::getline(is, sev, '\t') ||
      !std::getline(is, seed, '\t')) {
    throw std::invalid_argument("malformed corruption record: " + line);
  }
  CorruptionRecord r;
  r.image_id = id;
  r.modality = modality_from_string(mod);
  r.kind = corruption_kind_from_string(kind);
  r.severity = std::stoi(sev);
  r.seed = std::stoull(seed);
  return r;
}

namespace {

/// Decide and run one image's corruption; returns the record, or nullopt
/// when the policy leaves the image clean.
std::optional<CorruptionRecord> corrupt_one(ImageBuffer& img, const std::string& image_id,
                                            const CorruptionPolicy& policy, Rng& rng,
                                            const CorruptionParams& params) {
  const bool applies =
      policy.mode == CorruptionMode::Both_Cstar ||
      (policy.mode == CorruptionMode::RgbOnly_C && img.modality == Modality::Visible);
  if (!applies) return std::nullopt;
  const auto kinds = applicable_kinds(img.modality);
  const auto kind = kinds[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(kinds.size()) - 1))];
  const int level = policy.fixed_level ? *policy.fixed_level
                                       : static_cast<int>(rng.uniform_int(1, 5));
  const std::uint64_t seed = rng.next_u64();
  Rng image_rng(seed);
  img = apply_corruption(img, kind, Severity(level), image_rng, params);
  return CorruptionRecord{image_id, img.modality, kind, level, seed};
}

} // namespace

ImagePair corrupt_pair(const ImagePair& pair, const CorruptionPolicy& policy,
                       Rng& rng, std::vector<CorruptionRecord>* records,
                       const CorruptionParams& params) {
  ImagePair out = pair;
  // Fixed draw order: visible first, then infrared.
  if (auto rec = corrupt_one(out.visible, "visible", policy, rng, params); rec && records) {
    records->push_back(*rec);
  }
  if (auto rec = corrupt_one(out.infrared, "infrared", policy, rng, params); rec && records) {
    records->push_back(*rec);
  }
  return out;
}

CorruptDatasetResult corrupt_dataset(const std::vector<CorruptDatasetItem>& items,
                                     const CorruptionPolicy& policy,
                                     std::uint64_t master_seed, int workers,
                                     const CorruptionParams& params) {
  const int n = static_cast<int>(items.size());
  std::vector<std::optional<CorruptionRecord>> records(items.size());
  std::vector<std::string> errors(items.size());

#ifdef _OPENMP
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#else
  const int threads = 1;
  (void)workers;
#endif
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    const CorruptDatasetItem& item = items[i];
    try {
      ImageBuffer img = load_image(item.input_path, item.modality);
      Rng rng = Rng::derive(master_seed, static_cast<std::uint64_t>(i));
      auto rec = corrupt_one(img, item.image_id, policy, rng, params);
      save_image(img, item.output_path);
      if (rec) records[i] = *rec;
    } catch (const std::exception& e) {
      errors[i] = item.image_id + ": " + e.what();
    }
  }

  CorruptDatasetResult result;
  for (int i = 0; i < n; ++i) {
    if (records[i]) result.records.push_back(*records[i]);
    if (!errors[i].empty()) result.errors.push_back(errors[i]);
  }
  return result;
}

void write_record_log(const std::vector<CorruptionRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write record log: " + path);
  for (const CorruptionRecord& r : records) out << r.to_line() << '\n';
}

std::vector<CorruptionRecord> read_record_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read record log: " + path);
  std::vector<CorruptionRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(CorruptionRecord::from_line(line));
  }
  return records;
}

} // namespace mlmda
