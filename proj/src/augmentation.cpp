#include "mlmda/augmentation.hpp"

#include "mlmda/image_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mlmda {

void EraseParams::validate() const {
  if (probability < 0.0 || probability > 1.0) {
    throw std::invalid_argument("EraseParams: probability outside [0,1]");
  }
  if (area_min <= 0.0 || area_min > area_max || area_max > 1.0) {
    throw std::invalid_argument("EraseParams: bad area range");
  }
  if (aspect_min <= 0.0 || aspect_min > aspect_max) {
    throw std::invalid_argument("EraseParams: bad aspect range");
  }
  if (pixel_fill_fraction <= 0.0 || pixel_fill_fraction > 1.0) {
    throw std::invalid_argument("EraseParams: pixel_fill_fraction outside (0,1]");
  }
}

std::optional<Rect> sample_erase_rect(int width, int height, const EraseParams& p, Rng& rng) {
  const double image_area = static_cast<double>(width) * height;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double area = rng.uniform(p.area_min, p.area_max) * image_area;
    const double aspect = std::exp(rng.uniform(std::log(p.aspect_min), std::log(p.aspect_max)));
    const int h = static_cast<int>(std::lround(std::sqrt(area * aspect)));
    const int w = static_cast<int>(std::lround(std::sqrt(area / aspect)));
    if (w < 1 || h < 1 || w > width || h > height) continue;
    const int x = static_cast<int>(rng.uniform_int(0, width - w));
    const int y = static_cast<int>(rng.uniform_int(0, height - h));
    return Rect{x, y, w, h};
  }
  return std::nullopt;
}

void erase_in_rect(ImageBuffer& img, const Rect& rect, double fill_fraction,
                   bool gray_values, Rng& rng) {
  if (!img.contains(rect)) throw std::invalid_argument("erase_in_rect: rect out of bounds");
  const std::size_t area = static_cast<std::size_t>(rect.w) * rect.h;
  const std::size_t count =
      static_cast<std::size_t>(std::lround(fill_fraction * static_cast<double>(area)));
  // Partial Fisher-Yates over in-rect pixel indices: the first `count`
  // slots are a uniform sample without replacement.
  std::vector<std::uint32_t> idx(area);
  for (std::size_t i = 0; i < area; ++i) idx[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = 0; i < count && i < area; ++i) {
    const std::size_t j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(area) - 1));
    std::swap(idx[i], idx[j]);
    const int px = rect.x + static_cast<int>(idx[i] % rect.w);
    const int py = rect.y + static_cast<int>(idx[i] / rect.w);
    if (gray_values) {
      const auto v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
      for (int c = 0; c < 3; ++c) img.at(px, py, c) = v;
    } else {
      for (int c = 0; c < 3; ++c) {
        img.at(px, py, c) = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
      }
    }
  }
}

std::optional<Rect> soft_random_erase(ImageBuffer& img, const EraseParams& p, Rng& rng) {
  p.validate();
  if (!rng.bernoulli(p.probability)) return std::nullopt;
  const auto rect = sample_erase_rect(img.width, img.height, p, rng);
  if (!rect) return std::nullopt;
  erase_in_rect(img, *rect, p.pixel_fill_fraction, img.modality == Modality::Infrared, rng);
  return rect;
}

MsReaRects ms_rea(ImagePair& pair, const EraseParams& p, Rng& rng) {
  MsReaRects rects;
  rects.visible = soft_random_erase(pair.visible, p, rng);
  rects.infrared = soft_random_erase(pair.infrared, p, rng);
  return rects;
}

void paste_patch(ImageBuffer& img, const Rect& src, const Rect& dst) {
  if (src.w != dst.w || src.h != dst.h) {
    throw std::invalid_argument("paste_patch: src/dst sizes differ");
  }
  if (!img.contains(src) || !img.contains(dst)) {
    throw std::invalid_argument("paste_patch: rect out of bounds");
  }
  // Capture before writing so overlapping rects behave.
  std::vector<std::uint8_t> patch(static_cast<std::size_t>(src.w) * src.h * 3);
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      for (int c = 0; c < 3; ++c) {
        patch[(static_cast<std::size_t>(y) * src.w + x) * 3 + c] =
            img.at(src.x + x, src.y + y, c);
      }
    }
  }
  for (int y = 0; y < dst.h; ++y) {
    for (int x = 0; x < dst.w; ++x) {
      for (int c = 0; c < 3; ++c) {
        img.at(dst.x + x, dst.y + y, c) =
            patch[(static_cast<std::size_t>(y) * src.w + x) * 3 + c];
      }
    }
  }
}

namespace {

Rect place_rect(int width, int height, int w, int h, Rng& rng) {
  return Rect{static_cast<int>(rng.uniform_int(0, width - w)),
              static_cast<int>(rng.uniform_int(0, height - h)), w, h};
}

/// Copy a patch across images, grayscaling on the fly when the target is
/// infrared.
void cross_paste(const ImageBuffer& from, const Rect& src, ImageBuffer& to, const Rect& dst) {
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      if (to.modality == Modality::Infrared) {
        const double lum = 0.299 * from.at(src.x + x, src.y + y, 0) +
                           0.587 * from.at(src.x + x, src.y + y, 1) +
                           0.114 * from.at(src.x + x, src.y + y, 2);
        const std::uint8_t v = clamp_round(lum);
        for (int c = 0; c < 3; ++c) to.at(dst.x + x, dst.y + y, c) = v;
      } else {
        for (int c = 0; c < 3; ++c) {
          to.at(dst.x + x, dst.y + y, c) = from.at(src.x + x, src.y + y, c);
        }
      }
    }
  }
}

} // namespace

PatchRects self_patch_mix(ImageBuffer& img, const EraseParams& geometry, Rng& rng) {
  const auto src = sample_erase_rect(img.width, img.height, geometry, rng);
  if (!src) return PatchRects{Rect{0, 0, 1, 1}, Rect{0, 0, 1, 1}};
  const Rect dst = place_rect(img.width, img.height, src->w, src->h, rng);
  paste_patch(img, *src, dst);
  return PatchRects{*src, dst};
}

MsPatchRects ms_patch(ImagePair& pair, const EraseParams& geometry, Rng& rng) {
  MsPatchRects rects;
  rects.visible = self_patch_mix(pair.visible, geometry, rng);
  rects.infrared = self_patch_mix(pair.infrared, geometry, rng);
  return rects;
}

PatchVariant patch_variant_from_string(const std::string& s) {
  if (s == "SS" || s == "ss") return PatchVariant::SS;
  if (s == "SD" || s == "sd") return PatchVariant::SD;
  if (s == "DD" || s == "dd") return PatchVariant::DD;
  throw std::invalid_argument("unknown M-PATCH variant: " + s);
}

const char* to_string(PatchVariant v) {
  switch (v) {
    case PatchVariant::SS: return "SS";
    case PatchVariant::SD: return "SD";
    case PatchVariant::DD: return "DD";
  }
  return "?";
}

MPatchRects m_patch(ImagePair& pair, PatchVariant variant, const EraseParams& geometry,
                    Rng& rng) {
  if (!pair.visible.same_dims(pair.infrared)) {
    throw std::invalid_argument("m_patch: pair images must have equal dims");
  }
  const int W = pair.visible.width;
  const int H = pair.visible.height;

  MPatchRects r;
  switch (variant) {
    case PatchVariant::SS: {
      const auto rect = sample_erase_rect(W, H, geometry, rng);
      if (!rect) return MPatchRects{};
      r.src_v = r.dst_i = r.src_i = r.dst_v = *rect;
      break;
    }
    case PatchVariant::SD: {
      const auto src = sample_erase_rect(W, H, geometry, rng);
      if (!src) return MPatchRects{};
      r.src_v = r.src_i = *src;
      r.dst_i = place_rect(W, H, src->w, src->h, rng);
      r.dst_v = place_rect(W, H, src->w, src->h, rng);
      break;
    }
    case PatchVariant::DD: {
      const auto src_v = sample_erase_rect(W, H, geometry, rng);
      const auto src_i = sample_erase_rect(W, H, geometry, rng);
      if (!src_v || !src_i) return MPatchRects{};
      r.src_v = *src_v;
      r.src_i = *src_i;
      r.dst_i = place_rect(W, H, src_v->w, src_v->h, rng);
      r.dst_v = place_rect(W, H, src_i->w, src_i->h, rng);
      break;
    }
  }

  // Capture both sources before either paste so the two directions do not
  // feed each other.
  const ImageBuffer vis_before = pair.visible;
  const ImageBuffer ir_before = pair.infrared;
  cross_paste(vis_before, r.src_v, pair.infrared, r.dst_i);
  cross_paste(ir_before, r.src_i, pair.visible, r.dst_v);
  return r;
}

std::optional<Modality> modality_mask(ImagePair& pair, double masking_probability, Rng& rng) {
  if (masking_probability < 0.0 || masking_probability > 1.0) {
    throw std::invalid_argument("modality_mask: probability outside [0,1]");
  }
  if (!rng.bernoulli(masking_probability)) return std::nullopt;
  const Modality which = rng.bernoulli(0.5) ? Modality::Visible : Modality::Infrared;
  mask_modality(pair, which);
  return which;
}

void mask_modality(ImagePair& pair, Modality which) {
  ImageBuffer& target = which == Modality::Visible ? pair.visible : pair.infrared;
  std::fill(target.pixels.begin(), target.pixels.end(), std::uint8_t{0});
}

void intuitive_blur(ImagePair& pair, double probability, Rng& rng) {
  if (!rng.bernoulli(probability)) return;
  ImageBuffer& target = rng.bernoulli(0.5) ? pair.visible : pair.infrared;
  std::vector<Plane> planes = to_planes(target);
  for (Plane& p : planes) p = gaussian_blur(p, 3.0);
  target = from_planes(planes, target.modality);
}

void intuitive_lum_sat(ImagePair& pair, double probability, Rng& rng) {
  if (!rng.bernoulli(probability)) return;
  const bool pick_visible = rng.bernoulli(0.5);
  ImageBuffer& target = pick_visible ? pair.visible : pair.infrared;
  const double factor = pick_visible ? (rng.bernoulli(0.5) ? 2.0 : 0.5) : 1.5;
  for (std::uint8_t& v : target.pixels) v = clamp_round(v * factor);
}

// ---------------------------------------------------------------------------
// Augmix
// ---------------------------------------------------------------------------
namespace {

/// Inverse affine map with bilinear sampling and zero fill (per channel,
/// so grayscale inputs stay grayscale).
ImageBuffer affine(const ImageBuffer& img, double a, double b, double c, double d,
                   double e, double f) {
  ImageBuffer out(img.width, img.height, img.modality);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double sx = a * x + b * y + c;
      const double sy = d * x + e * y + f;
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0;
      const double fy = sy - y0;
      for (int ch = 0; ch < 3; ++ch) {
        auto sample = [&](int xi, int yi) -> double {
          if (xi < 0 || xi >= img.width || yi < 0 || yi >= img.height) return 0.0;
          return img.at(xi, yi, ch);
        };
        const double top = sample(x0, y0) * (1 - fx) + sample(x0 + 1, y0) * fx;
        const double bot = sample(x0, y0 + 1) * (1 - fx) + sample(x0 + 1, y0 + 1) * fx;
        out.at(x, y, ch) = clamp_round(top * (1 - fy) + bot * fy);
      }
    }
  }
  return out;
}

ImageBuffer op_rotate(const ImageBuffer& img, double degrees) {
  const double rad = degrees * M_PI / 180.0;
  const double cx = (img.width - 1) / 2.0;
  const double cy = (img.height - 1) / 2.0;
  const double ca = std::cos(rad);
  const double sa = std::sin(rad);
  return affine(img, ca, -sa, cx - ca * cx + sa * cy, sa, ca, cy - sa * cx - ca * cy);
}

ImageBuffer op_shear_x(const ImageBuffer& img, double s) {
  return affine(img, 1, s, -s * (img.height - 1) / 2.0, 0, 1, 0);
}

ImageBuffer op_shear_y(const ImageBuffer& img, double s) {
  return affine(img, 1, 0, 0, s, 1, -s * (img.width - 1) / 2.0);
}

ImageBuffer op_translate_x(const ImageBuffer& img, double t) {
  return affine(img, 1, 0, t, 0, 1, 0);
}

ImageBuffer op_translate_y(const ImageBuffer& img, double t) {
  return affine(img, 1, 0, 0, 0, 1, t);
}

ImageBuffer op_autocontrast(const ImageBuffer& img) {
  ImageBuffer out = img;
  for (int ch = 0; ch < 3; ++ch) {
    std::uint8_t lo = 255, hi = 0;
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        lo = std::min(lo, img.at(x, y, ch));
        hi = std::max(hi, img.at(x, y, ch));
      }
    }
    if (hi <= lo) continue;
    const double scale = 255.0 / (hi - lo);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        out.at(x, y, ch) = clamp_round((img.at(x, y, ch) - lo) * scale);
      }
    }
  }
  return out;
}

ImageBuffer op_equalize(const ImageBuffer& img) {
  ImageBuffer out = img;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  for (int ch = 0; ch < 3; ++ch) {
    std::array<std::size_t, 256> hist{};
    for (std::size_t i = 0; i < n; ++i) hist[img.pixels[i * 3 + ch]]++;
    std::array<std::uint8_t, 256> lut{};
    std::size_t cum = 0;
    std::size_t nonzero_min = 0;
    for (int v = 0; v < 256; ++v) {
      if (hist[v] != 0) {
        nonzero_min = hist[v];
        break;
      }
    }
    const double denom = static_cast<double>(n) - static_cast<double>(nonzero_min);
    for (int v = 0; v < 256; ++v) {
      cum += hist[v];
      const double mapped = denom > 0 ? (static_cast<double>(cum) - nonzero_min) / denom * 255.0
                                      : v;
      lut[v] = clamp_round(mapped);
    }
    for (std::size_t i = 0; i < n; ++i) out.pixels[i * 3 + ch] = lut[img.pixels[i * 3 + ch]];
  }
  return out;
}

ImageBuffer op_posterize(const ImageBuffer& img, int bits) {
  const std::uint8_t mask = static_cast<std::uint8_t>(0xFF << (8 - bits));
  ImageBuffer out = img;
  for (std::uint8_t& v : out.pixels) v = static_cast<std::uint8_t>(v & mask);
  return out;
}

ImageBuffer op_solarize(const ImageBuffer& img, int threshold) {
  ImageBuffer out = img;
  for (std::uint8_t& v : out.pixels) {
    if (v >= threshold) v = static_cast<std::uint8_t>(255 - v);
  }
  return out;
}

/// One randomly chosen Augmix operation at the given severity.
ImageBuffer augmix_op(const ImageBuffer& img, int severity, Rng& rng) {
  const double level = severity / 5.0; // magnitude fraction
  const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
  switch (rng.uniform_int(0, 8)) {
    case 0: return op_autocontrast(img);
    case 1: return op_equalize(img);
    case 2: return op_posterize(img, 8 - static_cast<int>(std::lround(4 * level)));
    case 3: return op_solarize(img, 255 - static_cast<int>(std::lround(level * 128)));
    case 4: return op_rotate(img, sign * level * 30.0);
    case 5: return op_shear_x(img, sign * level * 0.3);
    case 6: return op_shear_y(img, sign * level * 0.3);
    case 7: return op_translate_x(img, sign * level * img.width / 3.0);
    default: return op_translate_y(img, sign * level * img.height / 3.0);
  }
}

} // namespace

ImageBuffer augmix(const ImageBuffer& img, const AugmixOptions& opt, Rng& rng) {
  if (opt.width < 1 || opt.depth_min < 1 || opt.depth_max < opt.depth_min) {
    throw std::invalid_argument("augmix: bad width/depth options");
  }

  // Dirichlet(1,...,1) chain weights via normalized exponentials.
  std::vector<double> weights(static_cast<std::size_t>(opt.width));
  double wsum = 0.0;
  for (double& w : weights) {
    w = -std::log(std::max(1e-300, 1.0 - rng.uniform()));
    wsum += w;
  }
  for (double& w : weights) w /= wsum;
  const double m = opt.mix_override ? *opt.mix_override : rng.uniform(); // Beta(1,1)

  std::vector<double> mixed(img.pixels.size(), 0.0);
  for (int chain = 0; chain < opt.width; ++chain) {
    ImageBuffer aug = img;
    const int depth = static_cast<int>(rng.uniform_int(opt.depth_min, opt.depth_max));
    for (int d = 0; d < depth; ++d) aug = augmix_op(aug, opt.severity, rng);
    for (std::size_t i = 0; i < mixed.size(); ++i) {
      mixed[i] += weights[static_cast<std::size_t>(chain)] * aug.pixels[i];
    }
  }

  ImageBuffer out(img.width, img.height, img.modality);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = clamp_round(m * img.pixels[i] + (1.0 - m) * mixed[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Policy composer
// ---------------------------------------------------------------------------

AugmentPolicy AugmentPolicy::preset(const std::string& name) {
  AugmentPolicy p;
  p.name = name;
  if (name == "Standard") return p;

  p.use_augmix = true;
  if (name == "Augmix") return p;
  if (name == "Augmix+S-REA") {
    p.local = LocalDaKind::SRea;
  } else if (name == "Augmix+MS-REA") {
    p.local = LocalDaKind::MsRea;
  } else if (name == "Augmix+S-PATCH") {
    p.local = LocalDaKind::SPatch;
  } else if (name == "Augmix+MS-PATCH") {
    p.local = LocalDaKind::MsPatch;
  } else if (name == "Augmix+M-PATCH-SS") {
    p.local = LocalDaKind::MPatchSS;
  } else if (name == "Augmix+M-PATCH-SD") {
    p.local = LocalDaKind::MPatchSD;
  } else if (name == "Augmix+M-PATCH-DD") {
    p.local = LocalDaKind::MPatchDD;
  } else if (name == "Augmix+Masking") {
    p.masking_probability = 1.0 / 8.0;
  } else if (name == "ML-MDA") {
    p.local = LocalDaKind::MsRea;
    p.masking_probability = 1.0 / 8.0;
  } else if (name == "Blur") {
    p.blur_probability = 1.0 / 8.0;
  } else if (name == "LumSat") {
    p.lum_sat_probability = 1.0 / 8.0;
  } else {
    throw std::invalid_argument("unknown augmentation preset: " + name);
  }
  return p;
}

std::vector<std::string> AugmentPolicy::preset_names() {
  return {"Standard",          "Augmix",           "Augmix+S-REA",     "Augmix+MS-REA",
          "Augmix+S-PATCH",    "Augmix+MS-PATCH",  "Augmix+M-PATCH-SS", "Augmix+M-PATCH-SD",
          "Augmix+M-PATCH-DD", "Augmix+Masking",   "ML-MDA",           "Blur",
          "LumSat"};
}

ImagePair apply_policy(const ImagePair& pair, const AugmentPolicy& policy, Rng& rng,
                       AugmentTrace* trace) {
  ImagePair out = pair;

  // Preprocessing: resize, crop with zero padding, flip. Draw order is
  // fixed: visible consumes before infrared within each step.
  if (policy.resize_w > 0 && policy.resize_h > 0) {
    out.visible = resize(out.visible, policy.resize_w, policy.resize_h);
    out.infrared = resize(out.infrared, policy.resize_w, policy.resize_h);
  }
  if (policy.crop_pad > 0) {
    out.visible = random_crop_with_padding(out.visible, policy.crop_pad, rng);
    out.infrared = random_crop_with_padding(out.infrared, policy.crop_pad, rng);
  }
  out.visible = horizontal_flip(out.visible, policy.flip_probability, rng);
  out.infrared = horizontal_flip(out.infrared, policy.flip_probability, rng);

  if (policy.use_augmix) {
    out.visible = augmix(out.visible, policy.augmix_options, rng);
    out.infrared = augmix(out.infrared, policy.augmix_options, rng);
  }

  switch (policy.local) {
    case LocalDaKind::None:
      break;
    case LocalDaKind::SRea: {
      const auto rect = soft_random_erase(out.visible, policy.erase, rng);
      if (trace) trace->s_rea_rect = rect;
      break;
    }
    case LocalDaKind::MsRea: {
      const auto rects = ms_rea(out, policy.erase, rng);
      if (trace) trace->ms_rea_rects = rects;
      break;
    }
    case LocalDaKind::SPatch: {
      if (rng.bernoulli(policy.erase.probability)) {
        const auto rects = self_patch_mix(out.visible, policy.erase, rng);
        if (trace) trace->s_patch_rects = rects;
      }
      break;
    }
    case LocalDaKind::MsPatch: {
      if (rng.bernoulli(policy.erase.probability)) {
        const auto rects = ms_patch(out, policy.erase, rng);
        if (trace) trace->ms_patch_rects = rects;
      }
      break;
    }
    case LocalDaKind::MPatchSS:
    case LocalDaKind::MPatchSD:
    case LocalDaKind::MPatchDD: {
      if (rng.bernoulli(policy.erase.probability)) {
        const PatchVariant variant = policy.local == LocalDaKind::MPatchSS ? PatchVariant::SS
                                     : policy.local == LocalDaKind::MPatchSD
                                         ? PatchVariant::SD
                                         : PatchVariant::DD;
        const auto rects = m_patch(out, variant, policy.erase, rng);
        if (trace) trace->m_patch_rects = rects;
      }
      break;
    }
  }

  if (policy.masking_probability > 0.0) {
    const auto masked = modality_mask(out, policy.masking_probability, rng);
    if (trace) trace->masked = masked;
  }
  if (policy.blur_probability > 0.0) intuitive_blur(out, policy.blur_probability, rng);
  if (policy.lum_sat_probability > 0.0) intuitive_lum_sat(out, policy.lum_sat_probability, rng);

  return out;
}

} // namespace mlmda
