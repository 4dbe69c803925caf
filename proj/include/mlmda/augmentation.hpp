#ifndef MLMDA_AUGMENTATION_HPP_INCLUDED
#define MLMDA_AUGMENTATION_HPP_INCLUDED

#include "mlmda/image.hpp"
#include "mlmda/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mlmda {

// ---------------------------------------------------------------------------
// Soft random erasing (S-REA / MS-REA)
// ---------------------------------------------------------------------------

struct EraseParams {
  double probability = 0.5;
  double area_min = 0.02;
  double area_max = 0.4;
  double aspect_min = 0.3;
  double aspect_max = 3.3;
  double pixel_fill_fraction = 0.5;

  void validate() const;
};

/// Sample a rect from the (area, aspect) ranges; rejects out-of-bounds
/// draws up to 64 attempts, nullopt when none fits.
std::optional<Rect> sample_erase_rect(int width, int height, const EraseParams& p, Rng& rng);

/// Replace round(fill_fraction * area) uniformly chosen pixels inside the
/// rect with random values (grayscale values when gray_values is set).
void erase_in_rect(ImageBuffer& img, const Rect& rect, double fill_fraction,
                   bool gray_values, Rng& rng);

/// S-REA on one image. Gray replacement values are used for Infrared
/// inputs. Returns the rect that fired, if any.
std::optional<Rect> soft_random_erase(ImageBuffer& img, const EraseParams& p, Rng& rng);

struct MsReaRects {
  std::optional<Rect> visible;
  std::optional<Rect> infrared;
};

/// MS-REA: independent S-REA per modality.
MsReaRects ms_rea(ImagePair& pair, const EraseParams& p, Rng& rng);

// ---------------------------------------------------------------------------
// Patch mixing (S-PATCH / MS-PATCH / M-PATCH)
// ---------------------------------------------------------------------------

struct PatchRects {
  Rect src;
  Rect dst;
};

/// Copy the src rect and paste it at dst within the same image; the source
/// content is captured before the write. Rect sizes must match.
void paste_patch(ImageBuffer& img, const Rect& src, const Rect& dst);

/// S-PATCH: a random patch pasted at a random position in the same image.
PatchRects self_patch_mix(ImageBuffer& img, const EraseParams& geometry, Rng& rng);

struct MsPatchRects {
  PatchRects visible;
  PatchRects infrared;
};

/// MS-PATCH: S-PATCH on each modality independently.
MsPatchRects ms_patch(ImagePair& pair, const EraseParams& geometry, Rng& rng);

enum class PatchVariant { SS, SD, DD };

PatchVariant patch_variant_from_string(const std::string& s);
const char* to_string(PatchVariant v);

struct MPatchRects {
  Rect src_v;  // patch taken from the visible image
  Rect dst_i;  // where it lands on the infrared image
  Rect src_i;  // patch taken from the infrared image
  Rect dst_v;  // where it lands on the visible image
};

/**
 * M-PATCH: cross-modal patch exchange. SS shares one rect as source and
 * destination on both directions; SD shares the source, draws the
 * destinations; DD draws everything. The visible patch is grayscaled as
 * it is pasted onto the infrared image.
 */
MPatchRects m_patch(ImagePair& pair, PatchVariant variant, const EraseParams& geometry,
                    Rng& rng);

// ---------------------------------------------------------------------------
// Modality masking and the intuitive appendix operators
// ---------------------------------------------------------------------------

/// Blank exactly one modality (all-zero image), never both. Returns the
/// masked modality, if the trigger fired.
std::optional<Modality> modality_mask(ImagePair& pair, double masking_probability, Rng& rng);

/// Force-mask one modality (test/debug hook).
void mask_modality(ImagePair& pair, Modality which);

/// Gaussian blur (radius 3) on one equiprobably chosen modality, with the
/// given trigger probability.
void intuitive_blur(ImagePair& pair, double probability, Rng& rng);

/// Luminosity / saturation transfer: visible gets x2 or x0.5 intensity
/// (equiprobable), infrared gets a 1.5 gain; one modality drawn per
/// trigger.
void intuitive_lum_sat(ImagePair& pair, double probability, Rng& rng);

// ---------------------------------------------------------------------------
// Augmix
// ---------------------------------------------------------------------------

struct AugmixOptions {
  int width = 3;      // parallel chains
  int depth_min = 1;  // ops per chain drawn in [depth_min, depth_max]
  int depth_max = 3;
  int severity = 3;   // magnitude level in [1, 5]
  /// When set, forces the final original-vs-mixed weight (1.0 = identity).
  std::optional<double> mix_override;
};

/// Augmix: convex combination of `width` independently augmented chains
/// with the original image. Operation set: geometry and intensity
/// transforms disjoint from the corruption taxonomy.
ImageBuffer augmix(const ImageBuffer& img, const AugmixOptions& opt, Rng& rng);

// ---------------------------------------------------------------------------
// Policy composer
// ---------------------------------------------------------------------------

enum class LocalDaKind { None, SRea, MsRea, SPatch, MsPatch, MPatchSS, MPatchSD, MPatchDD };

struct AugmentPolicy {
  std::string name = "Standard";

  // Preprocessing (always first).
  int resize_w = 144;
  int resize_h = 288;
  int crop_pad = 10;
  double flip_probability = 0.5;

  bool use_augmix = false;
  AugmixOptions augmix_options;

  LocalDaKind local = LocalDaKind::None;
  EraseParams erase;  // also supplies patch geometry ranges

  double masking_probability = 0.0;
  double blur_probability = 0.0;
  double lum_sat_probability = 0.0;

  static AugmentPolicy preset(const std::string& name);
  static std::vector<std::string> preset_names();
};

/// Per-call audit trail of the rects the local operators touched.
struct AugmentTrace {
  MsReaRects ms_rea_rects;
  std::optional<Rect> s_rea_rect;
  std::optional<PatchRects> s_patch_rects;
  std::optional<MsPatchRects> ms_patch_rects;
  std::optional<MPatchRects> m_patch_rects;
  std::optional<Modality> masked;
};

/// Apply the policy in its declared order: preprocessing (resize, crop,
/// flip) -> Augmix -> local DA -> masking -> intuitive operators. Pure
/// function of (pair bytes, policy, rng seed).
ImagePair apply_policy(const ImagePair& pair, const AugmentPolicy& policy, Rng& rng,
                       AugmentTrace* trace = nullptr);

} // namespace mlmda

#endif
