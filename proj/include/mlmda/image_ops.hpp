#ifndef MLMDA_IMAGE_OPS_HPP_INCLUDED
#define MLMDA_IMAGE_OPS_HPP_INCLUDED

#include "mlmda/image.hpp"
#include "mlmda/kernels.hpp"
#include "mlmda/rng.hpp"

#include <vector>

namespace mlmda {

/// Split into float planes: 3 for Visible, 1 for Infrared (channel 0).
std::vector<Plane> to_planes(const ImageBuffer& img);

/// Recompose planes into an image; a single plane is replicated across
/// the three channels. Values are rounded half-up and clamped.
ImageBuffer from_planes(const std::vector<Plane>& planes, Modality modality);

/// Bilinear resize; modality tag preserved.
ImageBuffer resize(const ImageBuffer& img, int w, int h, Exec exec = Exec::Parallel);

/// Zero-pad by `pad` on every side, then crop a window of the original
/// size at a uniformly drawn offset.
ImageBuffer random_crop_with_padding(const ImageBuffer& img, int pad, Rng& rng);

/// Deterministic column mirror.
ImageBuffer flip_horizontal(const ImageBuffer& img);

/// Mirror with probability p.
ImageBuffer horizontal_flip(const ImageBuffer& img, double p, Rng& rng);

/// BT.601 luminance, replicated to all channels.
ImageBuffer to_grayscale(const ImageBuffer& img);

/// Peak signal-to-noise ratio (peak 255); +infinity for identical images.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

} // namespace mlmda

#endif
