#ifndef MLMDA_IO_HPP_INCLUDED
#define MLMDA_IO_HPP_INCLUDED

#include "mlmda/image.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mlmda {

/// Decode a PNG or JPEG file (sniffed by magic bytes). 1-channel files
/// are replicated to 3 channels; the modality tag is set by the caller.
ImageBuffer load_image(const std::string& path, Modality modality);

/// Encoder chosen by extension (.png, .jpg, .jpeg).
void save_image(const ImageBuffer& img, const std::string& path);

void save_png(const ImageBuffer& img, const std::string& path);
void save_jpeg(const ImageBuffer& img, const std::string& path, int quality = 90);

/// In-memory baseline JPEG round trip, used by the JPEG corruption.
/// grayscale=true encodes a single-component stream from channel 0.
std::vector<std::uint8_t> encode_jpeg(const ImageBuffer& img, int quality, bool grayscale);
ImageBuffer decode_jpeg(const std::vector<std::uint8_t>& bytes, Modality modality);

} // namespace mlmda

#endif
