#ifndef MLMDA_CORRUPTION_HPP_INCLUDED
#define MLMDA_CORRUPTION_HPP_INCLUDED

#include "mlmda/image.hpp"
#include "mlmda/rng.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mlmda {

enum class CorruptionKind {
  GaussianNoise,
  ShotNoise,
  ImpulseNoise,
  SpeckleNoise,
  DefocusBlur,
  GlassBlur,
  MotionBlur,
  ZoomBlur,
  GaussianBlur,
  Snow,
  Frost,
  Fog,
  Rain,
  Spatter,
  Brightness,
  Contrast,
  ElasticTransform,
  Pixelate,
  JpegCompression,
  Saturate,
};

constexpr int kCorruptionKindCount = 20;

const char* to_string(CorruptionKind kind);
CorruptionKind corruption_kind_from_string(const std::string& name);

/// Thrown when a corruption cannot be applied to the given modality
/// (Brightness on Infrared).
class NotApplicableError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Severity level in [1, 5].
struct Severity {
  int level;

  explicit Severity(int l) : level(l) {
    if (l < 1 || l > 5) throw std::invalid_argument("Severity: level outside [1,5]");
  }
};

/**
 * Per-kind, per-severity parameter table. Defaults follow the common
 * published severity conventions for these corruptions; the same table
 * ships as data/corruption_params.json and can be overridden from file.
 */
struct CorruptionParams {
  std::array<double, 5> gaussian_noise_sigma;  // intensity units [0,255] scale: sigma/255
  std::array<double, 5> shot_noise_photons;
  std::array<double, 5> impulse_amount;
  std::array<double, 5> speckle_sigma;
  std::array<int, 5> defocus_radius;
  std::array<double, 5> glass_sigma;
  std::array<int, 5> glass_delta;
  std::array<int, 5> glass_iters;
  std::array<int, 5> motion_length;
  std::array<double, 5> zoom_max;
  std::array<double, 5> gaussian_blur_sigma;
  std::array<double, 5> snow_density;
  std::array<double, 5> frost_strength;
  std::array<double, 5> fog_strength;
  std::array<double, 5> rain_density;
  std::array<double, 5> spatter_coverage;
  std::array<double, 5> brightness_shift;      // fraction of 255
  std::array<double, 5> contrast_scale;
  std::array<double, 5> elastic_alpha;         // displacement in pixels
  std::array<double, 5> elastic_sigma;
  std::array<double, 5> pixelate_factor;
  std::array<int, 5> jpeg_quality;
  std::array<double, 5> saturate_scale;
  std::array<double, 5> saturate_shift;        // fraction of 255

  static const CorruptionParams& defaults();
  static CorruptionParams load(const std::string& json_path);
  void save(const std::string& json_path) const;
};

/// Kinds valid for a modality: all 20 for Visible, 19 for Infrared
/// (Brightness excluded; Saturate kept, executed as a brightness
/// transfer on Infrared).
std::vector<CorruptionKind> applicable_kinds(Modality modality);

/// Apply one corruption. Deterministic in (img, kind, severity, rng
/// state); dims preserved; Infrared outputs keep R=G=B everywhere.
ImageBuffer apply_corruption(const ImageBuffer& img, CorruptionKind kind,
                             Severity severity, Rng& rng,
                             const CorruptionParams& params = CorruptionParams::defaults());

enum class CorruptionMode { Clean, RgbOnly_C, Both_Cstar };

CorruptionMode corruption_mode_from_string(const std::string& s);
const char* to_string(CorruptionMode mode);

struct CorruptionPolicy {
  CorruptionMode mode = CorruptionMode::Both_Cstar;
  /// Fixed level when set, otherwise uniform over [1,5].
  std::optional<int> fixed_level;
};

struct CorruptionRecord {
  std::string image_id;
  Modality modality;
  CorruptionKind kind;
  int severity;
  std::uint64_t seed;

  std::string to_line() const;
  static CorruptionRecord from_line(const std::string& line);
};

/// Corrupt each modality independently per policy. Records carry the
/// per-image seed needed for byte-exact replay.
ImagePair corrupt_pair(const ImagePair& pair, const CorruptionPolicy& policy,
                             Rng& rng, std::vector<CorruptionRecord>* records = nullptr,
                             const CorruptionParams& params = CorruptionParams::defaults());

struct CorruptDatasetItem {
  std::string image_id;
  Modality modality;
  std::string input_path;   // file to read
  std::string output_path;  // file to write
};

struct CorruptDatasetResult {
  std::vector<CorruptionRecord> records;          // sorted by item index
  std::vector<std::string> errors;                // per-item failure messages
};

/**
 * Corrupt every listed image. The per-image stream is derived as
 * Rng::derive(master_seed, item index), so output is independent of the
 * worker count and iteration order. workers <= 0 uses the OpenMP default.
 */
CorruptDatasetResult corrupt_dataset(const std::vector<CorruptDatasetItem>& items,
                                     const CorruptionPolicy& policy,
                                     std::uint64_t master_seed, int workers = 0,
                                     const CorruptionParams& params = CorruptionParams::defaults());

/// Serialize records as the tab-separated replay log.
void write_record_log(const std::vector<CorruptionRecord>& records, const std::string& path);
std::vector<CorruptionRecord> read_record_log(const std::string& path);

} // namespace mlmda

#endif
