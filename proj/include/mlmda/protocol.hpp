#ifndef MLMDA_PROTOCOL_HPP_INCLUDED
#define MLMDA_PROTOCOL_HPP_INCLUDED

#include "mlmda/image.hpp"
#include "mlmda/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mlmda {

enum class DatasetKind { SYSU, RegDB, TWORLD, Custom };

DatasetKind dataset_kind_from_string(const std::string& s);
const char* to_string(DatasetKind k);

struct ManifestRecord {
  std::string image_id;
  std::int64_t identity = 0;
  std::string camera;
  Modality modality = Modality::Visible;
  std::string path; // relative to the manifest location
};

/// Tab-separated dataset manifest with a one-line header:
///   # dataset=<kind>  paired=<0|1>
/// then one record per line: image_id, identity, camera, modality, path.
struct DatasetManifest {
  DatasetKind dataset_kind = DatasetKind::Custom;
  bool paired_cameras = false;
  std::vector<ManifestRecord> records;

  std::vector<std::int64_t> identities() const; // sorted unique
  std::vector<ManifestRecord> records_for(std::int64_t identity, Modality m) const;
};

DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& manifest, const std::string& path);

struct SplitSpec {
  std::vector<std::int64_t> train_identities;
  std::vector<std::int64_t> test_identities;
  std::vector<std::vector<std::int64_t>> folds; // partition of train
};

/// Deterministic identity split with the published per-dataset counts:
/// SYSU 395/96, RegDB 206/206, TWORLD 325/84; Custom uses the SYSU ratio.
SplitSpec split_identities(const DatasetManifest& manifest, std::uint64_t seed);

/// Adds k folds partitioning the train set (earliest folds absorb the
/// remainder, e.g. RegDB 206 -> 42,41,41,41,41).
SplitSpec make_folds(const SplitSpec& split, int k, std::uint64_t seed);

void save_split(const SplitSpec& split, const std::string& path);
SplitSpec load_split(const std::string& path);

struct ImagePairRef {
  std::int64_t identity = 0;
  std::string visible_id;
  std::string infrared_id;
};

struct PairingResult {
  std::vector<ImagePairRef> pairs;
  int trial_index = 0;
};

/**
 * Build V-I pairs over the given identities. Paired datasets use the
 * co-registered matching (sorted id order, seed-independent); unpaired
 * ones draw a uniform random matching of min(nV, nI) pairs per identity
 * with no image reused.
 */
PairingResult pair_images(const DatasetManifest& manifest,
                          const std::vector<std::int64_t>& identity_set, std::uint64_t seed);

/// `trials` independent pairings (seed-derived); paired datasets repeat
/// the single deterministic pairing.
std::vector<PairingResult> repeated_pairings(const DatasetManifest& manifest,
                                             const std::vector<std::int64_t>& identity_set,
                                             int trials, std::uint64_t master_seed);

void save_pairing(const PairingResult& pairing, const std::string& path);
PairingResult load_pairing(const std::string& path);

struct LooqTrial {
  std::size_t probe = 0;               // pair index
  std::vector<std::size_t> gallery;    // all other pair indices
};

/// One trial per pair; trial t probes pair t against all others.
std::vector<LooqTrial> looq_trials(const PairingResult& pairing);

/// P identities x K pair draws per batch; identities with fewer than K
/// pairs are sampled with replacement.
std::vector<std::vector<std::size_t>> pk_batches(const PairingResult& pairing, int P, int K,
                                                 int batches, std::uint64_t seed);

} // namespace mlmda

#endif
