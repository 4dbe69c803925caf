#ifndef MLMDA_METRICS_HPP_INCLUDED
#define MLMDA_METRICS_HPP_INCLUDED

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mlmda {

enum class DistanceMetric { Euclidean, Cosine };

DistanceMetric distance_metric_from_string(const std::string& s);
const char* to_string(DistanceMetric m);

/// Dense per-pair embeddings with (identity) metadata, immutable after load.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<std::int64_t> ids;        // canonical pair ids
  std::vector<std::int64_t> identities; // one per row
  std::vector<float> rows;              // ids.size() * dim, row-major

  std::size_t size() const { return ids.size(); }
  const float* row(std::size_t i) const { return rows.data() + i * dim; }
  void validate() const;
};

/// Binary format: magic "MLMDAEMB", u32 version, u32 dim, u64 rows, then
/// per row: i64 pair id, i64 identity, dim x f32. Little-endian.
void save_embeddings(const EmbeddingTable& t, const std::string& path);
EmbeddingTable load_embeddings(const std::string& path);
/// Debug text format: one row per line, id <TAB> identity <TAB> floats.
void save_embeddings_text(const EmbeddingTable& t, const std::string& path);
EmbeddingTable load_embeddings_text(const std::string& path);
/// Sniffs binary magic, falls back to text.
EmbeddingTable load_embeddings_any(const std::string& path);

/// v first, then i.
std::vector<float> concat_embeddings(const std::vector<float>& v, const std::vector<float>& i);

/// One probe's full gallery ordering, ascending distance; ties broken by
/// ascending canonical gallery id.
struct Ranking {
  std::int64_t probe_id = 0;
  std::vector<std::int64_t> gallery_ids; // in rank order
  std::vector<bool> positive;            // per rank
};

Ranking rank_gallery(const float* probe, std::size_t dim, std::int64_t probe_identity,
                     const EmbeddingTable& gallery, const std::vector<std::size_t>& gallery_rows,
                     DistanceMetric metric);

/// AP over the positive ranks; nullopt when the gallery holds no positive.
std::optional<double> average_precision(const Ranking& r);

/// INP = |positives| / rank of the last positive; nullopt without positives.
std::optional<double> inverse_negative_penalty(const Ranking& r);

/// 1 iff a positive appears within the top k ranks.
int cmc_at(const Ranking& r, std::size_t k);

struct TrialMetrics {
  double mAP = 0.0;
  double mINP = 0.0;
  double cmc1 = 0.0;
  double cmc5 = 0.0;
  double cmc10 = 0.0;
  std::size_t probes = 0;
  std::size_t excluded_probes = 0; // probes with no positive in gallery
};

struct EvalReport {
  std::vector<TrialMetrics> trials;
  double mean_mAP = 0.0, std_mAP = 0.0;
  double mean_mINP = 0.0, std_mINP = 0.0;
  double mean_cmc1 = 0.0, std_cmc1 = 0.0;
  std::size_t excluded_probes = 0;
  std::string metric_name;

  std::string to_table() const;              // human-readable
  std::string to_records() const;            // line-delimited machine format
};

/// LOOQ evaluation over one embedding table per pairing trial. Parallel
/// over probes with a fixed reduction order, so aggregates are byte-stable.
EvalReport evaluate_trials(const std::vector<EmbeddingTable>& trials, DistanceMetric metric,
                           bool l2_normalize = false);

/// Queries x models rank-1 outcome matrix for significance testing.
struct BinaryOutcomeMatrix {
  std::size_t models = 0;
  std::vector<std::uint8_t> entries; // queries x models, row-major

  std::size_t queries() const { return models == 0 ? 0 : entries.size() / models; }
  std::uint8_t at(std::size_t q, std::size_t m) const { return entries[q * models + m]; }
};

struct CochranResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Cochran's Q over k related binary outcome columns; p from the
/// chi-square survival function with k-1 dof. Degenerate denominator
/// (every row constant) yields Q=0, p=1.
CochranResult cochran_q(const BinaryOutcomeMatrix& m);

/// Forward-only batch-hard triplet loss (Euclidean distances).
double batch_hard_triplet_loss(const std::vector<std::vector<float>>& features,
                               const std::vector<std::int64_t>& labels, double margin);

/// Forward-only label-smoothed cross-entropy.
double label_smoothed_ce(const std::vector<std::vector<float>>& logits,
                         const std::vector<std::size_t>& labels, double epsilon);

} // namespace mlmda

#endif
