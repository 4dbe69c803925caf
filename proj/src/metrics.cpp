#include "mlmda/metrics.hpp"

#include "mlmda/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mlmda {

DistanceMetric distance_metric_from_string(const std::string& s) {
  if (s == "euclidean") return DistanceMetric::Euclidean;
  if (s == "cosine") return DistanceMetric::Cosine;
  throw std::invalid_argument("unknown distance metric: " + s);
}

const char* to_string(DistanceMetric m) {
  return m == DistanceMetric::Euclidean ? "euclidean" : "cosine";
}

void EmbeddingTable::validate() const {
  if (ids.size() != identities.size() || rows.size() != ids.size() * dim || dim == 0) {
    throw std::invalid_argument("EmbeddingTable: inconsistent sizes");
  }
  for (const float v : rows) {
    if (!std::isfinite(v)) throw std::invalid_argument("EmbeddingTable: non-finite value");
  }
}

namespace {

constexpr char kMagic[8] = {'M', 'L', 'M', 'D', 'A', 'E', 'M', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_le(std::ofstream& out, T v) {
  // Host is little-endian on every supported target.
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in, const std::string& path, std::size_t offset_hint) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw std::runtime_error("embedding file truncated near offset " +
                             std::to_string(offset_hint) + ": " + path);
  }
  return v;
}

} // namespace

void save_embeddings(const EmbeddingTable& t, const std::string& path) {
  t.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write embeddings: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_le(out, kVersion);
  write_le(out, static_cast<std::uint32_t>(t.dim));
  write_le(out, static_cast<std::uint64_t>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    write_le(out, t.ids[i]);
    write_le(out, t.identities[i]);
    out.write(reinterpret_cast<const char*>(t.row(i)),
              static_cast<std::streamsize>(t.dim * sizeof(float)));
  }
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read embeddings: " + path);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("bad embedding magic at offset 0: " + path);
  }
  const auto version = read_le<std::uint32_t>(in, path, 8);
  if (version != kVersion) {
    throw std::runtime_error("unsupported embedding version at offset 8: " + path);
  }
  EmbeddingTable t;
  t.dim = read_le<std::uint32_t>(in, path, 12);
  const auto rows = read_le<std::uint64_t>(in, path, 16);
  t.ids.resize(rows);
  t.identities.resize(rows);
  t.rows.resize(rows * t.dim);
  for (std::uint64_t i = 0; i < rows; ++i) {
    const std::size_t off = 24 + i * (16 + t.dim * 4);
    t.ids[i] = read_le<std::int64_t>(in, path, off);
    t.identities[i] = read_le<std::int64_t>(in, path, off + 8);
    if (!in.read(reinterpret_cast<char*>(t.rows.data() + i * t.dim),
                 static_cast<std::streamsize>(t.dim * sizeof(float)))) {
      throw std::runtime_error("embedding file truncated near offset " +
                               std::to_string(off + 16) + ": " + path);
    }
  }
  t.validate();
  return t;
}

void save_embeddings_text(const EmbeddingTable& t, const std::string& path) {
  t.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write embeddings: " + path);
  out.precision(9);
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << t.ids[i] << '\t' << t.identities[i] << '\t';
    for (std::size_t d = 0; d < t.dim; ++d) {
      if (d) out << ' ';
      out << t.row(i)[d];
    }
    out << '\n';
  }
}

EmbeddingTable load_embeddings_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read embeddings: " + path);
  EmbeddingTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string id_s, identity_s, values_s;
    if (!std::getline(is, id_s, '\t') || !std::getline(is, identity_s, '\t') ||
        !std::getline(is, values_s)) {
      throw std::runtime_error("malformed embedding line: " + line);
    }
    t.ids.push_back(std::stoll(id_s));
    t.identities.push_back(std::stoll(identity_s));
    std::istringstream vs(values_s);
    std::size_t count = 0;
    float v;
    while (vs >> v) {
      t.rows.push_back(v);
      ++count;
    }
    if (t.dim == 0) t.dim = count;
    if (count != t.dim) throw std::runtime_error("inconsistent embedding dims: " + path);
  }
  t.validate();
  return t;
}

EmbeddingTable load_embeddings_any(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read embeddings: " + path);
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  in.close();
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) == 0) return load_embeddings(path);
  return load_embeddings_text(path);
}

std::vector<float> concat_embeddings(const std::vector<float>& v, const std::vector<float>& i) {
  for (const float x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("concat_embeddings: non-finite input");
  }
  for (const float x : i) {
    if (!std::isfinite(x)) throw std::invalid_argument("concat_embeddings: non-finite input");
  }
  std::vector<float> out;
  out.reserve(v.size() + i.size());
  out.insert(out.end(), v.begin(), v.end());
  out.insert(out.end(), i.begin(), i.end());
  return out;
}

namespace {

double euclidean_sq(const float* a, const float* b, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    const double diff = static_cast<double>(a[d]) - b[d];
    acc += diff * diff;
  }
  return acc;
}

double cosine_distance(const float* a, const float* b, std::size_t dim) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    dot += static_cast<double>(a[d]) * b[d];
    na += static_cast<double>(a[d]) * a[d];
    nb += static_cast<double>(b[d]) * b[d];
  }
  const double denom = std::sqrt(na) * std::sqrt(nb);
  if (denom == 0.0) return 1.0;
  return 1.0 - dot / denom; // ranked ascending == descending similarity
}

} // namespace

Ranking rank_gallery(const float* probe, std::size_t dim, std::int64_t probe_identity,
                     const EmbeddingTable& gallery, const std::vector<std::size_t>& gallery_rows,
                     DistanceMetric metric) {
  if (gallery.dim != dim) throw std::invalid_argument("rank_gallery: dim mismatch");
  struct Entry {
    double dist;
    std::int64_t id;
    std::size_t row;
  };
  std::vector<Entry> entries;
  entries.reserve(gallery_rows.size());
  for (const std::size_t row : gallery_rows) {
    const double d = metric == DistanceMetric::Euclidean
                         ? euclidean_sq(probe, gallery.row(row), dim)
                         : cosine_distance(probe, gallery.row(row), dim);
    entries.push_back(Entry{d, gallery.ids[row], row});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id; // canonical id, not storage order
  });
  Ranking r;
  r.gallery_ids.reserve(entries.size());
  r.positive.reserve(entries.size());
  for (const Entry& e : entries) {
    r.gallery_ids.push_back(e.id);
    r.positive.push_back(gallery.identities[e.row] == probe_identity);
  }
  return r;
}

std::optional<double> average_precision(const Ranking& r) {
  std::size_t positives = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < r.positive.size(); ++k) {
    if (r.positive[k]) {
      ++positives;
      sum += static_cast<double>(positives) / static_cast<double>(k + 1);
    }
  }
  if (positives == 0) return std::nullopt;
  return sum / static_cast<double>(positives);
}

std::optional<double> inverse_negative_penalty(const Ranking& r) {
  std::size_t positives = 0;
  std::size_t hardest_rank = 0;
  for (std::size_t k = 0; k < r.positive.size(); ++k) {
    if (r.positive[k]) {
      ++positives;
      hardest_rank = k + 1;
    }
  }
  if (positives == 0) return std::nullopt;
  return static_cast<double>(positives) / static_cast<double>(hardest_rank);
}

int cmc_at(const Ranking& r, std::size_t k) {
  if (k < 1) throw std::invalid_argument("cmc_at: k must be >= 1");
  const std::size_t limit = std::min(k, r.positive.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (r.positive[i]) return 1;
  }
  return 0;
}

namespace {

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (const double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

} // namespace

EvalReport evaluate_trials(const std::vector<EmbeddingTable>& trials, DistanceMetric metric,
                           bool l2_normalize) {
  if (trials.empty()) throw std::invalid_argument("evaluate_trials: no trials");
  EvalReport report;
  report.metric_name = to_string(metric);

  for (const EmbeddingTable& raw : trials) {
    raw.validate();
    if (raw.size() < 2) throw std::invalid_argument("evaluate_trials: trial needs >= 2 rows");
    EmbeddingTable table = raw;
    if (l2_normalize) {
      for (std::size_t i = 0; i < table.size(); ++i) {
        float* row = table.rows.data() + i * table.dim;
        double norm = 0.0;
        for (std::size_t d = 0; d < table.dim; ++d) norm += static_cast<double>(row[d]) * row[d];
        norm = std::sqrt(norm);
        if (norm > 0.0) {
          for (std::size_t d = 0; d < table.dim; ++d) {
            row[d] = static_cast<float>(row[d] / norm);
          }
        }
      }
    }

    const std::size_t n = table.size();
    struct ProbeResult {
      double ap = 0.0, inp = 0.0;
      int c1 = 0, c5 = 0, c10 = 0;
      bool excluded = false;
    };
    std::vector<ProbeResult> results(n);

    // LOOQ: each row probes against all others. Parallel over probes;
    // the per-probe slots keep the reduction order fixed.
#pragma omp parallel for schedule(dynamic)
    for (long long pi = 0; pi < static_cast<long long>(n); ++pi) {
      const std::size_t p = static_cast<std::size_t>(pi);
      std::vector<std::size_t> gallery_rows;
      gallery_rows.reserve(n - 1);
      for (std::size_t g = 0; g < n; ++g) {
        if (g != p) gallery_rows.push_back(g);
      }
      const Ranking r = rank_gallery(table.row(p), table.dim, table.identities[p], table,
                                     gallery_rows, metric);
      const auto ap = average_precision(r);
      if (!ap) {
        results[p].excluded = true;
        continue;
      }
      results[p].ap = *ap;
      results[p].inp = *inverse_negative_penalty(r);
      results[p].c1 = cmc_at(r, 1);
      results[p].c5 = cmc_at(r, 5);
      results[p].c10 = cmc_at(r, 10);
    }

    TrialMetrics tm;
    std::size_t included = 0;
    for (const ProbeResult& pr : results) {
      if (pr.excluded) {
        ++tm.excluded_probes;
        continue;
      }
      ++included;
      tm.mAP += pr.ap;
      tm.mINP += pr.inp;
      tm.cmc1 += pr.c1;
      tm.cmc5 += pr.c5;
      tm.cmc10 += pr.c10;
    }
    if (included > 0) {
      tm.mAP /= static_cast<double>(included);
      tm.mINP /= static_cast<double>(included);
      tm.cmc1 /= static_cast<double>(included);
      tm.cmc5 /= static_cast<double>(included);
      tm.cmc10 /= static_cast<double>(included);
    }
    tm.probes = included;
    report.excluded_probes += tm.excluded_probes;
    report.trials.push_back(tm);
  }

  std::vector<double> maps, minps, cmc1s;
  for (const TrialMetrics& tm : report.trials) {
    maps.push_back(tm.mAP);
    minps.push_back(tm.mINP);
    cmc1s.push_back(tm.cmc1);
  }
  report.mean_mAP = mean_of(maps);
  report.std_mAP = sample_std(maps, report.mean_mAP);
  report.mean_mINP = mean_of(minps);
  report.std_mINP = sample_std(minps, report.mean_mINP);
  report.mean_cmc1 = mean_of(cmc1s);
  report.std_cmc1 = sample_std(cmc1s, report.mean_cmc1);
  return report;
}

std::string EvalReport::to_table() const {
  std::ostringstream os;
  os.precision(4);
  os << std::fixed;
  os << "trial    mAP     mINP    cmc@1   cmc@5   cmc@10  probes  excluded\n";
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const TrialMetrics& m = trials[t];
    os << t << "        " << m.mAP << "  " << m.mINP << "  " << m.cmc1 << "  " << m.cmc5
       << "  " << m.cmc10 << "  " << m.probes << "  " << m.excluded_probes << '\n';
  }
  os << "mean     " << mean_mAP << "  " << mean_mINP << "  " << mean_cmc1 << '\n';
  os << "std      " << std_mAP << "  " << std_mINP << "  " << std_cmc1 << '\n';
  os << "metric   " << metric_name << '\n';
  os << "excluded " << excluded_probes << '\n';
  return os.str();
}

std::string EvalReport::to_records() const {
  std::ostringstream os;
  os.precision(10);
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const TrialMetrics& m = trials[t];
    os << "trial\t" << t << "\t" << m.mAP << '\t' << m.mINP << '\t' << m.cmc1 << '\t'
       << m.cmc5 << '\t' << m.cmc10 << '\t' << m.probes << '\t' << m.excluded_probes << '\n';
  }
  os << "aggregate\tmAP\t" << mean_mAP << '\t' << std_mAP << '\n';
  os << "aggregate\tmINP\t" << mean_mINP << '\t' << std_mINP << '\n';
  os << "aggregate\tcmc1\t" << mean_cmc1 << '\t' << std_cmc1 << '\n';
  os << "aggregate\texcluded\t" << excluded_probes << '\n';
  return os.str();
}

CochranResult cochran_q(const BinaryOutcomeMatrix& m) {
  if (m.models < 2) throw std::invalid_argument("cochran_q: need >= 2 models");
  const std::size_t q = m.queries();
  if (q < 1 || m.entries.size() != q * m.models) {
    throw std::invalid_argument("cochran_q: malformed matrix");
  }
  const double k = static_cast<double>(m.models);
  std::vector<double> col_sums(m.models, 0.0);
  double row_sum_total = 0.0;
  double row_sum_sq = 0.0;
  for (std::size_t r = 0; r < q; ++r) {
    double l = 0.0;
    for (std::size_t c = 0; c < m.models; ++c) {
      const double e = m.at(r, c);
      col_sums[c] += e;
      l += e;
    }
    row_sum_total += l;
    row_sum_sq += l * l;
  }
  const double denom = k * row_sum_total - row_sum_sq;
  if (denom <= 0.0) return CochranResult{0.0, 1.0};
  const double g_bar = row_sum_total / k;
  double num = 0.0;
  for (const double g : col_sums) num += (g - g_bar) * (g - g_bar);
  const double statistic = k * (k - 1.0) * num / denom;
  return CochranResult{statistic, chi_square_sf(statistic, k - 1.0)};
}

double batch_hard_triplet_loss(const std::vector<std::vector<float>>& features,
                               const std::vector<std::int64_t>& labels, double margin) {
  const std::size_t n = features.size();
  if (n != labels.size() || n == 0) {
    throw std::invalid_argument("batch_hard_triplet_loss: size mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t same = 0;
    bool other = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (labels[j] == labels[i]) {
        ++same;
      } else {
        other = true;
      }
    }
    if (same < 2) {
      throw std::invalid_argument("batch_hard_triplet_loss: every label needs >= 2 samples");
    }
    if (!other) throw std::invalid_argument("batch_hard_triplet_loss: need >= 2 labels");
  }

  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double hardest_pos = 0.0;
    double hardest_neg = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == a) continue;
      const double d =
          std::sqrt(euclidean_sq(features[a].data(), features[j].data(), features[a].size()));
      if (labels[j] == labels[a]) {
        hardest_pos = std::max(hardest_pos, d);
      } else {
        hardest_neg = std::min(hardest_neg, d);
      }
    }
    total += std::max(0.0, margin + hardest_pos - hardest_neg);
  }
  return total / static_cast<double>(n);
}

double label_smoothed_ce(const std::vector<std::vector<float>>& logits,
                         const std::vector<std::size_t>& labels, double epsilon) {
  if (epsilon < 0.0 || epsilon >= 1.0) {
    throw std::invalid_argument("label_smoothed_ce: epsilon outside [0,1)");
  }
  if (logits.size() != labels.size() || logits.empty()) {
    throw std::invalid_argument("label_smoothed_ce: size mismatch");
  }
  const std::size_t classes = logits[0].size();
  if (classes < 2) throw std::invalid_argument("label_smoothed_ce: need >= 2 classes");

  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (logits[i].size() != classes) {
      throw std::invalid_argument("label_smoothed_ce: ragged logits");
    }
    if (labels[i] >= classes) throw std::invalid_argument("label_smoothed_ce: label out of range");
    double max_logit = logits[i][0];
    for (const float v : logits[i]) max_logit = std::max(max_logit, static_cast<double>(v));
    double lse = 0.0;
    for (const float v : logits[i]) lse += std::exp(v - max_logit);
    lse = std::log(lse) + max_logit;
    double loss = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      const double qc = c == labels[i] ? 1.0 - epsilon
                                       : epsilon / static_cast<double>(classes - 1);
      loss -= qc * (logits[i][c] - lse);
    }
    total += loss;
  }
  return total / static_cast<double>(logits.size());
}

} // namespace mlmda
