#include "mlmda/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mlmda {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, '\t')) fields.push_back(field);
  return fields;
}

/// Deterministic Fisher-Yates shuffle driven by the counter-based rng.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(v[i - 1], v[j]);
  }
}

} // namespace

DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "SYSU" || s == "sysu") return DatasetKind::SYSU;
  if (s == "RegDB" || s == "regdb") return DatasetKind::RegDB;
  if (s == "TWORLD" || s == "tworld") return DatasetKind::TWORLD;
  if (s == "Custom" || s == "custom") return DatasetKind::Custom;
  throw std::invalid_argument("unknown dataset kind: " + s);
}

const char* to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::SYSU: return "SYSU";
    case DatasetKind::RegDB: return "RegDB";
    case DatasetKind::TWORLD: return "TWORLD";
    case DatasetKind::Custom: return "Custom";
  }
  return "?";
}

std::vector<std::int64_t> DatasetManifest::identities() const {
  std::set<std::int64_t> ids;
  for (const auto& r : records) ids.insert(r.identity);
  return {ids.begin(), ids.end()};
}

std::vector<ManifestRecord> DatasetManifest::records_for(std::int64_t identity,
                                                         Modality m) const {
  std::vector<ManifestRecord> out;
  for (const auto& r : records) {
    if (r.identity == identity && r.modality == m) out.push_back(r);
  }
  return out;
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);

  DatasetManifest m;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty manifest: " + path);
  {
    // Header: "# dataset=<kind>\tpaired=<0|1>" (whitespace tolerated).
    std::istringstream hs(line);
    std::string tok;
    bool saw_dataset = false;
    while (hs >> tok) {
      if (tok.rfind("dataset=", 0) == 0) {
        m.dataset_kind = dataset_kind_from_string(tok.substr(8));
        saw_dataset = true;
      } else if (tok.rfind("paired=", 0) == 0) {
        m.paired_cameras = tok.substr(7) == "1" || tok.substr(7) == "true";
      }
    }
    if (line.empty() || line[0] != '#' || !saw_dataset) {
      throw std::invalid_argument("manifest missing '# dataset=... paired=...' header: " + path);
    }
  }

  std::set<std::string> seen_ids;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_tabs(line);
    if (f.size() != 5) {
      throw std::invalid_argument("manifest line " + std::to_string(lineno) +
                               ": expected 5 tab-separated fields");
    }
    ManifestRecord r;
    r.image_id = f[0];
    r.identity = std::stoll(f[1]);
    r.camera = f[2];
    r.modality = modality_from_string(f[3]);
    r.path = f[4];
    if (!seen_ids.insert(r.image_id).second) {
      throw std::invalid_argument("duplicate image_id in manifest: " + r.image_id);
    }
    m.records.push_back(std::move(r));
  }

  // Every identity needs at least one image per modality.
  std::map<std::int64_t, std::pair<int, int>> counts;
  for (const auto& r : m.records) {
    auto& c = counts[r.identity];
    (r.modality == Modality::Visible ? c.first : c.second)++;
  }
  for (const auto& [identity, c] : counts) {
    if (c.first == 0 || c.second == 0) {
      throw std::invalid_argument("identity " + std::to_string(identity) + " lacks " +
                               (c.first == 0 ? "visible" : "infrared") + " images");
    }
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << "# dataset=" << to_string(manifest.dataset_kind)
      << "\tpaired=" << (manifest.paired_cameras ? 1 : 0) << '\n';
  for (const auto& r : manifest.records) {
    out << r.image_id << '\t' << r.identity << '\t' << r.camera << '\t'
        << to_string(r.modality) << '\t' << r.path << '\n';
  }
}

SplitSpec split_identities(const DatasetManifest& manifest, std::uint64_t seed) {
  std::vector<std::int64_t> ids = manifest.identities();
  std::size_t train_count = 0;
  switch (manifest.dataset_kind) {
    case DatasetKind::SYSU: train_count = 395; break;
    case DatasetKind::RegDB: train_count = 206; break;
    case DatasetKind::TWORLD: train_count = 325; break;
    case DatasetKind::Custom:
      train_count = static_cast<std::size_t>(
          std::lround(static_cast<double>(ids.size()) * 395.0 / 491.0));
      break;
  }
  if (ids.size() <= train_count && manifest.dataset_kind != DatasetKind::Custom) {
    throw std::invalid_argument("dataset has " + std::to_string(ids.size()) +
                             " identities; need more than " + std::to_string(train_count) +
                             " for a " + to_string(manifest.dataset_kind) + " split");
  }
  if (manifest.dataset_kind == DatasetKind::Custom && train_count == ids.size()) {
    if (train_count == 0) throw std::invalid_argument("dataset has no identities");
    --train_count; // keep at least one test identity
  }

  Rng rng(seed);
  shuffle(ids, rng);
  SplitSpec s;
  s.train_identities.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(train_count));
  s.test_identities.assign(ids.begin() + static_cast<std::ptrdiff_t>(train_count), ids.end());
  std::sort(s.train_identities.begin(), s.train_identities.end());
  std::sort(s.test_identities.begin(), s.test_identities.end());
  return s;
}

SplitSpec make_folds(const SplitSpec& split, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("make_folds: k must be >= 2");
  if (static_cast<std::size_t>(k) > split.train_identities.size()) {
    throw std::invalid_argument("make_folds: k exceeds train identity count");
  }
  std::vector<std::int64_t> ids = split.train_identities;
  Rng rng(seed);
  shuffle(ids, rng);

  SplitSpec out = split;
  out.folds.assign(static_cast<std::size_t>(k), {});
  const std::size_t base = ids.size() / static_cast<std::size_t>(k);
  const std::size_t extra = ids.size() % static_cast<std::size_t>(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < static_cast<std::size_t>(k); ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    out.folds[f].assign(ids.begin() + static_cast<std::ptrdiff_t>(pos),
                        ids.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(out.folds[f].begin(), out.folds[f].end());
    pos += size;
  }
  return out;
}

void save_split(const SplitSpec& split, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write split: " + path);
  for (const auto id : split.train_identities) out << "train\t" << id << '\n';
  for (const auto id : split.test_identities) out << "test\t" << id << '\n';
  for (std::size_t f = 0; f < split.folds.size(); ++f) {
    for (const auto id : split.folds[f]) out << "fold" << f << '\t' << id << '\n';
  }
}

SplitSpec load_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read split: " + path);
  SplitSpec s;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != 2) throw std::invalid_argument("malformed split line: " + line);
    const std::int64_t id = std::stoll(f[1]);
    if (f[0] == "train") {
      s.train_identities.push_back(id);
    } else if (f[0] == "test") {
      s.test_identities.push_back(id);
    } else if (f[0].rfind("fold", 0) == 0) {
      const std::size_t fold = std::stoul(f[0].substr(4));
      if (s.folds.size() <= fold) s.folds.resize(fold + 1);
      s.folds[fold].push_back(id);
    } else {
      throw std::invalid_argument("malformed split tag: " + f[0]);
    }
  }
  return s;
}

PairingResult pair_images(const DatasetManifest& manifest,
                          const std::vector<std::int64_t>& identity_set, std::uint64_t seed) {
  PairingResult result;
  Rng rng(seed);
  std::vector<std::int64_t> ids = identity_set;
  std::sort(ids.begin(), ids.end());
  for (const std::int64_t identity : ids) {
    auto vis = manifest.records_for(identity, Modality::Visible);
    auto ir = manifest.records_for(identity, Modality::Infrared);
    if (vis.empty() || ir.empty()) {
      throw std::invalid_argument("identity " + std::to_string(identity) +
                                  " lacks images in one modality");
    }
    auto by_id = [](const ManifestRecord& a, const ManifestRecord& b) {
      return a.image_id < b.image_id;
    };
    std::sort(vis.begin(), vis.end(), by_id);
    std::sort(ir.begin(), ir.end(), by_id);
    if (!manifest.paired_cameras) {
      // Uniform random matching under the no-reuse constraint: shuffle
      // both sides, zip the shorter length.
      shuffle(vis, rng);
      shuffle(ir, rng);
    }
    const std::size_t n = std::min(vis.size(), ir.size());
    for (std::size_t i = 0; i < n; ++i) {
      result.pairs.push_back(ImagePairRef{identity, vis[i].image_id, ir[i].image_id});
    }
  }
  return result;
}

std::vector<PairingResult> repeated_pairings(const DatasetManifest& manifest,
                                             const std::vector<std::int64_t>& identity_set,
                                             int trials, std::uint64_t master_seed) {
  if (trials < 1) throw std::invalid_argument("repeated_pairings: trials must be >= 1");
  std::vector<PairingResult> out;
  out.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t seed = Rng::derive(master_seed, static_cast<std::uint64_t>(t)).next_u64();
    PairingResult p = pair_images(manifest, identity_set, seed);
    p.trial_index = t;
    out.push_back(std::move(p));
  }
  return out;
}

void save_pairing(const PairingResult& pairing, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write pairing: " + path);
  out << "# trial=" << pairing.trial_index << '\n';
  for (const auto& p : pairing.pairs) {
    out << p.identity << '\t' << p.visible_id << '\t' << p.infrared_id << '\n';
  }
}

PairingResult load_pairing(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read pairing: " + path);
  PairingResult r;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("trial=");
      if (pos != std::string::npos) r.trial_index = std::stoi(line.substr(pos + 6));
      continue;
    }
    const auto f = split_tabs(line);
    if (f.size() != 3) throw std::invalid_argument("malformed pairing line: " + line);
    r.pairs.push_back(ImagePairRef{std::stoll(f[0]), f[1], f[2]});
  }
  return r;
}

std::vector<LooqTrial> looq_trials(const PairingResult& pairing) {
  const std::size_t n = pairing.pairs.size();
  if (n < 2) throw std::invalid_argument("looq_trials: need at least 2 pairs");
  std::vector<LooqTrial> trials(n);
  for (std::size_t t = 0; t < n; ++t) {
    trials[t].probe = t;
    trials[t].gallery.reserve(n - 1);
    for (std::size_t g = 0; g < n; ++g) {
      if (g != t) trials[t].gallery.push_back(g);
    }
  }
  return trials;
}

std::vector<std::vector<std::size_t>> pk_batches(const PairingResult& pairing, int P, int K,
                                                 int batches, std::uint64_t seed) {
  if (P < 1 || K < 1 || batches < 1) {
    throw std::invalid_argument("pk_batches: P, K, batches must be >= 1");
  }
  std::map<std::int64_t, std::vector<std::size_t>> by_identity;
  for (std::size_t i = 0; i < pairing.pairs.size(); ++i) {
    by_identity[pairing.pairs[i].identity].push_back(i);
  }
  if (by_identity.size() < static_cast<std::size_t>(P)) {
    throw std::invalid_argument("pk_batches: fewer than P identities with pairs");
  }
  std::vector<std::int64_t> identities;
  for (const auto& [id, _] : by_identity) identities.push_back(id);

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(static_cast<std::size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    std::vector<std::int64_t> pool = identities;
    shuffle(pool, rng);
    std::vector<std::size_t> batch;
    batch.reserve(static_cast<std::size_t>(P) * K);
    for (int p = 0; p < P; ++p) {
      const auto& pairs = by_identity[pool[static_cast<std::size_t>(p)]];
      if (pairs.size() >= static_cast<std::size_t>(K)) {
        std::vector<std::size_t> local = pairs;
        shuffle(local, rng);
        batch.insert(batch.end(), local.begin(), local.begin() + K);
      } else {
        for (int k = 0; k < K; ++k) {
          batch.push_back(pairs[static_cast<std::size_t>(
              rng.uniform_int(0, static_cast<std::int64_t>(pairs.size()) - 1))]);
        }
      }
    }
    out.push_back(std::move(batch));
  }
  return out;
}

} // namespace mlmda
