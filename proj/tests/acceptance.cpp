// Acceptance gate: one pass/fail line per criterion, exit nonzero on any
// failure. Each check is oracle- or property-based and self-contained.

#include "mlmda/augmentation.hpp"
#include "mlmda/corruption.hpp"
#include "mlmda/image_ops.hpp"
#include "mlmda/io.hpp"
#include "mlmda/metrics.hpp"
#include "mlmda/protocol.hpp"
#include "mlmda/special_math.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <set>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace mlmda;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ImageBuffer probe_image(int w, int h, Modality m, std::uint64_t seed) {
  ImageBuffer img(w, h, m);
  Rng rng(seed);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double base = 40.0 + 150.0 * x / w + 40.0 * std::sin(y * 0.37);
      if (m == Modality::Infrared) {
        const auto v = clamp_round(base + rng.uniform(-25, 25));
        img.at(x, y, 0) = img.at(x, y, 1) = img.at(x, y, 2) = v;
      } else {
        img.at(x, y, 0) = clamp_round(base + rng.uniform(-25, 25));
        img.at(x, y, 1) = clamp_round(base * 0.8 + rng.uniform(-25, 25));
        img.at(x, y, 2) = clamp_round(base * 1.15 + rng.uniform(-25, 25));
      }
    }
  }
  return img;
}

DatasetManifest synthetic_manifest(DatasetKind kind, int identities,
                                   const std::function<int(int)>& nv,
                                   const std::function<int(int)>& ni) {
  DatasetManifest m;
  m.dataset_kind = kind;
  for (int id = 0; id < identities; ++id) {
    for (int j = 0; j < nv(id); ++j) {
      m.records.push_back({"v_" + std::to_string(id) + "_" + std::to_string(j), id, "cam1",
                           Modality::Visible, ""});
    }
    for (int j = 0; j < ni(id); ++j) {
      m.records.push_back({"i_" + std::to_string(id) + "_" + std::to_string(j), id, "cam2",
                           Modality::Infrared, ""});
    }
  }
  return m;
}

// --- criterion 1: ranking metrics vs an independent brute-force oracle ------

struct OracleMetrics {
  double ap = -1.0; // -1 encodes "no positives"
  double inp = -1.0;
  int cmc1 = 0, cmc5 = 0;
};

/// Independent re-derivation: sort (distance, id) pairs with plain
/// std::sort, then walk the ranks accumulating precision directly.
OracleMetrics brute_force(const std::vector<std::vector<double>>& gallery,
                          const std::vector<std::int64_t>& ids,
                          const std::vector<int>& identities,
                          const std::vector<double>& probe, int probe_identity) {
  struct Entry {
    double dist;
    std::int64_t id;
    bool positive;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < gallery.size(); ++i) {
    double d = 0.0;
    for (std::size_t k = 0; k < probe.size(); ++k) {
      d += (gallery[i][k] - probe[k]) * (gallery[i][k] - probe[k]);
    }
    entries.push_back({d, ids[i], identities[i] == probe_identity});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.dist != b.dist ? a.dist < b.dist : a.id < b.id;
  });
  OracleMetrics out;
  int positives_seen = 0, total_positives = 0;
  double ap_sum = 0.0;
  int last_positive_rank = 0;
  for (std::size_t r = 0; r < entries.size(); ++r) {
    if (entries[r].positive) {
      ++positives_seen;
      ap_sum += static_cast<double>(positives_seen) / static_cast<double>(r + 1);
      last_positive_rank = static_cast<int>(r + 1);
      if (r < 1) out.cmc1 = 1;
      if (r < 5) out.cmc5 = 1;
    }
  }
  total_positives = positives_seen;
  if (total_positives > 0) {
    out.ap = ap_sum / total_positives;
    out.inp = static_cast<double>(total_positives) / last_positive_rank;
  }
  return out;
}

bool criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  for (int trial = 0; trial < 1000; ++trial) {
    const int g = static_cast<int>(rng.uniform_int(1, 8));
    const int dim = static_cast<int>(rng.uniform_int(1, 4));
    EmbeddingTable table;
    table.dim = static_cast<std::size_t>(dim);
    std::vector<std::vector<double>> gallery_d;
    std::vector<int> identities;
    std::vector<std::size_t> rows;
    for (int i = 0; i < g; ++i) {
      table.ids.push_back(trial * 10 + i);
      const int identity = static_cast<int>(rng.uniform_int(0, 2));
      table.identities.push_back(identity);
      identities.push_back(identity);
      std::vector<double> row;
      for (int d = 0; d < dim; ++d) {
        // Coarse grid so distance ties actually happen.
        const double v = static_cast<double>(rng.uniform_int(0, 3));
        row.push_back(v);
        table.rows.push_back(static_cast<float>(v));
      }
      gallery_d.push_back(row);
      rows.push_back(static_cast<std::size_t>(i));
    }
    std::vector<float> probe_f;
    std::vector<double> probe_d;
    for (int d = 0; d < dim; ++d) {
      const double v = static_cast<double>(rng.uniform_int(0, 3));
      probe_f.push_back(static_cast<float>(v));
      probe_d.push_back(v);
    }
    const int probe_identity = static_cast<int>(rng.uniform_int(0, 2));

    const Ranking r = rank_gallery(probe_f.data(), table.dim, probe_identity, table, rows,
                                   DistanceMetric::Euclidean);
    const auto lib_ap = average_precision(r);
    const auto lib_inp = inverse_negative_penalty(r);
    const OracleMetrics oracle =
        brute_force(gallery_d, table.ids, identities, probe_d, probe_identity);

    if (oracle.ap < 0.0) {
      if (lib_ap.has_value() || lib_inp.has_value()) return false;
    } else {
      if (!lib_ap || std::abs(*lib_ap - oracle.ap) > 1e-12) return false;
      if (!lib_inp || std::abs(*lib_inp - oracle.inp) > 1e-12) return false;
      if (cmc_at(r, 1) != oracle.cmc1) return false;
      if (cmc_at(r, 5) != oracle.cmc5) return false;
    }
  }
  return seconds_since(t0) < 5.0;
}

bool criterion_2() {
  Ranking r13;
  r13.gallery_ids = {0, 1, 2, 3, 4};
  r13.positive = {true, false, true, false, false};
  if (std::abs(*average_precision(r13) - 0.833333333333333) > 1e-9 + 4e-16) return false;
  if (std::abs(*average_precision(r13) - 5.0 / 6.0) > 1e-12) return false;
  if (std::abs(*inverse_negative_penalty(r13) - 2.0 / 3.0) > 1e-12) return false;
  // Uniform logits: smoothed cross-entropy is exactly ln C.
  for (const std::size_t C : {2u, 5u, 17u}) {
    const std::vector<std::vector<float>> logits(1, std::vector<float>(C, 0.f));
    const double loss = label_smoothed_ce(logits, {0}, 0.1);
    if (std::abs(loss - std::log(static_cast<double>(C))) > 1e-9) return false;
  }
  return true;
}

bool criterion_3() {
  struct Case {
    DatasetKind kind;
    int identities, train, test, fold0;
  };
  for (const Case c : {Case{DatasetKind::SYSU, 491, 395, 96, 79},
                       Case{DatasetKind::RegDB, 412, 206, 206, 42},
                       Case{DatasetKind::TWORLD, 409, 325, 84, 65}}) {
    const auto m = synthetic_manifest(c.kind, c.identities, [](int) { return 1; },
                                      [](int) { return 1; });
    auto split = split_identities(m, 7);
    if (split.train_identities.size() != static_cast<std::size_t>(c.train)) return false;
    if (split.test_identities.size() != static_cast<std::size_t>(c.test)) return false;
    split = make_folds(split, 5, 7);
    if (split.folds.size() != 5) return false;
    if (split.folds[0].size() != static_cast<std::size_t>(c.fold0)) return false;
    std::size_t total = 0;
    for (const auto& f : split.folds) total += f.size();
    if (total != split.train_identities.size()) return false;
  }
  // LOOQ on N pairs: N trials, each with gallery N-1.
  const auto m = synthetic_manifest(DatasetKind::SYSU, 12, [](int) { return 2; },
                                    [](int) { return 2; });
  const auto pairing = pair_images(m, m.identities(), 3);
  const auto trials = looq_trials(pairing);
  if (trials.size() != pairing.pairs.size()) return false;
  for (const auto& t : trials) {
    if (t.gallery.size() != pairing.pairs.size() - 1) return false;
  }
  return true;
}

bool criterion_4() {
  // 500 identities with uneven modality counts, verified by exhaustive scan.
  Rng shape(4004);
  std::vector<int> nv(500), ni(500);
  for (int i = 0; i < 500; ++i) {
    nv[i] = static_cast<int>(shape.uniform_int(1, 10));
    ni[i] = static_cast<int>(shape.uniform_int(1, 10));
  }
  const auto m = synthetic_manifest(DatasetKind::SYSU, 500, [&](int id) { return nv[id]; },
                                    [&](int id) { return ni[id]; });
  const auto t0 = std::chrono::steady_clock::now();
  const auto pairing = pair_images(m, m.identities(), 9);
  std::size_t expected = 0;
  for (int i = 0; i < 500; ++i) expected += static_cast<std::size_t>(std::min(nv[i], ni[i]));
  if (pairing.pairs.size() != expected) return false;
  std::set<std::string> used;
  std::vector<std::size_t> per_identity(500, 0);
  for (const auto& p : pairing.pairs) {
    if (!used.insert(p.visible_id).second) return false;
    if (!used.insert(p.infrared_id).second) return false;
    per_identity[static_cast<std::size_t>(p.identity)] += 1;
  }
  for (int i = 0; i < 500; ++i) {
    if (per_identity[static_cast<std::size_t>(i)] !=
        static_cast<std::size_t>(std::min(nv[i], ni[i]))) {
      return false;
    }
  }
  return seconds_since(t0) < 1.0;
}

bool criterion_5() {
  const auto ir_kinds = applicable_kinds(Modality::Infrared);
  if (ir_kinds.size() != 19) return false;
  if (std::find(ir_kinds.begin(), ir_kinds.end(), CorruptionKind::Brightness) != ir_kinds.end()) {
    return false;
  }
  const ImageBuffer ir = probe_image(48, 96, Modality::Infrared, 5005);
  Rng rng(5006);
  try {
    apply_corruption(ir, CorruptionKind::Brightness, Severity(3), rng);
    return false;
  } catch (const NotApplicableError&) {
  }
  for (const auto kind : ir_kinds) {
    for (int level = 1; level <= 5; ++level) {
      Rng r(5007);
      const ImageBuffer out = apply_corruption(ir, kind, Severity(level), r);
      // max|R-G| = max|R-B| = 0, i.e. exactly gray.
      if (!out.is_single_channel()) return false;
    }
  }
  return true;
}

bool criterion_6() {
  std::vector<ImageBuffer> probes;
  for (int i = 0; i < 16; ++i) probes.push_back(probe_image(48, 96, Modality::Visible, 6000 + i));
  for (const auto kind : {CorruptionKind::GaussianNoise, CorruptionKind::ShotNoise,
                          CorruptionKind::DefocusBlur, CorruptionKind::GaussianBlur}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int level = 1; level <= 5; ++level) {
      double mean = 0.0;
      for (std::size_t i = 0; i < probes.size(); ++i) {
        Rng rng(6100 + i);
        mean += psnr(probes[i], apply_corruption(probes[i], kind, Severity(level), rng));
      }
      mean /= static_cast<double>(probes.size());
      if (!(mean < prev)) return false;
      prev = mean;
    }
  }
  return true;
}

bool criterion_7() {
  const ImagePair base{probe_image(16, 32, Modality::Visible, 7001),
                       probe_image(16, 32, Modality::Infrared, 7002)};
  Rng rng(7003);
  int events = 0, visible = 0;
  for (int i = 0; i < 80000; ++i) {
    ImagePair pair = base;
    const auto which = modality_mask(pair, 1.0 / 8.0, rng);
    if (which) {
      ++events;
      visible += *which == Modality::Visible;
    }
  }
  if (events < 9500 || events > 10500) return false;
  const double split = static_cast<double>(visible) / events;
  return split >= 0.47 && split <= 0.53;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    sa += (a[i] - ma) * (a[i] - ma);
    sb += (b[i] - mb) * (b[i] - mb);
  }
  if (sa == 0.0 || sb == 0.0) return 0.0;
  return sab / std::sqrt(sa * sb);
}

bool criterion_8() {
  const int w = 64, h = 128, n = 10000;
  // Positions correlate with the (shared) patch size, so independence is
  // measured on offsets normalized by the available slack: x / (W - w).
  auto norm_x = [&](const Rect& r) {
    return w - r.w > 0 ? static_cast<double>(r.x) / (w - r.w) : 0.5;
  };
  auto norm_y = [&](const Rect& r) {
    return h - r.h > 0 ? static_cast<double>(r.y) / (h - r.h) : 0.5;
  };
  for (const auto variant : {PatchVariant::SS, PatchVariant::SD, PatchVariant::DD}) {
    Rng rng(8000 + static_cast<int>(variant));
    std::vector<MPatchRects> tuples;
    for (int i = 0; i < n; ++i) {
      ImagePair pair{probe_image(w, h, Modality::Visible, 8100),
                     probe_image(w, h, Modality::Infrared, 8101)};
      tuples.push_back(m_patch(pair, variant, EraseParams{}, rng));
    }
    if (variant == PatchVariant::SS) {
      for (const auto& t : tuples) {
        if (!(t.src_v == t.dst_i && t.src_v == t.src_i && t.src_v == t.dst_v)) return false;
      }
      continue;
    }
    if (variant == PatchVariant::SD) {
      std::vector<double> di_x, dv_x, di_y, dv_y, src_x;
      for (const auto& t : tuples) {
        if (!(t.src_v == t.src_i)) return false;
        di_x.push_back(norm_x(t.dst_i));
        dv_x.push_back(norm_x(t.dst_v));
        di_y.push_back(norm_y(t.dst_i));
        dv_y.push_back(norm_y(t.dst_v));
        src_x.push_back(norm_x(t.src_v));
      }
      if (std::abs(pearson(di_x, dv_x)) >= 0.05) return false;
      if (std::abs(pearson(di_y, dv_y)) >= 0.05) return false;
      if (std::abs(pearson(src_x, di_x)) >= 0.05) return false;
      if (std::abs(pearson(src_x, dv_x)) >= 0.05) return false;
      continue;
    }
    // DD: all four rects mutually independent in both axes.
    std::vector<std::vector<double>> xs(4), ys(4);
    for (const auto& t : tuples) {
      const Rect* rects[4] = {&t.src_v, &t.dst_i, &t.src_i, &t.dst_v};
      for (int k = 0; k < 4; ++k) {
        xs[static_cast<std::size_t>(k)].push_back(norm_x(*rects[k]));
        ys[static_cast<std::size_t>(k)].push_back(norm_y(*rects[k]));
      }
    }
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) {
        if (std::abs(pearson(xs[a], xs[b])) >= 0.05) return false;
        if (std::abs(pearson(ys[a], ys[b])) >= 0.05) return false;
      }
    }
  }
  return true;
}

bool criterion_9() {
  const fs::path root = fs::temp_directory_path() / "mlmda_acceptance_det";
  fs::remove_all(root);

  // Part A: corrupt_dataset over 100 images, four runs, byte-identical trees.
  std::vector<fs::path> inputs;
  for (int i = 0; i < 100; ++i) {
    const Modality m = i % 2 ? Modality::Infrared : Modality::Visible;
    const fs::path p = root / "in" / (std::to_string(i) + ".png");
    fs::create_directories(p.parent_path());
    save_png(probe_image(32, 48, m, 9000 + i), p.string());
    inputs.push_back(p);
  }
  auto run_corrupt = [&](const std::string& tag, int workers) {
    std::vector<CorruptDatasetItem> items;
    for (int i = 0; i < 100; ++i) {
      const Modality m = i % 2 ? Modality::Infrared : Modality::Visible;
      const fs::path out = root / tag / (std::to_string(i) + ".png");
      fs::create_directories(out.parent_path());
      items.push_back({std::to_string(i), m, inputs[static_cast<std::size_t>(i)].string(),
                       out.string()});
    }
    const auto result = corrupt_dataset(items, {CorruptionMode::Both_Cstar, {}}, 909, workers);
    return result.errors.empty();
  };
  if (!run_corrupt("w1", 1) || !run_corrupt("w8", 8) || !run_corrupt("w1b", 1) ||
      !run_corrupt("w8b", 8)) {
    return false;
  }
  auto tree_bytes = [&](const std::string& tag) {
    std::vector<std::uint8_t> all;
    for (int i = 0; i < 100; ++i) {
      std::ifstream in(root / tag / (std::to_string(i) + ".png"), std::ios::binary);
      all.insert(all.end(), std::istreambuf_iterator<char>(in), {});
    }
    return all;
  };
  const auto ref = tree_bytes("w1");
  if (ref.empty()) return false;
  for (const char* tag : {"w8", "w1b", "w8b"}) {
    if (tree_bytes(tag) != ref) return false;
  }

  // Part B: apply_policy over 100 pairs under 1 and 8 threads, re-run.
  std::vector<ImagePair> pairs;
  for (int i = 0; i < 100; ++i) {
    pairs.push_back({probe_image(40, 80, Modality::Visible, 9500 + i),
                     probe_image(40, 80, Modality::Infrared, 9600 + i)});
  }
  const auto policy = AugmentPolicy::preset("ML-MDA");
  auto run_policy = [&](int threads) {
    std::vector<ImagePair> out(pairs.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
      Rng rng = Rng::derive(911, static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] =
          apply_policy(pairs[static_cast<std::size_t>(i)], policy, rng);
    }
    return out;
  };
  const auto p1 = run_policy(1);
  return run_policy(8) == p1 && run_policy(1) == p1 && run_policy(8) == p1;
}

bool criterion_10() {
  // Identical columns: every model agrees on every query.
  BinaryOutcomeMatrix same;
  same.models = 4;
  for (int q = 0; q < 10; ++q) {
    const std::uint8_t v = q % 2;
    for (int m = 0; m < 4; ++m) same.entries.push_back(v);
  }
  const auto rs = cochran_q(same);
  if (rs.statistic != 0.0 || rs.p_value != 1.0) return false;

  // 200 random matrices vs an independent direct-formula oracle.
  Rng rng(1010);
  for (int trial = 0; trial < 200; ++trial) {
    BinaryOutcomeMatrix m;
    m.models = static_cast<std::size_t>(rng.uniform_int(2, 6));
    const int q = static_cast<int>(rng.uniform_int(3, 40));
    for (int i = 0; i < static_cast<int>(m.models) * q; ++i) {
      m.entries.push_back(static_cast<std::uint8_t>(rng.bernoulli(0.5)));
    }
    const auto r = cochran_q(m);
    const double k = static_cast<double>(m.models);
    std::vector<double> G(m.models, 0.0);
    double sumL = 0.0, sumL2 = 0.0;
    for (int i = 0; i < q; ++i) {
      double L = 0.0;
      for (std::size_t j = 0; j < m.models; ++j) {
        G[j] += m.at(static_cast<std::size_t>(i), j);
        L += m.at(static_cast<std::size_t>(i), j);
      }
      sumL += L;
      sumL2 += L * L;
    }
    double gbar = 0.0;
    for (const double g : G) gbar += g;
    gbar /= k;
    double num = 0.0;
    for (const double g : G) num += (g - gbar) * (g - gbar);
    num *= k * (k - 1.0);
    const double den = k * sumL - sumL2;
    const double expect_q = den <= 0.0 ? 0.0 : num / den;
    const double expect_p = den <= 0.0 ? 1.0 : chi_square_sf(expect_q, k - 1.0);
    if (std::abs(r.statistic - expect_q) > 1e-10) return false;
    if (std::abs(r.p_value - expect_p) > 1e-10) return false;

    // k = 2 cross-check against the McNemar statistic (b-c)^2 / (b+c).
    if (m.models == 2) {
      int b = 0, c = 0;
      for (int i = 0; i < q; ++i) {
        const auto x = m.at(static_cast<std::size_t>(i), 0);
        const auto y = m.at(static_cast<std::size_t>(i), 1);
        b += x == 1 && y == 0;
        c += x == 0 && y == 1;
      }
      const double mcnemar = b + c == 0 ? 0.0 : static_cast<double>((b - c) * (b - c)) / (b + c);
      if (std::abs(r.statistic - mcnemar) > 1e-10) return false;
    }
  }
  return true;
}

bool criterion_11() {
  const auto t0 = std::chrono::steady_clock::now();
  // 10 identities x (10 visible + 10 infrared) = 200 images.
  const auto m = synthetic_manifest(DatasetKind::Custom, 10, [](int) { return 10; },
                                    [](int) { return 10; });
  auto split = split_identities(m, 11);
  if (split.train_identities.size() + split.test_identities.size() != 10) return false;
  const auto pairing = pair_images(m, m.identities(), 12);
  if (pairing.pairs.size() != 100) return false;
  const auto trials = looq_trials(pairing);
  if (trials.size() != 100) return false;

  // Noise-free one-hot embeddings indexed by pair identity.
  EmbeddingTable table;
  table.dim = 10;
  for (std::size_t i = 0; i < pairing.pairs.size(); ++i) {
    table.ids.push_back(static_cast<std::int64_t>(i));
    table.identities.push_back(pairing.pairs[i].identity);
    for (std::size_t d = 0; d < table.dim; ++d) {
      table.rows.push_back(d == static_cast<std::size_t>(pairing.pairs[i].identity) ? 1.f : 0.f);
    }
  }
  const auto report = evaluate_trials({table}, DistanceMetric::Euclidean);
  if (report.trials.size() != 1) return false;
  if (std::abs(report.trials[0].mAP - 1.0) > 1e-12) return false;
  if (std::abs(report.trials[0].mINP - 1.0) > 1e-12) return false;
  if (std::abs(report.trials[0].cmc1 - 1.0) > 1e-12) return false;
  return seconds_since(t0) < 60.0;
}

} // namespace

int main() {
  struct Criterion {
    const char* label;
    bool (*fn)();
  };
  const Criterion criteria[] = {
      {"1. ranking metrics match the brute-force oracle (1000 cases, <5s)", criterion_1},
      {"2. hand-value checks for AP, INP, smoothed cross-entropy", criterion_2},
      {"3. exact split/fold counts and leave-one-out trial shapes", criterion_3},
      {"4. pairing uses min(nV,nI) with no image reuse (500 identities, <1s)", criterion_4},
      {"5. 19 infrared corruption kinds, brightness rejected, gray sweep", criterion_5},
      {"6. mean PSNR strictly decreases with severity for calibrated kinds", criterion_6},
      {"7. masking rate and modality balance at p=1/8 over 80000 calls", criterion_7},
      {"8. cross-modal patch rect geometry per variant (10000 tuples each)", criterion_8},
      {"9. corruption and augmentation byte-identical across worker counts", criterion_9},
      {"10. Cochran Q degenerate case, formula oracle, McNemar cross-check", criterion_10},
      {"11. end-to-end split/pair/evaluate reports perfect scores (<60s)", criterion_11},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      std::printf("[FAIL] %s (exception: %s)\n", c.label, e.what());
      ++failures;
      continue;
    }
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", c.label);
    failures += !ok;
  }
  return failures == 0 ? 0 : 1;
}
