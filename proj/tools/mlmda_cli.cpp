// mlmda command-line front end: manifest-driven corruption, augmentation
// preview, protocol generation, and evaluation with reproducible outputs.

#include "mlmda/augmentation.hpp"
#include "mlmda/corruption.hpp"
#include "mlmda/image_ops.hpp"
#include "mlmda/io.hpp"
#include "mlmda/metrics.hpp"
#include "mlmda/protocol.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

std::string default_out_root() {
  const char* env = std::getenv("MLMDA_OUT_ROOT");
  return env ? env : "out";
}

void write_config_snapshot(const fs::path& out_dir, const json& config) {
  std::ofstream out(out_dir / "config.json");
  if (!out) throw std::runtime_error("cannot write config snapshot");
  out << config.dump(2) << '\n';
}

int severity_flag_to_level(const std::string& severity, std::optional<int>& fixed) {
  if (severity == "random") {
    fixed.reset();
    return 0;
  }
  const int level = std::stoi(severity);
  if (level < 1 || level > 5) throw CLI::ValidationError("--severity must be random or 1..5");
  fixed = level;
  return level;
}

mlmda::ImagePair load_pair(const mlmda::DatasetManifest& manifest, const fs::path& base,
                           std::int64_t identity) {
  const auto vis = manifest.records_for(identity, mlmda::Modality::Visible);
  const auto ir = manifest.records_for(identity, mlmda::Modality::Infrared);
  if (vis.empty() || ir.empty()) {
    throw std::runtime_error("identity " + std::to_string(identity) + " lacks a modality");
  }
  mlmda::ImagePair pair;
  pair.identity = identity;
  pair.visible = mlmda::load_image((base / vis[0].path).string(), mlmda::Modality::Visible);
  pair.infrared = mlmda::load_image((base / ir[0].path).string(), mlmda::Modality::Infrared);
  pair.camera_v = vis[0].camera;
  pair.camera_i = ir[0].camera;
  return pair;
}

/// 2x2 grid: before pair on top, after pair below. Cells are resized to a
/// common size so originals of any shape fit.
mlmda::ImageBuffer make_grid(const mlmda::ImagePair& before, const mlmda::ImagePair& after) {
  const int cw = after.visible.width;
  const int ch = after.visible.height;
  const auto bv = mlmda::resize(before.visible, cw, ch);
  const auto bi = mlmda::resize(before.infrared, cw, ch);
  mlmda::ImageBuffer grid(cw * 2, ch * 2, mlmda::Modality::Visible);
  auto blit = [&](const mlmda::ImageBuffer& src, int ox, int oy) {
    for (int y = 0; y < src.height; ++y) {
      for (int x = 0; x < src.width; ++x) {
        for (int c = 0; c < 3; ++c) grid.at(ox + x, oy + y, c) = src.at(x, y, c);
      }
    }
  };
  blit(bv, 0, 0);
  blit(bi, cw, 0);
  blit(after.visible, 0, ch);
  blit(after.infrared, cw, ch);
  return grid;
}

std::string rect_str(const mlmda::Rect& r) {
  return std::to_string(r.x) + "," + std::to_string(r.y) + "," + std::to_string(r.w) + "," +
         std::to_string(r.h);
}

int cmd_corrupt(const std::string& manifest_path, const std::string& mode,
                const std::string& severity, std::uint64_t seed, const std::string& out,
                int workers, const std::string& params_path) {
  const auto manifest = mlmda::load_manifest(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  const fs::path out_dir(out);
  fs::create_directories(out_dir / "images");

  mlmda::CorruptionPolicy policy;
  policy.mode = mlmda::corruption_mode_from_string(mode);
  severity_flag_to_level(severity, policy.fixed_level);
  const auto params = params_path.empty() ? mlmda::CorruptionParams::defaults()
                                          : mlmda::CorruptionParams::load(params_path);

  std::vector<mlmda::CorruptDatasetItem> items;
  for (const auto& r : manifest.records) {
    const fs::path out_path = out_dir / "images" / r.path;
    fs::create_directories(out_path.parent_path());
    items.push_back({r.image_id, r.modality, (base / r.path).string(), out_path.string()});
  }

  const auto result = mlmda::corrupt_dataset(items, policy, seed, workers, params);
  mlmda::write_record_log(result.records, (out_dir / "records.tsv").string());
  write_config_snapshot(out_dir, json{{"command", "corrupt"},
                                      {"manifest", manifest_path},
                                      {"mode", mode},
                                      {"severity", severity},
                                      {"seed", seed},
                                      {"workers", workers},
                                      {"params", params_path},
                                      {"out", out}});
  for (const auto& e : result.errors) std::cerr << "error: " << e << '\n';
  std::cout << "corrupted " << result.records.size() << " of " << items.size()
            << " images -> " << out << '\n';
  return result.errors.empty() ? kExitOk : kExitIo;
}

int cmd_augment_preview(const std::string& manifest_path, const std::string& preset, int n,
                        std::uint64_t seed, const std::string& out) {
  const auto policy = mlmda::AugmentPolicy::preset(preset);
  const auto manifest = mlmda::load_manifest(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  const fs::path out_dir(out);
  fs::create_directories(out_dir);

  const auto identities = manifest.identities();
  std::ofstream rect_log(out_dir / "rects.tsv");
  for (int i = 0; i < n; ++i) {
    const std::int64_t identity = identities[static_cast<std::size_t>(i) % identities.size()];
    const auto before = load_pair(manifest, base, identity);
    mlmda::Rng rng = mlmda::Rng::derive(seed, static_cast<std::uint64_t>(i));
    mlmda::AugmentTrace trace;
    const auto after = mlmda::apply_policy(before, policy, rng, &trace);
    mlmda::save_png(make_grid(before, after),
                    (out_dir / ("grid_" + std::to_string(i) + ".png")).string());
    auto log_rect = [&](const char* op, const mlmda::Rect& r) {
      rect_log << i << '\t' << op << '\t' << rect_str(r) << '\n';
    };
    if (trace.s_rea_rect) log_rect("s-rea", *trace.s_rea_rect);
    if (trace.ms_rea_rects.visible) log_rect("ms-rea-v", *trace.ms_rea_rects.visible);
    if (trace.ms_rea_rects.infrared) log_rect("ms-rea-i", *trace.ms_rea_rects.infrared);
    if (trace.s_patch_rects) {
      log_rect("s-patch-src", trace.s_patch_rects->src);
      log_rect("s-patch-dst", trace.s_patch_rects->dst);
    }
    if (trace.ms_patch_rects) {
      log_rect("ms-patch-v-src", trace.ms_patch_rects->visible.src);
      log_rect("ms-patch-v-dst", trace.ms_patch_rects->visible.dst);
      log_rect("ms-patch-i-src", trace.ms_patch_rects->infrared.src);
      log_rect("ms-patch-i-dst", trace.ms_patch_rects->infrared.dst);
    }
    if (trace.m_patch_rects) {
      log_rect("m-patch-src-v", trace.m_patch_rects->src_v);
      log_rect("m-patch-dst-i", trace.m_patch_rects->dst_i);
      log_rect("m-patch-src-i", trace.m_patch_rects->src_i);
      log_rect("m-patch-dst-v", trace.m_patch_rects->dst_v);
    }
    if (trace.masked) rect_log << i << "\tmasked\t" << mlmda::to_string(*trace.masked) << '\n';
  }
  write_config_snapshot(out_dir, json{{"command", "augment-preview"},
                                      {"manifest", manifest_path},
                                      {"preset", preset},
                                      {"n", n},
                                      {"seed", seed},
                                      {"out", out}});
  std::cout << "wrote " << n << " preview grids -> " << out << '\n';
  return kExitOk;
}

int cmd_split(const std::string& manifest_path, std::uint64_t seed, int folds,
              const std::string& out) {
  const auto manifest = mlmda::load_manifest(manifest_path);
  auto split = mlmda::split_identities(manifest, seed);
  split = mlmda::make_folds(split, folds, seed);
  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  mlmda::save_split(split, (out_dir / "split.tsv").string());
  write_config_snapshot(out_dir, json{{"command", "split"},
                                      {"manifest", manifest_path},
                                      {"seed", seed},
                                      {"folds", folds},
                                      {"out", out}});
  std::cout << "split: " << split.train_identities.size() << " train / "
            << split.test_identities.size() << " test, " << split.folds.size() << " folds -> "
            << out << '\n';
  return kExitOk;
}

int cmd_pair(const std::string& manifest_path, std::uint64_t seed, int trials,
             const std::string& split_path, const std::string& subset, const std::string& out) {
  const auto manifest = mlmda::load_manifest(manifest_path);
  std::vector<std::int64_t> identity_set;
  if (split_path.empty()) {
    identity_set = manifest.identities();
  } else {
    const auto split = mlmda::load_split(split_path);
    if (subset == "train") {
      identity_set = split.train_identities;
    } else if (subset == "test") {
      identity_set = split.test_identities;
    } else {
      identity_set = split.train_identities;
      identity_set.insert(identity_set.end(), split.test_identities.begin(),
                          split.test_identities.end());
    }
  }
  const auto pairings = mlmda::repeated_pairings(manifest, identity_set, trials, seed);
  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  for (const auto& p : pairings) {
    mlmda::save_pairing(p, (out_dir / ("pairs_" + std::to_string(p.trial_index) + ".tsv")).string());
  }
  write_config_snapshot(out_dir, json{{"command", "pair"},
                                      {"manifest", manifest_path},
                                      {"seed", seed},
                                      {"trials", trials},
                                      {"split", split_path},
                                      {"subset", subset},
                                      {"out", out}});
  std::cout << "wrote " << pairings.size() << " pairing files -> " << out << '\n';
  return kExitOk;
}

int cmd_evaluate(const std::string& embeddings_path, const std::string& metric_name,
                 bool l2_normalize, const std::string& pairing_path, const std::string& out) {
  // One file = one trial; a directory is evaluated as a set of trials in
  // lexicographic filename order.
  std::vector<mlmda::EmbeddingTable> tables;
  if (fs::is_directory(embeddings_path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(embeddings_path)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) tables.push_back(mlmda::load_embeddings_any(f.string()));
  } else {
    tables.push_back(mlmda::load_embeddings_any(embeddings_path));
  }
  if (tables.empty()) {
    std::cerr << "error: no embedding files found at " << embeddings_path << '\n';
    return kExitData;
  }

  if (!pairing_path.empty()) {
    // Coverage check: every pair index of the pairing must have a row.
    const auto pairing = mlmda::load_pairing(pairing_path);
    for (const auto& table : tables) {
      std::vector<bool> present(pairing.pairs.size(), false);
      for (const auto id : table.ids) {
        if (id >= 0 && static_cast<std::size_t>(id) < present.size()) {
          present[static_cast<std::size_t>(id)] = true;
        }
      }
      for (std::size_t i = 0; i < present.size(); ++i) {
        if (!present[i]) {
          std::cerr << "error: no embedding for pair " << i << " (identity "
                    << pairing.pairs[i].identity << ", " << pairing.pairs[i].visible_id << "/"
                    << pairing.pairs[i].infrared_id << ")\n";
          return kExitData;
        }
      }
    }
  }

  const auto metric = mlmda::distance_metric_from_string(metric_name);
  const auto report = mlmda::evaluate_trials(tables, metric, l2_normalize);
  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  {
    std::ofstream t(out_dir / "report.txt");
    t << report.to_table();
    std::ofstream r(out_dir / "report.tsv");
    r << report.to_records();
  }
  write_config_snapshot(out_dir, json{{"command", "evaluate"},
                                      {"embeddings", embeddings_path},
                                      {"metric", metric_name},
                                      {"l2_normalize", l2_normalize},
                                      {"pairing", pairing_path},
                                      {"out", out}});
  std::cout << report.to_table();
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal visible-infrared corruption benchmark, augmentation, and "
               "person-ReID evaluation toolkit"};
  app.require_subcommand(1);

  std::string manifest, out = default_out_root();
  std::uint64_t seed = 0;

  // corrupt
  auto* corrupt = app.add_subcommand("corrupt", "Corrupt a dataset per the -C / -C* policies");
  std::string mode = "c-star", severity = "random", params_path;
  int workers = 0;
  corrupt->add_option("--manifest", manifest, "dataset manifest")->required();
  corrupt->add_option("--mode", mode, "clean | c | c-star")->capture_default_str();
  corrupt->add_option("--severity", severity, "random | 1..5")->capture_default_str();
  corrupt->add_option("--seed", seed, "master seed")->capture_default_str();
  corrupt->add_option("--workers", workers, "worker threads (0 = default)");
  corrupt->add_option("--params", params_path, "corruption parameter JSON override");
  corrupt->add_option("--out", out, "output directory")->capture_default_str();

  // augment-preview
  auto* preview = app.add_subcommand("augment-preview", "Write before/after grids for a preset");
  std::string preset = "ML-MDA";
  int n = 4;
  preview->add_option("--manifest", manifest, "dataset manifest")->required();
  preview->add_option("--preset", preset, "augmentation preset name")->capture_default_str();
  preview->add_option("-n,--samples", n, "number of preview samples")->capture_default_str();
  preview->add_option("--seed", seed, "master seed")->capture_default_str();
  preview->add_option("--out", out, "output directory")->capture_default_str();

  // split
  auto* split = app.add_subcommand("split", "Identity split + k folds");
  int folds = 5;
  split->add_option("--manifest", manifest, "dataset manifest")->required();
  split->add_option("--seed", seed, "split seed")->capture_default_str();
  split->add_option("--folds", folds, "fold count")->capture_default_str();
  split->add_option("--out", out, "output directory")->capture_default_str();

  // pair
  auto* pair = app.add_subcommand("pair", "V-I pairings for LOOQ evaluation");
  int trials = 1;
  std::string split_path, subset = "test";
  pair->add_option("--manifest", manifest, "dataset manifest")->required();
  pair->add_option("--seed", seed, "pairing master seed")->capture_default_str();
  pair->add_option("--trials", trials, "number of pairing trials")->capture_default_str();
  pair->add_option("--split", split_path, "split file restricting identities");
  pair->add_option("--subset", subset, "test | train | all")->capture_default_str();
  pair->add_option("--out", out, "output directory")->capture_default_str();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "LOOQ mAP/mINP/CMC report from embeddings");
  std::string embeddings, metric = "euclidean", pairing_path;
  bool l2 = false;
  evaluate->add_option("--embeddings", embeddings, "embedding file or directory")->required();
  evaluate->add_option("--metric", metric, "euclidean | cosine")->capture_default_str();
  evaluate->add_flag("--l2-normalize", l2, "L2-normalize rows before matching");
  evaluate->add_option("--pairing", pairing_path, "pairing file for coverage checking");
  evaluate->add_option("--out", out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (corrupt->parsed()) {
      return cmd_corrupt(manifest, mode, severity, seed, out, workers, params_path);
    }
    if (preview->parsed()) return cmd_augment_preview(manifest, preset, n, seed, out);
    if (split->parsed()) return cmd_split(manifest, seed, folds, out);
    if (pair->parsed()) return cmd_pair(manifest, seed, trials, split_path, subset, out);
    if (evaluate->parsed()) return cmd_evaluate(embeddings, metric, l2, pairing_path, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
