#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mlmda/corruption.hpp"
#include "mlmda/io.hpp"
#include "mlmda/metrics.hpp"
#include "mlmda/protocol.hpp"
#include "mlmda/rng.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(MLMDA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

/// Small on-disk dataset: `identities` ids x (2 visible + 2 infrared) PNGs.
fs::path make_dataset(const fs::path& dir, int identities) {
  fs::create_directories(dir / "img");
  mlmda::DatasetManifest manifest;
  manifest.dataset_kind = mlmda::DatasetKind::Custom;
  mlmda::Rng rng(1);
  for (int id = 0; id < identities; ++id) {
    for (int j = 0; j < 2; ++j) {
      for (const auto m : {mlmda::Modality::Visible, mlmda::Modality::Infrared}) {
        mlmda::ManifestRecord r;
        r.image_id = std::string(m == mlmda::Modality::Visible ? "v" : "i") + "_" +
                     std::to_string(id) + "_" + std::to_string(j);
        r.identity = id;
        r.camera = m == mlmda::Modality::Visible ? "cam1" : "cam2";
        r.modality = m;
        r.path = "img/" + r.image_id + ".png";
        manifest.records.push_back(r);

        mlmda::ImageBuffer img(24, 32, m);
        for (int y = 0; y < 32; ++y) {
          for (int x = 0; x < 24; ++x) {
            const auto v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
            img.at(x, y, 0) = v;
            img.at(x, y, 1) = m == mlmda::Modality::Infrared
                                  ? v
                                  : static_cast<std::uint8_t>(rng.uniform_int(0, 255));
            img.at(x, y, 2) = m == mlmda::Modality::Infrared
                                  ? v
                                  : static_cast<std::uint8_t>(rng.uniform_int(0, 255));
          }
        }
        mlmda::save_png(img, (dir / r.path).string());
      }
    }
  }
  const fs::path manifest_path = dir / "manifest.tsv";
  mlmda::save_manifest(manifest, manifest_path.string());
  return manifest_path;
}

} // namespace

TEST_CASE("cli usage errors exit with code 1") {
  CHECK(run("") == 1);
  CHECK(run("no-such-command") == 1);
  CHECK(run("corrupt") == 1); // missing required --manifest
  CHECK(run("--help") == 0);
}

TEST_CASE("cli data and io errors use exit codes 2 and 3") {
  const fs::path dir = fs::temp_directory_path() / "mlmda_cli_err";
  fs::create_directories(dir);
  // Nonexistent manifest: an I/O failure.
  CHECK(run("split --manifest " + (dir / "absent.tsv").string() + " --out " +
            (dir / "out").string()) == 3);
  // Malformed manifest content: a data failure.
  const fs::path bad = dir / "bad.tsv";
  {
    std::ofstream out(bad);
    out << "# dataset=Custom\tpaired=0\n";
    out << "only_three\tfields\there\n";
  }
  CHECK(run("split --manifest " + bad.string() + " --out " + (dir / "out").string()) == 2);
}

TEST_CASE("corrupt, split, pair, evaluate run end to end") {
  const fs::path dir = fs::temp_directory_path() / "mlmda_cli_e2e";
  fs::remove_all(dir);
  const fs::path manifest = make_dataset(dir, 6);

  SUBCASE("corrupt mirrors the tree and logs records") {
    const fs::path out = dir / "corrupted";
    REQUIRE(run("corrupt --manifest " + manifest.string() +
                " --mode c-star --severity 3 --seed 9 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "config.json"));
    CHECK(fs::exists(out / "records.tsv"));
    const auto records = mlmda::read_record_log((out / "records.tsv").string());
    CHECK(records.size() == 24); // every image of both modalities
    for (const auto& r : records) CHECK(r.severity == 3);
    CHECK(fs::exists(out / "images" / "img" / "v_0_0.png"));
    const auto ir = mlmda::load_image((out / "images" / "img" / "i_0_0.png").string(),
                                      mlmda::Modality::Infrared);
    CHECK(ir.is_single_channel());
  }

  SUBCASE("augment preview writes grids and a rect log") {
    const fs::path out = dir / "preview";
    REQUIRE(run("augment-preview --manifest " + manifest.string() +
                " --preset ML-MDA -n 3 --seed 4 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "grid_0.png"));
    CHECK(fs::exists(out / "grid_2.png"));
    CHECK(fs::exists(out / "rects.tsv"));
    CHECK(run("augment-preview --manifest " + manifest.string() +
              " --preset NoSuch --out " + out.string()) == 2);
  }

  SUBCASE("split, pair, and evaluate chain together") {
    const fs::path sp = dir / "split";
    REQUIRE(run("split --manifest " + manifest.string() + " --seed 5 --folds 2 --out " +
                sp.string()) == 0);
    REQUIRE(fs::exists(sp / "split.tsv"));

    const fs::path pr = dir / "pairs";
    REQUIRE(run("pair --manifest " + manifest.string() + " --seed 6 --trials 2 --split " +
                (sp / "split.tsv").string() + " --subset all --out " + pr.string()) == 0);
    REQUIRE(fs::exists(pr / "pairs_0.tsv"));
    REQUIRE(fs::exists(pr / "pairs_1.tsv"));
    const auto pairing = mlmda::load_pairing((pr / "pairs_0.tsv").string());
    CHECK(pairing.pairs.size() == 12); // 6 identities x min(2, 2)

    // Ideal embeddings: identity one-hots, indexed by pair position.
    mlmda::EmbeddingTable t;
    t.dim = 6;
    for (std::size_t i = 0; i < pairing.pairs.size(); ++i) {
      t.ids.push_back(static_cast<std::int64_t>(i));
      t.identities.push_back(pairing.pairs[i].identity);
      for (std::size_t d = 0; d < t.dim; ++d) {
        t.rows.push_back(d == static_cast<std::size_t>(pairing.pairs[i].identity) ? 1.f : 0.f);
      }
    }
    const fs::path emb = dir / "emb.bin";
    mlmda::save_embeddings(t, emb.string());

    const fs::path ev = dir / "eval";
    REQUIRE(run("evaluate --embeddings " + emb.string() + " --metric euclidean --pairing " +
                (pr / "pairs_0.tsv").string() + " --out " + ev.string()) == 0);
    CHECK(fs::exists(ev / "report.txt"));
    CHECK(fs::exists(ev / "report.tsv"));

    // Dropping a row makes the pairing coverage check fail with code 2.
    t.ids.erase(t.ids.begin());
    t.identities.erase(t.identities.begin());
    t.rows.erase(t.rows.begin(), t.rows.begin() + 6);
    mlmda::save_embeddings(t, emb.string());
    CHECK(run("evaluate --embeddings " + emb.string() + " --pairing " +
              (pr / "pairs_0.tsv").string() + " --out " + ev.string()) == 2);
  }
}
