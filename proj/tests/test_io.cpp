#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mlmda/image_ops.hpp"
#include "mlmda/io.hpp"

#include <filesystem>
#include <fstream>

using mlmda::ImageBuffer;
using mlmda::Modality;

namespace fs = std::filesystem;

namespace {

ImageBuffer test_image(int w, int h, Modality m) {
  ImageBuffer img(w, h, m);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (m == Modality::Infrared) {
        const auto v = static_cast<std::uint8_t>((x * 7 + y * 13) % 256);
        img.at(x, y, 0) = img.at(x, y, 1) = img.at(x, y, 2) = v;
      } else {
        img.at(x, y, 0) = static_cast<std::uint8_t>((x * 11) % 256);
        img.at(x, y, 1) = static_cast<std::uint8_t>((y * 17) % 256);
        img.at(x, y, 2) = static_cast<std::uint8_t>((x + y) % 256);
      }
    }
  }
  return img;
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "mlmda_io_test";
  fs::create_directories(dir);
  return dir;
}

} // namespace

TEST_CASE("png round-trip is lossless") {
  const ImageBuffer img = test_image(33, 21, Modality::Visible);
  const fs::path p = temp_dir() / "rt.png";
  mlmda::save_png(img, p.string());
  const ImageBuffer back = mlmda::load_image(p.string(), Modality::Visible);
  CHECK(back == img);
}

TEST_CASE("jpeg round-trip is near-lossless at high quality") {
  // Smooth content: JPEG error should be small at quality 95.
  ImageBuffer img(48, 32, Modality::Visible);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      img.at(x, y, 0) = static_cast<std::uint8_t>(60 + 3 * x);
      img.at(x, y, 1) = static_cast<std::uint8_t>(40 + 5 * y);
      img.at(x, y, 2) = static_cast<std::uint8_t>(100 + x + y);
    }
  }
  const fs::path p = temp_dir() / "rt.jpg";
  mlmda::save_jpeg(img, p.string(), 95);
  const ImageBuffer back = mlmda::load_image(p.string(), Modality::Visible);
  CHECK(back.same_dims(img));
  CHECK(mlmda::psnr(img, back) > 30.0);
}

TEST_CASE("format is sniffed from magic bytes, not the extension") {
  const ImageBuffer img = test_image(16, 16, Modality::Visible);
  const fs::path p = temp_dir() / "misnamed.jpg"; // actually PNG bytes
  mlmda::save_png(img, p.string());
  CHECK(mlmda::load_image(p.string(), Modality::Visible) == img);
}

TEST_CASE("loading a colored file as infrared collapses it to gray") {
  const ImageBuffer img = test_image(20, 20, Modality::Visible);
  const fs::path p = temp_dir() / "asir.png";
  mlmda::save_png(img, p.string());
  const ImageBuffer ir = mlmda::load_image(p.string(), Modality::Infrared);
  CHECK(ir.modality == Modality::Infrared);
  CHECK(ir.is_single_channel());
}

TEST_CASE("grayscale jpeg stream keeps the infrared invariant exactly") {
  const ImageBuffer ir = test_image(40, 24, Modality::Infrared);
  for (const int quality : {95, 50, 10}) {
    const auto bytes = mlmda::encode_jpeg(ir, quality, /*grayscale=*/true);
    const ImageBuffer back = mlmda::decode_jpeg(bytes, Modality::Infrared);
    CHECK(back.same_dims(ir));
    CHECK(back.is_single_channel());
  }
}

TEST_CASE("in-memory jpeg degrades with quality") {
  const ImageBuffer img = test_image(64, 64, Modality::Visible);
  const auto hi = mlmda::decode_jpeg(mlmda::encode_jpeg(img, 90, false), Modality::Visible);
  const auto lo = mlmda::decode_jpeg(mlmda::encode_jpeg(img, 5, false), Modality::Visible);
  CHECK(mlmda::psnr(img, hi) > mlmda::psnr(img, lo));
}

TEST_CASE("save_image picks the encoder by extension") {
  const ImageBuffer img = test_image(10, 10, Modality::Visible);
  const fs::path png = temp_dir() / "byext.png";
  const fs::path jpg = temp_dir() / "byext.jpeg";
  mlmda::save_image(img, png.string());
  mlmda::save_image(img, jpg.string());
  CHECK(mlmda::load_image(png.string(), Modality::Visible) == img);
  CHECK(mlmda::load_image(jpg.string(), Modality::Visible).same_dims(img));
  CHECK_THROWS(mlmda::save_image(img, (temp_dir() / "byext.bmp").string()));
}

TEST_CASE("missing or malformed files raise errors") {
  CHECK_THROWS(mlmda::load_image((temp_dir() / "nope.png").string(), Modality::Visible));
  const fs::path bad = temp_dir() / "bad.png";
  {
    std::ofstream out(bad);
    out << "not an image";
  }
  CHECK_THROWS(mlmda::load_image(bad.string(), Modality::Visible));
}
