#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sgf/image.hpp"
#include "sgf/rng.hpp"

using namespace sgf;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("sgfcn_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("pgm round trip is byte exact") {
  fs::path dir = temp_dir("pgm");
  GrayImage img(5, 7);
  Rng rng(1);
  for (auto& v : img.values) v = static_cast<uint8_t>(rng.uniform_int(256));
  write_pgm(dir / "a.pgm", img);
  GrayImage back = read_pgm(dir / "a.pgm");
  CHECK(back.height == 5);
  CHECK(back.width == 7);
  CHECK(back.values == img.values);
}

TEST_CASE("ppm round trip preserves quantized values") {
  fs::path dir = temp_dir("ppm");
  RgbFrame f(4, 6);
  Rng rng(2);
  for (auto& ch : f.channels)
    for (auto& v : ch) v = rng.uniform_int(256) / 255.0;
  write_ppm(dir / "f.ppm", f);
  RgbFrame back = read_ppm(dir / "f.ppm");
  for (int ch = 0; ch < 3; ++ch)
    for (size_t i = 0; i < f.channels[0].size(); ++i)
      CHECK(back.channels[static_cast<size_t>(ch)][i] ==
            doctest::Approx(f.channels[static_cast<size_t>(ch)][i]).epsilon(1e-9));
}

TEST_CASE("pnm header comments are skipped") {
  fs::path dir = temp_dir("pnm_comments");
  std::ofstream out(dir / "c.pgm", std::ios::binary);
  out << "P5\n# a comment\n2 1\n# another\n255\n";
  out.put(static_cast<char>(7));
  out.put(static_cast<char>(250));
  out.close();
  GrayImage img = read_pgm(dir / "c.pgm");
  CHECK(img.width == 2);
  CHECK(img.height == 1);
  CHECK(img.values[0] == 7);
  CHECK(img.values[1] == 250);
}

TEST_CASE("pnm rejects bad magic and truncation") {
  fs::path dir = temp_dir("pnm_bad");
  {
    std::ofstream out(dir / "bad.pgm", std::ios::binary);
    out << "P6\n2 1\n255\n";
  }
  CHECK_THROWS(read_pgm(dir / "bad.pgm"));
  {
    std::ofstream out(dir / "short.pgm", std::ios::binary);
    out << "P5\n4 4\n255\n";
    out.put(1);
  }
  CHECK_THROWS(read_pgm(dir / "short.pgm"));
  CHECK_THROWS(read_pgm(dir / "missing.pgm"));
}

TEST_CASE("indexed_name formats six digits") {
  CHECK(indexed_name("frame_", 0, "ppm") == "frame_000000.ppm");
  CHECK(indexed_name("gt_", 123456, "pgm") == "gt_123456.pgm");
}
