#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sgf/params_io.hpp"
#include "sgf/rng.hpp"

using namespace sgf;
using namespace sgf::net;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "sgfcn_params_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("parameter files round trip bitwise") {
  NetworkScale scale;
  scale.input_side = 32;
  scale.block_widths = {4, 4, 6, 6, 6};
  for (Variant v : {Variant::SGF1, Variant::SGF3, Variant::SGFE}) {
    NetworkSpec spec = build_sgf(v, scale);
    ParamStore params = init_params(spec, 1234);
    const fs::path path = temp_file(variant_name(v) + ".params");
    save_params(path, spec, params);
    LoadedParams back = load_params(path);
    CHECK(back.spec.variant == spec.variant);
    CHECK(back.spec.input_channels == spec.input_channels);
    CHECK(back.spec.scale == spec.scale);
    REQUIRE(back.params.names == params.names);
    for (size_t i = 0; i < params.tensors.size(); ++i) {
      CHECK(back.params.tensors[i].shape == params.tensors[i].shape);
      CHECK(back.params.tensors[i].data == params.tensors[i].data);
    }
  }
}

TEST_CASE("save then save again produces identical bytes") {
  NetworkScale scale;
  scale.input_side = 32;
  scale.block_widths = {4, 4, 6, 6, 6};
  NetworkSpec spec = build_sgf(Variant::SGF2, scale);
  ParamStore params = init_params(spec, 9);
  const fs::path a = temp_file("a.params");
  const fs::path b = temp_file("b.params");
  save_params(a, spec, params);
  save_params(b, spec, params);
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::string da((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  std::string db((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(da == db);
}

TEST_CASE("corrupted parameter files are rejected") {
  const fs::path bad = temp_file("bad.params");
  {
    std::ofstream out(bad, std::ios::binary);
    out << "not a parameter file at all";
  }
  CHECK_THROWS(load_params(bad));

  // Truncated blob.
  NetworkScale scale;
  scale.input_side = 32;
  scale.block_widths = {4, 4, 6, 6, 6};
  NetworkSpec spec = build_sgf(Variant::SGF1, scale);
  ParamStore params = init_params(spec, 2);
  const fs::path full = temp_file("full.params");
  save_params(full, spec, params);
  std::ifstream in(full, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const fs::path cut = temp_file("cut.params");
  {
    std::ofstream out(cut, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS(load_params(cut));
  CHECK_THROWS(load_params(temp_file("missing.params")));
}
