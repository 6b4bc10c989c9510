#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "sgf/params_io.hpp"
#include "sgf/pipeline.hpp"
#include "sgf/synthetic.hpp"

using namespace sgf;
using namespace sgf::cli;
namespace fs = std::filesystem;

namespace {

net::NetworkScale tiny_scale(int side) {
  net::NetworkScale s;
  s.input_side = side;
  s.block_widths = {4, 4, 6, 6, 6};
  return s;
}

std::vector<RgbFrame> clip_frames(int n, uint64_t seed) {
  SyntheticSpec spec;
  spec.frame_size = 32;
  spec.frames_per_clip = n;
  spec.clips = 1;
  spec.seed = seed;
  spec.object_size = 8;
  return make_clip(spec, 0).frames;
}

}  // namespace

TEST_CASE("run_video: single frame goes through SGF(3) only") {
  net::NetworkScale scale = tiny_scale(32);
  net::NetworkSpec s3 = net::build_sgf(net::Variant::SGF3, scale);
  net::NetworkSpec se = net::build_sgf(net::Variant::SGFE, scale);
  net::ParamStore p3 = net::init_params(s3, 1);
  net::ParamStore pe = net::init_params(se, 2);
  PipelineOptions opt;

  VideoResult res = run_video(clip_frames(1, 3), s3, p3, se, pe, opt);
  REQUIRE(res.saliency.size() == 1);
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0].variant == net::Variant::SGF3);
  CHECK_FALSE(res.trace[0].used_boundary);
  CHECK(res.saliency[0].height == 32);
}

TEST_CASE("run_video: second frame consumes EF(1) and B(2)") {
  net::NetworkScale scale = tiny_scale(32);
  net::NetworkSpec s3 = net::build_sgf(net::Variant::SGF3, scale);
  net::NetworkSpec se = net::build_sgf(net::Variant::SGFE, scale);
  net::ParamStore p3 = net::init_params(s3, 1);
  net::ParamStore pe = net::init_params(se, 2);
  PipelineOptions opt;
  opt.opb.superpixel_count = 32;

  VideoResult res = run_video(clip_frames(3, 4), s3, p3, se, pe, opt);
  REQUIRE(res.saliency.size() == 3);
  CHECK(res.trace[1].variant == net::Variant::SGFE);
  CHECK(res.trace[1].used_prev_prediction);
  CHECK(res.trace[1].used_boundary);
  CHECK_FALSE(res.trace[1].boundary_zeroed);
  // The memory channel of frame 2 is exactly EF(1).
  CHECK(res.trace[1].prev_checksum == res.saliency[0].sum());
  CHECK(res.trace[2].prev_checksum == res.saliency[1].sum());

  // Deterministic rerun, bitwise.
  VideoResult rerun = run_video(clip_frames(3, 4), s3, p3, se, pe, opt);
  for (size_t f = 0; f < 3; ++f) CHECK(res.saliency[f].values == rerun.saliency[f].values);
}

TEST_CASE("run_video with zero_boundary feeds an all-zero boundary map") {
  net::NetworkScale scale = tiny_scale(32);
  net::NetworkSpec s3 = net::build_sgf(net::Variant::SGF3, scale);
  net::NetworkSpec se = net::build_sgf(net::Variant::SGFE, scale);
  net::ParamStore p3 = net::init_params(s3, 1);
  net::ParamStore pe = net::init_params(se, 2);
  PipelineOptions opt;
  opt.zero_boundary = true;
  VideoResult res = run_video(clip_frames(2, 5), s3, p3, se, pe, opt);
  CHECK(res.trace[1].boundary_zeroed);
  CHECK(res.trace[1].boundary_checksum == 0.0);
}

TEST_CASE("run_ablation shapes the Table-VI style grid and marks absences") {
  SyntheticSpec spec;
  spec.frame_size = 32;
  spec.clips = 10;  // minimum for the 10-fold split
  spec.frames_per_clip = 3;
  spec.subjects = 3;
  spec.seed = 31;
  spec.object_size = 8;
  fs::path dir = fs::temp_directory_path() / "sgfcn_ablate_test";
  fs::remove_all(dir);
  generate_synthetic(spec, dir);
  Dataset ds = load_dataset(dir);

  net::NetworkScale scale = tiny_scale(32);
  fs::path pdir = dir / "params";
  fs::create_directories(pdir);
  net::NetworkSpec s3 = net::build_sgf(net::Variant::SGF3, scale);
  net::NetworkSpec se = net::build_sgf(net::Variant::SGFE, scale);
  net::save_params(pdir / "sgf3.params", s3, net::init_params(s3, 7));
  net::save_params(pdir / "sgfe.params", se, net::init_params(se, 8));

  AblationConfig cfg;
  cfg.fold = 0;
  cfg.seed = 5;
  cfg.emd_grid = 8;
  cfg.opb.superpixel_count = 32;
  std::map<std::string, fs::path> paths;
  paths["SGF3"] = pdir / "sgf3.params";
  paths["SGFE"] = pdir / "sgfe.params";
  // SGF1/SGF2 intentionally missing.
  AblationResult res = run_ablation(ds, paths, cfg);

  CHECK(res.columns == std::vector<std::string>{"SGF(1)", "SGF(2)", "SGF(3)", "OPB", "SGF_nb",
                                                "SGF(E)"});
  CHECK(res.metric_rows == std::vector<std::string>{"sAUC", "SIM", "CC", "NSS", "EMD"});
  REQUIRE(res.values.size() == 5);
  REQUIRE(res.values[0].size() == 6);
  CHECK_FALSE(res.column_present[0]);
  CHECK_FALSE(res.column_present[1]);
  CHECK(res.column_present[2]);
  CHECK(res.column_present[3]);
  CHECK(res.column_present[4]);
  CHECK(res.column_present[5]);
  CHECK(std::isnan(res.values[0][0]));
  for (int mi = 0; mi < 5; ++mi)
    for (int col = 2; col < 6; ++col) CHECK_FALSE(std::isnan(res.values[mi][col]));

  // sAUC values live in [0,1]; EMD is nonnegative.
  for (int col = 2; col < 6; ++col) {
    CHECK(res.values[0][col] >= 0.0);
    CHECK(res.values[0][col] <= 1.0);
    CHECK(res.values[4][col] >= 0.0);
  }

  const std::string csv = ablation_csv(res);
  CHECK(csv.find("metric,SGF(1),SGF(2),SGF(3),OPB,SGF_nb,SGF(E)") == 0);
  CHECK(csv.find("absent") != std::string::npos);
  CHECK(csv.find("sAUC") != std::string::npos);
  CHECK(csv.find("EMD") != std::string::npos);

  // Determinism of the whole harness.
  AblationResult rerun = run_ablation(ds, paths, cfg);
  for (int mi = 0; mi < 5; ++mi)
    for (int col = 2; col < 6; ++col) CHECK(res.values[mi][col] == rerun.values[mi][col]);
}
