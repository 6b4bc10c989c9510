#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgf/fixmap.hpp"
#include "sgf/image.hpp"
#include "sgf/metrics.hpp"
#include "sgf/network.hpp"
#include "sgf/opb.hpp"
#include "sgf/train.hpp"

namespace sgf::cli {

// A dataset directory as written by the synthetic generator: clip_%03d/
// subdirectories with frame_%06d.ppm and gt_%06d.pgm, plus gaze.csv and
// videos.json at the root.
struct Dataset {
  std::filesystem::path root;
  std::vector<fixmap::VideoMeta> videos;
  std::vector<fixmap::GazeSample> gaze;
  fixmap::ScreenMeta screen;

  std::filesystem::path clip_dir(int video_id) const;
  // Fixations per frame for one video, in video-pixel coordinates.
  std::vector<std::vector<fixmap::FrameFixation>> fixations_by_frame(int video_id) const;
};

Dataset load_dataset(const std::filesystem::path& root);

std::vector<RgbFrame> load_clip_frames(const std::filesystem::path& dir, int frame_count);
std::vector<ScalarField> load_clip_gt(const std::filesystem::path& dir, int frame_count);

// Stage-one samples: every frame of the listed clips as (frame, gt).
std::vector<train::SamplePair> stage_one_samples(const Dataset& ds,
                                                 const std::vector<int>& clip_ids);

// Stage-two samples: frames i >= 1 with the previous frame's ground truth
// as the memory channel and the OPB boundary (recursion per clip) as the
// side input.
std::vector<train::SamplePair> stage_two_samples(const Dataset& ds,
                                                 const std::vector<int>& clip_ids,
                                                 const opb::OpbParams& opb_params);

struct FrameTrace {
  net::Variant variant = net::Variant::SGF3;
  bool used_prev_prediction = false;
  bool used_boundary = false;
  bool boundary_zeroed = false;
  double prev_checksum = 0.0;
  double boundary_checksum = 0.0;
};

struct PipelineOptions {
  bool zero_boundary = false;  // SGF_nb: keep the memory channel, drop OPB
  opb::OpbParams opb;
};

struct VideoResult {
  std::vector<ScalarField> saliency;
  std::vector<FrameTrace> trace;
};

// The per-video orchestration: the first frame goes through SGF(3); every
// later frame i feeds SGF(E) with [frame i | previous prediction] and the
// OPB boundary map B(i) via the eltwise max.
VideoResult run_video(const std::vector<RgbFrame>& frames, const net::NetworkSpec& sgf3_spec,
                      const net::ParamStore& sgf3_params, const net::NetworkSpec& sgfe_spec,
                      const net::ParamStore& sgfe_params, const PipelineOptions& opt);

struct AblationConfig {
  int fold = 0;
  uint64_t seed = 42;
  int emd_grid = 16;
  opb::OpbParams opb;
};

struct AblationResult {
  std::vector<std::string> columns;            // SGF(1) .. SGF(E)
  std::vector<std::string> metric_rows;        // sAUC, SIM, CC, NSS, EMD
  std::vector<std::vector<double>> values;     // [row][column], NaN when absent
  std::vector<bool> column_present;
  std::vector<int> test_clips;
};

// Scores the six ablation columns on the held-out fold of the dataset,
// frames with index >= 1 (the first frame has neither motion nor memory).
AblationResult run_ablation(const Dataset& ds,
                            const std::map<std::string, std::filesystem::path>& params_paths,
                            const AblationConfig& cfg);

std::string ablation_csv(const AblationResult& result);

}  // namespace sgf::cli
