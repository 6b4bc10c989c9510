#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sgf/image.hpp"
#include "sgf/scalar_field.hpp"

namespace sgf::fixmap {

// One raw eye-tracker record in screen coordinates.
struct GazeSample {
  int subject_id = 0;
  int video_id = 0;
  double gaze_x = 0.0;  // screen pixels
  double gaze_y = 0.0;  // screen pixels
  int64_t timestamp_us = 0;
};

struct VideoMeta {
  int video_id = 0;
  int vr_x = 0, vr_y = 0;  // video resolution
  double fps = 0.0;
  int frame_count = 0;
};

struct ScreenMeta {
  int sr_x = 0, sr_y = 0;  // display resolution
};

// One normalized fixation in video-pixel coordinates.
struct FrameFixation {
  int frame_index = 0;  // k
  double x = 0.0;
  double y = 0.0;
  int subject_id = 0;
};

struct NormalizedGaze {
  FrameFixation fixation;
  bool out_of_range = false;  // raw frame index fell beyond [0, frame_count)
};

struct GaussianSplatParams {
  int window_w = 35;   // W: splat window radius in pixels
  double alpha = 1.0;  // amplitude
  double beta = 3.0;   // decay; e^-3 at radius W
};

// Maps a screen-space gaze sample into video-pixel coordinates and a frame
// index. Width-fit scaling with vertical letterbox correction; the frame
// index floors timestamp*fps and is clamped into range with a flag.
NormalizedGaze normalize_gaze(const GazeSample& s, const VideoMeta& v, const ScreenMeta& scr);

// Single-fixation Gaussian density: (alpha/(pi*W)) * exp(-beta*d^2/W^2) on
// the (2W+1)-square window around the fixation pixel, clipped to the frame.
ScalarField gaussian_splat(const FrameFixation& center, const GaussianSplatParams& p,
                           int height, int width);

// Sum of splats over all fixations of one frame. All fixations must share
// one frame index; summation runs in input order for bitwise determinism.
ScalarField accumulate_fixation_map(const std::vector<FrameFixation>& fixations,
                                    const GaussianSplatParams& p, int height, int width);

// Linear rescale of [min,max] to [0,255] with round-half-up; a constant
// field quantizes to all zeros.
GrayImage quantize_map(const ScalarField& f);

// Gaze log CSV: header "video_id,subject_id,x,y,timestamp_us".
std::vector<GazeSample> read_gaze_csv(const std::filesystem::path& path);
void write_gaze_csv(const std::filesystem::path& path, const std::vector<GazeSample>& samples);

// Video metadata JSON: array of {video_id, vr_x, vr_y, fps, frame_count}.
std::vector<VideoMeta> read_videos_json(const std::filesystem::path& path);
void write_videos_json(const std::filesystem::path& path, const std::vector<VideoMeta>& videos);

}  // namespace sgf::fixmap
