#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sgf/fixmap.hpp"
#include "sgf/image.hpp"

namespace sgf::cli {

// Desk-scale stand-in for the eye-tracking video datasets: a moving object
// over a static textured background, simulated subjects fixating near the
// object center, and ground-truth density maps built from those fixations.
struct SyntheticSpec {
  int frame_size = 64;
  std::string object = "square";      // square | disc
  std::string trajectory = "linear";  // linear | sinusoidal
  double noise = 0.05;                // background texture amplitude in [0,1)
  int frames_per_clip = 30;
  int clips = 20;
  int subjects = 8;
  double speed = 2.0;        // px/frame
  int object_size = 14;      // square side / disc diameter
  double gaze_jitter = 2.0;  // px std around the object center
  double fps = 25.0;
  int splat_window = 0;      // 0 = scale 35 px down with the frame size
  double splat_alpha = 1.0;
  double splat_beta = 3.0;
  uint64_t seed = 42;
};

int default_splat_window(int frame_size);

struct SyntheticClip {
  int video_id = 0;
  std::vector<RgbFrame> frames;
  std::vector<std::array<double, 2>> centers;  // (x, y) per frame
};

SyntheticClip make_clip(const SyntheticSpec& spec, int clip_index);

// Writes clip_%03d/frame_%06d.ppm + gt_%06d.pgm per clip, gaze.csv,
// videos.json and manifest.json under `out`.
void generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out);

}  // namespace sgf::cli
