#include "sgf/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "sgf/rng.hpp"

namespace sgf::cli {

int default_splat_window(int frame_size) {
  return std::max(3, static_cast<int>(std::lround(35.0 * frame_size / 500.0)));
}

namespace {

void draw_object(RgbFrame& frame, const SyntheticSpec& spec, double cx, double cy) {
  const double half = spec.object_size / 2.0;
  const int icx = static_cast<int>(std::llround(cx));
  const int icy = static_cast<int>(std::llround(cy));
  const int r0 = std::max(0, icy - static_cast<int>(half));
  const int r1 = std::min(frame.height - 1, icy + static_cast<int>(half));
  const int c0 = std::max(0, icx - static_cast<int>(half));
  const int c1 = std::min(frame.width - 1, icx + static_cast<int>(half));
  const bool disc = spec.object == "disc";
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      if (disc) {
        const double dy = r - icy, dx = c - icx;
        if (dy * dy + dx * dx > half * half) continue;
      }
      frame.at(0, r, c) = 0.90;
      frame.at(1, r, c) = 0.75;
      frame.at(2, r, c) = 0.15;
    }
}

}  // namespace

SyntheticClip make_clip(const SyntheticSpec& spec, int clip_index) {
  if (spec.frame_size < 8) throw std::invalid_argument("synthetic: frame size too small");
  if (spec.noise < 0.0 || spec.noise >= 1.0)
    throw std::invalid_argument("synthetic: noise must be in [0,1)");
  if (spec.object != "square" && spec.object != "disc")
    throw std::invalid_argument("synthetic: unknown object kind " + spec.object);
  if (spec.trajectory != "linear" && spec.trajectory != "sinusoidal")
    throw std::invalid_argument("synthetic: unknown trajectory " + spec.trajectory);

  Rng rng(derive_seed(spec.seed, "clip" + std::to_string(clip_index)));
  const int size = spec.frame_size;

  // Static textured background shared by all frames of the clip.
  RgbFrame background(size, size);
  for (int ch = 0; ch < 3; ++ch)
    for (double& v : background.channels[static_cast<size_t>(ch)])
      v = 0.30 + spec.noise * (rng.uniform() - 0.5);

  const double margin = spec.object_size / 2.0 + 1.0;
  double cx = margin + rng.uniform() * (size - 2.0 * margin);
  double cy = margin + rng.uniform() * (size - 2.0 * margin);
  const double angle = rng.uniform() * 2.0 * M_PI;
  double vx = spec.speed * std::cos(angle);
  double vy = spec.speed * std::sin(angle);
  const double sin_amp = (size - 2.0 * margin) / 4.0;
  const double sin_mid = cy;

  SyntheticClip clip;
  clip.video_id = clip_index;
  for (int f = 0; f < spec.frames_per_clip; ++f) {
    RgbFrame frame = background;
    draw_object(frame, spec, cx, cy);
    clip.frames.push_back(std::move(frame));
    clip.centers.push_back({cx, cy});

    if (spec.trajectory == "linear") {
      cx += vx;
      cy += vy;
      if (cx < margin || cx > size - margin) {
        vx = -vx;
        cx = std::clamp(cx, margin, size - margin);
      }
      if (cy < margin || cy > size - margin) {
        vy = -vy;
        cy = std::clamp(cy, margin, size - margin);
      }
    } else {
      cx += spec.speed;
      if (cx < margin || cx > size - margin) {
        cx = std::clamp(cx, margin, size - margin);
      }
      cy = sin_mid + sin_amp * std::sin(2.0 * M_PI * (f + 1) / 20.0);
      cy = std::clamp(cy, margin, size - margin);
      if (cx >= size - margin) cx = margin;  // wrap horizontally
    }
  }
  return clip;
}

void generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  fs::create_directories(out);

  const int size = spec.frame_size;
  fixmap::GaussianSplatParams splat;
  splat.window_w = spec.splat_window > 0 ? spec.splat_window : default_splat_window(size);
  splat.alpha = spec.splat_alpha;
  splat.beta = spec.splat_beta;

  fixmap::ScreenMeta screen{size, size};
  std::vector<fixmap::VideoMeta> videos;
  std::vector<fixmap::GazeSample> gaze;

  for (int ci = 0; ci < spec.clips; ++ci) {
    SyntheticClip clip = make_clip(spec, ci);
    char dirbuf[32];
    std::snprintf(dirbuf, sizeof(dirbuf), "clip_%03d", ci);
    const fs::path clip_dir = out / dirbuf;
    fs::create_directories(clip_dir);

    fixmap::VideoMeta meta{ci, size, size, spec.fps, spec.frames_per_clip};
    videos.push_back(meta);

    Rng gaze_rng(derive_seed(spec.seed, "gaze" + std::to_string(ci)));
    for (int f = 0; f < spec.frames_per_clip; ++f) {
      write_ppm(clip_dir / indexed_name("frame_", f, "ppm"), clip.frames[static_cast<size_t>(f)]);

      std::vector<fixmap::FrameFixation> fixations;
      for (int s = 0; s < spec.subjects; ++s) {
        fixmap::GazeSample sample;
        sample.video_id = ci;
        sample.subject_id = s;
        sample.gaze_x =
            clip.centers[static_cast<size_t>(f)][0] + spec.gaze_jitter * gaze_rng.normal();
        sample.gaze_y =
            clip.centers[static_cast<size_t>(f)][1] + spec.gaze_jitter * gaze_rng.normal();
        // Mid-frame timestamp so the frame index floors back to f.
        sample.timestamp_us = static_cast<int64_t>((f + 0.5) / spec.fps * 1e6);
        gaze.push_back(sample);
        fixations.push_back(fixmap::normalize_gaze(sample, meta, screen).fixation);
      }
      ScalarField gt = fixmap::accumulate_fixation_map(fixations, splat, size, size);
      write_pgm(clip_dir / indexed_name("gt_", f, "pgm"), fixmap::quantize_map(gt));
    }
  }

  fixmap::write_gaze_csv(out / "gaze.csv", gaze);
  fixmap::write_videos_json(out / "videos.json", videos);

  nlohmann::json manifest;
  manifest["tool"] = "sgfcn synth";
  manifest["version"] = "0.1.0";
  manifest["seed"] = spec.seed;
  manifest["config"] = {{"frame_size", spec.frame_size},
                        {"object", spec.object},
                        {"trajectory", spec.trajectory},
                        {"noise", spec.noise},
                        {"frames_per_clip", spec.frames_per_clip},
                        {"clips", spec.clips},
                        {"subjects", spec.subjects},
                        {"speed", spec.speed},
                        {"object_size", spec.object_size},
                        {"gaze_jitter", spec.gaze_jitter},
                        {"fps", spec.fps},
                        {"splat_window", splat.window_w},
                        {"splat_alpha", splat.alpha},
                        {"splat_beta", splat.beta},
                        {"screen", {screen.sr_x, screen.sr_y}}};
  std::ofstream mf(out / "manifest.json");
  mf << manifest.dump(2) << "\n";
}

}  // namespace sgf::cli
