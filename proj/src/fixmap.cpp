#include "sgf/fixmap.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sgf::fixmap {

NormalizedGaze normalize_gaze(const GazeSample& s, const VideoMeta& v, const ScreenMeta& scr) {
  if (!(v.fps > 0.0) || v.vr_x <= 0 || v.vr_y <= 0 || v.frame_count <= 0)
    throw std::invalid_argument("normalize_gaze: invalid video metadata");
  if (scr.sr_x <= 0 || scr.sr_y <= 0)
    throw std::invalid_argument("normalize_gaze: invalid screen metadata");
  if (!std::isfinite(s.gaze_x) || !std::isfinite(s.gaze_y))
    throw std::invalid_argument("normalize_gaze: non-finite gaze coordinates");
  if (s.timestamp_us < 0)
    throw std::invalid_argument("normalize_gaze: negative timestamp");

  // Width-fit scaling; the display letterboxes the video vertically.
  const double scale = static_cast<double>(v.vr_x) / scr.sr_x;
  const double letterbox =
      (scr.sr_y - static_cast<double>(v.vr_y) * scr.sr_x / v.vr_x) / 2.0;

  NormalizedGaze out;
  out.fixation.subject_id = s.subject_id;
  out.fixation.x = scale * s.gaze_x;
  out.fixation.y = scale * (s.gaze_y - letterbox);

  const double kf = static_cast<double>(s.timestamp_us) / 1e6 * v.fps;
  int k = static_cast<int>(std::floor(kf));
  out.out_of_range = (k < 0 || k >= v.frame_count);
  if (k < 0) k = 0;
  if (k >= v.frame_count) k = v.frame_count - 1;
  out.fixation.frame_index = k;
  return out;
}

namespace {

// Splat values on the square window, indexed [dy+W][dx+W]. Shared between
// gaussian_splat and accumulate_fixation_map so their sums agree bitwise.
std::vector<double> splat_kernel(const GaussianSplatParams& p) {
  if (p.window_w < 1 || !(p.alpha > 0.0) || !(p.beta > 0.0))
    throw std::invalid_argument("gaussian_splat: invalid params");
  const int w = p.window_w;
  const int side = 2 * w + 1;
  const double amp = p.alpha / (M_PI * w);
  std::vector<double> k(static_cast<size_t>(side) * side);
  for (int dy = -w; dy <= w; ++dy)
    for (int dx = -w; dx <= w; ++dx) {
      const double d2 = static_cast<double>(dy) * dy + static_cast<double>(dx) * dx;
      k[static_cast<size_t>(dy + w) * side + (dx + w)] =
          amp * std::exp(-p.beta * d2 / (static_cast<double>(w) * w));
    }
  return k;
}

void add_splat(ScalarField& f, const std::vector<double>& kernel, int w, int cy, int cx) {
  const int side = 2 * w + 1;
  for (int dy = -w; dy <= w; ++dy) {
    const int r = cy + dy;
    if (r < 0 || r >= f.height) continue;
    for (int dx = -w; dx <= w; ++dx) {
      const int c = cx + dx;
      if (c < 0 || c >= f.width) continue;
      f.at(r, c) += kernel[static_cast<size_t>(dy + w) * side + (dx + w)];
    }
  }
}

}  // namespace

ScalarField gaussian_splat(const FrameFixation& center, const GaussianSplatParams& p,
                           int height, int width) {
  if (height <= 0 || width <= 0)
    throw std::invalid_argument("gaussian_splat: dims must be positive");
  std::vector<double> kernel = splat_kernel(p);
  ScalarField f(height, width);
  // Fixation coordinates stay real; the splat centers on the nearest pixel.
  const int cy = static_cast<int>(std::llround(center.y));
  const int cx = static_cast<int>(std::llround(center.x));
  add_splat(f, kernel, p.window_w, cy, cx);
  return f;
}

ScalarField accumulate_fixation_map(const std::vector<FrameFixation>& fixations,
                                    const GaussianSplatParams& p, int height, int width) {
  if (height <= 0 || width <= 0)
    throw std::invalid_argument("accumulate_fixation_map: dims must be positive");
  for (const auto& fx : fixations)
    if (fx.frame_index != fixations.front().frame_index)
      throw std::invalid_argument("accumulate_fixation_map: mixed frame indices");
  ScalarField f(height, width);
  if (fixations.empty()) return f;
  std::vector<double> kernel = splat_kernel(p);
  for (const auto& fx : fixations) {
    const int cy = static_cast<int>(std::llround(fx.y));
    const int cx = static_cast<int>(std::llround(fx.x));
    add_splat(f, kernel, p.window_w, cy, cx);
  }
  return f;
}

GrayImage quantize_map(const ScalarField& f) {
  if (!f.all_finite()) throw std::invalid_argument("quantize_map: non-finite values");
  GrayImage img(f.height, f.width);
  const double lo = f.min_value();
  const double hi = f.max_value();
  if (hi <= lo) return img;  // constant field -> all zeros
  const double span = hi - lo;
  for (size_t i = 0; i < f.values.size(); ++i) {
    const double t = (f.values[i] - lo) / span;
    img.values[i] = static_cast<uint8_t>(std::floor(t * 255.0 + 0.5));
  }
  return img;
}

std::vector<GazeSample> read_gaze_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("gaze csv: empty file");
  if (line.rfind("video_id,subject_id,x,y,timestamp_us", 0) != 0)
    throw std::runtime_error("gaze csv: unexpected header: " + line);
  std::vector<GazeSample> samples;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    GazeSample s;
    try {
      std::getline(ss, field, ',');
      s.video_id = std::stoi(field);
      std::getline(ss, field, ',');
      s.subject_id = std::stoi(field);
      std::getline(ss, field, ',');
      s.gaze_x = std::stod(field);
      std::getline(ss, field, ',');
      s.gaze_y = std::stod(field);
      std::getline(ss, field, ',');
      s.timestamp_us = std::stoll(field);
    } catch (const std::exception&) {
      throw std::runtime_error("gaze csv: bad row at line " + std::to_string(lineno));
    }
    samples.push_back(s);
  }
  return samples;
}

void write_gaze_csv(const std::filesystem::path& path, const std::vector<GazeSample>& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "video_id,subject_id,x,y,timestamp_us\n";
  out.precision(17);
  for (const auto& s : samples)
    out << s.video_id << "," << s.subject_id << "," << s.gaze_x << "," << s.gaze_y << ","
        << s.timestamp_us << "\n";
}

std::vector<VideoMeta> read_videos_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j;
  in >> j;
  std::vector<VideoMeta> out;
  for (const auto& item : j) {
    VideoMeta v;
    v.video_id = item.at("video_id").get<int>();
    v.vr_x = item.at("vr_x").get<int>();
    v.vr_y = item.at("vr_y").get<int>();
    v.fps = item.at("fps").get<double>();
    v.frame_count = item.at("frame_count").get<int>();
    out.push_back(v);
  }
  return out;
}

void write_videos_json(const std::filesystem::path& path, const std::vector<VideoMeta>& videos) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& v : videos)
    j.push_back({{"video_id", v.video_id},
                 {"vr_x", v.vr_x},
                 {"vr_y", v.vr_y},
                 {"fps", v.fps},
                 {"frame_count", v.frame_count}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace sgf::fixmap
