#include "sgf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sgf/params_io.hpp"
#include "sgf/rng.hpp"

namespace sgf::cli {

namespace fs = std::filesystem;

std::filesystem::path Dataset::clip_dir(int video_id) const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "clip_%03d", video_id);
  return root / buf;
}

std::vector<std::vector<fixmap::FrameFixation>> Dataset::fixations_by_frame(
    int video_id) const {
  const fixmap::VideoMeta* meta = nullptr;
  for (const auto& v : videos)
    if (v.video_id == video_id) meta = &v;
  if (!meta) throw std::invalid_argument("dataset: unknown video id");

  std::vector<std::vector<fixmap::FrameFixation>> out(
      static_cast<size_t>(meta->frame_count));
  for (const auto& s : gaze) {
    if (s.video_id != video_id) continue;
    fixmap::NormalizedGaze ng = fixmap::normalize_gaze(s, *meta, screen);
    if (ng.out_of_range) continue;
    out[static_cast<size_t>(ng.fixation.frame_index)].push_back(ng.fixation);
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& root) {
  Dataset ds;
  ds.root = root;
  ds.videos = fixmap::read_videos_json(root / "videos.json");
  ds.gaze = fixmap::read_gaze_csv(root / "gaze.csv");
  ds.screen = {0, 0};
  const fs::path manifest = root / "manifest.json";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    nlohmann::json j;
    in >> j;
    if (j.contains("config") && j["config"].contains("screen")) {
      ds.screen.sr_x = j["config"]["screen"][0].get<int>();
      ds.screen.sr_y = j["config"]["screen"][1].get<int>();
    }
  }
  if (ds.screen.sr_x <= 0) {
    if (ds.videos.empty()) throw std::runtime_error("dataset: no videos");
    ds.screen = {ds.videos.front().vr_x, ds.videos.front().vr_y};
  }
  return ds;
}

std::vector<RgbFrame> load_clip_frames(const std::filesystem::path& dir, int frame_count) {
  std::vector<RgbFrame> frames;
  frames.reserve(static_cast<size_t>(frame_count));
  for (int f = 0; f < frame_count; ++f)
    frames.push_back(read_ppm(dir / indexed_name("frame_", f, "ppm")));
  return frames;
}

std::vector<ScalarField> load_clip_gt(const std::filesystem::path& dir, int frame_count) {
  std::vector<ScalarField> gt;
  gt.reserve(static_cast<size_t>(frame_count));
  for (int f = 0; f < frame_count; ++f)
    gt.push_back(field_from_gray(read_pgm(dir / indexed_name("gt_", f, "pgm"))));
  return gt;
}

std::vector<train::SamplePair> stage_one_samples(const Dataset& ds,
                                                 const std::vector<int>& clip_ids) {
  std::vector<train::SamplePair> samples;
  for (int id : clip_ids) {
    const fixmap::VideoMeta* meta = nullptr;
    for (const auto& v : ds.videos)
      if (v.video_id == id) meta = &v;
    if (!meta) throw std::invalid_argument("stage_one_samples: unknown clip id");
    const fs::path dir = ds.clip_dir(id);
    std::vector<RgbFrame> frames = load_clip_frames(dir, meta->frame_count);
    std::vector<ScalarField> gt = load_clip_gt(dir, meta->frame_count);
    for (int f = 0; f < meta->frame_count; ++f) {
      train::SamplePair s;
      s.input = net::tensor_from_frame(frames[static_cast<size_t>(f)]);
      s.gt = std::move(gt[static_cast<size_t>(f)]);
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

std::vector<train::SamplePair> stage_two_samples(const Dataset& ds,
                                                 const std::vector<int>& clip_ids,
                                                 const opb::OpbParams& opb_params) {
  std::vector<train::SamplePair> samples;
  for (int id : clip_ids) {
    const fixmap::VideoMeta* meta = nullptr;
    for (const auto& v : ds.videos)
      if (v.video_id == id) meta = &v;
    if (!meta) throw std::invalid_argument("stage_two_samples: unknown clip id");
    const fs::path dir = ds.clip_dir(id);
    std::vector<RgbFrame> frames = load_clip_frames(dir, meta->frame_count);
    std::vector<ScalarField> gt = load_clip_gt(dir, meta->frame_count);

    ScalarField prev_b;
    bool has_prev_b = false;
    for (int f = 1; f < meta->frame_count; ++f) {
      ScalarField boundary =
          opb::opb_pipeline(frames[static_cast<size_t>(f - 1)], frames[static_cast<size_t>(f)],
                            has_prev_b ? &prev_b : nullptr, opb_params);
      train::SamplePair s;
      s.input = net::tensor_from_frame(frames[static_cast<size_t>(f)]);
      s.gt = gt[static_cast<size_t>(f)];
      s.prev = gt[static_cast<size_t>(f - 1)];  // teacher forcing
      s.boundary = boundary;
      samples.push_back(std::move(s));
      prev_b = std::move(boundary);
      has_prev_b = true;
    }
  }
  return samples;
}

VideoResult run_video(const std::vector<RgbFrame>& frames, const net::NetworkSpec& sgf3_spec,
                      const net::ParamStore& sgf3_params, const net::NetworkSpec& sgfe_spec,
                      const net::ParamStore& sgfe_params, const PipelineOptions& opt) {
  if (frames.empty()) throw std::invalid_argument("run_video: no frames");

  VideoResult res;
  ScalarField prev_pred;
  ScalarField prev_b;
  bool has_prev_b = false;

  for (size_t f = 0; f < frames.size(); ++f) {
    FrameTrace trace;
    ScalarField pred;
    if (f == 0) {
      trace.variant = net::Variant::SGF3;
      Tensor out = net::forward(sgf3_spec, sgf3_params, net::tensor_from_frame(frames[f]));
      pred = net::field_from_prediction(out);
    } else {
      trace.variant = net::Variant::SGFE;
      ScalarField boundary;
      if (opt.zero_boundary) {
        boundary = ScalarField(frames[f].height, frames[f].width, 0.0);
        trace.boundary_zeroed = true;
      } else {
        boundary = opb::opb_pipeline(frames[f - 1], frames[f], has_prev_b ? &prev_b : nullptr,
                                     opt.opb);
        prev_b = boundary;
        has_prev_b = true;
      }
      trace.used_boundary = true;
      trace.boundary_checksum = boundary.sum();
      trace.used_prev_prediction = true;
      trace.prev_checksum = prev_pred.sum();

      Tensor input = net::assemble_sgfe_input(frames[f], prev_pred);
      Tensor out = net::forward(sgfe_spec, sgfe_params, input, &boundary);
      pred = net::field_from_prediction(out);
    }
    prev_pred = pred;
    res.saliency.push_back(std::move(pred));
    res.trace.push_back(trace);
  }
  return res;
}

namespace {

struct FramePoints {
  metrics::FixationSet fixations;
  int video_id = 0;
  int frame = 0;
};

metrics::FixationSet to_fixation_set(const std::vector<fixmap::FrameFixation>& fixations,
                                     int frame, int height, int width) {
  metrics::FixationSet set;
  set.frame_index = frame;
  for (const auto& fx : fixations) {
    metrics::Point p;
    p.x = std::clamp(static_cast<int>(std::llround(fx.x)), 0, width - 1);
    p.y = std::clamp(static_cast<int>(std::llround(fx.y)), 0, height - 1);
    set.points.push_back(p);
  }
  return set;
}

}  // namespace

AblationResult run_ablation(const Dataset& ds,
                            const std::map<std::string, std::filesystem::path>& params_paths,
                            const AblationConfig& cfg) {
  AblationResult res;
  res.columns = {"SGF(1)", "SGF(2)", "SGF(3)", "OPB", "SGF_nb", "SGF(E)"};
  res.metric_rows = {"sAUC", "SIM", "CC", "NSS", "EMD"};
  res.values.assign(5, std::vector<double>(6, std::numeric_limits<double>::quiet_NaN()));
  res.column_present.assign(6, false);

  train::SplitPlan split =
      train::cross_validation_split(static_cast<int>(ds.videos.size()), cfg.seed);
  split.active_test_fold = cfg.fold;
  res.test_clips = split.test_indices();

  // Load whichever parameter files exist.
  std::map<std::string, net::LoadedParams> loaded;
  for (const auto& key : {"SGF1", "SGF2", "SGF3", "SGFE"}) {
    auto it = params_paths.find(key);
    if (it == params_paths.end()) continue;
    if (!fs::exists(it->second)) continue;
    loaded.emplace(key, net::load_params(it->second));
  }

  // Per-clip data and the pooled fixation points for shuffled-AUC negatives.
  struct ClipEval {
    int video_id;
    std::vector<RgbFrame> frames;
    std::vector<ScalarField> gt;
    std::vector<metrics::FixationSet> fixations;
  };
  std::vector<ClipEval> clips;
  struct GlobalPoint {
    size_t clip;
    int frame;
    metrics::Point p;
  };
  std::vector<GlobalPoint> pool;
  for (int id : res.test_clips) {
    const fixmap::VideoMeta* meta = nullptr;
    for (const auto& v : ds.videos)
      if (v.video_id == id) meta = &v;
    if (!meta) continue;
    ClipEval ce;
    ce.video_id = id;
    ce.frames = load_clip_frames(ds.clip_dir(id), meta->frame_count);
    ce.gt = load_clip_gt(ds.clip_dir(id), meta->frame_count);
    auto byframe = ds.fixations_by_frame(id);
    for (int f = 0; f < meta->frame_count; ++f)
      ce.fixations.push_back(
          to_fixation_set(byframe[static_cast<size_t>(f)], f, meta->vr_y, meta->vr_x));
    clips.push_back(std::move(ce));
  }
  for (size_t ci = 0; ci < clips.size(); ++ci)
    for (size_t f = 0; f < clips[ci].fixations.size(); ++f)
      for (const auto& p : clips[ci].fixations[f].points)
        pool.push_back({ci, static_cast<int>(f), p});

  // Scores one column: predictions per clip indexed like frames, frames
  // with index 0 skipped.
  auto score_column =
      [&](int col, const std::function<std::vector<ScalarField>(const ClipEval&)>& predict) {
        std::vector<double> clip_means[5];
        for (const auto& clip : clips) {
          std::vector<ScalarField> preds = predict(clip);
          double sums[5] = {0, 0, 0, 0, 0};
          int counted = 0;
          for (size_t f = 1; f < clip.frames.size(); ++f) {
            if (clip.fixations[f].points.empty()) continue;
            std::vector<metrics::Point> negatives;
            for (const auto& gp : pool) {
              if (clips[gp.clip].video_id == clip.video_id &&
                  gp.frame == static_cast<int>(f))
                continue;
              negatives.push_back(gp.p);
            }
            metrics::EvalConfig ecfg;
            ecfg.emd_grid = cfg.emd_grid;
            ecfg.seed = derive_seed(cfg.seed, "sauc/" + std::to_string(clip.video_id) + "/" +
                                                  std::to_string(f));
            metrics::MetricReport r =
                metrics::evaluate(preds[f], clip.gt[f], metrics::binarize_density(clip.gt[f]),
                                  clip.fixations[f], negatives, ecfg);
            sums[0] += r.s_auc;
            sums[1] += r.sim;
            sums[2] += r.cc;
            sums[3] += r.nss;
            sums[4] += r.emd;
            ++counted;
          }
          if (counted == 0) continue;
          for (int mi = 0; mi < 5; ++mi)
            clip_means[mi].push_back(sums[mi] / counted);
        }
        for (int mi = 0; mi < 5; ++mi) {
          double acc = 0.0;
          for (double v : clip_means[mi]) acc += v;
          res.values[static_cast<size_t>(mi)][static_cast<size_t>(col)] =
              clip_means[mi].empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : acc / static_cast<double>(clip_means[mi].size());
        }
        res.column_present[static_cast<size_t>(col)] = true;
      };

  // Spatial variants SGF(1..3): plain per-frame forward.
  const char* spatial_keys[3] = {"SGF1", "SGF2", "SGF3"};
  for (int vi = 0; vi < 3; ++vi) {
    auto it = loaded.find(spatial_keys[vi]);
    if (it == loaded.end()) continue;
    const net::LoadedParams& lp = it->second;
    score_column(vi, [&lp](const ClipEval& clip) {
      std::vector<ScalarField> preds;
      for (const auto& frame : clip.frames)
        preds.push_back(net::field_from_prediction(
            net::forward(lp.spec, lp.params, net::tensor_from_frame(frame))));
      return preds;
    });
  }

  // OPB alone: the boundary recursion scored as a saliency map.
  score_column(3, [&cfg](const ClipEval& clip) {
    std::vector<ScalarField> preds;
    preds.emplace_back(clip.frames[0].height, clip.frames[0].width, 0.0);
    ScalarField prev_b;
    bool has_prev = false;
    for (size_t f = 1; f < clip.frames.size(); ++f) {
      ScalarField b = opb::opb_pipeline(clip.frames[f - 1], clip.frames[f],
                                        has_prev ? &prev_b : nullptr, cfg.opb);
      preds.push_back(b);
      prev_b = std::move(b);
      has_prev = true;
    }
    return preds;
  });

  // SGF_nb and SGF(E): the full pipeline with and without the boundary.
  auto sgf3_it = loaded.find("SGF3");
  auto sgfe_it = loaded.find("SGFE");
  if (sgf3_it != loaded.end() && sgfe_it != loaded.end()) {
    const net::LoadedParams& l3 = sgf3_it->second;
    const net::LoadedParams& le = sgfe_it->second;
    for (int col = 4; col <= 5; ++col) {
      PipelineOptions opt;
      opt.zero_boundary = (col == 4);
      opt.opb = cfg.opb;
      score_column(col, [&](const ClipEval& clip) {
        VideoResult vr =
            run_video(clip.frames, l3.spec, l3.params, le.spec, le.params, opt);
        return vr.saliency;
      });
    }
  }
  return res;
}

std::string ablation_csv(const AblationResult& result) {
  std::ostringstream out;
  out << "metric";
  for (const auto& c : result.columns) out << "," << c;
  out << "\n";
  out.precision(6);
  out << std::fixed;
  for (size_t mi = 0; mi < result.metric_rows.size(); ++mi) {
    out << result.metric_rows[mi];
    for (size_t c = 0; c < result.columns.size(); ++c) {
      out << ",";
      const double v = result.values[mi][c];
      if (std::isnan(v))
        out << "absent";
      else
        out << v;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace sgf::cli
