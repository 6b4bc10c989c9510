#include "sgf/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgf/fixmap.hpp"
#include "sgf/image.hpp"
#include "sgf/metrics.hpp"
#include "sgf/network.hpp"
#include "sgf/opb.hpp"
#include "sgf/params_io.hpp"
#include "sgf/pipeline.hpp"
#include "sgf/rng.hpp"
#include "sgf/synthetic.hpp"
#include "sgf/train.hpp"

namespace sgf::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

void write_manifest(const fs::path& out_dir, const std::string& tool,
                    const std::vector<std::string>& args, const nlohmann::json& config) {
  nlohmann::json m;
  m["tool"] = tool;
  m["version"] = kVersion;
  m["args"] = args;
  m["config"] = config;
  std::ofstream f(out_dir / "manifest.json");
  f << m.dump(2) << "\n";
}

bool parse_screen(const std::string& s, fixmap::ScreenMeta& screen) {
  const auto x = s.find('x');
  if (x == std::string::npos) return false;
  try {
    screen.sr_x = std::stoi(s.substr(0, x));
    screen.sr_y = std::stoi(s.substr(x + 1));
  } catch (const std::exception&) {
    return false;
  }
  return screen.sr_x > 0 && screen.sr_y > 0;
}

// A video directory holds frame_000000.ppm; a dataset root may hold many.
std::vector<fs::path> discover_video_dirs(const fs::path& root) {
  std::vector<fs::path> dirs;
  if (fs::exists(root / "frame_000000.ppm")) {
    dirs.push_back(root);
    return dirs;
  }
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory() && fs::exists(entry.path() / "frame_000000.ppm"))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

int count_frames(const fs::path& dir) {
  int n = 0;
  while (fs::exists(dir / indexed_name("frame_", n, "ppm"))) ++n;
  return n;
}

// Maps trailing frame indices to files: any "<prefix>_<6 digits>.pgm".
std::map<int, fs::path> index_pgms(const fs::path& dir) {
  std::map<int, fs::path> out;
  static const std::regex pat(R"(.*_(\d{6})\.pgm$)");
  if (!fs::exists(dir)) return out;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::smatch m;
    const std::string name = p.filename().string();
    if (std::regex_match(name, m, pat)) out.emplace(std::stoi(m[1].str()), p);
  }
  return out;
}

void add_opb_flags(CLI::App* cmd, opb::OpbParams& p) {
  cmd->add_option("--theta", p.theta, "absolute flow-gradient threshold (<0 = adaptive)");
  cmd->add_option("--theta-q", p.theta_q, "adaptive threshold scale on the 99th percentile");
  cmd->add_option("--alpha", p.alpha, "boundary weighting");
  cmd->add_option("--mu", p.mu, "previous-boundary weight");
  cmd->add_option("--lambda", p.lambda, "propagated-term weight");
  cmd->add_option("--sigma", p.sigma, "recursion gate");
  cmd->add_option("--superpixels", p.superpixel_count, "SLIC superpixel count");
  cmd->add_option("--compactness", p.compactness, "SLIC compactness");
  cmd->add_option("--flow-iterations", p.flow_iterations, "Jacobi sweeps per warp");
  cmd->add_option("--flow-smoothness", p.flow_smoothness, "flow regularization weight");
}

train::TrainConfig load_train_config(const std::optional<std::string>& path) {
  train::TrainConfig cfg;
  if (!path) return cfg;
  std::ifstream in(*path);
  if (!in) throw std::runtime_error("cannot open config " + *path);
  nlohmann::json j;
  in >> j;
  if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("momentum")) cfg.momentum = j["momentum"].get<double>();
  if (j.contains("weight_decay")) cfg.weight_decay = j["weight_decay"].get<double>();
  if (j.contains("eta")) cfg.eta = j["eta"].get<double>();
  if (j.contains("epochs")) cfg.epochs = j["epochs"].get<int>();
  if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
  if (j.contains("stage")) cfg.stage = j["stage"].get<int>();
  return cfg;
}

nlohmann::json train_config_json(const train::TrainConfig& cfg) {
  return {{"learning_rate", cfg.learning_rate}, {"momentum", cfg.momentum},
          {"weight_decay", cfg.weight_decay},   {"eta", cfg.eta},
          {"epochs", cfg.epochs},               {"batch_size", cfg.batch_size},
          {"seed", cfg.seed},                   {"stage", cfg.stage}};
}

void append_train_log(const fs::path& log_path, const std::vector<train::EpochStat>& stats) {
  const bool fresh = !fs::exists(log_path);
  std::ofstream out(log_path, std::ios::app);
  if (fresh) out << "epoch,loss,wall_ms\n";
  out.precision(12);
  for (const auto& s : stats) out << s.epoch << "," << s.loss << "," << s.wall_ms << "\n";
}

fs::path sibling_path(const fs::path& base, const std::string& suffix) {
  fs::path p = base;
  const std::string stem = p.stem().string();
  const std::string ext = p.extension().string();
  p.replace_filename(stem + suffix + ext);
  return p;
}

int cmd_synth(const SyntheticSpec& spec, const std::string& out,
              const std::vector<std::string>& args) {
  generate_synthetic(spec, out);
  (void)args;
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"video eye-fixation pipeline: ground truth, OPB boundaries, SGF training, "
               "inference and saliency metrics"};
  app.require_subcommand(1);

  // --- synth ---------------------------------------------------------
  SyntheticSpec synth_spec;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic moving-object dataset");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--clips", synth_spec.clips);
  synth->add_option("--frames", synth_spec.frames_per_clip);
  synth->add_option("--size", synth_spec.frame_size);
  synth->add_option("--object", synth_spec.object)->check(CLI::IsMember({"square", "disc"}));
  synth->add_option("--trajectory", synth_spec.trajectory)
      ->check(CLI::IsMember({"linear", "sinusoidal"}));
  synth->add_option("--noise", synth_spec.noise);
  synth->add_option("--subjects", synth_spec.subjects);
  synth->add_option("--speed", synth_spec.speed);
  synth->add_option("--object-size", synth_spec.object_size);
  synth->add_option("--jitter", synth_spec.gaze_jitter);
  synth->add_option("--fps", synth_spec.fps);
  synth->add_option("--window", synth_spec.splat_window, "splat window (0 = auto)");
  synth->add_option("--seed", synth_spec.seed);

  // --- fixmap --------------------------------------------------------
  std::string fixmap_gaze, fixmap_videos, fixmap_out, fixmap_screen;
  fixmap::GaussianSplatParams splat_params;
  CLI::App* fix = app.add_subcommand("fixmap", "gaze logs -> fixation density maps");
  fix->add_option("--gaze", fixmap_gaze, "gaze CSV")->required();
  fix->add_option("--videos", fixmap_videos, "video metadata JSON")->required();
  fix->add_option("--out", fixmap_out, "output directory")->required();
  fix->add_option("--screen", fixmap_screen, "display resolution WxH (default: video size)");
  fix->add_option("--window", splat_params.window_w, "splat window W");
  fix->add_option("--alpha", splat_params.alpha, "splat amplitude");
  fix->add_option("--beta", splat_params.beta, "splat decay");

  // --- opb -----------------------------------------------------------
  std::string opb_frames, opb_out;
  opb::OpbParams opb_params;
  uint64_t opb_seed = 0;
  CLI::App* opbc = app.add_subcommand("opb", "moving-object boundary maps from frame pairs");
  opbc->add_option("--frames", opb_frames, "frame directory")->required();
  opbc->add_option("--out", opb_out, "output directory")->required();
  add_opb_flags(opbc, opb_params);
  opbc->add_option("--seed", opb_seed);

  // --- train ---------------------------------------------------------
  int train_stage = 1;
  std::string train_data, train_out, train_sgf3;
  std::optional<std::string> train_config_path;
  bool paper_hparams = false;
  std::optional<uint64_t> train_seed;
  std::optional<int> train_epochs;
  int train_fold = 0;
  int finetune_rounds = 1;
  CLI::App* tr = app.add_subcommand("train", "two-stage SGF training");
  tr->add_option("--stage", train_stage)->check(CLI::IsMember({1, 2}))->required();
  tr->add_option("--data", train_data, "dataset directory")->required();
  tr->add_option("--out", train_out, "output parameter file")->required();
  tr->add_option("--config", train_config_path, "TrainConfig JSON");
  tr->add_flag("--paper-hparams", paper_hparams,
               "use the reference full-scale hyperparameters");
  tr->add_option("--seed", train_seed);
  tr->add_option("--epochs", train_epochs);
  tr->add_option("--fold", train_fold, "held-out fold (0-9)");
  tr->add_option("--finetune-rounds", finetune_rounds, "stage-2 spatial fine-tune rounds");
  opb::OpbParams train_opb;
  add_opb_flags(tr, train_opb);
  tr->add_option("--sgf3", train_sgf3, "stage-one SGF3 parameters (stage 2)");

  // --- infer ---------------------------------------------------------
  std::string infer_params, infer_frames, infer_out;
  CLI::App* inf = app.add_subcommand("infer", "framewise forward pass of a spatial variant");
  inf->add_option("--params", infer_params)->required();
  inf->add_option("--frames", infer_frames)->required();
  inf->add_option("--out", infer_out)->required();

  // --- pipeline ------------------------------------------------------
  std::string pipe_sgf3, pipe_sgfe, pipe_frames, pipe_out;
  bool pipe_zero_boundary = false;
  opb::OpbParams pipe_opb;
  CLI::App* pipe = app.add_subcommand(
      "pipeline", "full temporal pipeline: SGF(3) on frame one, then SGF(E) + OPB");
  pipe->add_option("--sgf3", pipe_sgf3)->required();
  pipe->add_option("--sgfe", pipe_sgfe)->required();
  pipe->add_option("--frames", pipe_frames)->required();
  pipe->add_option("--out", pipe_out)->required();
  pipe->add_flag("--zero-boundary", pipe_zero_boundary, "feed an all-zero boundary (SGF_nb)");
  add_opb_flags(pipe, pipe_opb);

  // --- eval ----------------------------------------------------------
  std::string eval_pred, eval_gt, eval_fix, eval_videos, eval_screen, eval_out, eval_curves;
  int eval_emd_grid = 16;
  uint64_t eval_seed = 0;
  CLI::App* ev = app.add_subcommand("eval", "saliency metrics for prediction maps");
  ev->add_option("--pred", eval_pred)->required();
  ev->add_option("--gt", eval_gt)->required();
  ev->add_option("--fixations", eval_fix)->required();
  ev->add_option("--videos", eval_videos, "metadata JSON (default: <gt>/videos.json)");
  ev->add_option("--screen", eval_screen, "display resolution WxH");
  ev->add_option("--out", eval_out)->required();
  ev->add_option("--curves", eval_curves, "write mean PR/ROC curve CSV");
  ev->add_option("--emd-grid", eval_emd_grid);
  ev->add_option("--seed", eval_seed);

  // --- ablate --------------------------------------------------------
  std::string ab_data, ab_out, ab_sgf1, ab_sgf2, ab_sgf3, ab_sgfe;
  AblationConfig ab_cfg;
  CLI::App* ab = app.add_subcommand("ablate", "ablation table on the held-out fold");
  ab->add_option("--data", ab_data)->required();
  ab->add_option("--out", ab_out)->required();
  ab->add_option("--sgf1", ab_sgf1);
  ab->add_option("--sgf2", ab_sgf2);
  ab->add_option("--sgf3", ab_sgf3);
  ab->add_option("--sgfe", ab_sgfe);
  ab->add_option("--fold", ab_cfg.fold);
  ab->add_option("--seed", ab_cfg.seed);
  ab->add_option("--emd-grid", ab_cfg.emd_grid);
  add_opb_flags(ab, ab_cfg.opb);

  std::vector<const char*> argv;
  argv.push_back("sgfcn");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      return app.exit(e);
    }
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(synth_spec, synth_out, args);
    }

    if (fix->parsed()) {
      fs::create_directories(fixmap_out);
      auto videos = fixmap::read_videos_json(fixmap_videos);
      auto gaze = fixmap::read_gaze_csv(fixmap_gaze);
      int64_t flagged = 0;
      for (const auto& meta : videos) {
        fixmap::ScreenMeta screen{meta.vr_x, meta.vr_y};
        if (!fixmap_screen.empty() && !parse_screen(fixmap_screen, screen))
          throw std::runtime_error("bad --screen value: " + fixmap_screen);
        std::vector<std::vector<fixmap::FrameFixation>> per_frame(
            static_cast<size_t>(meta.frame_count));
        for (const auto& s : gaze) {
          if (s.video_id != meta.video_id) continue;
          fixmap::NormalizedGaze ng = fixmap::normalize_gaze(s, meta, screen);
          if (ng.out_of_range) {
            ++flagged;
            continue;
          }
          per_frame[static_cast<size_t>(ng.fixation.frame_index)].push_back(ng.fixation);
        }
        char dirbuf[32];
        std::snprintf(dirbuf, sizeof(dirbuf), "clip_%03d", meta.video_id);
        const fs::path clip_dir = fs::path(fixmap_out) / dirbuf;
        fs::create_directories(clip_dir);
        for (int f = 0; f < meta.frame_count; ++f) {
          ScalarField map = fixmap::accumulate_fixation_map(
              per_frame[static_cast<size_t>(f)], splat_params, meta.vr_y, meta.vr_x);
          write_pgm(clip_dir / indexed_name("gt_", f, "pgm"), fixmap::quantize_map(map));
        }
      }
      if (flagged > 0)
        std::cerr << nlohmann::json{{"warning", "out-of-range gaze samples skipped"},
                                    {"count", flagged}}
                         .dump()
                  << "\n";
      write_manifest(fixmap_out, "sgfcn fixmap", args,
                     {{"window", splat_params.window_w},
                      {"alpha", splat_params.alpha},
                      {"beta", splat_params.beta},
                      {"flagged_samples", flagged}});
      return 0;
    }

    if (opbc->parsed()) {
      fs::create_directories(opb_out);
      opb_params.seed = opb_seed;
      const int n = count_frames(opb_frames);
      if (n < 2) throw std::runtime_error("opb: need at least two frames in " + opb_frames);
      RgbFrame prev = read_ppm(fs::path(opb_frames) / indexed_name("frame_", 0, "ppm"));
      ScalarField prev_b;
      bool has_prev_b = false;
      for (int f = 1; f < n; ++f) {
        RgbFrame cur = read_ppm(fs::path(opb_frames) / indexed_name("frame_", f, "ppm"));
        ScalarField b = opb::opb_pipeline(prev, cur, has_prev_b ? &prev_b : nullptr, opb_params);
        write_pgm(fs::path(opb_out) / indexed_name("b_", f, "pgm"), fixmap::quantize_map(b));
        prev_b = std::move(b);
        has_prev_b = true;
        prev = std::move(cur);
      }
      write_manifest(opb_out, "sgfcn opb", args,
                     {{"seed", opb_seed},
                      {"theta", opb_params.theta},
                      {"theta_q", opb_params.theta_q},
                      {"alpha", opb_params.alpha},
                      {"mu", opb_params.mu},
                      {"lambda", opb_params.lambda},
                      {"sigma", opb_params.sigma},
                      {"superpixels", opb_params.superpixel_count}});
      return 0;
    }

    if (tr->parsed()) {
      train::TrainConfig cfg = paper_hparams ? train::reference_hparams(train_stage)
                                             : load_train_config(train_config_path);
      if (paper_hparams && train_config_path) {
        train::TrainConfig file_cfg = load_train_config(train_config_path);
        cfg.eta = file_cfg.eta;
        cfg.epochs = file_cfg.epochs;
        cfg.batch_size = file_cfg.batch_size;
        cfg.seed = file_cfg.seed;
      }
      cfg.stage = train_stage;
      if (train_seed) cfg.seed = *train_seed;
      if (train_epochs) cfg.epochs = *train_epochs;

      Dataset ds = load_dataset(train_data);
      train::SplitPlan split =
          train::cross_validation_split(static_cast<int>(ds.videos.size()), cfg.seed);
      split.active_test_fold = train_fold;
      std::vector<int> train_clips = split.train_indices();

      const fs::path out_path(train_out);
      if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
      const fs::path log_path =
          (out_path.has_parent_path() ? out_path.parent_path() : fs::path(".")) /
          "train_log.csv";

      if (train_stage == 1) {
        std::vector<train::SamplePair> samples = stage_one_samples(ds, train_clips);
        net::NetworkScale scale;
        scale.input_side = ds.videos.front().vr_x;
        train::StageOneResult res = train::run_stage_one(samples, cfg, scale);
        net::save_params(sibling_path(out_path, "_sgf1"), res.specs[0], res.trained[0]);
        net::save_params(sibling_path(out_path, "_sgf2"), res.specs[1], res.trained[1]);
        net::save_params(out_path, res.specs[2], res.trained[2]);
        append_train_log(log_path, res.telemetry);
      } else {
        if (train_sgf3.empty())
          throw std::runtime_error("train --stage 2 requires --sgf3 (stage-one parameters)");
        net::LoadedParams sgf3 = net::load_params(train_sgf3);
        std::vector<train::SamplePair> samples = stage_two_samples(ds, train_clips, train_opb);
        train::StageTwoResult res =
            train::run_stage_two(samples, sgf3.spec, sgf3.params, cfg, finetune_rounds);
        net::save_params(sibling_path(out_path, "_sgf3ft"), res.sgf3_spec, res.sgf3_finetuned);
        net::save_params(out_path, res.sgfe_spec, res.sgfe_trained);
        append_train_log(log_path, res.telemetry);
      }
      if (out_path.has_parent_path())
        write_manifest(out_path.parent_path(), "sgfcn train", args, train_config_json(cfg));
      return 0;
    }

    if (inf->parsed()) {
      net::LoadedParams lp = net::load_params(infer_params);
      if (lp.spec.variant == net::Variant::SGFE)
        throw std::runtime_error("infer: SGFE needs the temporal pipeline (use `pipeline`)");
      fs::create_directories(infer_out);
      int failures = 0;
      for (const auto& dir : discover_video_dirs(infer_frames)) {
        try {
          const int n = count_frames(dir);
          const fs::path out_dir =
              dir == fs::path(infer_frames) ? fs::path(infer_out)
                                            : fs::path(infer_out) / dir.filename();
          fs::create_directories(out_dir);
          for (int f = 0; f < n; ++f) {
            RgbFrame frame = read_ppm(dir / indexed_name("frame_", f, "ppm"));
            Tensor pred = net::forward(lp.spec, lp.params, net::tensor_from_frame(frame));
            write_pgm(out_dir / indexed_name("ef_", f, "pgm"),
                      fixmap::quantize_map(net::field_from_prediction(pred)));
          }
        } catch (const std::exception& e) {
          ++failures;
          std::cerr << nlohmann::json{{"error", e.what()}, {"video", dir.string()}}.dump()
                    << "\n";
        }
      }
      write_manifest(infer_out, "sgfcn infer", args,
                     {{"params", infer_params}, {"failures", failures}});
      return failures == 0 ? 0 : 1;
    }

    if (pipe->parsed()) {
      net::LoadedParams sgf3 = net::load_params(pipe_sgf3);
      net::LoadedParams sgfe = net::load_params(pipe_sgfe);
      PipelineOptions opt;
      opt.zero_boundary = pipe_zero_boundary;
      opt.opb = pipe_opb;
      fs::create_directories(pipe_out);
      int failures = 0;
      for (const auto& dir : discover_video_dirs(pipe_frames)) {
        try {
          const int n = count_frames(dir);
          std::vector<RgbFrame> frames;
          for (int f = 0; f < n; ++f)
            frames.push_back(read_ppm(dir / indexed_name("frame_", f, "ppm")));
          VideoResult vr =
              run_video(frames, sgf3.spec, sgf3.params, sgfe.spec, sgfe.params, opt);
          const fs::path out_dir = dir == fs::path(pipe_frames)
                                       ? fs::path(pipe_out)
                                       : fs::path(pipe_out) / dir.filename();
          fs::create_directories(out_dir);
          for (size_t f = 0; f < vr.saliency.size(); ++f)
            write_pgm(out_dir / indexed_name("ef_", static_cast<int>(f), "pgm"),
                      fixmap::quantize_map(vr.saliency[f]));
        } catch (const std::exception& e) {
          ++failures;
          std::cerr << nlohmann::json{{"error", e.what()}, {"video", dir.string()}}.dump()
                    << "\n";
        }
      }
      write_manifest(pipe_out, "sgfcn pipeline", args,
                     {{"zero_boundary", pipe_zero_boundary}, {"failures", failures}});
      return failures == 0 ? 0 : 1;
    }

    if (ev->parsed()) {
      const fs::path gt_root(eval_gt);
      const fs::path videos_path =
          eval_videos.empty() ? gt_root / "videos.json" : fs::path(eval_videos);
      auto videos = fixmap::read_videos_json(videos_path);
      auto gaze = fixmap::read_gaze_csv(eval_fix);

      nlohmann::json per_frame = nlohmann::json::array();
      double sums[5] = {0, 0, 0, 0, 0};
      std::array<double, 256> csum_p{}, csum_tpr{}, csum_fpr{};
      int64_t counted = 0;
      nlohmann::json skipped = nlohmann::json::array();

      struct PoolPoint {
        int video, frame;
        metrics::Point p;
      };
      std::vector<PoolPoint> pool;
      std::map<std::pair<int, int>, metrics::FixationSet> fix_by_frame;
      for (const auto& meta : videos) {
        fixmap::ScreenMeta screen{meta.vr_x, meta.vr_y};
        if (!eval_screen.empty() && !parse_screen(eval_screen, screen))
          throw std::runtime_error("bad --screen value: " + eval_screen);
        for (const auto& s : gaze) {
          if (s.video_id != meta.video_id) continue;
          fixmap::NormalizedGaze ng = fixmap::normalize_gaze(s, meta, screen);
          if (ng.out_of_range) continue;
          metrics::Point p;
          p.x = std::clamp(static_cast<int>(std::llround(ng.fixation.x)), 0, meta.vr_x - 1);
          p.y = std::clamp(static_cast<int>(std::llround(ng.fixation.y)), 0, meta.vr_y - 1);
          auto& set = fix_by_frame[{meta.video_id, ng.fixation.frame_index}];
          set.frame_index = ng.fixation.frame_index;
          set.points.push_back(p);
          pool.push_back({meta.video_id, ng.fixation.frame_index, p});
        }
      }

      for (const auto& meta : videos) {
        char dirbuf[32];
        std::snprintf(dirbuf, sizeof(dirbuf), "clip_%03d", meta.video_id);
        fs::path pred_dir = fs::path(eval_pred) / dirbuf;
        fs::path gt_dir = gt_root / dirbuf;
        if (!fs::exists(pred_dir) && videos.size() == 1) pred_dir = eval_pred;
        if (!fs::exists(gt_dir) && videos.size() == 1) gt_dir = gt_root;
        std::map<int, fs::path> preds = index_pgms(pred_dir);
        std::map<int, fs::path> gts = index_pgms(gt_dir);

        for (int f = 0; f < meta.frame_count; ++f) {
          auto pit = preds.find(f);
          auto git = gts.find(f);
          auto fit = fix_by_frame.find({meta.video_id, f});
          if (pit == preds.end() || git == gts.end() || fit == fix_by_frame.end() ||
              fit->second.points.empty()) {
            skipped.push_back({{"video", meta.video_id},
                               {"frame", f},
                               {"reason", pit == preds.end()   ? "no prediction"
                                          : git == gts.end()  ? "no ground truth"
                                                              : "no fixations"}});
            continue;
          }
          try {
            ScalarField pred = field_from_gray(read_pgm(pit->second));
            ScalarField gt = field_from_gray(read_pgm(git->second));
            std::vector<metrics::Point> negatives;
            for (const auto& gp : pool)
              if (!(gp.video == meta.video_id && gp.frame == f)) negatives.push_back(gp.p);
            metrics::EvalConfig ecfg;
            ecfg.emd_grid = eval_emd_grid;
            ecfg.seed = derive_seed(eval_seed, "sauc/" + std::to_string(meta.video_id) + "/" +
                                                   std::to_string(f));
            metrics::MetricReport r = metrics::evaluate(
                pred, gt, metrics::binarize_density(gt), fit->second, negatives, ecfg);
            per_frame.push_back({{"video", meta.video_id},
                                 {"frame", f},
                                 {"s_auc", r.s_auc},
                                 {"nss", r.nss},
                                 {"cc", r.cc},
                                 {"sim", r.sim},
                                 {"emd", r.emd}});
            sums[0] += r.s_auc;
            sums[1] += r.nss;
            sums[2] += r.cc;
            sums[3] += r.sim;
            sums[4] += r.emd;
            for (int t = 0; t < 256; ++t) {
              csum_p[static_cast<size_t>(t)] += r.curves.points[static_cast<size_t>(t)].precision;
              csum_tpr[static_cast<size_t>(t)] += r.curves.points[static_cast<size_t>(t)].tpr;
              csum_fpr[static_cast<size_t>(t)] += r.curves.points[static_cast<size_t>(t)].fpr;
            }
            ++counted;
          } catch (const std::exception& e) {
            skipped.push_back(
                {{"video", meta.video_id}, {"frame", f}, {"reason", e.what()}});
          }
        }
      }

      nlohmann::json report;
      report["per_frame"] = per_frame;
      report["skipped"] = skipped;
      if (counted > 0)
        report["mean"] = {{"s_auc", sums[0] / counted},
                          {"nss", sums[1] / counted},
                          {"cc", sums[2] / counted},
                          {"sim", sums[3] / counted},
                          {"emd", sums[4] / counted}};
      std::ofstream out(eval_out);
      out << report.dump(2) << "\n";

      if (!eval_curves.empty() && counted > 0) {
        std::ofstream cf(eval_curves);
        cf << "threshold,precision,tpr,fpr\n";
        cf.precision(12);
        for (int t = 0; t < 256; ++t)
          cf << t << "," << csum_p[static_cast<size_t>(t)] / counted << ","
             << csum_tpr[static_cast<size_t>(t)] / counted << ","
             << csum_fpr[static_cast<size_t>(t)] / counted << "\n";
      }
      return 0;
    }

    if (ab->parsed()) {
      Dataset ds = load_dataset(ab_data);
      std::map<std::string, fs::path> paths;
      if (!ab_sgf1.empty()) paths["SGF1"] = ab_sgf1;
      if (!ab_sgf2.empty()) paths["SGF2"] = ab_sgf2;
      if (!ab_sgf3.empty()) paths["SGF3"] = ab_sgf3;
      if (!ab_sgfe.empty()) paths["SGFE"] = ab_sgfe;
      AblationResult res = run_ablation(ds, paths, ab_cfg);
      fs::create_directories(ab_out);
      std::ofstream out(fs::path(ab_out) / "ablation.csv");
      out << ablation_csv(res);
      write_manifest(ab_out, "sgfcn ablate", args,
                     {{"fold", ab_cfg.fold},
                      {"seed", ab_cfg.seed},
                      {"emd_grid", ab_cfg.emd_grid},
                      {"test_clips", res.test_clips}});
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  std::cerr << nlohmann::json{{"error", "no subcommand"}}.dump() << "\n";
  return 1;
}

}  // namespace sgf::cli
