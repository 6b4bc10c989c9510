#include "sgf/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sgf/rng.hpp"

namespace sgf::train {

TrainConfig reference_hparams(int stage) {
  TrainConfig cfg;
  cfg.stage = stage;
  if (stage == 1) {
    cfg.learning_rate = 1e-10;
    cfg.momentum = 0.99;
    cfg.weight_decay = 5e-4;
  } else {
    cfg.learning_rate = 1e-11;
    cfg.momentum = 0.999;
    cfg.weight_decay = 5e-5;
  }
  return cfg;
}

LossResult loss_l1(const ScalarField& prediction, const ScalarField& gt) {
  if (!prediction.same_dims(gt)) throw std::invalid_argument("loss_l1: dims mismatch");
  LossResult res;
  res.grad = ScalarField(prediction.height, prediction.width);
  double acc = 0.0;
  for (size_t i = 0; i < prediction.values.size(); ++i) {
    const double d = gt.values[i] - prediction.values[i];
    acc += d * d;
    res.grad.values[i] = prediction.values[i] - gt.values[i];
  }
  res.value = 0.5 * acc;
  return res;
}

LossResult loss_l2(const ScalarField& prediction, const ScalarField& gt, double eta) {
  if (!prediction.same_dims(gt)) throw std::invalid_argument("loss_l2: dims mismatch");
  constexpr double kEps = 1e-7;
  LossResult res;
  res.grad = ScalarField(prediction.height, prediction.width);
  double quad = 0.0;
  double ce = 0.0;
  for (size_t i = 0; i < prediction.values.size(); ++i) {
    const double p_raw = prediction.values[i];
    const double g = gt.values[i];
    const double d = g - p_raw;
    quad += d * d;
    double grad = p_raw - g;
    const double p = std::clamp(p_raw, kEps, 1.0 - kEps);
    ce -= g * std::log(p) + (1.0 - g) * std::log(1.0 - p);
    if (p_raw > kEps && p_raw < 1.0 - kEps) grad += eta * (p - g) / (p * (1.0 - p));
    res.grad.values[i] = grad;
  }
  res.value = 0.5 * quad + eta * ce;
  return res;
}

void sgd_step(net::ParamStore& params, const net::Gradients& grads, const TrainConfig& cfg) {
  if (grads.tensors.size() != params.tensors.size())
    throw std::invalid_argument("sgd_step: gradient count mismatch");
  if (!(cfg.learning_rate > 0.0) || cfg.momentum < 0.0 || cfg.momentum >= 1.0 ||
      cfg.weight_decay < 0.0)
    throw std::invalid_argument("sgd_step: bad config");
  params.ensure_momentum();
  for (size_t t = 0; t < params.tensors.size(); ++t) {
    Tensor& w = params.tensors[t];
    Tensor& v = params.momentum[t];
    const Tensor& g = grads.tensors[t];
    if (!w.same_shape(g)) throw std::invalid_argument("sgd_step: shape mismatch");
    for (size_t i = 0; i < w.data.size(); ++i) {
      v.data[i] = cfg.momentum * v.data[i] -
                  cfg.learning_rate * (g.data[i] + cfg.weight_decay * w.data[i]);
      w.data[i] += v.data[i];
    }
  }
}

net::ParamStore transfer_params(const net::ParamStore& src, const net::NetworkSpec& src_spec,
                                const net::NetworkSpec& dst_spec, uint64_t seed) {
  net::ParamStore dst = net::init_params(dst_spec, seed);

  // Collect conv layer names per spec, in order.
  auto conv_names = [](const net::NetworkSpec& s) {
    std::vector<std::string> names;
    for (const auto& l : s.layers)
      if (l.kind == net::LayerSpec::Kind::Conv) names.push_back(l.name);
    return names;
  };
  const std::vector<std::string> src_convs = conv_names(src_spec);
  const std::vector<std::string> dst_convs = conv_names(dst_spec);
  if (src_convs != dst_convs)
    throw std::invalid_argument("transfer_params: conv trunks differ in layer structure");

  std::vector<std::string> mismatched;
  for (size_t ci = 0; ci < dst_convs.size(); ++ci) {
    const std::string& name = dst_convs[ci];
    const Tensor& sw = src.get(name + ".w");
    Tensor& dw = dst.get(name + ".w");
    if (sw.same_shape(dw)) {
      dw.data = sw.data;
    } else if (ci == 0 && sw.dim(0) == dw.dim(0) && sw.dim(1) == 3 && dw.dim(1) == 4 &&
               sw.dim(2) == dw.dim(2) && sw.dim(3) == dw.dim(3)) {
      // 3 -> 4 channel first conv: copy the RGB slices, zero the new one.
      const int O = dw.dim(0), kh = dw.dim(2), kw = dw.dim(3);
      std::fill(dw.data.begin(), dw.data.end(), 0.0);
      for (int o = 0; o < O; ++o)
        for (int c = 0; c < 3; ++c)
          for (int i = 0; i < kh * kw; ++i)
            dw.data[((static_cast<size_t>(o) * 4 + c) * kh * kw) + i] =
                sw.data[((static_cast<size_t>(o) * 3 + c) * kh * kw) + i];
    } else {
      mismatched.push_back(name);
      continue;
    }
    dst.get(name + ".b").data = src.get(name + ".b").data;
  }
  if (!mismatched.empty()) {
    std::string msg = "transfer_params: incompatible trunk layers:";
    for (const auto& n : mismatched) msg += " " + n;
    throw std::invalid_argument(msg);
  }
  return dst;
}

namespace {

Tensor flip_tensor_h(const Tensor& t) {
  const int C = t.dim(0), H = t.dim(1), W = t.dim(2);
  Tensor out(t.shape);
  for (int c = 0; c < C; ++c)
    for (int r = 0; r < H; ++r)
      for (int j = 0; j < W; ++j)
        out.data[(static_cast<size_t>(c) * H + r) * W + j] =
            t.data[(static_cast<size_t>(c) * H + r) * W + (W - 1 - j)];
  return out;
}

Tensor stack_prev_channel(const Tensor& frame, const ScalarField& prev) {
  const int H = frame.dim(1), W = frame.dim(2);
  if (prev.height != H || prev.width != W)
    throw std::invalid_argument("train: prev-saliency dims mismatch");
  Tensor t({4, H, W});
  std::copy(frame.data.begin(), frame.data.end(), t.data.begin());
  std::copy(prev.values.begin(), prev.values.end(),
            t.data.begin() + static_cast<long>(3) * H * W);
  return t;
}

// One SGD epoch over `samples` in a seeded shuffled order with seeded
// horizontal-flip augmentation. Returns the mean per-sample loss.
double train_epoch(const net::NetworkSpec& spec, net::ParamStore& params,
                   const std::vector<SamplePair>& samples, const TrainConfig& cfg, bool use_l2,
                   Rng& rng, const std::string& model) {
  if (samples.empty()) throw std::invalid_argument("train: empty sample set");
  std::vector<int> order(samples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[static_cast<size_t>(rng.uniform_int(static_cast<int>(i)))]);

  const bool needs_prev = spec.input_channels == 4;
  double epoch_loss = 0.0;
  size_t pos = 0;
  while (pos < order.size()) {
    const size_t bend = std::min(order.size(), pos + static_cast<size_t>(cfg.batch_size));
    const double inv_bn = 1.0 / static_cast<double>(bend - pos);

    net::Gradients acc;
    for (const auto& t : params.tensors) acc.tensors.emplace_back(t.shape);

    for (size_t bi = pos; bi < bend; ++bi) {
      const SamplePair& sample = samples[static_cast<size_t>(order[bi])];
      const bool flip = rng.uniform() < 0.5;

      Tensor frame = flip ? flip_tensor_h(sample.input) : sample.input;
      Tensor input;
      if (needs_prev) {
        if (!sample.prev) throw std::invalid_argument("train: sample lacks prev saliency");
        input = stack_prev_channel(frame, flip ? sample.prev->flipped_horizontal()
                                               : *sample.prev);
      } else {
        input = std::move(frame);
      }

      ScalarField aux;
      const ScalarField* aux_ptr = nullptr;
      if (spec.variant == net::Variant::SGFE) {
        if (!sample.boundary) throw std::invalid_argument("train: sample lacks boundary map");
        aux = flip ? sample.boundary->flipped_horizontal() : *sample.boundary;
        aux_ptr = &aux;
      }

      const ScalarField gt = flip ? sample.gt.flipped_horizontal() : sample.gt;

      net::ForwardCache cache;
      Tensor pred = net::forward(spec, params, input, aux_ptr, &cache);
      ScalarField pred_field = net::field_from_prediction(pred);
      LossResult loss = use_l2 ? loss_l2(pred_field, gt, cfg.eta) : loss_l1(pred_field, gt);
      if (!std::isfinite(loss.value))
        throw std::runtime_error("training diverged: non-finite loss in model " + model);
      epoch_loss += loss.value;

      Tensor dpred({1, gt.height, gt.width});
      dpred.data = loss.grad.values;
      for (double& v : dpred.data) v *= inv_bn;
      net::Gradients g = net::backward(spec, params, cache, dpred);
      for (size_t t = 0; t < acc.tensors.size(); ++t)
        for (size_t i = 0; i < acc.tensors[t].data.size(); ++i)
          acc.tensors[t].data[i] += g.tensors[t].data[i];
    }
    sgd_step(params, acc, cfg);
    pos = bend;
  }
  return epoch_loss / static_cast<double>(order.size());
}

void run_epochs(const net::NetworkSpec& spec, net::ParamStore& params,
                const std::vector<SamplePair>& samples, const TrainConfig& cfg, bool use_l2,
                const std::string& model, std::vector<EpochStat>& telemetry) {
  for (int e = 0; e < cfg.epochs; ++e) {
    Rng rng(derive_seed(cfg.seed, model + "/epoch" + std::to_string(e)));
    const auto t0 = std::chrono::steady_clock::now();
    const double loss = train_epoch(spec, params, samples, cfg, use_l2, rng, model);
    const auto t1 = std::chrono::steady_clock::now();
    telemetry.push_back(
        {model, e, loss,
         std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()});
  }
}

}  // namespace

StageOneResult run_stage_one(const std::vector<SamplePair>& samples, const TrainConfig& cfg,
                             const net::NetworkScale& scale) {
  if (samples.empty()) throw std::invalid_argument("run_stage_one: empty dataset");
  StageOneResult res;
  const net::Variant variants[3] = {net::Variant::SGF1, net::Variant::SGF2, net::Variant::SGF3};
  for (int i = 0; i < 3; ++i) {
    const std::string name = net::variant_name(variants[i]);
    net::NetworkSpec spec = net::build_sgf(variants[i], scale);
    net::ParamStore params =
        i == 0 ? net::init_params(spec, derive_seed(cfg.seed, "stage1/init/" + name))
               : transfer_params(res.trained.back(), res.specs.back(), spec,
                                 derive_seed(cfg.seed, "stage1/init/" + name));
    res.initial.push_back(params);
    run_epochs(spec, params, samples, cfg, /*use_l2=*/false, name, res.telemetry);
    res.specs.push_back(std::move(spec));
    res.trained.push_back(std::move(params));
  }
  return res;
}

StageTwoResult run_stage_two(const std::vector<SamplePair>& video_samples,
                             const net::NetworkSpec& sgf3_spec,
                             const net::ParamStore& sgf3_params, const TrainConfig& cfg,
                             int finetune_rounds) {
  if (video_samples.empty()) throw std::invalid_argument("run_stage_two: empty dataset");
  for (const auto& s : video_samples)
    if (!s.prev || !s.boundary)
      throw std::invalid_argument("run_stage_two: samples need prev saliency and boundary maps");

  StageTwoResult res;
  res.sgf3_spec = sgf3_spec;
  res.sgf3_finetuned = sgf3_params;
  for (int round = 0; round < finetune_rounds; ++round)
    run_epochs(sgf3_spec, res.sgf3_finetuned, video_samples, cfg, /*use_l2=*/true,
               "SGF3-ft" + std::to_string(round + 1), res.telemetry);

  res.sgfe_spec = net::build_sgf(net::Variant::SGFE, sgf3_spec.scale);
  res.sgfe_initial = transfer_params(res.sgf3_finetuned, sgf3_spec, res.sgfe_spec,
                                     derive_seed(cfg.seed, "stage2/init/SGFE"));
  res.sgfe_trained = res.sgfe_initial;
  run_epochs(res.sgfe_spec, res.sgfe_trained, video_samples, cfg, /*use_l2=*/true, "SGFE",
             res.telemetry);
  return res;
}

std::vector<int> SplitPlan::test_indices() const {
  std::vector<int> out;
  for (size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == active_test_fold) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> SplitPlan::train_indices() const {
  std::vector<int> out;
  for (size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != active_test_fold) out.push_back(static_cast<int>(i));
  return out;
}

SplitPlan cross_validation_split(int n, uint64_t seed) {
  if (n < 10) throw std::invalid_argument("cross_validation_split: need at least 10 samples");
  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
  Rng rng(derive_seed(seed, "cv-split"));
  for (size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[static_cast<size_t>(rng.uniform_int(static_cast<int>(i)))]);

  SplitPlan plan;
  plan.fold_of.assign(static_cast<size_t>(n), 0);
  for (int j = 0; j < n; ++j) plan.fold_of[static_cast<size_t>(perm[static_cast<size_t>(j)])] = j % 10;
  return plan;
}

}  // namespace sgf::train
