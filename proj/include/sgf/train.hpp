#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sgf/network.hpp"
#include "sgf/scalar_field.hpp"
#include "sgf/tensor.hpp"

namespace sgf::train {

struct TrainConfig {
  double learning_rate = 1e-2;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  double eta = 1.0;  // cross-entropy weight in the stage-two loss
  int epochs = 5;
  int batch_size = 8;
  uint64_t seed = 42;
  int stage = 1;
};

// Hyperparameters from the original full-scale setup (500x500 inputs,
// unnormalized losses). On desk-scale data they barely move the weights;
// exposed behind --paper-hparams.
TrainConfig reference_hparams(int stage);

struct SamplePair {
  Tensor input;                          // (3,H,W) frame
  ScalarField gt;                        // ground truth in [0,1]
  std::optional<ScalarField> prev;       // previous-frame saliency (stage two)
  std::optional<ScalarField> boundary;   // OPB boundary map (SGFE only)
};

struct LossResult {
  double value = 0.0;
  ScalarField grad;  // d(loss)/d(prediction)
};

// 1/2 sum (G - P)^2.
LossResult loss_l1(const ScalarField& prediction, const ScalarField& gt);

// Quadratic term plus eta * cross-entropy, minimized at P == G. Predictions
// are clamped to [1e-7, 1 - 1e-7] before the log terms.
LossResult loss_l2(const ScalarField& prediction, const ScalarField& gt, double eta);

// v <- momentum*v - lr*(g + weight_decay*w); w <- w + v.
void sgd_step(net::ParamStore& params, const net::Gradients& grads, const TrainConfig& cfg);

// Copies every shape-matching conv parameter from src into a freshly
// initialized dst store. A 3->4 channel first conv copies channels 0-2 and
// zeroes the new slice; deconv parameters stay freshly Gaussian-initialized.
net::ParamStore transfer_params(const net::ParamStore& src, const net::NetworkSpec& src_spec,
                                const net::NetworkSpec& dst_spec, uint64_t seed);

struct EpochStat {
  std::string model;
  int epoch = 0;
  double loss = 0.0;
  int64_t wall_ms = 0;
};

struct StageOneResult {
  // Index 0..2 = SGF1..SGF3.
  std::vector<net::ParamStore> initial;  // epoch-0 stores, before any update
  std::vector<net::ParamStore> trained;
  std::vector<net::NetworkSpec> specs;
  std::vector<EpochStat> telemetry;
};

// Algorithm: train SGF1 fresh, then SGF2 and SGF3 each with the conv trunk
// initialized from the previously trained model, minimizing the quadratic
// loss by SGD with momentum. Deterministic per seed.
StageOneResult run_stage_one(const std::vector<SamplePair>& samples, const TrainConfig& cfg,
                             const net::NetworkScale& scale);

struct StageTwoResult {
  net::NetworkSpec sgf3_spec;
  net::ParamStore sgf3_finetuned;
  net::NetworkSpec sgfe_spec;
  net::ParamStore sgfe_initial;  // post-transfer, before any update
  net::ParamStore sgfe_trained;
  std::vector<EpochStat> telemetry;
};

// Fine-tunes SGF3 on the video samples with the stage-two loss, then
// transfers its trunk into SGFE (fresh deconvs, zeroed 4th-channel slice)
// and trains SGFE on [frame | prev-GT] inputs with the boundary side input.
// `finetune_rounds` controls how many spatial fine-tune passes precede the
// SGFE training (default one).
StageTwoResult run_stage_two(const std::vector<SamplePair>& video_samples,
                             const net::NetworkSpec& sgf3_spec,
                             const net::ParamStore& sgf3_params, const TrainConfig& cfg,
                             int finetune_rounds = 1);

struct SplitPlan {
  std::vector<int> fold_of;  // fold index per sample
  int folds = 10;
  int active_test_fold = 0;

  std::vector<int> test_indices() const;
  std::vector<int> train_indices() const;
};

// Shuffles 0..n-1 and deals the permutation into 10 near-equal folds.
SplitPlan cross_validation_split(int n, uint64_t seed);

}  // namespace sgf::train
