#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgf/image.hpp"
#include "sgf/layers.hpp"
#include "sgf/scalar_field.hpp"
#include "sgf/tensor.hpp"

namespace sgf::net {

enum class Variant { SGF1, SGF2, SGF3, SGFE };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct LayerSpec {
  enum class Kind { Conv, ReLU, MaxPool, Deconv, Sigmoid, EltwiseMax };
  Kind kind = Kind::ReLU;
  std::string name;       // parameter key prefix for Conv/Deconv
  int out_channels = 0;   // Conv/Deconv
  int kernel = 0;         // Conv/Deconv/MaxPool
  int stride = 1;
  int pad = 0;            // Conv
  int crop = 0;           // Deconv
  bool ceil_pool = false; // MaxPool
  std::string aux_tag;    // EltwiseMax side input
};

struct NetworkScale {
  int input_side = 64;
  std::array<int, 5> block_widths = {8, 16, 32, 32, 32};

  bool operator==(const NetworkScale&) const = default;
};

struct NetworkSpec {
  Variant variant = Variant::SGF1;
  int input_channels = 3;
  NetworkScale scale;
  std::vector<LayerSpec> layers;
};

// Named parameters in declaration order (the manifest order for file I/O),
// plus per-parameter momentum buffers owned by the trainer.
struct ParamStore {
  std::vector<std::string> names;
  std::vector<Tensor> tensors;
  std::vector<Tensor> momentum;  // same shapes, lazily zeroed
  std::map<std::string, size_t> index;

  void add(const std::string& name, Tensor t);
  bool has(const std::string& name) const { return index.count(name) > 0; }
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;
  void ensure_momentum();
  int64_t total_values() const;
};

// Parameter gradients aligned with a ParamStore's declaration order.
struct Gradients {
  std::vector<Tensor> tensors;
};

// Builds one SGF variant: five VGG-style conv blocks (2,2,3,3,3 convs, 3x3
// pad 1, ReLU each, 2x2 stride-2 max pool per block), then a deconv stack
// whose strides are auto-solved so the output matches the input size.
// Deconv counts: SGF1=2, SGF2=3, SGF3=4, SGFE=3 (+EltwiseMax before the
// final Sigmoid, 4-channel input).
NetworkSpec build_sgf(Variant variant, const NetworkScale& scale);

// Fresh parameters: conv weights ~ N(0, 2/fan_in), biases 0, deconv
// weights Gaussian with fan-in scaling. Streams are derived per
// parameter name.
ParamStore init_params(const NetworkSpec& spec, uint64_t seed);

struct ForwardCache {
  std::vector<Tensor> inputs;              // input to each layer
  std::vector<MaxPoolResult> pools;        // per MaxPool layer, in order
  std::vector<EltwiseMaxResult> eltwises;  // per EltwiseMax layer, in order
  Tensor output;
};

// aux carries the boundary map for SGFE's EltwiseMax; required iff the
// spec contains an EltwiseMax layer.
Tensor forward(const NetworkSpec& spec, const ParamStore& params, const Tensor& input,
               const ScalarField* aux = nullptr, ForwardCache* cache = nullptr);

Gradients backward(const NetworkSpec& spec, const ParamStore& params, const ForwardCache& cache,
                   const Tensor& d_output);

// Stacks an RGB frame with the previous saliency map into the 4-channel
// SGFE input (channels 0-2 frame, channel 3 previous saliency).
Tensor assemble_sgfe_input(const RgbFrame& frame, const ScalarField& prev_saliency);

Tensor tensor_from_frame(const RgbFrame& frame);
ScalarField field_from_prediction(const Tensor& pred);  // (1,H,W) -> field

}  // namespace sgf::net
