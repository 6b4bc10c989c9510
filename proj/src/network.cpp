#include "sgf/network.hpp"

#include <cmath>
#include <stdexcept>

#include "sgf/rng.hpp"

namespace sgf::net {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::SGF1: return "SGF1";
    case Variant::SGF2: return "SGF2";
    case Variant::SGF3: return "SGF3";
    case Variant::SGFE: return "SGFE";
  }
  throw std::logic_error("variant_name: bad variant");
}

Variant variant_from_name(const std::string& name) {
  if (name == "SGF1") return Variant::SGF1;
  if (name == "SGF2") return Variant::SGF2;
  if (name == "SGF3") return Variant::SGF3;
  if (name == "SGFE") return Variant::SGFE;
  throw std::invalid_argument("unknown variant: " + name);
}

void ParamStore::add(const std::string& name, Tensor t) {
  if (index.count(name)) throw std::invalid_argument("ParamStore: duplicate name " + name);
  index[name] = names.size();
  names.push_back(name);
  tensors.push_back(std::move(t));
}

Tensor& ParamStore::get(const std::string& name) {
  auto it = index.find(name);
  if (it == index.end()) throw std::invalid_argument("ParamStore: missing " + name);
  return tensors[it->second];
}

const Tensor& ParamStore::get(const std::string& name) const {
  auto it = index.find(name);
  if (it == index.end()) throw std::invalid_argument("ParamStore: missing " + name);
  return tensors[it->second];
}

void ParamStore::ensure_momentum() {
  if (momentum.size() == tensors.size()) return;
  momentum.clear();
  for (const auto& t : tensors) momentum.emplace_back(t.shape);
}

int64_t ParamStore::total_values() const {
  int64_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

namespace {

int deconv_count(Variant v) {
  switch (v) {
    case Variant::SGF1: return 2;
    case Variant::SGF2: return 3;
    case Variant::SGFE: return 3;
    case Variant::SGF3: return 4;
  }
  throw std::logic_error("deconv_count");
}

// Ceil-mode halving, matching the pool layers below.
int pooled_side(int side) { return side <= 2 ? 1 : (side - 2 + 1) / 2 + 1; }

// Factors `ratio` into n even upsampling strides (largest first). Each
// deconv uses kernel 2s and symmetric crop s/2, so one layer scales its
// input exactly by s; the product must equal the trunk's downsample ratio.
std::vector<int> solve_deconv_strides(int ratio, int n) {
  int base = 1 << n;
  if (ratio < base || ratio % base != 0)
    throw std::invalid_argument(
        "build_sgf: cannot factor spatial ratio " + std::to_string(ratio) + " into " +
        std::to_string(n) + " even deconv strides (deconv stack unsatisfiable)");
  std::vector<int> strides(static_cast<size_t>(n), 2);
  int extra = ratio / base;
  size_t i = 0;
  while (extra > 1) {
    if (extra % 2 != 0)
      throw std::invalid_argument("build_sgf: spatial ratio " + std::to_string(ratio) +
                                  " is not a power of two (deconv stack unsatisfiable)");
    strides[i] *= 2;
    extra /= 2;
    i = (i + 1) % strides.size();
  }
  return strides;
}

}  // namespace

NetworkSpec build_sgf(Variant variant, const NetworkScale& scale) {
  if (scale.input_side < 2) throw std::invalid_argument("build_sgf: input side too small");
  for (int w : scale.block_widths)
    if (w < 1) throw std::invalid_argument("build_sgf: non-positive block width");

  NetworkSpec spec;
  spec.variant = variant;
  spec.input_channels = variant == Variant::SGFE ? 4 : 3;
  spec.scale = scale;

  static const int convs_per_block[5] = {2, 2, 3, 3, 3};
  int side = scale.input_side;
  for (int blk = 0; blk < 5; ++blk) {
    for (int ci = 0; ci < convs_per_block[blk]; ++ci) {
      LayerSpec conv;
      conv.kind = LayerSpec::Kind::Conv;
      conv.name = "conv" + std::to_string(blk + 1) + "_" + std::to_string(ci + 1);
      conv.out_channels = scale.block_widths[static_cast<size_t>(blk)];
      conv.kernel = 3;
      conv.stride = 1;
      conv.pad = 1;
      spec.layers.push_back(conv);
      spec.layers.push_back({.kind = LayerSpec::Kind::ReLU});
    }
    LayerSpec pool;
    pool.kind = LayerSpec::Kind::MaxPool;
    pool.kernel = 2;
    pool.stride = 2;
    pool.ceil_pool = true;
    spec.layers.push_back(pool);
    side = pooled_side(side);
    if (side < 1)
      throw std::invalid_argument("build_sgf: block " + std::to_string(blk + 1) +
                                  " pools below one pixel");
  }

  const int n_deconv = deconv_count(variant);
  const int ratio = scale.input_side / side;
  if (side * ratio != scale.input_side)
    throw std::invalid_argument("build_sgf: trunk output side " + std::to_string(side) +
                                " does not divide input side");
  std::vector<int> strides = solve_deconv_strides(ratio, n_deconv);

  int channels = scale.block_widths[4];
  for (int d = 0; d < n_deconv; ++d) {
    LayerSpec dc;
    dc.kind = LayerSpec::Kind::Deconv;
    dc.name = "deconv" + std::to_string(d + 1);
    dc.out_channels = d == n_deconv - 1 ? 1 : std::max(2, channels / 2);
    dc.kernel = 2 * strides[static_cast<size_t>(d)];
    dc.stride = strides[static_cast<size_t>(d)];
    dc.crop = strides[static_cast<size_t>(d)] / 2;
    channels = dc.out_channels;
    spec.layers.push_back(dc);
    if (d != n_deconv - 1) spec.layers.push_back({.kind = LayerSpec::Kind::ReLU});
  }

  if (variant == Variant::SGFE) {
    LayerSpec em;
    em.kind = LayerSpec::Kind::EltwiseMax;
    em.aux_tag = "boundary";
    spec.layers.push_back(em);
  }
  spec.layers.push_back({.kind = LayerSpec::Kind::Sigmoid});
  return spec;
}

ParamStore init_params(const NetworkSpec& spec, uint64_t seed) {
  ParamStore store;
  int in_ch = spec.input_channels;
  for (const auto& layer : spec.layers) {
    if (layer.kind == LayerSpec::Kind::Conv) {
      Tensor w({layer.out_channels, in_ch, layer.kernel, layer.kernel});
      const double stddev =
          std::sqrt(2.0 / (static_cast<double>(in_ch) * layer.kernel * layer.kernel));
      Rng rng(derive_seed(seed, layer.name + ".w"));
      for (double& v : w.data) v = stddev * rng.normal();
      store.add(layer.name + ".w", std::move(w));
      store.add(layer.name + ".b", Tensor({layer.out_channels}));
      in_ch = layer.out_channels;
    } else if (layer.kind == LayerSpec::Kind::Deconv) {
      Tensor w({in_ch, layer.out_channels, layer.kernel, layer.kernel});
      // Each output pixel of a stride-s transposed conv receives
      // in_ch*(k/s)^2 taps; scale the Gaussian so activations keep O(1)
      // variance through the stack.
      const double taps = static_cast<double>(in_ch) *
                          (static_cast<double>(layer.kernel) / layer.stride) *
                          (static_cast<double>(layer.kernel) / layer.stride);
      const double stddev = std::sqrt(2.0 / taps);
      Rng rng(derive_seed(seed, layer.name + ".w"));
      for (double& v : w.data) v = stddev * rng.normal();
      store.add(layer.name + ".w", std::move(w));
      in_ch = layer.out_channels;
    }
  }
  return store;
}

Tensor forward(const NetworkSpec& spec, const ParamStore& params, const Tensor& input,
               const ScalarField* aux, ForwardCache* cache) {
  if (input.shape.size() != 3 || input.dim(0) != spec.input_channels)
    throw std::invalid_argument("forward: input must be (" +
                                std::to_string(spec.input_channels) + ",H,W)");
  bool wants_aux = false;
  for (const auto& l : spec.layers)
    if (l.kind == LayerSpec::Kind::EltwiseMax) wants_aux = true;
  if (wants_aux && aux == nullptr)
    throw std::invalid_argument("forward: SGFE requires a boundary map");
  if (!wants_aux && aux != nullptr)
    throw std::invalid_argument("forward: unexpected boundary map for spatial variant");

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.inputs.clear();
  c.pools.clear();
  c.eltwises.clear();

  Tensor x = input;
  for (const auto& layer : spec.layers) {
    c.inputs.push_back(x);
    switch (layer.kind) {
      case LayerSpec::Kind::Conv:
        x = conv_forward(x, params.get(layer.name + ".w"), params.get(layer.name + ".b"),
                         layer.stride, layer.pad);
        break;
      case LayerSpec::Kind::ReLU:
        x = relu_forward(x);
        break;
      case LayerSpec::Kind::MaxPool: {
        MaxPoolResult r = maxpool_forward(x, layer.kernel, layer.stride, layer.ceil_pool);
        x = r.y;
        c.pools.push_back(std::move(r));
        break;
      }
      case LayerSpec::Kind::Deconv:
        x = deconv_forward(x, params.get(layer.name + ".w"), layer.stride, layer.crop);
        break;
      case LayerSpec::Kind::Sigmoid:
        x = sigmoid_forward(x);
        break;
      case LayerSpec::Kind::EltwiseMax: {
        if (x.shape.size() != 3 || x.dim(0) != 1 || x.dim(1) != aux->height ||
            x.dim(2) != aux->width)
          throw std::invalid_argument("forward: boundary map dims mismatch");
        Tensor b({1, aux->height, aux->width});
        b.data = aux->values;
        EltwiseMaxResult r = eltwise_max_forward(x, b);
        x = r.y;
        c.eltwises.push_back(std::move(r));
        break;
      }
    }
  }
  c.output = x;
  return x;
}

Gradients backward(const NetworkSpec& spec, const ParamStore& params, const ForwardCache& cache,
                   const Tensor& d_output) {
  if (cache.inputs.size() != spec.layers.size())
    throw std::invalid_argument("backward: cache does not match spec");

  Gradients grads;
  grads.tensors.reserve(params.tensors.size());
  for (const auto& t : params.tensors) grads.tensors.emplace_back(t.shape);

  Tensor d = d_output;
  size_t pool_i = cache.pools.size();
  size_t elt_i = cache.eltwises.size();
  for (size_t li = spec.layers.size(); li-- > 0;) {
    const auto& layer = spec.layers[li];
    const Tensor& x = cache.inputs[li];
    switch (layer.kind) {
      case LayerSpec::Kind::Conv: {
        ConvGrads g = conv_backward(x, params.get(layer.name + ".w"), d, layer.stride, layer.pad);
        grads.tensors[params.index.at(layer.name + ".w")] = std::move(g.dw);
        grads.tensors[params.index.at(layer.name + ".b")] = std::move(g.db);
        d = std::move(g.dx);
        break;
      }
      case LayerSpec::Kind::ReLU:
        d = relu_backward(x, d);
        break;
      case LayerSpec::Kind::MaxPool:
        --pool_i;
        d = maxpool_backward(x.shape, cache.pools[pool_i], d);
        break;
      case LayerSpec::Kind::Deconv: {
        DeconvGrads g = deconv_backward(x, params.get(layer.name + ".w"), d, layer.stride,
                                        layer.crop);
        grads.tensors[params.index.at(layer.name + ".w")] = std::move(g.dw);
        d = std::move(g.dx);
        break;
      }
      case LayerSpec::Kind::Sigmoid: {
        // Recompute the forward output from the cached input.
        Tensor y = sigmoid_forward(x);
        d = sigmoid_backward(y, d);
        break;
      }
      case LayerSpec::Kind::EltwiseMax: {
        --elt_i;
        EltwiseMaxGrads g = eltwise_max_backward(cache.eltwises[elt_i], d);
        d = std::move(g.da);  // boundary input is not trained
        break;
      }
    }
  }
  return grads;
}

Tensor assemble_sgfe_input(const RgbFrame& frame, const ScalarField& prev_saliency) {
  if (frame.height != prev_saliency.height || frame.width != prev_saliency.width)
    throw std::invalid_argument("assemble_sgfe_input: dims mismatch");
  Tensor t({4, frame.height, frame.width});
  const size_t plane = static_cast<size_t>(frame.height) * frame.width;
  for (int ch = 0; ch < 3; ++ch)
    std::copy(frame.channels[ch].begin(), frame.channels[ch].end(),
              t.data.begin() + static_cast<long>(ch * plane));
  std::copy(prev_saliency.values.begin(), prev_saliency.values.end(),
            t.data.begin() + static_cast<long>(3 * plane));
  return t;
}

Tensor tensor_from_frame(const RgbFrame& frame) {
  Tensor t({3, frame.height, frame.width});
  const size_t plane = static_cast<size_t>(frame.height) * frame.width;
  for (int ch = 0; ch < 3; ++ch)
    std::copy(frame.channels[ch].begin(), frame.channels[ch].end(),
              t.data.begin() + static_cast<long>(ch * plane));
  return t;
}

ScalarField field_from_prediction(const Tensor& pred) {
  if (pred.shape.size() != 3 || pred.dim(0) != 1)
    throw std::invalid_argument("field_from_prediction: expected (1,H,W)");
  ScalarField f(pred.dim(1), pred.dim(2));
  f.values = pred.data;
  return f;
}

}  // namespace sgf::net
