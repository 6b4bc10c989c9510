#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sgf/network.hpp"
#include "sgf/rng.hpp"

using namespace sgf;
using namespace sgf::net;

namespace {

int count_kind(const NetworkSpec& spec, LayerSpec::Kind kind) {
  int n = 0;
  for (const auto& l : spec.layers)
    if (l.kind == kind) n++;
  return n;
}

NetworkScale tiny_scale(int side) {
  NetworkScale s;
  s.input_side = side;
  s.block_widths = {4, 4, 6, 6, 6};
  return s;
}

Tensor random_input(const NetworkSpec& spec, Rng& rng) {
  Tensor t({spec.input_channels, spec.scale.input_side, spec.scale.input_side});
  for (double& v : t.data) v = rng.uniform();
  return t;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

}  // namespace

TEST_CASE("build_sgf deconv counts are 2/3/4/3 for SGF1/2/3/E") {
  NetworkScale s;  // default 64
  CHECK(count_kind(build_sgf(Variant::SGF1, s), LayerSpec::Kind::Deconv) == 2);
  CHECK(count_kind(build_sgf(Variant::SGF2, s), LayerSpec::Kind::Deconv) == 3);
  CHECK(count_kind(build_sgf(Variant::SGF3, s), LayerSpec::Kind::Deconv) == 4);
  CHECK(count_kind(build_sgf(Variant::SGFE, s), LayerSpec::Kind::Deconv) == 3);
}

TEST_CASE("build_sgf trunk shape: 13 convs, 5 pools, 32x downsample at 64") {
  NetworkSpec spec = build_sgf(Variant::SGF1, NetworkScale{});
  CHECK(count_kind(spec, LayerSpec::Kind::Conv) == 13);
  CHECK(count_kind(spec, LayerSpec::Kind::MaxPool) == 5);
  // Product of deconv strides equals the 32x trunk downsample.
  int prod = 1;
  for (const auto& l : spec.layers)
    if (l.kind == LayerSpec::Kind::Deconv) {
      prod *= l.stride;
      CHECK(l.kernel == 2 * l.stride);
      CHECK(l.crop == l.stride / 2);
    }
  CHECK(prod == 32);
}

TEST_CASE("SGFE spec: 4 input channels, EltwiseMax immediately before Sigmoid") {
  NetworkSpec spec = build_sgf(Variant::SGFE, NetworkScale{});
  CHECK(spec.input_channels == 4);
  CHECK(count_kind(spec, LayerSpec::Kind::EltwiseMax) == 1);
  REQUIRE(spec.layers.size() >= 2);
  CHECK(spec.layers[spec.layers.size() - 2].kind == LayerSpec::Kind::EltwiseMax);
  CHECK(spec.layers.back().kind == LayerSpec::Kind::Sigmoid);
  NetworkSpec spatial = build_sgf(Variant::SGF3, NetworkScale{});
  CHECK(spatial.input_channels == 3);
  CHECK(count_kind(spatial, LayerSpec::Kind::EltwiseMax) == 0);
}

TEST_CASE("forward output matches the input spatial dims, one channel, in (0,1)") {
  for (Variant v : {Variant::SGF1, Variant::SGF2, Variant::SGF3, Variant::SGFE}) {
    NetworkScale scale = tiny_scale(32);
    NetworkSpec spec = build_sgf(v, scale);
    ParamStore params = init_params(spec, 7);
    Rng rng(1);
    Tensor input = random_input(spec, rng);
    ScalarField boundary(32, 32, 0.25);
    Tensor out = forward(spec, params, input,
                         v == Variant::SGFE ? &boundary : nullptr);
    CHECK(out.shape == std::vector<int>{1, 32, 32});
    for (double p : out.data) {
      CHECK(p > 0.0);
      CHECK(p < 1.0);
    }
  }
}

TEST_CASE("16x16 scale builds and runs (degenerate fifth pool)") {
  NetworkScale scale = tiny_scale(16);
  for (Variant v : {Variant::SGF1, Variant::SGF2, Variant::SGF3, Variant::SGFE}) {
    NetworkSpec spec = build_sgf(v, scale);
    ParamStore params = init_params(spec, 3);
    Rng rng(2);
    Tensor input = random_input(spec, rng);
    ScalarField boundary(16, 16, 0.0);
    Tensor out = forward(spec, params, input, v == Variant::SGFE ? &boundary : nullptr);
    CHECK(out.shape == std::vector<int>{1, 16, 16});
  }
}

TEST_CASE("build_sgf rejects unsatisfiable sizes naming the deconv stack") {
  CHECK_THROWS_WITH_AS(build_sgf(Variant::SGF1, tiny_scale(48)),
                       doctest::Contains("deconv"), std::invalid_argument);
  CHECK_THROWS_AS(build_sgf(Variant::SGF3, tiny_scale(8)), std::invalid_argument);
}

TEST_CASE("forward requires the boundary exactly for SGFE") {
  NetworkScale scale = tiny_scale(32);
  NetworkSpec sgfe = build_sgf(Variant::SGFE, scale);
  ParamStore pe = init_params(sgfe, 1);
  Rng rng(3);
  Tensor input4 = random_input(sgfe, rng);
  CHECK_THROWS_AS(forward(sgfe, pe, input4, nullptr), std::invalid_argument);

  NetworkSpec sgf1 = build_sgf(Variant::SGF1, scale);
  ParamStore p1 = init_params(sgf1, 1);
  Tensor input3 = random_input(sgf1, rng);
  ScalarField boundary(32, 32, 0.0);
  CHECK_THROWS_AS(forward(sgf1, p1, input3, &boundary), std::invalid_argument);
}

TEST_CASE("forward is deterministic, bitwise") {
  NetworkScale scale = tiny_scale(32);
  NetworkSpec spec = build_sgf(Variant::SGF2, scale);
  ParamStore params = init_params(spec, 11);
  Rng rng(4);
  Tensor input = random_input(spec, rng);
  Tensor a = forward(spec, params, input);
  Tensor b = forward(spec, params, input);
  CHECK(a.data == b.data);
}

TEST_CASE("assemble_sgfe_input stacks channels and zero slices are inert") {
  RgbFrame frame(8, 8);
  Rng rng(5);
  for (auto& ch : frame.channels)
    for (double& v : ch) v = rng.uniform();
  ScalarField prev(8, 8, 0.0);
  Tensor t = assemble_sgfe_input(frame, prev);
  CHECK(t.shape == std::vector<int>{4, 8, 8});
  for (size_t i = 0; i < 64; ++i) {
    CHECK(t.data[i] == frame.channels[0][i]);
    CHECK(t.data[3 * 64 + i] == 0.0);
  }
  ScalarField wrong(4, 8, 0.0);
  CHECK_THROWS_AS(assemble_sgfe_input(frame, wrong), std::invalid_argument);

  // A conv whose channel-3 slice is zero ignores the prev-saliency channel.
  Tensor w({2, 4, 3, 3});
  for (double& v : w.data) v = rng.uniform() - 0.5;
  for (int o = 0; o < 2; ++o)
    for (int i = 0; i < 9; ++i) w.data[(static_cast<size_t>(o) * 4 + 3) * 9 + i] = 0.0;
  Tensor b({2});
  ScalarField prev2(8, 8, 0.7);
  Tensor y0 = conv_forward(assemble_sgfe_input(frame, prev), w, b, 1, 1);
  Tensor y1 = conv_forward(assemble_sgfe_input(frame, prev2), w, b, 1, 1);
  CHECK(y0.data == y1.data);

  // RGB-only conv with the matching 3-channel slice agrees.
  Tensor w3({2, 3, 3, 3});
  for (int o = 0; o < 2; ++o)
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < 9; ++i)
        w3.data[(static_cast<size_t>(o) * 3 + c) * 9 + i] =
            w.data[(static_cast<size_t>(o) * 4 + c) * 9 + i];
  Tensor rgb({3, 8, 8});
  for (int c = 0; c < 3; ++c)
    std::copy(frame.channels[static_cast<size_t>(c)].begin(),
              frame.channels[static_cast<size_t>(c)].end(), rgb.data.begin() + c * 64);
  Tensor y3 = conv_forward(rgb, w3, b, 1, 1);
  for (size_t i = 0; i < y3.data.size(); ++i)
    CHECK(y3.data[i] == doctest::Approx(y0.data[i]).epsilon(1e-15));
}

TEST_CASE("whole-net gradient check on a random coordinate subset") {
  NetworkScale scale = tiny_scale(16);
  for (Variant v : {Variant::SGF1, Variant::SGFE}) {
    NetworkSpec spec = build_sgf(v, scale);
    ParamStore params = init_params(spec, 21);
    Rng rng(22);
    Tensor input = random_input(spec, rng);
    ScalarField boundary(16, 16);
    for (double& b : boundary.values) b = rng.uniform() * 0.2;
    const ScalarField* aux = v == Variant::SGFE ? &boundary : nullptr;
    Tensor target({1, 16, 16});
    for (double& t : target.data) t = rng.uniform();

    auto loss_value = [&]() {
      Tensor out = forward(spec, params, input, aux);
      double acc = 0.0;
      for (size_t i = 0; i < out.data.size(); ++i) {
        const double d = out.data[i] - target.data[i];
        acc += 0.5 * d * d;
      }
      return acc;
    };

    ForwardCache cache;
    Tensor out = forward(spec, params, input, aux, &cache);
    Tensor dout(out.shape);
    for (size_t i = 0; i < out.data.size(); ++i) dout.data[i] = out.data[i] - target.data[i];
    Gradients grads = backward(spec, params, cache, dout);

    Rng pick(23);
    int checked = 0;
    while (checked < 30) {
      const size_t ti = static_cast<size_t>(pick.uniform_int(
          static_cast<int>(params.tensors.size())));
      Tensor& t = params.tensors[ti];
      const size_t ci = static_cast<size_t>(pick.uniform_int(static_cast<int>(t.data.size())));
      const double keep = t.data[ci];
      const double h = 1e-4;
      t.data[ci] = keep + h;
      const double up = loss_value();
      t.data[ci] = keep - h;
      const double down = loss_value();
      t.data[ci] = keep;
      const double fd = (up - down) / (2.0 * h);
      const double an = grads.tensors[ti].data[ci];
      if (std::abs(fd) < 1e-10 && std::abs(an) < 1e-10) continue;  // dead coordinate
      CHECK(rel_err(fd, an) < 1e-3);
      ++checked;
    }
  }
}

TEST_CASE("init_params is reproducible and shape-consistent") {
  NetworkSpec spec = build_sgf(Variant::SGF2, tiny_scale(32));
  ParamStore a = init_params(spec, 77);
  ParamStore b = init_params(spec, 77);
  ParamStore c = init_params(spec, 78);
  REQUIRE(a.names == b.names);
  bool any_diff = false;
  for (size_t i = 0; i < a.tensors.size(); ++i) {
    CHECK(a.tensors[i].data == b.tensors[i].data);
    if (a.tensors[i].data != c.tensors[i].data) any_diff = true;
  }
  CHECK(any_diff);
}
