#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sgf/network.hpp"
#include "sgf/rng.hpp"
#include "sgf/train.hpp"

using namespace sgf;
using namespace sgf::train;

namespace {

ScalarField random_field(int h, int w, Rng& rng, double lo = 0.0, double hi = 1.0) {
  ScalarField f(h, w);
  for (double& v : f.values) v = lo + (hi - lo) * rng.uniform();
  return f;
}

}  // namespace

TEST_CASE("loss_l1 zero at the minimum; worked 2x2 case") {
  ScalarField g(2, 2, 0.7);
  LossResult at_min = loss_l1(g, g);
  CHECK(at_min.value == 0.0);
  for (double v : at_min.grad.values) CHECK(v == 0.0);

  ScalarField p(2, 2, 0.0);
  ScalarField ones(2, 2, 1.0);
  LossResult r = loss_l1(p, ones);
  CHECK(r.value == doctest::Approx(2.0));
  for (double v : r.grad.values) CHECK(v == -1.0);

  ScalarField bad(2, 3, 0.0);
  CHECK_THROWS_AS(loss_l1(p, bad), std::invalid_argument);
}

TEST_CASE("loss_l1 gradient matches finite differences") {
  Rng rng(1);
  ScalarField p = random_field(4, 4, rng);
  ScalarField g = random_field(4, 4, rng);
  LossResult r = loss_l1(p, g);
  const double h = 1e-6;
  for (size_t i = 0; i < p.values.size(); ++i) {
    const double keep = p.values[i];
    p.values[i] = keep + h;
    const double up = loss_l1(p, g).value;
    p.values[i] = keep - h;
    const double down = loss_l1(p, g).value;
    p.values[i] = keep;
    const double fd = (up - down) / (2.0 * h);
    CHECK(std::abs(fd - r.grad.values[i]) < 1e-8 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("loss_l2 with eta 0 reduces to loss_l1") {
  Rng rng(2);
  ScalarField p = random_field(5, 5, rng, 0.1, 0.9);
  ScalarField g = random_field(5, 5, rng);
  LossResult l1 = loss_l1(p, g);
  LossResult l2 = loss_l2(p, g, 0.0);
  CHECK(l2.value == doctest::Approx(l1.value).epsilon(1e-15));
  for (size_t i = 0; i < p.values.size(); ++i)
    CHECK(l2.grad.values[i] == doctest::Approx(l1.grad.values[i]).epsilon(1e-15));
}

TEST_CASE("loss_l2 at P == G == 0.5: quadratic 0, cross-entropy area*log2*eta") {
  ScalarField half(4, 4, 0.5);
  const double eta = 1.7;
  LossResult r = loss_l2(half, half, eta);
  CHECK(r.value == doctest::Approx(eta * 16.0 * std::log(2.0)).epsilon(1e-12));
  // Minimized at P == G: the quadratic part is zero and the CE gradient
  // vanishes at P == G == 0.5.
  for (double v : r.grad.values) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("loss_l2 is minimized at P == G") {
  Rng rng(8);
  ScalarField g = random_field(3, 3, rng, 0.2, 0.8);
  const double eta = 0.9;
  const double base = loss_l2(g, g, eta).value;
  for (int trial = 0; trial < 20; ++trial) {
    ScalarField p = g;
    for (double& v : p.values)
      v = std::clamp(v + 0.2 * (rng.uniform() - 0.5), 0.01, 0.99);
    CHECK(loss_l2(p, g, eta).value >= base - 1e-12);
  }
}

TEST_CASE("loss_l2 gradient matches finite differences") {
  Rng rng(3);
  ScalarField p = random_field(4, 4, rng, 0.05, 0.95);
  ScalarField g = random_field(4, 4, rng);
  const double eta = 1.3;
  LossResult r = loss_l2(p, g, eta);
  const double h = 1e-7;
  for (size_t i = 0; i < p.values.size(); ++i) {
    const double keep = p.values[i];
    p.values[i] = keep + h;
    const double up = loss_l2(p, g, eta).value;
    p.values[i] = keep - h;
    const double down = loss_l2(p, g, eta).value;
    p.values[i] = keep;
    const double fd = (up - down) / (2.0 * h);
    CHECK(std::abs(fd - r.grad.values[i]) < 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

namespace {

net::ParamStore single_param(double value) {
  net::ParamStore s;
  Tensor t({1});
  t.data[0] = value;
  s.add("w", std::move(t));
  return s;
}

net::Gradients single_grad(double value) {
  net::Gradients g;
  Tensor t({1});
  t.data[0] = value;
  g.tensors.push_back(std::move(t));
  return g;
}

}  // namespace

TEST_CASE("sgd_step plain case: w - lr*g") {
  net::ParamStore s = single_param(1.0);
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.momentum = 0.0;
  cfg.weight_decay = 0.0;
  sgd_step(s, single_grad(2.0), cfg);
  CHECK(s.tensors[0].data[0] == doctest::Approx(1.0 - 0.1 * 2.0).epsilon(1e-15));
}

TEST_CASE("sgd_step weight decay case lands at 0.95") {
  net::ParamStore s = single_param(1.0);
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.momentum = 0.0;
  cfg.weight_decay = 0.5;
  sgd_step(s, single_grad(0.0), cfg);
  CHECK(s.tensors[0].data[0] == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("sgd_step momentum recurrence: v2 = -lr*g*(1+0.9)") {
  net::ParamStore s = single_param(0.0);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.momentum = 0.9;
  cfg.weight_decay = 0.0;
  const double g = 3.0;
  sgd_step(s, single_grad(g), cfg);
  sgd_step(s, single_grad(g), cfg);
  CHECK(s.momentum[0].data[0] ==
        doctest::Approx(-cfg.learning_rate * g * 1.9).epsilon(1e-15));
}

TEST_CASE("sgd_step with vanishing learning rate approaches identity") {
  net::ParamStore s = single_param(0.5);
  TrainConfig cfg;
  cfg.learning_rate = 1e-300;
  cfg.momentum = 0.9;
  cfg.weight_decay = 1e-4;
  sgd_step(s, single_grad(123.0), cfg);
  CHECK(s.tensors[0].data[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sgd_step rejects shape mismatches") {
  net::ParamStore s = single_param(1.0);
  net::Gradients g;
  g.tensors.emplace_back(std::vector<int>{2});
  TrainConfig cfg;
  CHECK_THROWS_AS(sgd_step(s, g, cfg), std::invalid_argument);
}
