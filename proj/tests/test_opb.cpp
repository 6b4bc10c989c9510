#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sgf/opb.hpp"
#include "sgf/rng.hpp"
#include "sgf/synthetic.hpp"

using namespace sgf;
using namespace sgf::opb;

namespace {

SuperpixelLabeling split_labeling(int h, int w, int split_col) {
  SuperpixelLabeling sp;
  sp.height = h;
  sp.width = w;
  sp.count = 2;
  sp.labels.assign(static_cast<size_t>(h) * w, 0);
  for (int r = 0; r < h; ++r)
    for (int c = split_col; c < w; ++c) sp.labels[static_cast<size_t>(r) * w + c] = 1;
  sp.mean_color = {{0.9, 0.1, 0.1}, {0.1, 0.1, 0.9}};
  return sp;
}

}  // namespace

TEST_CASE("color_gradient of a single superpixel is zero") {
  SuperpixelLabeling sp;
  sp.height = 8;
  sp.width = 8;
  sp.count = 1;
  sp.labels.assign(64, 0);
  sp.mean_color = {{0.3, 0.6, 0.2}};
  ScalarField cg = color_gradient(sp);
  CHECK(cg.max_value() == 0.0);
}

TEST_CASE("color_gradient of a two-region split is a two-column band") {
  const int split = 8;
  SuperpixelLabeling sp = split_labeling(12, 16, split);
  ScalarField cg = color_gradient(sp);

  // Pixel-loop oracle over the mean-color image with clamped central diffs.
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 16; ++c) {
      const bool on_band = c == split - 1 || c == split;
      if (on_band)
        CHECK(cg.at(r, c) > 0.0);
      else
        CHECK(cg.at(r, c) == 0.0);
    }
  CHECK(cg.max_value() == doctest::Approx(1.0));
}

TEST_CASE("color_gradient equals the pixel-loop oracle on a checkerboard") {
  SuperpixelLabeling sp;
  sp.height = 8;
  sp.width = 8;
  sp.count = 4;
  sp.labels.assign(64, 0);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      sp.labels[static_cast<size_t>(r) * 8 + c] = (r < 4 ? 0 : 2) + (c < 4 ? 0 : 1);
  sp.mean_color = {{0.9, 0.1, 0.1}, {0.1, 0.9, 0.1}, {0.1, 0.1, 0.9}, {0.8, 0.8, 0.1}};
  ScalarField cg = color_gradient(sp);

  // Oracle: render means, take clamped central differences, norm over 6
  // partials, rescale by the max.
  std::array<std::vector<double>, 3> mean;
  for (auto& ch : mean) ch.assign(64, 0.0);
  for (int i = 0; i < 64; ++i)
    for (int ch = 0; ch < 3; ++ch)
      mean[static_cast<size_t>(ch)][static_cast<size_t>(i)] =
          sp.mean_color[static_cast<size_t>(sp.labels[static_cast<size_t>(i)])]
                      [static_cast<size_t>(ch)];
  std::vector<double> want(64, 0.0);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) {
      double acc = 0.0;
      for (int ch = 0; ch < 3; ++ch) {
        const auto& m = mean[static_cast<size_t>(ch)];
        const int cl = std::max(0, c - 1), cr = std::min(7, c + 1);
        const int ru = std::max(0, r - 1), rd = std::min(7, r + 1);
        const double gx = (m[static_cast<size_t>(r) * 8 + cr] - m[static_cast<size_t>(r) * 8 + cl]) / 2.0;
        const double gy = (m[static_cast<size_t>(rd) * 8 + c] - m[static_cast<size_t>(ru) * 8 + c]) / 2.0;
        acc += gx * gx + gy * gy;
      }
      want[static_cast<size_t>(r) * 8 + c] = std::sqrt(acc);
    }
  const double mx = *std::max_element(want.begin(), want.end());
  for (auto& v : want) v /= mx;
  for (int i = 0; i < 64; ++i)
    CHECK(cg.values[static_cast<size_t>(i)] ==
          doctest::Approx(want[static_cast<size_t>(i)]).epsilon(1e-14));

  // Maxima sit on region borders.
  for (int i = 0; i < 64; ++i)
    if (cg.values[static_cast<size_t>(i)] == 1.0) {
      const int r = i / 8, c = i % 8;
      const bool near_border = std::abs(r - 4) <= 1 || std::abs(c - 4) <= 1;
      CHECK(near_border);
    }
}

TEST_CASE("flow_gradient_magnitude on constant flow is zero for any theta") {
  FlowField flow{ScalarField(6, 6, 3.0), ScalarField(6, 6, -1.5)};
  CHECK(flow_gradient_magnitude(flow, 0.0).max_value() == 0.0);
  CHECK(flow_gradient_magnitude(flow, 5.0).max_value() == 0.0);
}

TEST_CASE("flow_gradient_magnitude threshold kills everything when huge") {
  Rng rng(2);
  FlowField flow{ScalarField(8, 8), ScalarField(8, 8)};
  for (double& v : flow.u.values) v = rng.uniform() * 4.0;
  for (double& v : flow.v.values) v = rng.uniform() * 4.0;
  ScalarField raw = flow_gradient_magnitude(flow, 0.0);
  ScalarField cut = flow_gradient_magnitude(flow, raw.max_value() + 1.0);
  CHECK(cut.max_value() == 0.0);
}

TEST_CASE("step flow of height 4 yields a band of magnitude 2") {
  const int split = 5;
  FlowField flow{ScalarField(8, 10, 0.0), ScalarField(8, 10, 0.0)};
  for (int r = 0; r < 8; ++r)
    for (int c = split; c < 10; ++c) flow.u.at(r, c) = 4.0;
  ScalarField m = flow_gradient_magnitude(flow, 1.0);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 10; ++c) {
      if (c == split - 1 || c == split)
        CHECK(m.at(r, c) == doctest::Approx(2.0));
      else
        CHECK(m.at(r, c) == 0.0);
    }
}

TEST_CASE("fuse_boundary first-frame cases") {
  ScalarField cg(4, 4, 1.0);
  ScalarField zero(4, 4, 0.0);
  OpbParams p;

  // No motion -> no boundary.
  CHECK(fuse_boundary(cg, zero, nullptr, p).max_value() == 0.0);
  // No structure -> no boundary.
  ScalarField m2(4, 4, 2.0);
  CHECK(fuse_boundary(zero, m2, nullptr, p).max_value() == 0.0);

  // Scalar case: cg=1, m=2, alpha=0.75 -> 1 - exp(-1.5).
  ScalarField one_m(4, 4, 0.0);
  one_m.at(1, 2) = 2.0;
  ScalarField b = fuse_boundary(cg, one_m, nullptr, p);
  CHECK(b.at(1, 2) == doctest::Approx(1.0 - std::exp(-1.5)).epsilon(1e-12));
  CHECK(b.at(0, 0) == 0.0);

  ScalarField bad(3, 4, 0.0);
  CHECK_THROWS_AS(fuse_boundary(cg, bad, nullptr, p), std::invalid_argument);
}

TEST_CASE("fuse_boundary with prev_b == 0 reduces to the first-frame branch") {
  Rng rng(4);
  ScalarField cg(8, 8), m(8, 8);
  for (double& v : cg.values) v = rng.uniform();
  for (double& v : m.values) v = rng.uniform() * 3.0;
  ScalarField zero(8, 8, 0.0);
  OpbParams p;
  ScalarField first = fuse_boundary(cg, m, nullptr, p);
  ScalarField with_zero = fuse_boundary(cg, m, &zero, p);
  CHECK(first.values == with_zero.values);
}

TEST_CASE("fuse_boundary output stays in [0,1] and is monotone in m") {
  Rng rng(5);
  ScalarField cg(8, 8), m(8, 8);
  for (double& v : cg.values) v = rng.uniform();
  for (double& v : m.values) v = rng.uniform() * 2.0;
  ScalarField prev(8, 8);
  for (double& v : prev.values) v = rng.uniform();
  OpbParams p;
  ScalarField b = fuse_boundary(cg, m, &prev, p);
  for (double v : b.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  // First-frame branch: zero wherever m is zero, monotone in m pointwise.
  ScalarField m_lo = m, m_hi = m;
  for (size_t i = 0; i < m.values.size(); ++i) m_hi.values[i] += 0.5;
  ScalarField b_lo = fuse_boundary(cg, m_lo, nullptr, p);
  ScalarField b_hi = fuse_boundary(cg, m_hi, nullptr, p);
  for (size_t i = 0; i < b_lo.values.size(); ++i) CHECK(b_hi.values[i] >= b_lo.values[i]);
}

TEST_CASE("opb_pipeline on identical uniform frames is zero") {
  RgbFrame f(32, 32);
  for (auto& ch : f.channels)
    for (double& v : ch) v = 0.5;
  OpbParams p;
  p.superpixel_count = 16;
  ScalarField b = opb_pipeline(f, f, nullptr, p);
  CHECK(b.max_value() == 0.0);
}

TEST_CASE("opb_pipeline equals the manually chained ops bitwise") {
  cli::SyntheticSpec spec;
  spec.frame_size = 48;
  spec.frames_per_clip = 3;
  spec.clips = 1;
  spec.seed = 77;
  cli::SyntheticClip clip = cli::make_clip(spec, 0);
  OpbParams p;
  p.superpixel_count = 32;
  ScalarField pipeline_out = opb_pipeline(clip.frames[0], clip.frames[1], nullptr, p);

  SuperpixelLabeling sp = slic_superpixels(clip.frames[1], p.superpixel_count, p.compactness, p.seed);
  ScalarField cg = color_gradient(sp);
  FlowField flow = optical_flow(clip.frames[0], clip.frames[1], p.flow_iterations,
                                p.flow_smoothness);
  ScalarField raw = flow_gradient_magnitude(flow, 0.0);
  const double theta = adaptive_theta(raw, p.theta_q);
  ScalarField m = flow_gradient_magnitude(flow, theta);
  ScalarField manual = fuse_boundary(cg, m, nullptr, p);
  CHECK(pipeline_out.values == manual.values);

  // Second pair with the recursion engaged, still bit-identical.
  ScalarField b2_pipeline = opb_pipeline(clip.frames[1], clip.frames[2], &pipeline_out, p);
  SuperpixelLabeling sp2 =
      slic_superpixels(clip.frames[2], p.superpixel_count, p.compactness, p.seed);
  ScalarField cg2 = color_gradient(sp2);
  FlowField flow2 = optical_flow(clip.frames[1], clip.frames[2], p.flow_iterations,
                                 p.flow_smoothness);
  ScalarField raw2 = flow_gradient_magnitude(flow2, 0.0);
  ScalarField m2 = flow_gradient_magnitude(flow2, adaptive_theta(raw2, p.theta_q));
  ScalarField manual2 = fuse_boundary(cg2, m2, &manual, p);
  CHECK(b2_pipeline.values == manual2.values);
}

TEST_CASE("opb_pipeline concentrates boundary mass near a moving square outline") {
  cli::SyntheticSpec spec;
  spec.frame_size = 64;
  spec.frames_per_clip = 2;
  spec.clips = 1;
  spec.noise = 0.05;
  spec.speed = 2.0;
  spec.object_size = 14;
  spec.seed = 5;
  cli::SyntheticClip clip = cli::make_clip(spec, 0);
  OpbParams p;
  ScalarField b = opb_pipeline(clip.frames[0], clip.frames[1], nullptr, p);
  REQUIRE(b.max_value() > 0.0);

  // True outline of the object in frame 1.
  const int icx = static_cast<int>(std::llround(clip.centers[1][0]));
  const int icy = static_cast<int>(std::llround(clip.centers[1][1]));
  const int half = spec.object_size / 2;
  double near = 0.0, total = 0.0;
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) {
      const double v = b.at(r, c);
      total += v;
      const int dx = std::abs(c - icx), dy = std::abs(r - icy);
      const int ring = std::max(dx, dy);  // Chebyshev distance to center
      if (std::abs(ring - half) <= 3) near += v;
    }
  CHECK(near / total >= 0.6);
}

TEST_CASE("opb_pipeline rejects mismatched frames") {
  RgbFrame a(16, 16), b(16, 18);
  OpbParams p;
  CHECK_THROWS_AS(opb_pipeline(a, b, nullptr, p), std::invalid_argument);
}
