#include "sgf/opb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgf::opb {

namespace {

// Central differences with clamped borders; zero inside constant regions.
void central_gradient(const ScalarField& f, ScalarField& gx, ScalarField& gy) {
  const int h = f.height, w = f.width;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const int cl = std::max(0, c - 1), cr = std::min(w - 1, c + 1);
      const int ru = std::max(0, r - 1), rd = std::min(h - 1, r + 1);
      gx.at(r, c) = (f.at(r, cr) - f.at(r, cl)) / 2.0;
      gy.at(r, c) = (f.at(rd, c) - f.at(ru, c)) / 2.0;
    }
}

}  // namespace

ScalarField color_gradient(const SuperpixelLabeling& sp) {
  const int h = sp.height, w = sp.width;
  if (h <= 0 || w <= 0) throw std::invalid_argument("color_gradient: empty labeling");

  // Render the mean-color image, then take per-channel central differences.
  std::array<ScalarField, 3> mean;
  for (int ch = 0; ch < 3; ++ch) mean[static_cast<size_t>(ch)] = ScalarField(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const int lb = sp.label_at(r, c);
      if (lb < 0 || lb >= sp.count) throw std::invalid_argument("color_gradient: bad label");
      for (int ch = 0; ch < 3; ++ch)
        mean[static_cast<size_t>(ch)].at(r, c) =
            sp.mean_color[static_cast<size_t>(lb)][static_cast<size_t>(ch)];
    }

  ScalarField out(h, w);
  ScalarField gx(h, w), gy(h, w);
  for (int ch = 0; ch < 3; ++ch) {
    central_gradient(mean[static_cast<size_t>(ch)], gx, gy);
    for (size_t i = 0; i < out.values.size(); ++i)
      out.values[i] += gx.values[i] * gx.values[i] + gy.values[i] * gy.values[i];
  }
  for (double& v : out.values) v = std::sqrt(v);
  const double mx = out.max_value();
  if (mx > 0.0)
    for (double& v : out.values) v /= mx;
  return out;
}

ScalarField flow_gradient_magnitude(const FlowField& flow, double theta) {
  if (!flow.u.same_dims(flow.v))
    throw std::invalid_argument("flow_gradient_magnitude: u/v dims mismatch");
  if (!flow.u.all_finite() || !flow.v.all_finite())
    throw std::invalid_argument("flow_gradient_magnitude: non-finite flow");
  const int h = flow.u.height, w = flow.u.width;
  ScalarField gx(h, w), gy(h, w);
  ScalarField out(h, w);

  central_gradient(flow.u, gx, gy);
  for (size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = gx.values[i] * gx.values[i] + gy.values[i] * gy.values[i];
  central_gradient(flow.v, gx, gy);
  for (size_t i = 0; i < out.values.size(); ++i) {
    const double m =
        std::sqrt(out.values[i] + gx.values[i] * gx.values[i] + gy.values[i] * gy.values[i]);
    out.values[i] = m > theta ? m : 0.0;
  }
  return out;
}

double adaptive_theta(const ScalarField& magnitude, double theta_q) {
  std::vector<double> sorted = magnitude.values;
  std::sort(sorted.begin(), sorted.end());
  const size_t idx = static_cast<size_t>(
      std::floor(0.99 * static_cast<double>(sorted.size() - 1)));
  return theta_q * sorted[idx];
}

ScalarField fuse_boundary(const ScalarField& cg, const ScalarField& m,
                          const ScalarField* prev_b, const OpbParams& p) {
  if (!cg.same_dims(m)) throw std::invalid_argument("fuse_boundary: dims mismatch");
  if (prev_b && !prev_b->same_dims(cg))
    throw std::invalid_argument("fuse_boundary: prev_b dims mismatch");

  const int h = cg.height, w = cg.width;
  ScalarField out(h, w);
  for (size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = cg.values[i] * (1.0 - std::exp(-p.alpha * m.values[i]));

  if (prev_b) {
    // Propagation weight: minimum of the previous boundary's normalized
    // gradient magnitude over each 3x3 neighborhood.
    ScalarField gx(h, w), gy(h, w), gm(h, w);
    central_gradient(*prev_b, gx, gy);
    for (size_t i = 0; i < gm.values.size(); ++i)
      gm.values[i] = std::hypot(gx.values[i], gy.values[i]);
    const double gmax = gm.max_value();
    if (gmax > 0.0)
      for (double& v : gm.values) v /= gmax;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        if (prev_b->at(r, c) > p.sigma) {
          double wmin = gm.at(r, c);
          for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
              const int rr = std::clamp(r + dr, 0, h - 1);
              const int cc = std::clamp(c + dc, 0, w - 1);
              wmin = std::min(wmin, gm.at(rr, cc));
            }
          out.at(r, c) = p.mu * prev_b->at(r, c) + p.lambda * out.at(r, c) * wmin;
        }
      }
  }
  for (double& v : out.values) v = std::clamp(v, 0.0, 1.0);
  return out;
}

ScalarField opb_pipeline(const RgbFrame& prev, const RgbFrame& cur, const ScalarField* prev_b,
                         const OpbParams& p) {
  if (!prev.same_dims(cur)) throw std::invalid_argument("opb_pipeline: frame dims mismatch");
  SuperpixelLabeling sp = slic_superpixels(cur, p.superpixel_count, p.compactness, p.seed);
  ScalarField cg = color_gradient(sp);
  FlowField flow = optical_flow(prev, cur, p.flow_iterations, p.flow_smoothness);

  // The threshold applies to the raw magnitude map (theta = 0 keeps it).
  ScalarField raw = flow_gradient_magnitude(flow, 0.0);
  const double theta = p.theta >= 0.0 ? p.theta : adaptive_theta(raw, p.theta_q);
  ScalarField m(raw.height, raw.width);
  for (size_t i = 0; i < raw.values.size(); ++i)
    m.values[i] = raw.values[i] > theta ? raw.values[i] : 0.0;

  return fuse_boundary(cg, m, prev_b, p);
}

}  // namespace sgf::opb
