#include "sgf/optical_flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sgf::opb {

namespace {

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

ScalarField downsample2(const ScalarField& f) {
  const int h = std::max(1, f.height / 2);
  const int w = std::max(1, f.width / 2);
  ScalarField out(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const int r0 = 2 * r, c0 = 2 * c;
      const int r1 = std::min(r0 + 1, f.height - 1);
      const int c1 = std::min(c0 + 1, f.width - 1);
      out.at(r, c) = 0.25 * (f.at(r0, c0) + f.at(r0, c1) + f.at(r1, c0) + f.at(r1, c1));
    }
  return out;
}

ScalarField upsample_flow(const ScalarField& f, int h, int w) {
  ScalarField out(h, w);
  const double sy = static_cast<double>(f.height) / h;
  const double sx = static_cast<double>(f.width) / w;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const double fy = (r + 0.5) * sy - 0.5;
      const double fx = (c + 0.5) * sx - 0.5;
      const int y0 = clampi(static_cast<int>(std::floor(fy)), 0, f.height - 1);
      const int x0 = clampi(static_cast<int>(std::floor(fx)), 0, f.width - 1);
      const int y1 = std::min(y0 + 1, f.height - 1);
      const int x1 = std::min(x0 + 1, f.width - 1);
      const double wy = std::clamp(fy - y0, 0.0, 1.0);
      const double wx = std::clamp(fx - x0, 0.0, 1.0);
      out.at(r, c) = (1 - wy) * ((1 - wx) * f.at(y0, x0) + wx * f.at(y0, x1)) +
                     wy * ((1 - wx) * f.at(y1, x0) + wx * f.at(y1, x1));
    }
  return out;
}

double sample_bilinear(const ScalarField& f, double y, double x) {
  const int y0 = clampi(static_cast<int>(std::floor(y)), 0, f.height - 1);
  const int x0 = clampi(static_cast<int>(std::floor(x)), 0, f.width - 1);
  const int y1 = std::min(y0 + 1, f.height - 1);
  const int x1 = std::min(x0 + 1, f.width - 1);
  const double wy = std::clamp(y - y0, 0.0, 1.0);
  const double wx = std::clamp(x - x0, 0.0, 1.0);
  return (1 - wy) * ((1 - wx) * f.at(y0, x0) + wx * f.at(y0, x1)) +
         wy * ((1 - wx) * f.at(y1, x0) + wx * f.at(y1, x1));
}

// Solves one Horn-Schunck increment at a single level: warps I2 by the
// current flow, linearizes, and runs Jacobi sweeps on the increment.
void hs_level(const ScalarField& i1, const ScalarField& i2, ScalarField& u, ScalarField& v,
              int iterations, double alpha2, int warps) {
  const int h = i1.height, w = i1.width;
  ScalarField ix(h, w), iy(h, w), it(h, w);
  ScalarField du(h, w), dv(h, w), du2(h, w), dv2(h, w);

  for (int warp = 0; warp < warps; ++warp) {
    // Warp the second image toward the first by the current flow.
    ScalarField i2w(h, w);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        i2w.at(r, c) = sample_bilinear(i2, r + v.at(r, c), c + u.at(r, c));

    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const int cl = std::max(0, c - 1), cr = std::min(w - 1, c + 1);
        const int ru = std::max(0, r - 1), rd = std::min(h - 1, r + 1);
        // Average the spatial gradients of both images for stability.
        ix.at(r, c) = 0.25 * (i1.at(r, cr) - i1.at(r, cl) + i2w.at(r, cr) - i2w.at(r, cl));
        iy.at(r, c) = 0.25 * (i1.at(rd, c) - i1.at(ru, c) + i2w.at(rd, c) - i2w.at(ru, c));
        it.at(r, c) = i2w.at(r, c) - i1.at(r, c);
      }

    std::fill(du.values.begin(), du.values.end(), 0.0);
    std::fill(dv.values.begin(), dv.values.end(), 0.0);
    for (int k = 0; k < iterations; ++k) {
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
          const int cl = std::max(0, c - 1), cr = std::min(w - 1, c + 1);
          const int ru = std::max(0, r - 1), rd = std::min(h - 1, r + 1);
          const double ubar =
              0.25 * (du.at(r, cl) + du.at(r, cr) + du.at(ru, c) + du.at(rd, c));
          const double vbar =
              0.25 * (dv.at(r, cl) + dv.at(r, cr) + dv.at(ru, c) + dv.at(rd, c));
          const double gx = ix.at(r, c), gy = iy.at(r, c);
          const double num = gx * ubar + gy * vbar + it.at(r, c);
          const double den = alpha2 + gx * gx + gy * gy;
          du2.at(r, c) = ubar - gx * num / den;
          dv2.at(r, c) = vbar - gy * num / den;
        }
      std::swap(du, du2);
      std::swap(dv, dv2);
    }
    for (size_t i = 0; i < u.values.size(); ++i) {
      u.values[i] += du.values[i];
      v.values[i] += dv.values[i];
    }
  }
}

}  // namespace

FlowField optical_flow(const RgbFrame& prev, const RgbFrame& cur, int iterations,
                       double smoothness) {
  if (!prev.same_dims(cur)) throw std::invalid_argument("optical_flow: dims mismatch");
  if (iterations < 1) throw std::invalid_argument("optical_flow: iterations must be >= 1");
  if (!(smoothness > 0.0)) throw std::invalid_argument("optical_flow: smoothness must be > 0");

  ScalarField g1 = prev.luminance();
  ScalarField g2 = cur.luminance();

  // Up to three pyramid levels, keeping the coarsest side at >= 8 px.
  std::vector<ScalarField> p1{g1}, p2{g2};
  while (p1.size() < 3 && std::min(p1.back().height, p1.back().width) >= 16) {
    p1.push_back(downsample2(p1.back()));
    p2.push_back(downsample2(p2.back()));
  }

  const double alpha2 = smoothness * smoothness;
  ScalarField u(p1.back().height, p1.back().width);
  ScalarField v(p1.back().height, p1.back().width);
  for (size_t lvl = p1.size(); lvl-- > 0;) {
    if (lvl + 1 < p1.size()) {
      ScalarField un = upsample_flow(u, p1[lvl].height, p1[lvl].width);
      ScalarField vn = upsample_flow(v, p1[lvl].height, p1[lvl].width);
      const double fx = static_cast<double>(p1[lvl].width) / p1[lvl + 1].width;
      const double fy = static_cast<double>(p1[lvl].height) / p1[lvl + 1].height;
      for (double& x : un.values) x *= fx;
      for (double& x : vn.values) x *= fy;
      u = std::move(un);
      v = std::move(vn);
    }
    hs_level(p1[lvl], p2[lvl], u, v, iterations, alpha2, /*warps=*/3);
  }
  return FlowField{std::move(u), std::move(v)};
}

}  // namespace sgf::opb
