#include "sgf/slic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgf::opb {

namespace {

struct LabImage {
  int height = 0, width = 0;
  std::vector<double> l, a, b;
};

double srgb_to_linear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

LabImage rgb_to_lab(const RgbFrame& f) {
  LabImage lab;
  lab.height = f.height;
  lab.width = f.width;
  const size_t n = f.channels[0].size();
  lab.l.resize(n);
  lab.a.resize(n);
  lab.b.resize(n);
  auto fxyz = [](double t) {
    return t > 0.008856 ? std::cbrt(t) : (7.787 * t + 16.0 / 116.0);
  };
  for (size_t i = 0; i < n; ++i) {
    const double r = srgb_to_linear(f.channels[0][i]);
    const double g = srgb_to_linear(f.channels[1][i]);
    const double b = srgb_to_linear(f.channels[2][i]);
    const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
    const double fx = fxyz(x), fy = fxyz(y), fz = fxyz(z);
    lab.l[i] = 116.0 * fy - 16.0;
    lab.a[i] = 500.0 * (fx - fy);
    lab.b[i] = 200.0 * (fy - fz);
  }
  return lab;
}

struct Cluster {
  double l = 0, a = 0, b = 0, y = 0, x = 0;
};

}  // namespace

SuperpixelLabeling slic_superpixels(const RgbFrame& frame, int k, double compactness,
                                    uint64_t seed) {
  (void)seed;  // the algorithm is fully deterministic
  const int h = frame.height, w = frame.width;
  const int64_t n = static_cast<int64_t>(h) * w;
  if (k < 1) throw std::invalid_argument("slic: k must be >= 1");
  if (k > n) throw std::invalid_argument("slic: k exceeds pixel count");
  if (!(compactness > 0.0)) throw std::invalid_argument("slic: compactness must be > 0");

  const LabImage lab = rgb_to_lab(frame);

  // Grid seeding: ny*nx ~ k with cell aspect close to the frame's.
  int ny = std::max(1, static_cast<int>(std::lround(
                           std::sqrt(static_cast<double>(k) * h / std::max(1, w)))));
  ny = std::min(ny, h);
  int nx = std::max(1, static_cast<int>(std::lround(static_cast<double>(k) / ny)));
  nx = std::min(nx, w);

  std::vector<Cluster> clusters;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      int cy = std::min(h - 1, static_cast<int>((iy + 0.5) * h / ny));
      int cx = std::min(w - 1, static_cast<int>((ix + 0.5) * w / nx));
      // Move the seed to the lowest-gradient spot in its 3x3 neighborhood.
      double best = std::numeric_limits<double>::infinity();
      int by = cy, bx = cx;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int r = cy + dy, c = cx + dx;
          if (r < 1 || r >= h - 1 || c < 1 || c >= w - 1) continue;
          const size_t i0 = static_cast<size_t>(r) * w + c;
          const size_t ir = i0 + 1, il = i0 - 1;
          const size_t id = i0 + static_cast<size_t>(w), iu = i0 - static_cast<size_t>(w);
          const double gx = (lab.l[ir] - lab.l[il]) * (lab.l[ir] - lab.l[il]) +
                            (lab.a[ir] - lab.a[il]) * (lab.a[ir] - lab.a[il]) +
                            (lab.b[ir] - lab.b[il]) * (lab.b[ir] - lab.b[il]);
          const double gy = (lab.l[id] - lab.l[iu]) * (lab.l[id] - lab.l[iu]) +
                            (lab.a[id] - lab.a[iu]) * (lab.a[id] - lab.a[iu]) +
                            (lab.b[id] - lab.b[iu]) * (lab.b[id] - lab.b[iu]);
          if (gx + gy < best) {
            best = gx + gy;
            by = r;
            bx = c;
          }
        }
      const size_t si = static_cast<size_t>(by) * w + bx;
      clusters.push_back({lab.l[si], lab.a[si], lab.b[si], static_cast<double>(by),
                          static_cast<double>(bx)});
    }

  const double spacing = std::sqrt(static_cast<double>(n) / k);
  const double spatial_w = (compactness / spacing) * (compactness / spacing);
  const int win = std::max(1, static_cast<int>(std::ceil(spacing)));

  std::vector<int> labels(static_cast<size_t>(n), -1);
  std::vector<double> dist(static_cast<size_t>(n));

  for (int iter = 0; iter < 10; ++iter) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    for (size_t ci = 0; ci < clusters.size(); ++ci) {
      const Cluster& cl = clusters[ci];
      const int r0 = std::max(0, static_cast<int>(cl.y) - win);
      const int r1 = std::min(h - 1, static_cast<int>(cl.y) + win);
      const int c0 = std::max(0, static_cast<int>(cl.x) - win);
      const int c1 = std::min(w - 1, static_cast<int>(cl.x) + win);
      for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) {
          const size_t i = static_cast<size_t>(r) * w + c;
          const double dl = lab.l[i] - cl.l, da = lab.a[i] - cl.a, db = lab.b[i] - cl.b;
          const double dy = r - cl.y, dx = c - cl.x;
          const double d = dl * dl + da * da + db * db + spatial_w * (dy * dy + dx * dx);
          if (d < dist[i]) {
            dist[i] = d;
            labels[i] = static_cast<int>(ci);
          }
        }
    }
    // Window misses are possible on extreme aspect ratios; snap those
    // pixels to the spatially nearest cluster.
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const size_t i = static_cast<size_t>(r) * w + c;
        if (labels[i] >= 0) continue;
        double best = std::numeric_limits<double>::infinity();
        for (size_t ci = 0; ci < clusters.size(); ++ci) {
          const double dy = r - clusters[ci].y, dx = c - clusters[ci].x;
          if (dy * dy + dx * dx < best) {
            best = dy * dy + dx * dx;
            labels[i] = static_cast<int>(ci);
          }
        }
      }

    std::vector<Cluster> next(clusters.size());
    std::vector<int64_t> counts(clusters.size(), 0);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const size_t i = static_cast<size_t>(r) * w + c;
        Cluster& nc = next[static_cast<size_t>(labels[i])];
        nc.l += lab.l[i];
        nc.a += lab.a[i];
        nc.b += lab.b[i];
        nc.y += r;
        nc.x += c;
        ++counts[static_cast<size_t>(labels[i])];
      }
    for (size_t ci = 0; ci < clusters.size(); ++ci) {
      if (counts[ci] == 0) continue;  // keep the stale center
      const double inv = 1.0 / static_cast<double>(counts[ci]);
      clusters[ci] = {next[ci].l * inv, next[ci].a * inv, next[ci].b * inv, next[ci].y * inv,
                      next[ci].x * inv};
    }
  }

  // Enforce connectivity: flood-fill components in scan order; components
  // below the size floor merge into the first previously labeled neighbor.
  const int64_t min_size = std::max<int64_t>(1, n / k / 4);
  std::vector<int> final_labels(static_cast<size_t>(n), -1);
  std::vector<int64_t> stack;
  int next_label = 0;
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  for (int64_t start = 0; start < n; ++start) {
    if (final_labels[static_cast<size_t>(start)] >= 0) continue;
    int adj = -1;
    stack.assign(1, start);
    std::vector<int64_t> comp{start};
    final_labels[static_cast<size_t>(start)] = next_label;
    while (!stack.empty()) {
      const int64_t i = stack.back();
      stack.pop_back();
      const int r = static_cast<int>(i / w), c = static_cast<int>(i % w);
      for (int d = 0; d < 4; ++d) {
        const int rr = r + dr[d], cc = c + dc[d];
        if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
        const int64_t j = static_cast<int64_t>(rr) * w + cc;
        if (final_labels[static_cast<size_t>(j)] >= 0 &&
            final_labels[static_cast<size_t>(j)] != next_label) {
          if (adj < 0) adj = final_labels[static_cast<size_t>(j)];
          continue;
        }
        if (final_labels[static_cast<size_t>(j)] < 0 &&
            labels[static_cast<size_t>(j)] == labels[static_cast<size_t>(start)]) {
          final_labels[static_cast<size_t>(j)] = next_label;
          comp.push_back(j);
          stack.push_back(j);
        }
      }
    }
    if (static_cast<int64_t>(comp.size()) < min_size && adj >= 0) {
      for (int64_t i : comp) final_labels[static_cast<size_t>(i)] = adj;
    } else {
      ++next_label;
    }
  }

  SuperpixelLabeling out;
  out.height = h;
  out.width = w;
  out.count = next_label;
  out.labels = std::move(final_labels);
  out.mean_color.assign(static_cast<size_t>(next_label), {0.0, 0.0, 0.0});
  std::vector<int64_t> counts(static_cast<size_t>(next_label), 0);
  for (int64_t i = 0; i < n; ++i) {
    const int lb = out.labels[static_cast<size_t>(i)];
    for (int ch = 0; ch < 3; ++ch)
      out.mean_color[static_cast<size_t>(lb)][static_cast<size_t>(ch)] +=
          frame.channels[static_cast<size_t>(ch)][static_cast<size_t>(i)];
    ++counts[static_cast<size_t>(lb)];
  }
  for (int lb = 0; lb < next_label; ++lb)
    for (int ch = 0; ch < 3; ++ch)
      out.mean_color[static_cast<size_t>(lb)][static_cast<size_t>(ch)] /=
          static_cast<double>(counts[static_cast<size_t>(lb)]);
  return out;
}

}  // namespace sgf::opb
