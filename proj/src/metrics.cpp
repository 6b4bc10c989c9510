#include "sgf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sgf/fixmap.hpp"
#include "sgf/rng.hpp"

namespace sgf::metrics {

BinaryMap binarize_density(const ScalarField& density) {
  BinaryMap b;
  b.height = density.height;
  b.width = density.width;
  b.values.resize(density.values.size());
  for (size_t i = 0; i < density.values.size(); ++i)
    b.values[i] = density.values[i] > 0.0 ? 1 : 0;
  return b;
}

CurveData pr_roc_curves(const GrayImage& pred, const BinaryMap& gt_binary) {
  if (pred.height != gt_binary.height || pred.width != gt_binary.width)
    throw std::invalid_argument("pr_roc_curves: dims mismatch");

  // Histogram pred values by ground-truth class, then sweep thresholds via
  // suffix sums: mask(t) = {pred >= t}.
  std::array<int64_t, 256> pos_hist{}, neg_hist{};
  int64_t total_pos = 0, total_neg = 0;
  for (size_t i = 0; i < pred.values.size(); ++i) {
    if (gt_binary.values[i]) {
      ++pos_hist[pred.values[i]];
      ++total_pos;
    } else {
      ++neg_hist[pred.values[i]];
      ++total_neg;
    }
  }
  if (total_pos == 0 || total_neg == 0)
    throw std::invalid_argument("pr_roc_curves: ground truth needs positives and negatives");

  CurveData curve;
  int64_t pos_ge = 0, neg_ge = 0;
  std::array<int64_t, 256> pos_at{}, neg_at{};
  for (int t = 255; t >= 0; --t) {
    pos_ge += pos_hist[static_cast<size_t>(t)];
    neg_ge += neg_hist[static_cast<size_t>(t)];
    pos_at[static_cast<size_t>(t)] = pos_ge;
    neg_at[static_cast<size_t>(t)] = neg_ge;
  }
  for (int t = 0; t < 256; ++t) {
    const int64_t tp = pos_at[static_cast<size_t>(t)];
    const int64_t fp = neg_at[static_cast<size_t>(t)];
    CurvePoint& p = curve.points[static_cast<size_t>(t)];
    p.precision = (tp + fp) == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    p.tpr = static_cast<double>(tp) / static_cast<double>(total_pos);
    p.fpr = static_cast<double>(fp) / static_cast<double>(total_neg);
  }

  // Trapezoid over (fpr, tpr), ascending fpr, closed at (0,0) and (1,1).
  double auc = 0.0;
  double px = 0.0, py = 0.0;
  for (int t = 255; t >= 0; --t) {
    const CurvePoint& p = curve.points[static_cast<size_t>(t)];
    auc += (p.fpr - px) * (p.tpr + py) * 0.5;
    px = p.fpr;
    py = p.tpr;
  }
  auc += (1.0 - px) * (1.0 + py) * 0.5;
  curve.roc_auc = auc;
  return curve;
}

double auc_values(const std::vector<double>& pos_values, const std::vector<double>& neg_values) {
  if (pos_values.empty() || neg_values.empty())
    throw std::invalid_argument("auc_values: empty point sets");

  // Mann-Whitney via average ranks; ties counted half.
  struct Entry {
    double v;
    bool pos;
  };
  std::vector<Entry> all;
  all.reserve(pos_values.size() + neg_values.size());
  for (double v : pos_values) all.push_back({v, true});
  for (double v : neg_values) all.push_back({v, false});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.v < b.v; });

  const double np = static_cast<double>(pos_values.size());
  const double nn = static_cast<double>(neg_values.size());
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < all.size()) {
    size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    // 1-based ranks i+1 .. j share the average rank.
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k)
      if (all[k].pos) rank_sum_pos += avg_rank;
    i = j;
  }
  const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

namespace {

double value_at(const ScalarField& f, const Point& p) {
  if (p.x < 0 || p.x >= f.width || p.y < 0 || p.y >= f.height)
    throw std::invalid_argument("metrics: point outside frame");
  return f.at(p.y, p.x);
}

}  // namespace

double shuffled_auc(const ScalarField& pred, const FixationSet& fixations,
                    const std::vector<Point>& negative_pool, uint64_t seed) {
  if (fixations.points.empty()) throw std::invalid_argument("shuffled_auc: no fixations");
  if (negative_pool.empty()) throw std::invalid_argument("shuffled_auc: empty negative pool");

  std::vector<double> pos;
  pos.reserve(fixations.points.size());
  for (const auto& p : fixations.points) pos.push_back(value_at(pred, p));

  Rng rng(derive_seed(seed, "sauc-negatives"));
  const size_t n_neg = 100 * fixations.points.size();
  std::vector<double> neg;
  neg.reserve(n_neg);
  for (size_t i = 0; i < n_neg; ++i) {
    const Point& p = negative_pool[static_cast<size_t>(
        rng.uniform_int(static_cast<int>(negative_pool.size())))];
    neg.push_back(value_at(pred, p));
  }
  return auc_values(pos, neg);
}

double nss(const ScalarField& pred, const FixationSet& fixations) {
  if (fixations.points.empty()) throw std::invalid_argument("nss: no fixations");
  const double n = static_cast<double>(pred.values.size());
  double mean = 0.0;
  for (double v : pred.values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : pred.values) var += (v - mean) * (v - mean);
  var /= n;
  if (var <= 0.0) return 0.0;
  const double sd = std::sqrt(var);
  double acc = 0.0;
  for (const auto& p : fixations.points) acc += (value_at(pred, p) - mean) / sd;
  return acc / static_cast<double>(fixations.points.size());
}

double cc(const ScalarField& pred, const ScalarField& gt_density) {
  if (!pred.same_dims(gt_density)) throw std::invalid_argument("cc: dims mismatch");
  const double n = static_cast<double>(pred.values.size());
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < pred.values.size(); ++i) {
    ma += pred.values[i];
    mb += gt_density.values[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (size_t i = 0; i < pred.values.size(); ++i) {
    const double da = pred.values[i] - ma;
    const double db = gt_density.values[i] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

double sim(const ScalarField& pred, const ScalarField& gt_density) {
  if (!pred.same_dims(gt_density)) throw std::invalid_argument("sim: dims mismatch");
  const double sp = pred.sum();
  const double sg = gt_density.sum();
  if (!(sp > 0.0) || !(sg > 0.0)) throw std::invalid_argument("sim: zero-mass map");
  double acc = 0.0;
  for (size_t i = 0; i < pred.values.size(); ++i)
    acc += std::min(pred.values[i] / sp, gt_density.values[i] / sg);
  return acc;
}

namespace {

// Box-downsample by index binning (pixel (r,c) -> cell (r*g/H, c*g/W)),
// then normalize to unit mass.
std::vector<double> downsample_normalize(const ScalarField& f, int grid) {
  std::vector<double> cells(static_cast<size_t>(grid) * grid, 0.0);
  for (int r = 0; r < f.height; ++r) {
    const int cr = static_cast<int>(static_cast<int64_t>(r) * grid / f.height);
    for (int c = 0; c < f.width; ++c) {
      const int cc_ = static_cast<int>(static_cast<int64_t>(c) * grid / f.width);
      cells[static_cast<size_t>(cr) * grid + cc_] += f.at(r, c);
    }
  }
  double total = 0.0;
  for (double v : cells) total += v;
  if (!(total > 0.0)) throw std::invalid_argument("emd: zero-mass map");
  for (double& v : cells) v /= total;
  return cells;
}

}  // namespace

double emd(const ScalarField& pred, const ScalarField& gt_density, int grid) {
  if (grid < 1) throw std::invalid_argument("emd: grid must be positive");
  std::vector<double> a = downsample_normalize(pred, grid);
  std::vector<double> b = downsample_normalize(gt_density, grid);

  // Drop empty cells to keep the transport instance small.
  std::vector<double> supply, demand;
  std::vector<int> Sa, Sb;
  for (int i = 0; i < grid * grid; ++i) {
    if (a[static_cast<size_t>(i)] > 0.0) {
      Sa.push_back(i);
      supply.push_back(a[static_cast<size_t>(i)]);
    }
    if (b[static_cast<size_t>(i)] > 0.0) {
      Sb.push_back(i);
      demand.push_back(b[static_cast<size_t>(i)]);
    }
  }
  const int m = static_cast<int>(Sa.size());
  const int n = static_cast<int>(Sb.size());
  std::vector<double> cost(static_cast<size_t>(m) * n);
  for (int i = 0; i < m; ++i) {
    const double ry = Sa[static_cast<size_t>(i)] / grid;
    const double rx = Sa[static_cast<size_t>(i)] % grid;
    for (int j = 0; j < n; ++j) {
      const double cy = Sb[static_cast<size_t>(j)] / grid;
      const double cx = Sb[static_cast<size_t>(j)] % grid;
      cost[static_cast<size_t>(i) * n + j] = std::hypot(ry - cy, rx - cx);
    }
  }
  return emd_transport(supply, demand, cost, m, n);
}

MetricReport evaluate(const ScalarField& pred, const ScalarField& gt_density,
                      const BinaryMap& gt_binary, const FixationSet& fixations,
                      const std::vector<Point>& negative_pool, const EvalConfig& cfg) {
  MetricReport r;
  r.curves = pr_roc_curves(fixmap::quantize_map(pred), gt_binary);
  r.s_auc = shuffled_auc(pred, fixations, negative_pool, cfg.seed);
  r.nss = nss(pred, fixations);
  r.cc = cc(pred, gt_density);
  r.sim = sim(pred, gt_density);
  r.emd = emd(pred, gt_density, cfg.emd_grid);
  return r;
}

}  // namespace sgf::metrics
