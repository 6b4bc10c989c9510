#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sgf/image.hpp"
#include "sgf/scalar_field.hpp"

namespace sgf::metrics {

struct Point {
  int x = 0;  // column
  int y = 0;  // row
};

struct FixationSet {
  int frame_index = 0;
  std::vector<Point> points;
};

struct CurvePoint {
  double precision = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

// One operating point per integer threshold 0..255 (binarize pred >= t).
struct CurveData {
  std::array<CurvePoint, 256> points;
  double roc_auc = 0.0;
};

struct MetricReport {
  double s_auc = 0.0;
  double nss = 0.0;
  double cc = 0.0;
  double sim = 0.0;
  double emd = 0.0;
  CurveData curves;
};

// Binary ground truth: nonzero = fixated.
struct BinaryMap {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> values;
};

BinaryMap binarize_density(const ScalarField& density);  // fixated where > 0

// Precision / TPR / FPR per threshold, plus the trapezoidal ROC area with
// closure to (0,0) and (1,1). Empty predictions count precision 1.
CurveData pr_roc_curves(const GrayImage& pred, const BinaryMap& gt_binary);

// Rank-statistic (Mann-Whitney) AUC of pos_values vs neg_values with ties
// counted half. The core of shuffled AUC.
double auc_values(const std::vector<double>& pos_values, const std::vector<double>& neg_values);

// Shuffled AUC: positives are the frame's fixations, negatives are
// 100*|positives| draws with replacement from fixations of other frames.
double shuffled_auc(const ScalarField& pred, const FixationSet& fixations,
                    const std::vector<Point>& negative_pool, uint64_t seed);

// Mean standardized saliency at the fixation pixels (population std; a
// constant map scores 0).
double nss(const ScalarField& pred, const FixationSet& fixations);

// Pearson correlation over pixels; 0 if either map is constant.
double cc(const ScalarField& pred, const ScalarField& gt_density);

// Sum of pointwise minima after normalizing each map to unit mass.
double sim(const ScalarField& pred, const ScalarField& gt_density);

// Exact earth mover's distance between the two maps box-downsampled to
// grid x grid and normalized, Euclidean ground distance in cell units.
double emd(const ScalarField& pred, const ScalarField& gt_density, int grid);

// Exact min-cost transport between nonnegative supply/demand vectors with
// equal totals; cost is row-major m x n.
double emd_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                     const std::vector<double>& cost, int m, int n);

struct EvalConfig {
  int emd_grid = 16;
  int negative_multiplier = 100;
  uint64_t seed = 0;
};

MetricReport evaluate(const ScalarField& pred, const ScalarField& gt_density,
                      const BinaryMap& gt_binary, const FixationSet& fixations,
                      const std::vector<Point>& negative_pool, const EvalConfig& cfg);

}  // namespace sgf::metrics
