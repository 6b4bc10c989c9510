#pragma once

#include <cstdint>
#include <vector>

namespace sgf {

// Dense N-D array of doubles, row-major. Activations are (C,H,W); conv
// weights (out,in,kh,kw); deconv weights (in,out,kh,kw).
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s, double fill = 0.0);

  int64_t size() const { return static_cast<int64_t>(data.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool all_finite() const;

  static int64_t shape_size(const std::vector<int>& s);
};

double dot(const Tensor& a, const Tensor& b);

}  // namespace sgf
