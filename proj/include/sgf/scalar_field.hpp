#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sgf {

// Row-major 2-D grid of doubles: the carrier for saliency maps, fixation
// densities, gradients and boundary maps.
struct ScalarField {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(int h, int w, double fill = 0.0);

  double& at(int r, int c) { return values[static_cast<size_t>(r) * width + c]; }
  double at(int r, int c) const { return values[static_cast<size_t>(r) * width + c]; }

  size_t size() const { return values.size(); }
  bool same_dims(const ScalarField& o) const {
    return height == o.height && width == o.width;
  }

  double min_value() const;
  double max_value() const;
  double sum() const;
  bool all_finite() const;

  ScalarField flipped_horizontal() const;
};

}  // namespace sgf
