#include "sgf/scalar_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgf {

ScalarField::ScalarField(int h, int w, double fill) : height(h), width(w) {
  if (h <= 0 || w <= 0) throw std::invalid_argument("ScalarField: dims must be positive");
  values.assign(static_cast<size_t>(h) * w, fill);
}

double ScalarField::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

double ScalarField::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

double ScalarField::sum() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

bool ScalarField::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

ScalarField ScalarField::flipped_horizontal() const {
  ScalarField out(height, width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) out.at(r, c) = at(r, width - 1 - c);
  return out;
}

}  // namespace sgf
