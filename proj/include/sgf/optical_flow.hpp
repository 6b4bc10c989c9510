#pragma once

#include "sgf/image.hpp"
#include "sgf/scalar_field.hpp"

namespace sgf::opb {

// Dense per-pixel displacement field between consecutive frames.
struct FlowField {
  ScalarField u;  // x displacement, pixels
  ScalarField v;  // y displacement, pixels
};

// Horn-Schunck-style variational flow on a 3-level pyramid with warping.
// `iterations` counts Jacobi sweeps per warp; `smoothness` is the
// regularization weight. Identical frames produce exactly zero flow.
FlowField optical_flow(const RgbFrame& prev, const RgbFrame& cur, int iterations = 100,
                       double smoothness = 0.25);

}  // namespace sgf::opb
