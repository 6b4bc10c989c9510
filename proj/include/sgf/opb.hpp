#pragma once

#include <cstdint>
#include <optional>

#include "sgf/image.hpp"
#include "sgf/optical_flow.hpp"
#include "sgf/scalar_field.hpp"
#include "sgf/slic.hpp"

namespace sgf::opb {

struct OpbParams {
  double theta = -1.0;        // absolute flow-gradient threshold; < 0 = adaptive
  double theta_q = 0.1;       // adaptive: theta = theta_q * P99 of the magnitude
  double alpha = 0.75;        // boundary weighting
  double mu = 0.5;            // previous-frame weight in the recursion
  double lambda = 0.5;        // propagated-term weight in the recursion
  double sigma = 0.3;         // recursion gate on the previous boundary
  int superpixel_count = 200;
  double compactness = 10.0;
  int flow_iterations = 100;
  double flow_smoothness = 0.25;
  uint64_t seed = 0;
};

// Gradient magnitude of the superpixel mean-color image (central
// differences, Euclidean norm over the six partials), rescaled to [0,1].
ScalarField color_gradient(const SuperpixelLabeling& sp);

// sqrt(|grad u|^2 + |grad v|^2) with values at or below theta zeroed.
ScalarField flow_gradient_magnitude(const FlowField& flow, double theta);

// Boundary fusion. First frame (no prev_b): B = CG * (1 - exp(-alpha*M)).
// Later frames blend the previous boundary where it exceeds sigma.
ScalarField fuse_boundary(const ScalarField& cg, const ScalarField& m,
                          const ScalarField* prev_b, const OpbParams& p);

// Full chain: SLIC -> color gradient, flow -> thresholded gradient
// magnitude, then fusion with the previous boundary map.
ScalarField opb_pipeline(const RgbFrame& prev, const RgbFrame& cur,
                         const ScalarField* prev_b, const OpbParams& p);

// The adaptive threshold used when p.theta < 0.
double adaptive_theta(const ScalarField& magnitude, double theta_q);

}  // namespace sgf::opb
