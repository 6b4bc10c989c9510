#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sgf/image.hpp"

namespace sgf::opb {

struct SuperpixelLabeling {
  int height = 0;
  int width = 0;
  int count = 0;                                   // P
  std::vector<int> labels;                         // in [0, P), row-major
  std::vector<std::array<double, 3>> mean_color;   // per-label RGB mean

  int label_at(int r, int c) const { return labels[static_cast<size_t>(r) * width + c]; }
};

// SLIC in CIELAB with grid seeding, 10 refinement iterations and the
// standard enforce-connectivity pass. Deterministic; the seed argument is
// reserved (the algorithm has no random choices).
SuperpixelLabeling slic_superpixels(const RgbFrame& frame, int k, double compactness,
                                    uint64_t seed);

}  // namespace sgf::opb
