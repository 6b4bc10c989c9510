#pragma once

#include <cstdint>
#include <vector>

#include "sgf/tensor.hpp"

namespace sgf::net {

// Cross-correlation with bias. x: (C,H,W), w: (O,C,kh,kw), b: (O).
Tensor conv_forward(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad);

struct ConvGrads {
  Tensor dx, dw, db;
};
ConvGrads conv_backward(const Tensor& x, const Tensor& w, const Tensor& dy, int stride, int pad);

// Transposed convolution (scatter-accumulate), no bias. x: (I,H,W),
// w: (I,O,kh,kw); output cropped symmetrically by `crop` on every side.
// Adjoint of conv_forward with the same kernel when crop == pad.
Tensor deconv_forward(const Tensor& x, const Tensor& w, int stride, int crop);

struct DeconvGrads {
  Tensor dx, dw;
};
DeconvGrads deconv_backward(const Tensor& x, const Tensor& w, const Tensor& dy, int stride,
                            int crop);

// Window max with stored argmax (flat input index per output element).
// Floor mode by default; ceil mode clamps the trailing window to the frame.
struct MaxPoolResult {
  Tensor y;
  std::vector<int64_t> argmax;
};
MaxPoolResult maxpool_forward(const Tensor& x, int kernel, int stride, bool ceil_mode = false);
Tensor maxpool_backward(const std::vector<int>& x_shape, const MaxPoolResult& fwd,
                        const Tensor& dy);

Tensor relu_forward(const Tensor& x);
Tensor relu_backward(const Tensor& x, const Tensor& dy);  // relu'(0) := 0

Tensor sigmoid_forward(const Tensor& x);
Tensor sigmoid_backward(const Tensor& y, const Tensor& dy);  // takes forward output

// Pointwise max of two same-shape tensors; mask records the winner
// (ties go to the first input).
struct EltwiseMaxResult {
  Tensor y;
  std::vector<uint8_t> took_b;  // 1 where b strictly won
};
EltwiseMaxResult eltwise_max_forward(const Tensor& a, const Tensor& b);
struct EltwiseMaxGrads {
  Tensor da, db;
};
EltwiseMaxGrads eltwise_max_backward(const EltwiseMaxResult& fwd, const Tensor& dy);

}  // namespace sgf::net
