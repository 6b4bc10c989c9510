#include "sgf/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace sgf::net {

namespace {

int ceil_div(int a, int b) {  // b > 0
  return a > 0 ? (a + b - 1) / b : -((-a) / b);
}

int floor_div(int a, int b) {  // b > 0
  return a >= 0 ? a / b : -((-a + b - 1) / b);
}

void check_conv_args(const Tensor& x, const Tensor& w, int stride, int pad) {
  if (x.shape.size() != 3 || w.shape.size() != 4)
    throw std::invalid_argument("conv: x must be (C,H,W), w must be 4-D");
  if (stride < 1 || pad < 0) throw std::invalid_argument("conv: bad stride/pad");
}

}  // namespace

Tensor conv_forward(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad) {
  check_conv_args(x, w, stride, pad);
  const int C = x.dim(0), H = x.dim(1), W = x.dim(2);
  const int O = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  if (w.dim(1) != C) throw std::invalid_argument("conv_forward: channel mismatch");
  if (b.shape != std::vector<int>{O}) throw std::invalid_argument("conv_forward: bias shape");
  const int oh = (H + 2 * pad - kh) / stride + 1;
  const int ow = (W + 2 * pad - kw) / stride + 1;
  if (H + 2 * pad < kh || W + 2 * pad < kw || oh < 1 || ow < 1)
    throw std::invalid_argument("conv_forward: non-positive output dims");

  Tensor y({O, oh, ow});
  for (int o = 0; o < O; ++o) {
    double* yo = y.data.data() + static_cast<size_t>(o) * oh * ow;
    const double bo = b.data[static_cast<size_t>(o)];
    for (int i = 0; i < oh * ow; ++i) yo[i] = bo;
  }

  for (int o = 0; o < O; ++o)
    for (int c = 0; c < C; ++c)
      for (int kr = 0; kr < kh; ++kr)
        for (int kc = 0; kc < kw; ++kc) {
          const double wv =
              w.data[((static_cast<size_t>(o) * C + c) * kh + kr) * kw + kc];
          if (wv == 0.0) continue;
          const int jlo = std::max(0, ceil_div(pad - kc, stride));
          const int jhi = std::min(ow - 1, floor_div(W - 1 - kc + pad, stride));
          for (int i = 0; i < oh; ++i) {
            const int ir = i * stride + kr - pad;
            if (ir < 0 || ir >= H) continue;
            double* yrow = y.data.data() + (static_cast<size_t>(o) * oh + i) * ow;
            const double* xrow =
                x.data.data() + (static_cast<size_t>(c) * H + ir) * W + (kc - pad);
            if (stride == 1) {
              for (int j = jlo; j <= jhi; ++j) yrow[j] += wv * xrow[j];
            } else {
              for (int j = jlo; j <= jhi; ++j) yrow[j] += wv * xrow[j * stride];
            }
          }
        }
  return y;
}

ConvGrads conv_backward(const Tensor& x, const Tensor& w, const Tensor& dy, int stride,
                        int pad) {
  check_conv_args(x, w, stride, pad);
  const int C = x.dim(0), H = x.dim(1), W = x.dim(2);
  const int O = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const int oh = dy.dim(1), ow = dy.dim(2);
  if (dy.dim(0) != O) throw std::invalid_argument("conv_backward: dy channel mismatch");

  ConvGrads g;
  g.dx = Tensor(x.shape);
  g.dw = Tensor(w.shape);
  g.db = Tensor({O});

  for (int o = 0; o < O; ++o) {
    double s = 0.0;
    const double* dyo = dy.data.data() + static_cast<size_t>(o) * oh * ow;
    for (int i = 0; i < oh * ow; ++i) s += dyo[i];
    g.db.data[static_cast<size_t>(o)] = s;
  }

  for (int o = 0; o < O; ++o)
    for (int c = 0; c < C; ++c)
      for (int kr = 0; kr < kh; ++kr)
        for (int kc = 0; kc < kw; ++kc) {
          const size_t widx = ((static_cast<size_t>(o) * C + c) * kh + kr) * kw + kc;
          const double wv = w.data[widx];
          double acc = 0.0;
          const int jlo = std::max(0, ceil_div(pad - kc, stride));
          const int jhi = std::min(ow - 1, floor_div(W - 1 - kc + pad, stride));
          for (int i = 0; i < oh; ++i) {
            const int ir = i * stride + kr - pad;
            if (ir < 0 || ir >= H) continue;
            const double* dyrow = dy.data.data() + (static_cast<size_t>(o) * oh + i) * ow;
            const double* xrow =
                x.data.data() + (static_cast<size_t>(c) * H + ir) * W + (kc - pad);
            double* dxrow =
                g.dx.data.data() + (static_cast<size_t>(c) * H + ir) * W + (kc - pad);
            if (stride == 1) {
              for (int j = jlo; j <= jhi; ++j) {
                acc += dyrow[j] * xrow[j];
                dxrow[j] += wv * dyrow[j];
              }
            } else {
              for (int j = jlo; j <= jhi; ++j) {
                acc += dyrow[j] * xrow[j * stride];
                dxrow[j * stride] += wv * dyrow[j];
              }
            }
          }
          g.dw.data[widx] = acc;
        }
  return g;
}

namespace {

void check_deconv_args(const Tensor& x, const Tensor& w, int stride, int crop) {
  if (x.shape.size() != 3 || w.shape.size() != 4)
    throw std::invalid_argument("deconv: x must be (I,H,W), w must be 4-D");
  if (stride < 1 || crop < 0) throw std::invalid_argument("deconv: bad stride/crop");
  if (w.dim(0) != x.dim(0)) throw std::invalid_argument("deconv: channel mismatch");
}

}  // namespace

Tensor deconv_forward(const Tensor& x, const Tensor& w, int stride, int crop) {
  check_deconv_args(x, w, stride, crop);
  const int I = x.dim(0), H = x.dim(1), W = x.dim(2);
  const int O = w.dim(1), kh = w.dim(2), kw = w.dim(3);
  const int oh = (H - 1) * stride + kh - 2 * crop;
  const int ow = (W - 1) * stride + kw - 2 * crop;
  if (oh < 1 || ow < 1) throw std::invalid_argument("deconv_forward: crop exceeds output");

  Tensor y({O, oh, ow});
  for (int i = 0; i < I; ++i)
    for (int o = 0; o < O; ++o)
      for (int kr = 0; kr < kh; ++kr)
        for (int kc = 0; kc < kw; ++kc) {
          const double wv =
              w.data[((static_cast<size_t>(i) * O + o) * kh + kr) * kw + kc];
          if (wv == 0.0) continue;
          const int xlo = std::max(0, ceil_div(crop - kc, stride));
          const int xhi = std::min(W - 1, floor_div(ow - 1 + crop - kc, stride));
          for (int r = 0; r < H; ++r) {
            const int orow = r * stride + kr - crop;
            if (orow < 0 || orow >= oh) continue;
            double* yrow =
                y.data.data() + (static_cast<size_t>(o) * oh + orow) * ow + (kc - crop);
            const double* xrow = x.data.data() + (static_cast<size_t>(i) * H + r) * W;
            for (int cx = xlo; cx <= xhi; ++cx) yrow[cx * stride] += wv * xrow[cx];
          }
        }
  return y;
}

DeconvGrads deconv_backward(const Tensor& x, const Tensor& w, const Tensor& dy, int stride,
                            int crop) {
  check_deconv_args(x, w, stride, crop);
  const int I = x.dim(0), H = x.dim(1), W = x.dim(2);
  const int O = w.dim(1), kh = w.dim(2), kw = w.dim(3);
  const int oh = dy.dim(1), ow = dy.dim(2);
  if (dy.dim(0) != O) throw std::invalid_argument("deconv_backward: dy channel mismatch");

  DeconvGrads g;
  g.dx = Tensor(x.shape);
  g.dw = Tensor(w.shape);

  for (int i = 0; i < I; ++i)
    for (int o = 0; o < O; ++o)
      for (int kr = 0; kr < kh; ++kr)
        for (int kc = 0; kc < kw; ++kc) {
          const size_t widx = ((static_cast<size_t>(i) * O + o) * kh + kr) * kw + kc;
          const double wv = w.data[widx];
          double acc = 0.0;
          const int xlo = std::max(0, ceil_div(crop - kc, stride));
          const int xhi = std::min(W - 1, floor_div(ow - 1 + crop - kc, stride));
          for (int r = 0; r < H; ++r) {
            const int orow = r * stride + kr - crop;
            if (orow < 0 || orow >= oh) continue;
            const double* dyrow =
                dy.data.data() + (static_cast<size_t>(o) * oh + orow) * ow + (kc - crop);
            const double* xrow = x.data.data() + (static_cast<size_t>(i) * H + r) * W;
            double* dxrow = g.dx.data.data() + (static_cast<size_t>(i) * H + r) * W;
            for (int cx = xlo; cx <= xhi; ++cx) {
              const double d = dyrow[cx * stride];
              acc += xrow[cx] * d;
              dxrow[cx] += wv * d;
            }
          }
          g.dw.data[widx] = acc;
        }
  return g;
}

MaxPoolResult maxpool_forward(const Tensor& x, int kernel, int stride, bool ceil_mode) {
  if (x.shape.size() != 3) throw std::invalid_argument("maxpool: x must be (C,H,W)");
  if (kernel < 1 || stride < 1) throw std::invalid_argument("maxpool: bad kernel/stride");
  const int C = x.dim(0), H = x.dim(1), W = x.dim(2);
  int oh, ow;
  if (ceil_mode) {
    oh = std::max(1, ceil_div(H - kernel, stride) + 1);
    ow = std::max(1, ceil_div(W - kernel, stride) + 1);
  } else {
    if (H < kernel || W < kernel)
      throw std::invalid_argument("maxpool: input smaller than kernel in floor mode");
    oh = (H - kernel) / stride + 1;
    ow = (W - kernel) / stride + 1;
  }

  MaxPoolResult res;
  res.y = Tensor({C, oh, ow});
  res.argmax.resize(res.y.data.size());
  for (int c = 0; c < C; ++c)
    for (int i = 0; i < oh; ++i)
      for (int j = 0; j < ow; ++j) {
        const int r0 = i * stride, c0 = j * stride;
        const int r1 = std::min(r0 + kernel, H), c1 = std::min(c0 + kernel, W);
        double best = -1.0;
        int64_t bestidx = -1;
        for (int r = r0; r < r1; ++r)
          for (int cc = c0; cc < c1; ++cc) {
            const int64_t idx = (static_cast<int64_t>(c) * H + r) * W + cc;
            const double v = x.data[static_cast<size_t>(idx)];
            if (bestidx < 0 || v > best) {  // ties keep the first in scan order
              best = v;
              bestidx = idx;
            }
          }
        const size_t out = (static_cast<size_t>(c) * oh + i) * ow + j;
        res.y.data[out] = best;
        res.argmax[out] = bestidx;
      }
  return res;
}

Tensor maxpool_backward(const std::vector<int>& x_shape, const MaxPoolResult& fwd,
                        const Tensor& dy) {
  if (dy.data.size() != fwd.argmax.size())
    throw std::invalid_argument("maxpool_backward: dy size mismatch");
  Tensor dx(x_shape);
  for (size_t i = 0; i < fwd.argmax.size(); ++i)
    dx.data[static_cast<size_t>(fwd.argmax[i])] += dy.data[i];
  return dx;
}

Tensor relu_forward(const Tensor& x) {
  Tensor y(x.shape);
  for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] > 0.0 ? x.data[i] : 0.0;
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& dy) {
  Tensor dx(x.shape);
  for (size_t i = 0; i < x.data.size(); ++i) dx.data[i] = x.data[i] > 0.0 ? dy.data[i] : 0.0;
  return dx;
}

Tensor sigmoid_forward(const Tensor& x) {
  Tensor y(x.shape);
  for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = 1.0 / (1.0 + std::exp(-x.data[i]));
  return y;
}

Tensor sigmoid_backward(const Tensor& y, const Tensor& dy) {
  Tensor dx(y.shape);
  for (size_t i = 0; i < y.data.size(); ++i)
    dx.data[i] = dy.data[i] * y.data[i] * (1.0 - y.data[i]);
  return dx;
}

EltwiseMaxResult eltwise_max_forward(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("eltwise_max: shape mismatch");
  EltwiseMaxResult res;
  res.y = Tensor(a.shape);
  res.took_b.resize(a.data.size());
  for (size_t i = 0; i < a.data.size(); ++i) {
    const bool bwins = b.data[i] > a.data[i];
    res.took_b[i] = bwins ? 1 : 0;
    res.y.data[i] = bwins ? b.data[i] : a.data[i];
  }
  return res;
}

EltwiseMaxGrads eltwise_max_backward(const EltwiseMaxResult& fwd, const Tensor& dy) {
  if (dy.data.size() != fwd.took_b.size())
    throw std::invalid_argument("eltwise_max_backward: dy size mismatch");
  EltwiseMaxGrads g;
  g.da = Tensor(dy.shape);
  g.db = Tensor(dy.shape);
  for (size_t i = 0; i < dy.data.size(); ++i) {
    if (fwd.took_b[i])
      g.db.data[i] = dy.data[i];
    else
      g.da.data[i] = dy.data[i];
  }
  return g;
}

}  // namespace sgf::net
