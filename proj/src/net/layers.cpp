#include "net/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "core/blas.hpp"
#include "core/error.hpp"

namespace deynet::net {

namespace {

// cols is (K x BHW) with K = Cin * k * k; row (ci, dh, dw), column (b, h, w).
void im2col(const Tensor& x, int kernel, int pad, double* cols) {
  const std::int64_t C = x.c(), B = x.b(), H = x.h(), W = x.w();
  const std::int64_t bhw = B * H * W;
  for (std::int64_t ci = 0; ci < C; ++ci) {
    for (int dh = 0; dh < kernel; ++dh) {
      for (int dw = 0; dw < kernel; ++dw) {
        double* row = cols + ((ci * kernel + dh) * kernel + dw) * bhw;
        const int yo = dh - pad, xo = dw - pad;
        const std::int64_t w_lo = std::max<std::int64_t>(0, -xo);
        const std::int64_t w_hi = std::min<std::int64_t>(W, W - xo);
        for (std::int64_t b = 0; b < B; ++b) {
          for (std::int64_t h = 0; h < H; ++h) {
            double* dst = row + (b * H + h) * W;
            const std::int64_t hs = h + yo;
            if (hs < 0 || hs >= H || w_lo >= w_hi) {
              std::memset(dst, 0, static_cast<std::size_t>(W) * sizeof(double));
              continue;
            }
            if (w_lo > 0) std::memset(dst, 0, static_cast<std::size_t>(w_lo) * sizeof(double));
            const double* src = &x.data[((ci * B + b) * H + hs) * W + (w_lo + xo)];
            std::memcpy(dst + w_lo, src, static_cast<std::size_t>(w_hi - w_lo) * sizeof(double));
            if (w_hi < W)
              std::memset(dst + w_hi, 0, static_cast<std::size_t>(W - w_hi) * sizeof(double));
          }
        }
      }
    }
  }
}

// Scatter-add transpose of im2col.
void col2im(const double* cols, int kernel, int pad, Tensor& gx) {
  const std::int64_t C = gx.c(), B = gx.b(), H = gx.h(), W = gx.w();
  const std::int64_t bhw = B * H * W;
  for (std::int64_t ci = 0; ci < C; ++ci) {
    for (int dh = 0; dh < kernel; ++dh) {
      for (int dw = 0; dw < kernel; ++dw) {
        const double* row = cols + ((ci * kernel + dh) * kernel + dw) * bhw;
        const int yo = dh - pad, xo = dw - pad;
        const std::int64_t w_lo = std::max<std::int64_t>(0, -xo);
        const std::int64_t w_hi = std::min<std::int64_t>(W, W - xo);
        for (std::int64_t b = 0; b < B; ++b) {
          for (std::int64_t h = 0; h < H; ++h) {
            const std::int64_t hs = h + yo;
            if (hs < 0 || hs >= H || w_lo >= w_hi) continue;
            const double* src = row + (b * H + h) * W + w_lo;
            double* dst = &gx.data[((ci * B + b) * H + hs) * W + (w_lo + xo)];
            for (std::int64_t i = 0; i < w_hi - w_lo; ++i) dst[i] += src[i];
          }
        }
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv2d

void Conv2d::build(std::int64_t in_c, std::int64_t out_c, int k, const std::string& name_prefix) {
  in_ch = in_c;
  out_ch = out_c;
  kernel = k;
  pad = (k - 1) / 2;
  weight.name = name_prefix + ".weight";
  weight.init_shape({out_c, in_c, k, k});
  bias.name = name_prefix + ".bias";
  bias.init_shape({out_c});
}

void Conv2d::init(Rng& rng) {
  const double std = std::sqrt(2.0 / double(in_ch * kernel * kernel));
  for (auto& v : weight.value.data) v = std * rng.normal();
  bias.value.zero();
}

void Conv2d::collect(std::vector<Param*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

void Conv2d::forward(const Tensor& x, Tensor& y, Cache& cache, Scratch& scratch) const {
  const std::int64_t bhw = x.cols();
  const std::int64_t K = in_ch * kernel * kernel;
  y = Tensor({out_ch, x.b(), x.h(), x.w()});

  const double* cols = x.ptr();
  if (kernel != 1) {
    double* buf = scratch.want_a(static_cast<std::size_t>(K * bhw));
    im2col(x, kernel, pad, buf);
    cols = buf;
  }
  gemm(false, false, out_ch, bhw, K, 1.0, weight.value.ptr(), K, cols, bhw, 0.0, y.ptr(), bhw);
  for (std::int64_t c = 0; c < out_ch; ++c) {
    double* row = y.row(c);
    const double b = bias.value.data[static_cast<std::size_t>(c)];
    for (std::int64_t i = 0; i < bhw; ++i) row[i] += b;
  }
  cache.x = x;
}

void Conv2d::backward(const Tensor& gy, const Cache& cache, Tensor* gx, Scratch& scratch) {
  const Tensor& x = cache.x;
  const std::int64_t bhw = x.cols();
  const std::int64_t K = in_ch * kernel * kernel;

  for (std::int64_t c = 0; c < out_ch; ++c) {
    const double* row = gy.row(c);
    double s = 0.0;
    for (std::int64_t i = 0; i < bhw; ++i) s += row[i];
    bias.grad.data[static_cast<std::size_t>(c)] += s;
  }

  const double* cols = x.ptr();
  if (kernel != 1) {
    double* buf = scratch.want_a(static_cast<std::size_t>(K * bhw));
    im2col(x, kernel, pad, buf);
    cols = buf;
  }
  // gW += gy * cols^T
  gemm(false, true, out_ch, K, bhw, 1.0, gy.ptr(), bhw, cols, bhw, 1.0, weight.grad.ptr(), K);

  if (!gx) return;
  if (kernel == 1) {
    *gx = Tensor(x.shape);
    gemm(true, false, K, bhw, out_ch, 1.0, weight.value.ptr(), K, gy.ptr(), bhw, 0.0, gx->ptr(),
         bhw);
  } else {
    double* gcols = scratch.want_b(static_cast<std::size_t>(K * bhw));
    gemm(true, false, K, bhw, out_ch, 1.0, weight.value.ptr(), K, gy.ptr(), bhw, 0.0, gcols, bhw);
    *gx = Tensor(x.shape);
    col2im(gcols, kernel, pad, *gx);
  }
}

// ---------------------------------------------------------------------------
// BatchNorm2d

void BatchNorm2d::build(std::int64_t c, const std::string& name_prefix) {
  channels = c;
  gamma.name = name_prefix + ".gamma";
  gamma.init_shape({c});
  gamma.bn_affine = true;
  beta.name = name_prefix + ".beta";
  beta.init_shape({c});
  beta.bn_affine = true;
  running_mean = Tensor({c});
  running_var = Tensor({c});
}

void BatchNorm2d::init() {
  std::fill(gamma.value.data.begin(), gamma.value.data.end(), 1.0);
  beta.value.zero();
  running_mean.zero();
  std::fill(running_var.data.begin(), running_var.data.end(), 1.0);
}

void BatchNorm2d::collect(std::vector<Param*>& out) {
  out.push_back(&gamma);
  out.push_back(&beta);
}

void BatchNorm2d::forward(const Tensor& x, Tensor& y, Cache& cache, Mode mode) {
  const std::int64_t n = x.cols();
  y = Tensor(x.shape);
  cache.xhat = Tensor(x.shape);
  cache.invstd.assign(static_cast<std::size_t>(channels), 0.0);
  cache.train = (mode == Mode::Train);

  for (std::int64_t c = 0; c < channels; ++c) {
    const double* xr = x.row(c);
    double mean, var;
    if (mode == Mode::Train) {
      double s = 0.0;
      for (std::int64_t i = 0; i < n; ++i) s += xr[i];
      mean = s / double(n);
      double sq = 0.0;
      for (std::int64_t i = 0; i < n; ++i) {
        const double d = xr[i] - mean;
        sq += d * d;
      }
      var = sq / double(n);
      const double unbiased = n > 1 ? sq / double(n - 1) : var;
      auto& rm = running_mean.data[static_cast<std::size_t>(c)];
      auto& rv = running_var.data[static_cast<std::size_t>(c)];
      rm = (1.0 - momentum) * rm + momentum * mean;
      rv = (1.0 - momentum) * rv + momentum * unbiased;
    } else {
      mean = running_mean.data[static_cast<std::size_t>(c)];
      var = running_var.data[static_cast<std::size_t>(c)];
    }
    const double invstd = 1.0 / std::sqrt(var + eps);
    cache.invstd[static_cast<std::size_t>(c)] = invstd;
    const double g = gamma.value.data[static_cast<std::size_t>(c)];
    const double b = beta.value.data[static_cast<std::size_t>(c)];
    double* xh = cache.xhat.row(c);
    double* yr = y.row(c);
    for (std::int64_t i = 0; i < n; ++i) {
      xh[i] = (xr[i] - mean) * invstd;
      yr[i] = g * xh[i] + b;
    }
  }
}

void BatchNorm2d::backward(const Tensor& gy, const Cache& cache, Tensor* gx) {
  const std::int64_t n = gy.cols();
  if (gx) *gx = Tensor(gy.shape);
  for (std::int64_t c = 0; c < channels; ++c) {
    const double* gyr = gy.row(c);
    const double* xh = cache.xhat.row(c);
    const double invstd = cache.invstd[static_cast<std::size_t>(c)];
    const double g = gamma.value.data[static_cast<std::size_t>(c)];

    double sum_gy = 0.0, sum_gy_xh = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      sum_gy += gyr[i];
      sum_gy_xh += gyr[i] * xh[i];
    }
    gamma.grad.data[static_cast<std::size_t>(c)] += sum_gy_xh;
    beta.grad.data[static_cast<std::size_t>(c)] += sum_gy;

    if (!gx) continue;
    double* gxr = gx->row(c);
    if (cache.train) {
      const double inv_n = 1.0 / double(n);
      for (std::int64_t i = 0; i < n; ++i)
        gxr[i] = g * invstd * (gyr[i] - inv_n * sum_gy - xh[i] * inv_n * sum_gy_xh);
    } else {
      for (std::int64_t i = 0; i < n; ++i) gxr[i] = g * invstd * gyr[i];
    }
  }
}

// ---------------------------------------------------------------------------
// Relu

void Relu::forward(const Tensor& x, Tensor& y, Cache& cache) {
  y = Tensor(x.shape);
  cache.mask.assign(x.data.size(), 0);
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    if (x.data[i] > 0.0) {
      y.data[i] = x.data[i];
      cache.mask[i] = 1;
    }
  }
}

void Relu::backward(const Tensor& gy, const Cache& cache, Tensor* gx) {
  if (!gx) return;
  *gx = Tensor(gy.shape);
  for (std::size_t i = 0; i < gy.data.size(); ++i)
    gx->data[i] = cache.mask[i] ? gy.data[i] : 0.0;
}

// ---------------------------------------------------------------------------
// MaxPool2x2

void MaxPool2x2::forward(const Tensor& x, Tensor& y, Cache& cache) {
  const std::int64_t C = x.c(), B = x.b(), H = x.h(), W = x.w();
  if (H % 2 != 0 || W % 2 != 0)
    fail(ErrorKind::Shape, "maxpool input dims must be even, got " + shape_str(x.shape));
  const std::int64_t Ho = H / 2, Wo = W / 2;
  y = Tensor({C, B, Ho, Wo});
  cache.argmax.assign(static_cast<std::size_t>(y.numel()), 0);
  cache.in_shape = x.shape;
  std::size_t oi = 0;
  for (std::int64_t c = 0; c < C; ++c)
    for (std::int64_t b = 0; b < B; ++b)
      for (std::int64_t ho = 0; ho < Ho; ++ho)
        for (std::int64_t wo = 0; wo < Wo; ++wo, ++oi) {
          const std::int64_t base = ((c * B + b) * H + 2 * ho) * W + 2 * wo;
          std::int64_t best = base;
          double bv = x.data[static_cast<std::size_t>(base)];
          for (int dh = 0; dh < 2; ++dh)
            for (int dw = 0; dw < 2; ++dw) {
              const std::int64_t idx = base + dh * W + dw;
              const double v = x.data[static_cast<std::size_t>(idx)];
              if (v > bv) {
                bv = v;
                best = idx;
              }
            }
          y.data[oi] = bv;
          cache.argmax[oi] = best;
        }
}

void MaxPool2x2::backward(const Tensor& gy, const Cache& cache, Tensor& gx) {
  gx = Tensor(cache.in_shape);
  for (std::size_t i = 0; i < gy.data.size(); ++i)
    gx.data[static_cast<std::size_t>(cache.argmax[i])] += gy.data[i];
}

// ---------------------------------------------------------------------------
// ConvTranspose2x2

void ConvTranspose2x2::build(std::int64_t in_c, std::int64_t out_c,
                             const std::string& name_prefix) {
  in_ch = in_c;
  out_ch = out_c;
  weight.name = name_prefix + ".weight";
  weight.init_shape({in_c, out_c, 2, 2});
  bias.name = name_prefix + ".bias";
  bias.init_shape({out_c});
}

void ConvTranspose2x2::init(Rng& rng) {
  const double std = std::sqrt(2.0 / double(in_ch * 4));
  for (auto& v : weight.value.data) v = std * rng.normal();
  bias.value.zero();
}

void ConvTranspose2x2::collect(std::vector<Param*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

void ConvTranspose2x2::forward(const Tensor& x, Tensor& y, Cache& cache, Scratch& scratch) const {
  const std::int64_t B = x.b(), Hi = x.h(), Wi = x.w();
  const std::int64_t bhw = B * Hi * Wi;
  const std::int64_t K4 = out_ch * 4;
  double* tmp = scratch.want_a(static_cast<std::size_t>(K4 * bhw));
  // tmp = W^T (K4 x in_ch) * x (in_ch x bhw)
  gemm(true, false, K4, bhw, in_ch, 1.0, weight.value.ptr(), K4, x.ptr(), bhw, 0.0, tmp, bhw);

  y = Tensor({out_ch, B, 2 * Hi, 2 * Wi});
  const std::int64_t Ho = 2 * Hi, Wo = 2 * Wi;
  for (std::int64_t co = 0; co < out_ch; ++co) {
    const double bval = bias.value.data[static_cast<std::size_t>(co)];
    for (int kh = 0; kh < 2; ++kh)
      for (int kw = 0; kw < 2; ++kw) {
        const double* src = tmp + ((co * 2 + kh) * 2 + kw) * bhw;
        for (std::int64_t b = 0; b < B; ++b)
          for (std::int64_t h = 0; h < Hi; ++h) {
            const double* s = src + (b * Hi + h) * Wi;
            double* d = &y.data[((co * B + b) * Ho + 2 * h + kh) * Wo + kw];
            for (std::int64_t w = 0; w < Wi; ++w) d[2 * w] = s[w] + bval;
          }
      }
  }
  cache.x = x;
}

void ConvTranspose2x2::backward(const Tensor& gy, const Cache& cache, Tensor* gx,
                                Scratch& scratch) {
  const Tensor& x = cache.x;
  const std::int64_t B = x.b(), Hi = x.h(), Wi = x.w();
  const std::int64_t bhw = B * Hi * Wi;
  const std::int64_t K4 = out_ch * 4;
  const std::int64_t Ho = 2 * Hi, Wo = 2 * Wi;

  // gather gtmp (K4 x bhw) from gy, and bias grads
  double* gtmp = scratch.want_a(static_cast<std::size_t>(K4 * bhw));
  for (std::int64_t co = 0; co < out_ch; ++co) {
    double bsum = 0.0;
    const double* gr = gy.row(co);
    for (std::int64_t i = 0; i < gy.cols(); ++i) bsum += gr[i];
    bias.grad.data[static_cast<std::size_t>(co)] += bsum;
    for (int kh = 0; kh < 2; ++kh)
      for (int kw = 0; kw < 2; ++kw) {
        double* dst = gtmp + ((co * 2 + kh) * 2 + kw) * bhw;
        for (std::int64_t b = 0; b < B; ++b)
          for (std::int64_t h = 0; h < Hi; ++h) {
            double* d = dst + (b * Hi + h) * Wi;
            const double* s = &gy.data[((co * B + b) * Ho + 2 * h + kh) * Wo + kw];
            for (std::int64_t w = 0; w < Wi; ++w) d[w] = s[2 * w];
          }
      }
  }

  // gW += x (in_ch x bhw) * gtmp^T (bhw x K4)
  gemm(false, true, in_ch, K4, bhw, 1.0, x.ptr(), bhw, gtmp, bhw, 1.0, weight.grad.ptr(), K4);

  if (gx) {
    *gx = Tensor(x.shape);
    gemm(false, false, in_ch, bhw, K4, 1.0, weight.value.ptr(), K4, gtmp, bhw, 0.0, gx->ptr(),
         bhw);
  }
}

// ---------------------------------------------------------------------------
// Upsample2x

namespace {

// 2x bilinear taps: output o samples input at o/2 - 0.25, clamped at borders.
inline void up_taps(std::int64_t o, std::int64_t n, std::int64_t& i0, std::int64_t& i1,
                    double& w0, double& w1) {
  const double s = 0.5 * double(o) - 0.25;
  double fl = std::floor(s);
  double f = s - fl;
  i0 = static_cast<std::int64_t>(fl);
  i1 = i0 + 1;
  w0 = 1.0 - f;
  w1 = f;
  if (i0 < 0) {
    i0 = 0;
    i1 = 0;
    w0 = 1.0;
    w1 = 0.0;
  } else if (i1 > n - 1) {
    i1 = n - 1;
    i0 = n - 1;
    w0 = 1.0;
    w1 = 0.0;
  }
}

}  // namespace

void Upsample2x::forward(const Tensor& x, Tensor& y, Cache& cache) {
  const std::int64_t C = x.c(), B = x.b(), H = x.h(), W = x.w();
  y = Tensor({C, B, 2 * H, 2 * W});
  cache.in_shape = x.shape;
  for (std::int64_t c = 0; c < C; ++c)
    for (std::int64_t b = 0; b < B; ++b)
      for (std::int64_t ho = 0; ho < 2 * H; ++ho) {
        std::int64_t h0, h1;
        double wh0, wh1;
        up_taps(ho, H, h0, h1, wh0, wh1);
        const double* r0 = &x.data[((c * B + b) * H + h0) * W];
        const double* r1 = &x.data[((c * B + b) * H + h1) * W];
        double* out = &y.data[((c * B + b) * 2 * H + ho) * 2 * W];
        for (std::int64_t wo = 0; wo < 2 * W; ++wo) {
          std::int64_t w0i, w1i;
          double ww0, ww1;
          up_taps(wo, W, w0i, w1i, ww0, ww1);
          out[wo] = wh0 * (ww0 * r0[w0i] + ww1 * r0[w1i]) + wh1 * (ww0 * r1[w0i] + ww1 * r1[w1i]);
        }
      }
}

void Upsample2x::backward(const Tensor& gy, const Cache& cache, Tensor& gx) {
  gx = Tensor(cache.in_shape);
  const std::int64_t C = gx.c(), B = gx.b(), H = gx.h(), W = gx.w();
  for (std::int64_t c = 0; c < C; ++c)
    for (std::int64_t b = 0; b < B; ++b)
      for (std::int64_t ho = 0; ho < 2 * H; ++ho) {
        std::int64_t h0, h1;
        double wh0, wh1;
        up_taps(ho, H, h0, h1, wh0, wh1);
        double* r0 = &gx.data[((c * B + b) * H + h0) * W];
        double* r1 = &gx.data[((c * B + b) * H + h1) * W];
        const double* in = &gy.data[((c * B + b) * 2 * H + ho) * 2 * W];
        for (std::int64_t wo = 0; wo < 2 * W; ++wo) {
          std::int64_t w0i, w1i;
          double ww0, ww1;
          up_taps(wo, W, w0i, w1i, ww0, ww1);
          const double g = in[wo];
          r0[w0i] += wh0 * ww0 * g;
          r0[w1i] += wh0 * ww1 * g;
          r1[w0i] += wh1 * ww0 * g;
          r1[w1i] += wh1 * ww1 * g;
        }
      }
}

// ---------------------------------------------------------------------------
// concat / split

void concat_channels(const Tensor& a, const Tensor& b, Tensor& y) {
  y = Tensor({a.c() + b.c(), a.b(), a.h(), a.w()});
  std::memcpy(y.ptr(), a.ptr(), a.data.size() * sizeof(double));
  std::memcpy(y.ptr() + a.numel(), b.ptr(), b.data.size() * sizeof(double));
}

void split_channels(const Tensor& gy, std::int64_t c_a, Tensor& ga, Tensor& gb) {
  ga = Tensor({c_a, gy.b(), gy.h(), gy.w()});
  gb = Tensor({gy.c() - c_a, gy.b(), gy.h(), gy.w()});
  std::memcpy(ga.ptr(), gy.ptr(), ga.data.size() * sizeof(double));
  std::memcpy(gb.ptr(), gy.ptr() + ga.numel(), gb.data.size() * sizeof(double));
}

}  // namespace deynet::net
