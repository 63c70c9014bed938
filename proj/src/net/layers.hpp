#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace deynet::net {

enum class Mode { Train, Eval };

// Shared scratch buffers for im2col/GEMM staging, owned by the caller so that
// forward passes over a const model can run concurrently with private
// workspaces.
struct Scratch {
  std::vector<double> a;
  std::vector<double> b;

  double* want_a(std::size_t n) {
    if (a.size() < n) a.resize(n);
    return a.data();
  }
  double* want_b(std::size_t n) {
    if (b.size() < n) b.resize(n);
    return b.data();
  }
};

// 2D convolution, stride 1, square kernel, zero padding. Activations are
// laid out (C, B, H, W) so the whole batch is one GEMM.
struct Conv2d {
  std::int64_t in_ch = 0, out_ch = 0;
  int kernel = 3, pad = 1;
  Param weight;  // (out_ch, in_ch, k, k)
  Param bias;    // (out_ch)

  struct Cache {
    Tensor x;
  };

  void build(std::int64_t in_c, std::int64_t out_c, int k, const std::string& name_prefix);
  void init(Rng& rng);
  void collect(std::vector<Param*>& out);

  void forward(const Tensor& x, Tensor& y, Cache& cache, Scratch& scratch) const;
  // Accumulates parameter gradients; overwrites gx (pass nullptr to skip).
  void backward(const Tensor& gy, const Cache& cache, Tensor* gx, Scratch& scratch);
};

// Batch normalization over (B, H, W) per channel.
struct BatchNorm2d {
  std::int64_t channels = 0;
  double momentum = 0.1;
  double eps = 1e-5;
  Param gamma, beta;
  Tensor running_mean, running_var;

  struct Cache {
    Tensor xhat;
    std::vector<double> invstd;
    bool train = false;
  };

  void build(std::int64_t c, const std::string& name_prefix);
  void init();
  void collect(std::vector<Param*>& out);

  // Train mode uses batch statistics and updates the running buffers; eval
  // mode normalizes with the stored statistics and leaves them unchanged.
  void forward(const Tensor& x, Tensor& y, Cache& cache, Mode mode);
  void backward(const Tensor& gy, const Cache& cache, Tensor* gx);
};

struct Relu {
  struct Cache {
    std::vector<std::uint8_t> mask;
  };
  static void forward(const Tensor& x, Tensor& y, Cache& cache);
  static void backward(const Tensor& gy, const Cache& cache, Tensor* gx);
};

// 2x2 max pooling, stride 2. Ties resolve to the first element scanned.
struct MaxPool2x2 {
  struct Cache {
    std::vector<std::int64_t> argmax;  // flat index into the input tensor
    std::vector<std::int64_t> in_shape;
  };
  static void forward(const Tensor& x, Tensor& y, Cache& cache);
  static void backward(const Tensor& gy, const Cache& cache, Tensor& gx);
};

// 2x2 transposed convolution, stride 2 (upsampling). Kernel positions do not
// overlap, so forward is a GEMM plus a scatter.
struct ConvTranspose2x2 {
  std::int64_t in_ch = 0, out_ch = 0;
  Param weight;  // (in_ch, out_ch, 2, 2)
  Param bias;    // (out_ch)

  struct Cache {
    Tensor x;
  };

  void build(std::int64_t in_c, std::int64_t out_c, const std::string& name_prefix);
  void init(Rng& rng);
  void collect(std::vector<Param*>& out);

  void forward(const Tensor& x, Tensor& y, Cache& cache, Scratch& scratch) const;
  void backward(const Tensor& gy, const Cache& cache, Tensor* gx, Scratch& scratch);
};

// Parameter-free 2x bilinear upsampling (border-replicating sample points).
struct Upsample2x {
  struct Cache {
    std::vector<std::int64_t> in_shape;
  };
  static void forward(const Tensor& x, Tensor& y, Cache& cache);
  static void backward(const Tensor& gy, const Cache& cache, Tensor& gx);
};

// Channel concatenation: y = [a; b] along C.
void concat_channels(const Tensor& a, const Tensor& b, Tensor& y);
void split_channels(const Tensor& gy, std::int64_t c_a, Tensor& ga, Tensor& gb);

}  // namespace deynet::net
