#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace deynet {

// Dense double tensor. Activations use the layout (C, B, H, W) with C as the
// slowest axis so that per-channel rows are contiguous and convolutions map
// onto single GEMM calls over B*H*W columns.
struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::int64_t> s) : shape(std::move(s)) {
    data.assign(static_cast<std::size_t>(numel_of(shape)), 0.0);
  }

  static std::int64_t numel_of(const std::vector<std::int64_t>& s) {
    std::int64_t n = 1;
    for (auto d : s) n *= d;
    return n;
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
  bool empty() const { return data.empty(); }

  double* ptr() { return data.data(); }
  const double* ptr() const { return data.data(); }

  void zero() { std::fill(data.begin(), data.end(), 0.0); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  // (C, B, H, W) accessors for activation maps
  std::int64_t c() const { return shape[0]; }
  std::int64_t b() const { return shape[1]; }
  std::int64_t h() const { return shape[2]; }
  std::int64_t w() const { return shape[3]; }
  std::int64_t cols() const { return shape[1] * shape[2] * shape[3]; }

  double& at(std::int64_t c, std::int64_t b, std::int64_t y, std::int64_t x) {
    return data[((c * shape[1] + b) * shape[2] + y) * shape[3] + x];
  }
  double at(std::int64_t c, std::int64_t b, std::int64_t y, std::int64_t x) const {
    return data[((c * shape[1] + b) * shape[2] + y) * shape[3] + x];
  }

  // row pointer for channel c (length cols())
  double* row(std::int64_t c) { return data.data() + c * cols(); }
  const double* row(std::int64_t c) const { return data.data() + c * cols(); }
};

inline std::string shape_str(const std::vector<std::int64_t>& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b))
    fail(ErrorKind::Shape, std::string(what) + ": shape mismatch " + shape_str(a.shape) +
                               " vs " + shape_str(b.shape));
}

// Named trainable tensor with its gradient buffer.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
  bool bn_affine = false;

  void init_shape(std::vector<std::int64_t> s) {
    value = Tensor(std::move(s));
    grad = Tensor(value.shape);
  }
};

}  // namespace deynet
