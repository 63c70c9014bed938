#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "data/batches.hpp"

namespace deynet::n2v {

// Blind-spot specification for one slice: which pixels were hidden, their
// original values (the denoising targets), and the neighbor-sourced values
// that replaced them.
struct MaskPlan {
  std::vector<std::pair<std::int32_t, std::int32_t>> coords;  // (row, col), unique
  std::vector<double> originals;
  std::vector<double> replacements;
  int window_radius = 2;
  std::uint64_t seed = 0;

  std::int64_t size() const { return static_cast<std::int64_t>(coords.size()); }
};

// Selects floor(ratio*H*W) distinct pixels uniformly at random and draws each
// replacement uniformly from the clipped in-bounds window around it, center
// excluded. Replacement values are read from the original image even if the
// source pixel is itself masked. Pure function of seed.
MaskPlan plan_mask(const double* image, std::int64_t height, std::int64_t width, double ratio,
                   int window_radius, std::uint64_t seed);

// Copy of `image` with plan.coords overwritten by plan.replacements.
std::vector<double> apply_mask(const double* image, std::int64_t height, std::int64_t width,
                               const MaskPlan& plan);

// Masks every slice of the batch independently with per-slice derived seeds.
std::pair<data::SliceBatch, std::vector<MaskPlan>> mask_batch(const data::SliceBatch& batch,
                                                              double ratio, int window_radius,
                                                              std::uint64_t seed);

}  // namespace deynet::n2v
