#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "data/volume.hpp"

namespace deynet::data {

// A batch of 2D slices ready for the network. Images are stored item-major
// (item, H, W); labels are kept per item and are non-empty exactly for items
// with labeled_flags = true.
struct SliceBatch {
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::vector<double> images;                       // n * H * W
  std::vector<std::vector<std::uint8_t>> labels;    // per item; empty if unlabeled
  std::vector<std::uint8_t> labeled_flags;
  std::vector<std::pair<std::string, std::int64_t>> source_ids;  // (volume id, slice idx)

  std::int64_t size() const { return static_cast<std::int64_t>(labeled_flags.size()); }
  double* image(std::int64_t i) { return images.data() + i * height * width; }
  const double* image(std::int64_t i) const { return images.data() + i * height * width; }
};

// One epoch of joint batches: every labeled slice appears exactly once (order
// shuffled by seed); each batch pairs them with an equal count of unlabeled
// slices sampled with replacement. A final partial batch keeps the 50/50
// composition. Pure function of (volumes, batch_size, seed).
std::vector<SliceBatch> make_joint_batches(const std::vector<Volume>& labeled,
                                           const std::vector<Volume>& unlabeled,
                                           std::int64_t batch_size, std::uint64_t seed);

// One epoch of plain batches over every slice of every volume (labels
// ignored); used for denoiser pretraining.
std::vector<SliceBatch> make_plain_batches(const std::vector<Volume>& volumes,
                                           std::int64_t batch_size, std::uint64_t seed);

std::int64_t count_slices(const std::vector<Volume>& volumes);

}  // namespace deynet::data
