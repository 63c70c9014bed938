#include "n2v/mask.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace deynet::n2v {

MaskPlan plan_mask(const double* image, std::int64_t height, std::int64_t width, double ratio,
                   int window_radius, std::uint64_t seed) {
  if (height <= 0 || width <= 0) fail(ErrorKind::Param, "plan_mask: image must be non-empty");
  if (ratio < 0.0 || ratio > 1.0) fail(ErrorKind::Param, "plan_mask: ratio must be in [0, 1]");
  if (window_radius <= 0) fail(ErrorKind::Param, "plan_mask: window_radius must be >= 1");

  const std::int64_t npix = height * width;
  const std::int64_t count = static_cast<std::int64_t>(std::floor(ratio * double(npix)));

  MaskPlan plan;
  plan.window_radius = window_radius;
  plan.seed = seed;
  if (count == 0) return plan;

  Rng rng(seed);

  // Partial Fisher-Yates: uniform sample of `count` pixels without replacement.
  std::vector<std::int32_t> idx(static_cast<std::size_t>(npix));
  for (std::int64_t i = 0; i < npix; ++i) idx[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i);
  plan.coords.reserve(static_cast<std::size_t>(count));
  plan.originals.reserve(static_cast<std::size_t>(count));
  plan.replacements.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    const std::uint64_t j = k + rng.below(static_cast<std::uint64_t>(npix - k));
    std::swap(idx[static_cast<std::size_t>(k)], idx[j]);
    const std::int32_t flat = idx[static_cast<std::size_t>(k)];
    const std::int32_t r = flat / static_cast<std::int32_t>(width);
    const std::int32_t c = flat % static_cast<std::int32_t>(width);
    plan.coords.emplace_back(r, c);
    plan.originals.push_back(image[flat]);

    const std::int64_t r0 = std::max<std::int64_t>(0, r - window_radius);
    const std::int64_t r1 = std::min<std::int64_t>(height - 1, r + window_radius);
    const std::int64_t c0 = std::max<std::int64_t>(0, c - window_radius);
    const std::int64_t c1 = std::min<std::int64_t>(width - 1, c + window_radius);
    const std::int64_t candidates = (r1 - r0 + 1) * (c1 - c0 + 1) - 1;  // center excluded
    std::int64_t pick = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(candidates)));
    const std::int64_t center = (r - r0) * (c1 - c0 + 1) + (c - c0);
    if (pick >= center) ++pick;  // skip the center cell
    const std::int64_t pr = r0 + pick / (c1 - c0 + 1);
    const std::int64_t pc = c0 + pick % (c1 - c0 + 1);
    plan.replacements.push_back(image[pr * width + pc]);
  }
  return plan;
}

std::vector<double> apply_mask(const double* image, std::int64_t height, std::int64_t width,
                               const MaskPlan& plan) {
  std::vector<double> out(image, image + height * width);
  for (std::size_t i = 0; i < plan.coords.size(); ++i) {
    const auto [r, c] = plan.coords[i];
    if (r < 0 || r >= height || c < 0 || c >= width)
      fail(ErrorKind::Consistency, "apply_mask: coordinate (" + std::to_string(r) + ", " +
                                       std::to_string(c) + ") outside image bounds");
    out[static_cast<std::size_t>(r) * width + c] = plan.replacements[i];
  }
  return out;
}

std::pair<data::SliceBatch, std::vector<MaskPlan>> mask_batch(const data::SliceBatch& batch,
                                                              double ratio, int window_radius,
                                                              std::uint64_t seed) {
  data::SliceBatch masked = batch;
  std::vector<MaskPlan> plans;
  plans.reserve(static_cast<std::size_t>(batch.size()));
  for (std::int64_t i = 0; i < batch.size(); ++i) {
    MaskPlan p = plan_mask(batch.image(i), batch.height, batch.width, ratio, window_radius,
                           mix_seed(seed, static_cast<std::uint64_t>(i)));
    auto m = apply_mask(batch.image(i), batch.height, batch.width, p);
    std::copy(m.begin(), m.end(), masked.image(i));
    plans.push_back(std::move(p));
  }
  return {std::move(masked), std::move(plans)};
}

}  // namespace deynet::n2v
