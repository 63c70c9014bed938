#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace deynet::data {

// A 3D scalar image (stack of 2D slices) with spacing metadata and an
// optional per-voxel binary label mask. Immutable after load by convention;
// preprocessing returns a new Volume.
struct Volume {
  std::string id;
  std::string domain_tag;
  std::array<std::int64_t, 3> dims{0, 0, 0};  // (slices, H, W)
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::vector<double> voxels;                  // slice-major
  std::optional<std::vector<std::uint8_t>> label;

  std::int64_t slices() const { return dims[0]; }
  std::int64_t height() const { return dims[1]; }
  std::int64_t width() const { return dims[2]; }
  std::int64_t slice_size() const { return dims[1] * dims[2]; }
  std::int64_t numel() const { return dims[0] * dims[1] * dims[2]; }

  const double* slice(std::int64_t z) const { return voxels.data() + z * slice_size(); }
  double* slice(std::int64_t z) { return voxels.data() + z * slice_size(); }
  const std::uint8_t* label_slice(std::int64_t z) const {
    return label->data() + z * slice_size();
  }
};

// Container format: a JSON text header (<stem>.json) with keys
//   dims [D,H,W], spacing [mm,mm,mm], dtype in {f32, i16}, byte_order
// plus a raw little-endian payload (<stem>.raw) in slice-major order.
// Labels live in sibling files <stem>.label.json / <stem>.label.raw with
// dtype u8. `path` may be the header path or the bare stem.
Volume load_volume(const std::string& path);

// dtype: "f32" or "i16" for the image payload; labels always saved as u8.
void save_volume(const Volume& v, const std::string& path, const std::string& dtype = "f32");

// Slice-wise CT preprocessing: clip to [low, high], then min-subtract and
// range-divide using each slice's post-clip extrema. Constant slices map to
// all zeros. Labels pass through untouched.
Volume preprocess_ct(const Volume& v, double window_low = -200.0, double window_high = 400.0);

}  // namespace deynet::data
