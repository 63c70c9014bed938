#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "data/volume.hpp"

namespace deynet::data {

// Synthetic stand-in for a CT domain: smooth ellipsoidal organs on a textured
// background, with three controllable shift axes (additive Gaussian noise,
// smooth additive bias field, in-plane elastic deformation).
struct PhantomSpec {
  int organ_count = 3;
  double noise_sigma = 0.0;      // std of i.i.d. Gaussian noise, normalized units
  double intensity_shift = 0.0;  // peak amplitude of the low-frequency bias field
  double deform_amp = 0.0;       // peak in-plane displacement, pixels
  std::array<std::int64_t, 3> shape{6, 32, 32};  // (slices, H, W)
  std::uint64_t seed = 0;
  std::string domain_tag = "phantom";
};

// All random components of one phantom, drawn in a fixed order so that any
// single amplitude can be varied without disturbing the others.
struct PhantomFields {
  std::vector<double> clean;  // organs + background texture, before any shift
  std::vector<std::uint8_t> label;
  std::vector<double> bias;      // unit-peak smooth field
  std::vector<double> disp_y;    // unit-peak smooth fields, scaled by deform_amp
  std::vector<double> disp_x;
  std::vector<double> noise;     // unit-variance Gaussian field
};

PhantomFields make_phantom_fields(const PhantomSpec& spec);

// In-plane bilinear warp by (amp * dy, amp * dx); coordinates clamp at the
// border. Image and label of one phantom are warped with the same fields.
std::vector<double> elastic_warp(const std::vector<double>& img,
                                 const std::array<std::int64_t, 3>& dims,
                                 const std::vector<double>& dy, const std::vector<double>& dx,
                                 double amp);

Volume generate_phantom(const PhantomSpec& spec);

// JSON (de)serialization of PhantomSpec; keys match the struct fields.
PhantomSpec phantom_spec_from_json(const std::string& json_text);
std::string phantom_spec_to_json(const PhantomSpec& spec);

}  // namespace deynet::data
