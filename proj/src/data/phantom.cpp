#include "data/phantom.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "core/error.hpp"
#include "core/rng.hpp"

using nlohmann::json;

namespace deynet::data {

namespace {

constexpr double kBackground = 0.18;
constexpr double kTextureAmp = 0.05;
constexpr double kEdgeWidth = 0.15;  // soft organ boundary, in normalized radius units

void check_spec(const PhantomSpec& s) {
  if (s.organ_count < 1) fail(ErrorKind::Param, "phantom organ_count must be >= 1");
  if (s.noise_sigma < 0 || s.intensity_shift < 0 || s.deform_amp < 0)
    fail(ErrorKind::Param, "phantom amplitudes must be nonnegative");
  for (auto d : s.shape)
    if (d < 16) fail(ErrorKind::Param, "phantom shape components must be >= 16");
}

// Sum of a few random low-frequency cosine modes, normalized to unit peak.
std::vector<double> smooth_field(Rng& rng, const std::array<std::int64_t, 3>& dims, int modes) {
  const std::int64_t D = dims[0], H = dims[1], W = dims[2];
  std::vector<double> f(static_cast<std::size_t>(D * H * W), 0.0);
  for (int m = 0; m < modes; ++m) {
    const double fz = 0.5 + 1.5 * rng.uniform();
    const double fy = 0.5 + 1.5 * rng.uniform();
    const double fx = 0.5 + 1.5 * rng.uniform();
    const double phase = rng.uniform() * 6.283185307179586477;
    const double amp = 0.5 + 0.5 * rng.uniform();
    std::size_t i = 0;
    for (std::int64_t z = 0; z < D; ++z)
      for (std::int64_t y = 0; y < H; ++y)
        for (std::int64_t x = 0; x < W; ++x, ++i) {
          const double zz = D > 1 ? double(z) / double(D - 1) : 0.0;
          const double yy = double(y) / double(H - 1);
          const double xx = double(x) / double(W - 1);
          f[i] += amp * std::cos(6.283185307179586477 * (fz * zz + fy * yy + fx * xx) + phase);
        }
  }
  double peak = 0.0;
  for (double v : f) peak = std::max(peak, std::abs(v));
  if (peak > 0)
    for (double& v : f) v /= peak;
  return f;
}

struct Organ {
  double cz, cy, cx;  // fractional centers
  double az, ay, ax;  // fractional semi-axes
  double intensity;
};

}  // namespace

PhantomFields make_phantom_fields(const PhantomSpec& spec) {
  check_spec(spec);
  const std::int64_t D = spec.shape[0], H = spec.shape[1], W = spec.shape[2];
  const std::size_t n = static_cast<std::size_t>(D * H * W);
  Rng rng(spec.seed);

  // Fixed draw order: organs, texture, bias, displacement, noise.
  std::vector<Organ> organs(static_cast<std::size_t>(spec.organ_count));
  for (auto& o : organs) {
    o.cz = rng.uniform(0.30, 0.70);
    o.cy = rng.uniform(0.28, 0.72);
    o.cx = rng.uniform(0.28, 0.72);
    o.az = rng.uniform(0.30, 0.55);
    o.ay = rng.uniform(0.12, 0.24);
    o.ax = rng.uniform(0.12, 0.24);
    o.intensity = rng.uniform(0.45, 0.75);
  }

  std::vector<double> texture = smooth_field(rng, spec.shape, 3);

  PhantomFields out;
  out.bias = smooth_field(rng, spec.shape, 3);
  out.disp_y = smooth_field(rng, spec.shape, 3);
  out.disp_x = smooth_field(rng, spec.shape, 3);
  out.noise.resize(n);
  for (auto& g : out.noise) g = rng.normal();

  out.clean.resize(n);
  out.label.assign(n, 0);
  std::size_t i = 0;
  for (std::int64_t z = 0; z < D; ++z)
    for (std::int64_t y = 0; y < H; ++y)
      for (std::int64_t x = 0; x < W; ++x, ++i) {
        const double zz = D > 1 ? double(z) / double(D - 1) : 0.5;
        const double yy = double(y) / double(H - 1);
        const double xx = double(x) / double(W - 1);
        double organ_val = 0.0;
        bool inside = false;
        for (const auto& o : organs) {
          const double dz = (zz - o.cz) / o.az;
          const double dy = (yy - o.cy) / o.ay;
          const double dx = (xx - o.cx) / o.ax;
          const double r = std::sqrt(dz * dz + dy * dy + dx * dx);
          double t = std::clamp((1.0 - r) / kEdgeWidth, 0.0, 1.0);
          t = t * t * (3.0 - 2.0 * t);
          organ_val = std::max(organ_val, o.intensity * t);
          // label = 0.5-crossing of the soft edge
          inside = inside || (r <= 1.0 - 0.5 * kEdgeWidth);
        }
        out.clean[i] = kBackground + kTextureAmp * texture[i] + organ_val;
        out.label[i] = inside ? 1 : 0;
      }
  return out;
}

std::vector<double> elastic_warp(const std::vector<double>& img,
                                 const std::array<std::int64_t, 3>& dims,
                                 const std::vector<double>& dy, const std::vector<double>& dx,
                                 double amp) {
  const std::int64_t D = dims[0], H = dims[1], W = dims[2];
  std::vector<double> out(img.size());
  std::size_t i = 0;
  for (std::int64_t z = 0; z < D; ++z)
    for (std::int64_t y = 0; y < H; ++y)
      for (std::int64_t x = 0; x < W; ++x, ++i) {
        const double sy = std::clamp(double(y) - amp * dy[i], 0.0, double(H - 1));
        const double sx = std::clamp(double(x) - amp * dx[i], 0.0, double(W - 1));
        const std::int64_t y0 = static_cast<std::int64_t>(sy);
        const std::int64_t x0 = static_cast<std::int64_t>(sx);
        const std::int64_t y1 = std::min(y0 + 1, H - 1);
        const std::int64_t x1 = std::min(x0 + 1, W - 1);
        const double fy = sy - double(y0);
        const double fx = sx - double(x0);
        const auto v = [&](std::int64_t yy, std::int64_t xx) {
          return img[static_cast<std::size_t>((z * H + yy) * W + xx)];
        };
        out[i] = (1 - fy) * ((1 - fx) * v(y0, x0) + fx * v(y0, x1)) +
                 fy * ((1 - fx) * v(y1, x0) + fx * v(y1, x1));
      }
  return out;
}

Volume generate_phantom(const PhantomSpec& spec) {
  PhantomFields f = make_phantom_fields(spec);
  const std::size_t n = f.clean.size();

  Volume v;
  v.dims = spec.shape;
  v.spacing = {1.0, 1.0, 1.0};
  v.domain_tag = spec.domain_tag;
  v.id = spec.domain_tag + "_" + std::to_string(spec.seed);

  if (spec.deform_amp > 0.0) {
    v.voxels = elastic_warp(f.clean, spec.shape, f.disp_y, f.disp_x, spec.deform_amp);
    std::vector<double> lab_d(f.label.begin(), f.label.end());
    lab_d = elastic_warp(lab_d, spec.shape, f.disp_y, f.disp_x, spec.deform_amp);
    std::vector<std::uint8_t> lab(n);
    for (std::size_t i = 0; i < n; ++i) lab[i] = lab_d[i] >= 0.5 ? 1 : 0;
    v.label = std::move(lab);
  } else {
    v.voxels = f.clean;
    v.label = f.label;
  }

  // Bias and noise model acquisition effects, so they apply after deformation.
  for (std::size_t i = 0; i < n; ++i)
    v.voxels[i] += spec.intensity_shift * f.bias[i] + spec.noise_sigma * f.noise[i];
  return v;
}

PhantomSpec phantom_spec_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("malformed phantom spec: ") + e.what());
  }
  PhantomSpec s;
  if (j.contains("organ_count")) s.organ_count = j["organ_count"].get<int>();
  if (j.contains("noise_sigma")) s.noise_sigma = j["noise_sigma"].get<double>();
  if (j.contains("intensity_shift")) s.intensity_shift = j["intensity_shift"].get<double>();
  if (j.contains("deform_amp")) s.deform_amp = j["deform_amp"].get<double>();
  if (j.contains("shape")) {
    if (!j["shape"].is_array() || j["shape"].size() != 3)
      fail(ErrorKind::Format, "phantom spec field 'shape' must be a 3-element array");
    for (int i = 0; i < 3; ++i) s.shape[static_cast<std::size_t>(i)] = j["shape"][i].get<std::int64_t>();
  }
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("domain_tag")) s.domain_tag = j["domain_tag"].get<std::string>();
  check_spec(s);
  return s;
}

std::string phantom_spec_to_json(const PhantomSpec& s) {
  json j;
  j["organ_count"] = s.organ_count;
  j["noise_sigma"] = s.noise_sigma;
  j["intensity_shift"] = s.intensity_shift;
  j["deform_amp"] = s.deform_amp;
  j["shape"] = {s.shape[0], s.shape[1], s.shape[2]};
  j["seed"] = s.seed;
  j["domain_tag"] = s.domain_tag;
  return j.dump(2);
}

}  // namespace deynet::data
