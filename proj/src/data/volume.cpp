#include "data/volume.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "core/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace deynet::data {

namespace {

struct Header {
  std::array<std::int64_t, 3> dims;
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::string dtype;
  std::string id;
  std::string domain_tag;
};

std::string stem_of(const std::string& path) {
  std::string p = path;
  if (p.size() >= 5 && p.substr(p.size() - 5) == ".json") p = p.substr(0, p.size() - 5);
  return p;
}

Header read_header(const fs::path& header_path) {
  std::ifstream in(header_path);
  if (!in) fail(ErrorKind::Io, "cannot open header file " + header_path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, "malformed header " + header_path.string() + ": " + e.what());
  }

  Header h;
  if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].size() != 3)
    fail(ErrorKind::Format, "header field 'dims' missing or not a 3-element array in " +
                                header_path.string());
  for (int i = 0; i < 3; ++i) {
    if (!j["dims"][i].is_number_integer() || j["dims"][i].get<std::int64_t>() <= 0)
      fail(ErrorKind::Format, "header field 'dims' has a non-positive entry in " +
                                  header_path.string());
    h.dims[static_cast<std::size_t>(i)] = j["dims"][i].get<std::int64_t>();
  }
  if (j.contains("spacing")) {
    if (!j["spacing"].is_array() || j["spacing"].size() != 3)
      fail(ErrorKind::Format, "header field 'spacing' must be a 3-element array in " +
                                  header_path.string());
    for (int i = 0; i < 3; ++i) h.spacing[static_cast<std::size_t>(i)] = j["spacing"][i].get<double>();
  }
  if (!j.contains("dtype") || !j["dtype"].is_string())
    fail(ErrorKind::Format, "header field 'dtype' missing in " + header_path.string());
  h.dtype = j["dtype"].get<std::string>();
  if (h.dtype != "f32" && h.dtype != "i16" && h.dtype != "u8")
    fail(ErrorKind::Format, "header field 'dtype' has unknown code '" + h.dtype + "' in " +
                                header_path.string());
  if (j.contains("byte_order") && j["byte_order"].get<std::string>() != "little")
    fail(ErrorKind::Format, "header field 'byte_order' must be 'little' in " +
                                header_path.string());
  if (j.contains("id")) h.id = j["id"].get<std::string>();
  if (j.contains("domain_tag")) h.domain_tag = j["domain_tag"].get<std::string>();
  return h;
}

template <typename T, typename Out>
void read_payload_as(const fs::path& raw_path, std::int64_t n, std::vector<Out>& out) {
  std::ifstream in(raw_path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open payload file " + raw_path.string());
  std::vector<T> buf(static_cast<std::size_t>(n));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * sizeof(T)));
  if (in.gcount() != static_cast<std::streamsize>(n * sizeof(T)))
    fail(ErrorKind::Format, "payload " + raw_path.string() + " shorter than header dims imply");
  char extra;
  if (in.read(&extra, 1))
    fail(ErrorKind::Format, "payload " + raw_path.string() + " longer than header dims imply");
  out.resize(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = static_cast<Out>(buf[i]);
}

}  // namespace

Volume load_volume(const std::string& path) {
  const std::string stem = stem_of(path);
  const fs::path header_path = stem + ".json";
  const fs::path raw_path = stem + ".raw";

  Header h = read_header(header_path);
  if (h.dtype == "u8")
    fail(ErrorKind::Format, "header field 'dtype' is 'u8'; image payloads must be f32 or i16 (" +
                                header_path.string() + ")");

  Volume v;
  v.dims = h.dims;
  v.spacing = h.spacing;
  v.id = h.id.empty() ? fs::path(stem).filename().string() : h.id;
  v.domain_tag = h.domain_tag;

  const std::int64_t n = v.numel();
  if (h.dtype == "f32") {
    read_payload_as<float>(raw_path, n, v.voxels);
  } else {
    read_payload_as<std::int16_t>(raw_path, n, v.voxels);
  }

  const fs::path label_header = stem + ".label.json";
  if (fs::exists(label_header)) {
    Header lh = read_header(label_header);
    if (lh.dtype != "u8")
      fail(ErrorKind::Format, "label header field 'dtype' must be 'u8' in " +
                                  label_header.string());
    if (lh.dims != v.dims)
      fail(ErrorKind::Shape, "label dims " + shape_str({lh.dims[0], lh.dims[1], lh.dims[2]}) +
                                 " do not match image dims " +
                                 shape_str({v.dims[0], v.dims[1], v.dims[2]}) + " for " + stem);
    std::vector<std::uint8_t> lab;
    read_payload_as<std::uint8_t>(fs::path(stem + ".label.raw"), n, lab);
    for (auto b : lab)
      if (b > 1)
        fail(ErrorKind::Format, "label payload for " + stem + " contains value " +
                                    std::to_string(int(b)) + " outside {0,1}");
    v.label = std::move(lab);
  }
  return v;
}

void save_volume(const Volume& v, const std::string& path, const std::string& dtype) {
  if (dtype != "f32" && dtype != "i16")
    fail(ErrorKind::Param, "save_volume dtype must be f32 or i16, got '" + dtype + "'");
  const std::string stem = stem_of(path);
  const auto write_header = [&](const fs::path& p, const std::string& dt) {
    json j;
    j["dims"] = {v.dims[0], v.dims[1], v.dims[2]};
    j["spacing"] = {v.spacing[0], v.spacing[1], v.spacing[2]};
    j["dtype"] = dt;
    j["byte_order"] = "little";
    j["id"] = v.id;
    j["domain_tag"] = v.domain_tag;
    std::ofstream out(p);
    if (!out) fail(ErrorKind::Io, "cannot write header " + p.string());
    out << j.dump(2) << "\n";
  };

  write_header(stem + ".json", dtype);
  {
    std::ofstream out(stem + ".raw", std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write payload " + stem + ".raw");
    if (dtype == "f32") {
      std::vector<float> buf(v.voxels.begin(), v.voxels.end());
      out.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
    } else {
      std::vector<std::int16_t> buf(v.voxels.size());
      for (std::size_t i = 0; i < buf.size(); ++i) {
        double x = std::clamp(v.voxels[i], -32768.0, 32767.0);
        buf[i] = static_cast<std::int16_t>(std::lround(x));
      }
      out.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(std::int16_t)));
    }
  }

  if (v.label) {
    write_header(stem + ".label.json", "u8");
    std::ofstream out(stem + ".label.raw", std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write label payload " + stem + ".label.raw");
    out.write(reinterpret_cast<const char*>(v.label->data()),
              static_cast<std::streamsize>(v.label->size()));
  }
}

Volume preprocess_ct(const Volume& v, double window_low, double window_high) {
  if (!(window_low < window_high))
    fail(ErrorKind::Param, "preprocess_ct window low must be below high");

  Volume out = v;
  const std::int64_t ss = v.slice_size();
  for (std::int64_t z = 0; z < v.slices(); ++z) {
    double* s = out.slice(z);
    double lo = window_high, hi = window_low;
    for (std::int64_t i = 0; i < ss; ++i) {
      s[i] = std::clamp(s[i], window_low, window_high);
      lo = std::min(lo, s[i]);
      hi = std::max(hi, s[i]);
    }
    const double range = hi - lo;
    if (range > 0.0) {
      for (std::int64_t i = 0; i < ss; ++i) s[i] = (s[i] - lo) / range;
    } else {
      for (std::int64_t i = 0; i < ss; ++i) s[i] = 0.0;
    }
  }
  return out;
}

}  // namespace deynet::data
