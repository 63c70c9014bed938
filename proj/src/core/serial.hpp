#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/tensor.hpp"

// Little-endian binary stream helpers (x86-64 host assumed).

namespace deynet::serial {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is, const char* what) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(ErrorKind::Format, std::string("truncated file while reading ") + what);
  return v;
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is, const char* what) {
  auto n = read_pod<std::uint32_t>(is, what);
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) fail(ErrorKind::Format, std::string("truncated file while reading ") + what);
  return s;
}

inline void write_tensor(std::ostream& os, const Tensor& t) {
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(t.shape.size()));
  for (auto d : t.shape) write_pod<std::int64_t>(os, d);
  os.write(reinterpret_cast<const char*>(t.data.data()),
           static_cast<std::streamsize>(t.data.size() * sizeof(double)));
}

inline Tensor read_tensor(std::istream& is, const char* what) {
  auto ndim = read_pod<std::uint32_t>(is, what);
  if (ndim > 8) fail(ErrorKind::Format, std::string("implausible tensor rank in ") + what);
  std::vector<std::int64_t> shape(ndim);
  for (auto& d : shape) d = read_pod<std::int64_t>(is, what);
  Tensor t(shape);
  is.read(reinterpret_cast<char*>(t.data.data()),
          static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  if (!is) fail(ErrorKind::Format, std::string("truncated tensor payload in ") + what);
  return t;
}

}  // namespace deynet::serial
