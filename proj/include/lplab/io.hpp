#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "field.hpp"

namespace lplab {

namespace detail {

inline std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

}  // namespace detail

// JSON header line {dim, N, B}, then little-endian float64 (re, im) pairs in grid order.
inline void write_field(const std::string& path, const SampledField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  nlohmann::ordered_json h;
  h["dim"] = f.grid().dim;
  h["N"] = f.grid().N;
  h["B"] = f.grid().B;
  out << h.dump() << '\n';
  for (const auto& v : f.samples()) {
    for (double part : {v.real(), v.imag()}) {
      std::uint64_t bits = detail::to_little(std::bit_cast<std::uint64_t>(part));
      out.write(reinterpret_cast<const char*>(&bits), 8);
    }
  }
  if (!out) fail(ErrorKind::IoError, "write failed for " + path);
}

inline SampledField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::IoError, "missing header in " + path);
  GridSpec g;
  try {
    auto h = nlohmann::json::parse(line);
    g.dim = h.at("dim").get<int>();
    g.N = h.at("N").get<std::int64_t>();
    g.B = h.at("B").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::IoError, std::string("bad header in ") + path + ": " + e.what());
  }
  g.validate();
  std::vector<cplx> v(g.total());
  for (auto& c : v) {
    double parts[2];
    for (double& p : parts) {
      std::uint64_t bits = 0;
      if (!in.read(reinterpret_cast<char*>(&bits), 8)) fail(ErrorKind::IoError, "truncated field file " + path);
      p = std::bit_cast<double>(detail::to_little(bits));
    }
    c = cplx(parts[0], parts[1]);
  }
  return SampledField(g, std::move(v));
}

}  // namespace lplab
