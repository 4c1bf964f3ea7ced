#pragma once

// Matrix files: JSON {"rows", "cols", "data": [[re, im], ...]} in row-major order, or the
// binary form "EIGP", u32 n, then n*n little-endian (re, im) double pairs, row-major.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "eigenpath/core_linalg.hpp"
#include "eigenpath/homotopy.hpp"

namespace eigenpath::harness {

using nlohmann::json;

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ArgumentError("matrix_io: complex entries must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json vector_to_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

inline ComplexVector vector_from_json(const json& j) {
  if (!j.is_array()) throw ArgumentError("matrix_io: vector must be an array");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

inline json matrix_to_json(const ComplexMatrix& a) {
  json data = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) data.push_back(complex_to_json(a(i, j)));
  }
  return {{"rows", a.rows()}, {"cols", a.cols()}, {"data", data}};
}

inline ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    throw ArgumentError("matrix_io: expected {rows, cols, data}");
  }
  const auto rows = j.at("rows").get<std::int64_t>();
  const auto cols = j.at("cols").get<std::int64_t>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() || static_cast<std::int64_t>(data.size()) != rows * cols) {
    throw ArgumentError("matrix_io: data length does not match rows * cols");
  }
  ComplexMatrix a(rows, cols);
  for (std::int64_t i = 0; i < rows; ++i) {
    for (std::int64_t k = 0; k < cols; ++k) a(i, k) = complex_from_json(data[static_cast<std::size_t>(i * cols + k)]);
  }
  require_finite(a, "matrix_io");
  return a;
}

inline constexpr std::array<char, 4> kBinaryMagic{'E', 'I', 'G', 'P'};

namespace detail {

inline void put_le(std::string& out, std::uint64_t bits, int bytes) {
  for (int b = 0; b < bytes; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

inline std::uint64_t get_le(const std::string& in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  return v;
}

}  // namespace detail

inline std::string matrix_to_binary(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw ArgumentError("matrix_io: binary format stores square matrices");
  std::string out(kBinaryMagic.begin(), kBinaryMagic.end());
  detail::put_le(out, static_cast<std::uint32_t>(a.rows()), 4);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      detail::put_le(out, std::bit_cast<std::uint64_t>(a(i, j).real()), 8);
      detail::put_le(out, std::bit_cast<std::uint64_t>(a(i, j).imag()), 8);
    }
  }
  return out;
}

inline ComplexMatrix matrix_from_binary(const std::string& bytes) {
  if (bytes.size() < 8 || !std::equal(kBinaryMagic.begin(), kBinaryMagic.end(), bytes.begin())) {
    throw ArgumentError("matrix_io: missing EIGP header");
  }
  const auto n = static_cast<Eigen::Index>(detail::get_le(bytes, 4, 4));
  if (bytes.size() != 8 + static_cast<std::size_t>(n * n) * 16) {
    throw ArgumentError("matrix_io: binary payload size does not match n");
  }
  ComplexMatrix a(n, n);
  std::size_t pos = 8;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = std::bit_cast<double>(detail::get_le(bytes, pos, 8));
      const double im = std::bit_cast<double>(detail::get_le(bytes, pos + 8, 8));
      a(i, j) = {re, im};
      pos += 16;
    }
  }
  require_finite(a, "matrix_io");
  return a;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << content;
}

/// Reads either format, recognized by the magic bytes.
inline ComplexMatrix load_matrix(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() >= 4 && std::equal(kBinaryMagic.begin(), kBinaryMagic.end(), bytes.begin())) {
    return matrix_from_binary(bytes);
  }
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ArgumentError(path + ": " + e.what());
  }
  try {
    return matrix_from_json(j);
  } catch (const json::exception& e) {
    throw ArgumentError(path + ": " + e.what());
  }
}

/// {n, seed, steps, final_residual, per_step: [{s, ds, r, beta}]}
inline json trace_to_json(const HomotopyTrace& trace, Eigen::Index n, std::uint64_t seed, double final_residual) {
  json steps = json::array();
  for (const auto& r : trace.records) {
    steps.push_back({{"s", r.s}, {"ds", r.ds}, {"r", r.r}, {"beta", r.beta}});
  }
  return {{"n", n}, {"seed", seed}, {"steps", trace.steps}, {"final_residual", final_residual}, {"per_step", steps}};
}

}  // namespace eigenpath::harness
