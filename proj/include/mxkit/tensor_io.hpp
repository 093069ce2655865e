// Copyright 2026 The mxkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Binary tensor files.
//
// MXT1 (real tensor), all integers little-endian:
//   "MXT1" | u32 rank | u32 dims[rank] | binary32 data[prod(dims)], row-major
//
// MXQ1 (quantized tensor):
//   "MXQ1" | u32 rank | u32 dims[rank] | u32 axis | u8 regime | u32 block_size
//   | u32 n | format spec string (n bytes) | u8 scale method | u8 fixed scale
//   | u16 codes[prod(dims)] | u32 n_scales | u8 compact scales[n_scales]
// regime: 0 per-tensor, 1 per-channel, 2 mx; scale method: 0 maxpow2, 1 fixed.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "mxkit/error.hpp"
#include "mxkit/formats.hpp"
#include "mxkit/tensor.hpp"

namespace mxkit {

namespace io_detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                     static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  os.write(b, 4);
}

inline void put_u16(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF)};
  os.write(b, 2);
}

inline void put_u8(std::ostream& os, std::uint8_t v) { os.put(static_cast<char>(v)); }

inline void get_bytes(std::istream& is, unsigned char* out, std::size_t n) {
  is.read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) throw ParseError("unexpected end of file");
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  get_bytes(is, b, 4);
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
         (std::uint32_t{b[3]} << 24);
}

inline std::uint16_t get_u16(std::istream& is) {
  unsigned char b[2];
  get_bytes(is, b, 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline std::uint8_t get_u8(std::istream& is) {
  unsigned char b;
  get_bytes(is, &b, 1);
  return b;
}

inline void expect_magic(std::istream& is, const char* magic) {
  unsigned char b[4];
  get_bytes(is, b, 4);
  if (std::memcmp(b, magic, 4) != 0) {
    throw ParseError(std::string("bad magic: expected ") + magic);
  }
}

inline std::vector<std::size_t> get_dims(std::istream& is) {
  const std::uint32_t rank = get_u32(is);
  if (rank > 16) throw ParseError("tensor rank " + std::to_string(rank) + " too large");
  std::vector<std::size_t> dims(rank);
  std::size_t total = 1;
  for (auto& d : dims) {
    d = get_u32(is);
    total *= d;
    if (total > (std::size_t{1} << 32)) throw ParseError("tensor too large");
  }
  return dims;
}

inline void put_dims(std::ostream& os, const std::vector<std::size_t>& dims) {
  put_u32(os, static_cast<std::uint32_t>(dims.size()));
  for (std::size_t d : dims) put_u32(os, static_cast<std::uint32_t>(d));
}

}  // namespace io_detail

inline void write_tensor(std::ostream& os, const Tensor& t) {
  os.write("MXT1", 4);
  io_detail::put_dims(os, t.dims);
  for (float f : t.data) io_detail::put_u32(os, std::bit_cast<std::uint32_t>(f));
}

inline Tensor read_tensor(std::istream& is) {
  io_detail::expect_magic(is, "MXT1");
  std::vector<std::size_t> dims = io_detail::get_dims(is);
  std::vector<float> data(element_count(dims));
  for (float& f : data) f = std::bit_cast<float>(io_detail::get_u32(is));
  return Tensor(std::move(dims), std::move(data));
}

inline void write_tensor_file(const std::string& path, const Tensor& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParseError("cannot open " + path + " for writing");
  write_tensor(os, t);
}

inline Tensor read_tensor_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path);
  return read_tensor(is);
}

inline void write_quantized(std::ostream& os, const QuantizedTensor& q) {
  os.write("MXQ1", 4);
  io_detail::put_dims(os, q.dims);
  io_detail::put_u32(os, static_cast<std::uint32_t>(q.axis));
  io_detail::put_u8(os, static_cast<std::uint8_t>(q.scheme.regime));
  io_detail::put_u32(os, static_cast<std::uint32_t>(q.scheme.block_size));
  const std::string spec = q.scheme.element.spec_string();
  io_detail::put_u32(os, static_cast<std::uint32_t>(spec.size()));
  os.write(spec.data(), static_cast<std::streamsize>(spec.size()));
  io_detail::put_u8(os, static_cast<std::uint8_t>(q.scheme.scale_rule.method));
  io_detail::put_u8(os, q.scheme.scale_rule.fixed.byte);
  for (Code c : q.codes) io_detail::put_u16(os, c);
  const std::vector<ScaleE8M0> compact = compact_scales(q);
  io_detail::put_u32(os, static_cast<std::uint32_t>(compact.size()));
  for (ScaleE8M0 s : compact) io_detail::put_u8(os, s.byte);
}

inline QuantizedTensor read_quantized(std::istream& is) {
  io_detail::expect_magic(is, "MXQ1");
  QuantizedTensor q;
  q.dims = io_detail::get_dims(is);
  q.axis = io_detail::get_u32(is);
  const std::uint8_t regime = io_detail::get_u8(is);
  if (regime > 2) throw ParseError("bad regime tag");
  q.scheme.regime = static_cast<Regime>(regime);
  q.scheme.block_size = static_cast<int>(io_detail::get_u32(is));
  const std::uint32_t n = io_detail::get_u32(is);
  if (n > 64) throw ParseError("format string too long");
  std::string spec(n, '\0');
  io_detail::get_bytes(is, reinterpret_cast<unsigned char*>(spec.data()), n);
  q.scheme.element = parse_element_format(spec);
  const std::uint8_t method = io_detail::get_u8(is);
  if (method > 1) throw ParseError("bad scale method tag");
  q.scheme.scale_rule.method = static_cast<ScaleRule::Method>(method);
  q.scheme.scale_rule.fixed.byte = io_detail::get_u8(is);
  if (q.scheme.regime == Regime::MX) (void)BlockFormat(q.scheme.element, q.scheme.block_size);
  q.codes.resize(element_count(q.dims));
  for (Code& c : q.codes) c = io_detail::get_u16(is);
  std::vector<ScaleE8M0> compact(io_detail::get_u32(is));
  for (ScaleE8M0& s : compact) s.byte = io_detail::get_u8(is);
  q.scales = expand_scales(q.dims, q.axis, q.scheme, compact);
  return q;
}

}  // namespace mxkit
