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

// The Dot operation: exact element products accumulated without error in a
// fixed-point (Kulisch) register by a pairwise adder tree.
//
// Register widths follow the hardware configuration
//   b_i   = 1+E+M              | B
//   b_int = 2(1 + 2^E + (M-1)) | 2B
//   b_o   = b_int + log2(k)
// for MXFP | MXINT elements.

#include <bit>
#include <span>
#include <string>
#include <vector>

#include "mxkit/error.hpp"
#include "mxkit/exact.hpp"
#include "mxkit/formats.hpp"

namespace mxkit {

struct DotWidths {
  int input;    // b_i
  int product;  // b_int
  int output;   // b_o
};

/// ceil(log2 n) for n >= 1.
constexpr int ceil_log2(std::size_t n) {
  return n <= 1 ? 0 : static_cast<int>(std::bit_width(n - 1));
}

inline int product_width(const ElementFormat& fmt) {
  if (fmt.is_int()) return 2 * fmt.bits();
  return 2 * (1 + (1 << fmt.exponent_bits()) + (fmt.mantissa_bits() - 1));
}

/// Widths of a Dot circuit summing `terms` products (the block size k).
inline DotWidths dot_widths(const ElementFormat& fmt, std::size_t terms) {
  const int b_int = product_width(fmt);
  return {fmt.bits(), b_int, b_int + ceil_log2(terms)};
}

/// Exponent of the accumulator's bit 0: the square of the element quantum,
/// so the smallest non-zero product lands exactly on it.
inline int kulisch_lsb_exponent(const ElementFormat& fmt) { return 2 * fmt.quantum_exponent(); }

/// A two's-complement fixed-point register: value = raw * 2^lsb_exponent.
class KulischAcc {
 public:
  KulischAcc(int width, int lsb_exponent, BigInt raw = 0)
      : raw_(std::move(raw)), width_(width), lsb_exponent_(lsb_exponent) {}

  const BigInt& raw() const { return raw_; }
  int width() const { return width_; }
  int lsb_exponent() const { return lsb_exponent_; }
  bool fits() const { return fits_signed(raw_, width_); }
  ExactValue value() const { return ExactValue::dyadic(raw_, lsb_exponent_); }

  /// Two's-complement bit pattern of the register, as an unsigned integer.
  BigInt bit_pattern() const {
    return raw_ >= 0 ? raw_ : BigInt((BigInt(1) << width_) + raw_);
  }

 private:
  BigInt raw_;
  int width_;
  int lsb_exponent_;
};

/// NaN and signed-infinity flags raised by special operands.
struct SpecialFlags {
  bool nan = false;
  int inf_sign = 0;  // 0 none, +1 / -1

  bool any() const { return nan || inf_sign != 0; }

  void raise_inf(bool negative) {
    const int s = negative ? -1 : 1;
    if (inf_sign != 0 && inf_sign != s) nan = true;
    inf_sign = s;
  }

  void merge(const SpecialFlags& o) {
    nan = nan || o.nan;
    if (o.inf_sign != 0) raise_inf(o.inf_sign < 0);
  }

  /// The special value these flags stand for; assumes any().
  ExactValue special_value() const {
    return nan ? ExactValue::nan() : ExactValue::infinity(inf_sign < 0);
  }

  friend bool operator==(const SpecialFlags&, const SpecialFlags&) = default;
};

/// Pairwise adder tree over `leaves`: level by level, adjacent pairs are
/// summed and an odd trailing node is carried up unchanged. Flags `overflow`
/// when a node at level l does not fit leaf_width + l bits.
inline BigInt pairwise_tree_sum(std::vector<BigInt> level, int leaf_width, bool& overflow) {
  if (level.empty()) return 0;
  int width = leaf_width;
  for (const BigInt& v : level) overflow = overflow || !fits_signed(v, width);
  while (level.size() > 1) {
    ++width;
    std::vector<BigInt> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      next.push_back(level[i] + level[i + 1]);
      overflow = overflow || !fits_signed(next.back(), width);
    }
    if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
    level = std::move(next);
  }
  return std::move(level.front());
}

struct DotResult {
  KulischAcc acc;
  ScaleE8M0 combined_scale;
  SpecialFlags flags;
  /// Set when some adder-tree node exceeded its declared width. Never
  /// expected for in-format operands.
  bool overflow = false;

  /// (s t) * sum, or the flagged special.
  ExactValue value() const {
    if (flags.any()) return flags.special_value();
    return acc.value().scaled_by_pow2(combined_scale.exponent());
  }
};

/// Exact dot product of two equally long code sequences sharing `fmt`, with
/// shared scales s and t. Special lanes contribute zero and raise flags
/// (Inf*0 -> NaN, Inf*x -> Inf with the product's sign); a NaN scale raises
/// the NaN flag.
inline DotResult dot_codes(std::span<const Code> a, std::span<const Code> b,
                           const ElementFormat& fmt, ScaleE8M0 s, ScaleE8M0 t) {
  if (a.size() != b.size() || a.empty()) {
    throw ShapeMismatch("dot: operand lengths " + std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
  }
  const DotWidths w = dot_widths(fmt, a.size());
  const int lsb = kulisch_lsb_exponent(fmt);
  SpecialFlags flags;
  flags.nan = s.is_nan() || t.is_nan();

  std::vector<BigInt> products;
  products.reserve(a.size());
  for (std::size_t p = 0; p < a.size(); ++p) {
    const DecodedElement x = decode_fast(fmt, a[p]);
    const DecodedElement y = decode_fast(fmt, b[p]);
    if (x.is_special() || y.is_special()) {
      if (x.cls == ElementClass::NaN || y.cls == ElementClass::NaN) {
        flags.nan = true;
      } else if ((!x.is_special() && x.significand == 0) ||
                 (!y.is_special() && y.significand == 0)) {
        flags.nan = true;
      } else {
        flags.raise_inf(x.negative != y.negative);
      }
      products.emplace_back(0);
      continue;
    }
    BigInt prod = BigInt(x.significand * y.significand);
    products.push_back(prod << (x.exponent + y.exponent - lsb));
  }

  bool overflow = false;
  BigInt sum = pairwise_tree_sum(std::move(products), w.product, overflow);
  return DotResult{KulischAcc(w.output, lsb, std::move(sum)), scale_mul(s, t), flags, overflow};
}

/// Dot(A, B, s, t) = (s t) * sum_p A_p B_p over one pair of MX blocks.
inline DotResult dot(const MxBlock& a, const MxBlock& b, const BlockFormat& fmt) {
  if (static_cast<int>(a.codes.size()) != fmt.k || static_cast<int>(b.codes.size()) != fmt.k) {
    throw ShapeMismatch("dot: blocks must hold k = " + std::to_string(fmt.k) + " codes");
  }
  return dot_codes(a.codes, b.codes, fmt.element, a.scale, b.scale);
}

}  // namespace mxkit
