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

// Conversion between wide values (binary32, bfloat16, exact dyadics) and MX
// blocks.

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mxkit/error.hpp"
#include "mxkit/exact.hpp"
#include "mxkit/formats.hpp"
#include "mxkit/rounding.hpp"
#include "mxkit/scale.hpp"
#include "mxkit/wide.hpp"

namespace mxkit {

/// Rounds an already-scaled value into the element format with RNE.
///
/// Overflow and specials follow the format's policy:
///   NaN in                     -> NaN code
///   Inf in, inf-nan            -> Inf (ofl) or max finite (sat)
///   Inf in, no Inf encoding    -> treated as NaN
///   finite overflow, ofl       -> Inf (inf-nan), NaN (nan-only), max finite (none)
///   finite overflow, sat       -> max finite
/// Returns nullopt when a NaN is required but the format has no NaN code; the
/// caller then marks the whole block NaN through its scale.
inline std::optional<Code> convert_element(const ElementFormat& fmt, const ExactValue& scaled) {
  const bool neg = scaled.negative();
  if (scaled.is_nan() || (scaled.is_inf() && !fmt.has_inf())) {
    if (!fmt.has_nan()) return std::nullopt;
    return nan_code(fmt);
  }
  if (scaled.is_inf()) {
    return fmt.mode() == OverflowMode::Overflow ? inf_code(fmt, neg) : max_finite_code(fmt, neg);
  }

  if (fmt.is_int()) {
    const RoundedMagnitude r =
        round_to_quantum(scaled.magnitude(), scaled.exponent(), fmt.quantum_exponent());
    const BigInt limit = BigInt(1) << (fmt.bits() - 1);
    if (r.significand > limit || (!neg && r.significand == limit)) {
      return max_finite_code(fmt, neg);
    }
    const auto mag = r.significand.convert_to<std::int64_t>();
    const std::int64_t raw = neg ? -mag : mag;
    return static_cast<Code>(raw & ((std::int64_t{1} << fmt.bits()) - 1));
  }

  const RoundedMagnitude r =
      round_to_grid(scaled.magnitude(), scaled.exponent(), detail::fp_grid(fmt));
  const ExactValue rounded = ExactValue::dyadic(false, r.significand, r.exponent);
  if (compare_magnitude(rounded, max_finite(fmt)) > 0) {
    if (fmt.mode() == OverflowMode::Saturating) return max_finite_code(fmt, neg);
    switch (fmt.specials().kind) {
      case SpecialKind::InfNaN:
        return inf_code(fmt, neg);
      case SpecialKind::NaNOnly:
        return nan_code(fmt);
      case SpecialKind::None:
        return max_finite_code(fmt, neg);
    }
  }
  return detail::pack_fp(fmt, neg, r);
}

struct QuantizedGroup {
  ScaleE8M0 scale;
  std::vector<Code> codes;
};

/// Quantizes any number of values sharing one scale. Lanes whose NaN cannot
/// be encoded turn the scale into NaN; every code of a NaN group is 0.
inline QuantizedGroup quantize_values(std::span<const ExactValue> values,
                                      const ElementFormat& fmt, ScaleRule rule) {
  QuantizedGroup out;
  out.scale = rule.method == ScaleRule::Method::Fixed ? rule.fixed : compute_scale(values, fmt);
  out.codes.assign(values.size(), Code{0});
  if (out.scale.is_nan()) return out;
  const int shift = -out.scale.exponent();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::optional<Code> c = convert_element(fmt, values[i].scaled_by_pow2(shift));
    if (!c) {
      out.scale = ScaleE8M0::nan();
    } else {
      out.codes[i] = *c;
    }
  }
  if (out.scale.is_nan()) std::fill(out.codes.begin(), out.codes.end(), Code{0});
  return out;
}

inline MxBlock quantize_block(std::span<const ExactValue> values, const BlockFormat& fmt,
                              ScaleRule rule) {
  if (static_cast<int>(values.size()) != fmt.k) {
    throw ShapeMismatch("quantize_block: got " + std::to_string(values.size()) +
                        " values for block size " + std::to_string(fmt.k));
  }
  QuantizedGroup g = quantize_values(values, fmt.element, rule);
  return MxBlock{g.scale, std::move(g.codes)};
}

inline MxBlock quantize_block(std::span<const float> values, const BlockFormat& fmt,
                              ScaleRule rule) {
  std::vector<ExactValue> exact;
  exact.reserve(values.size());
  for (float f : values) exact.push_back(ExactValue::from_float(f));
  return quantize_block(std::span<const ExactValue>(exact), fmt, rule);
}

inline MxBlock quantize_block(std::span<const BFloat16> values, const BlockFormat& fmt,
                              ScaleRule rule) {
  std::vector<ExactValue> exact;
  exact.reserve(values.size());
  for (BFloat16 b : values) exact.push_back(from_bfloat16(b));
  return quantize_block(std::span<const ExactValue>(exact), fmt, rule);
}

/// Exact scale * element per lane; a NaN scale makes every lane NaN.
inline ExactValue dequantize_element(const ElementFormat& fmt, ScaleE8M0 scale, Code code) {
  if (scale.is_nan()) return ExactValue::nan();
  return decode_element(fmt, code).scaled_by_pow2(scale.exponent());
}

inline std::vector<ExactValue> dequantize_block_exact(const MxBlock& block,
                                                      const BlockFormat& fmt) {
  std::vector<ExactValue> out;
  out.reserve(block.codes.size());
  for (Code c : block.codes) out.push_back(dequantize_element(fmt.element, block.scale, c));
  return out;
}

inline std::vector<float> dequantize_block(const MxBlock& block, const BlockFormat& fmt) {
  std::vector<float> out;
  out.reserve(block.codes.size());
  for (Code c : block.codes) out.push_back(to_binary32(dequantize_element(fmt.element, block.scale, c)));
  return out;
}

inline std::vector<BFloat16> dequantize_block_bf16(const MxBlock& block, const BlockFormat& fmt) {
  std::vector<BFloat16> out;
  out.reserve(block.codes.size());
  for (Code c : block.codes) out.push_back(to_bfloat16(dequantize_element(fmt.element, block.scale, c)));
  return out;
}

}  // namespace mxkit
