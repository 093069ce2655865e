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

// Wide floating-point endpoints of MX conversions: IEEE-754 binary32 and
// bfloat16. Both directions go through exact dyadic values; rounding is RNE.

#include <bit>
#include <cstdint>

#include "mxkit/exact.hpp"
#include "mxkit/rounding.hpp"

namespace mxkit {

/// bfloat16: binary32 with the low 16 mantissa bits dropped.
struct BFloat16 {
  std::uint16_t bits = 0;

  float to_float() const {
    return std::bit_cast<float>(static_cast<std::uint32_t>(bits) << 16);
  }

  friend bool operator==(BFloat16, BFloat16) = default;
};

namespace detail {

/// Rounds an exact value into an IEEE interchange layout with an 8-bit
/// exponent and `mantissa_bits` fraction bits; returns the raw bit pattern.
inline std::uint32_t round_to_ieee8(const ExactValue& v, int mantissa_bits) {
  const std::uint32_t sign = v.negative() ? 1u << (8 + mantissa_bits) : 0u;
  const std::uint32_t exp_mask = 0xFFu << mantissa_bits;
  if (v.is_nan()) return exp_mask | (1u << (mantissa_bits - 1));
  if (v.is_inf()) return sign | exp_mask;
  const RoundedMagnitude r =
      round_to_grid(v.magnitude(), v.exponent(), BinaryGrid{mantissa_bits + 1, -126});
  const auto sig = r.significand.convert_to<std::uint32_t>();
  if (sig < (1u << mantissa_bits)) return sign | sig;
  const int biased = r.exponent + mantissa_bits + 127;
  if (biased >= 0xFF) return sign | exp_mask;
  return sign | (static_cast<std::uint32_t>(biased) << mantissa_bits) |
         (sig - (1u << mantissa_bits));
}

}  // namespace detail

inline float to_binary32(const ExactValue& v) {
  return std::bit_cast<float>(detail::round_to_ieee8(v, 23));
}

inline BFloat16 to_bfloat16(const ExactValue& v) {
  return BFloat16{static_cast<std::uint16_t>(detail::round_to_ieee8(v, 7))};
}

inline BFloat16 to_bfloat16(float f) { return to_bfloat16(ExactValue::from_float(f)); }

inline ExactValue from_bfloat16(BFloat16 b) { return ExactValue::from_float(b.to_float()); }

}  // namespace mxkit
