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

// DotGeneral: Dot outputs of successive blocks combined by normalising
// adders. A normalising adder behaves like a floating-point adder whose
// significand is a signed `mantissa_width`-bit integer: operands are aligned
// into a working register extended by guard, round and sticky bits, added,
// renormalised and rounded to nearest even.

#include <span>
#include <string>
#include <vector>

#include "mxkit/dot.hpp"
#include "mxkit/error.hpp"
#include "mxkit/exact.hpp"
#include "mxkit/formats.hpp"
#include "mxkit/rounding.hpp"

namespace mxkit {

struct NormAddConfig {
  /// Bits of the signed mantissa carried between adder stages.
  int mantissa_width = 32;
};

/// value = mantissa * 2^exponent. Normalised: mantissa == 0, or its
/// magnitude lies in [2^(w-2), 2^(w-1)) for the configured width w.
struct NormOperand {
  BigInt mantissa = 0;
  int exponent = 0;

  ExactValue value() const { return ExactValue::dyadic(mantissa, exponent); }

  friend bool operator==(const NormOperand&, const NormOperand&) = default;
};

/// Default adder width: the Dot output width b_o of the block format.
inline NormAddConfig default_norm_add_config(const BlockFormat& fmt) {
  return NormAddConfig{dot_widths(fmt.element, static_cast<std::size_t>(fmt.k)).output};
}

namespace detail {

inline void check_width(const NormAddConfig& cfg) {
  if (cfg.mantissa_width < 2) {
    throw InvalidFormat("normalising adder mantissa width must be at least 2");
  }
}

}  // namespace detail

/// Brings significand * 2^exponent into normalised form at the configured
/// width, rounding to nearest even when it has too many bits.
inline NormOperand normalize_operand(const BigInt& significand, int exponent,
                                     const NormAddConfig& cfg) {
  detail::check_width(cfg);
  if (significand == 0) return {};
  const bool neg = significand < 0;
  const BigInt mag = neg ? BigInt(-significand) : significand;
  const int target = cfg.mantissa_width - 1;  // magnitude bits
  const int shift = bit_length(mag) - target;
  ShiftResult s = rne_shift_right(mag, shift);
  int exp = exponent + shift;
  if (bit_length(s.value) > target) {
    s.value >>= 1;
    ++exp;
  }
  return {neg ? BigInt(-s.value) : s.value, exp};
}

inline NormOperand normalize_operand(const ExactValue& v, const NormAddConfig& cfg) {
  if (!v.is_finite()) throw InvalidFormat("normalize_operand: non-finite value");
  return normalize_operand(v.significand(), v.exponent(), cfg);
}

/// x + y through one normalising adder.
///
/// The smaller operand is shifted right into a register three bits wider
/// than the mantissa; bits shifted past the last position are ORed into it
/// (sticky). The sum is renormalised and rounded to nearest even. The result
/// is exact whenever nothing is shifted past the sticky position.
inline NormOperand norm_add(const NormOperand& x_in, const NormOperand& y_in,
                            const NormAddConfig& cfg) {
  constexpr int kGrs = 3;
  const NormOperand x = normalize_operand(x_in.mantissa, x_in.exponent, cfg);
  const NormOperand y = normalize_operand(y_in.mantissa, y_in.exponent, cfg);
  if (x.mantissa == 0) return y;
  if (y.mantissa == 0) return x;

  const NormOperand& big = x.exponent >= y.exponent ? x : y;
  const NormOperand& small = x.exponent >= y.exponent ? y : x;
  const bool big_neg = big.mantissa < 0;
  const bool small_neg = small.mantissa < 0;
  const int target = cfg.mantissa_width - 1;

  const BigInt big_mag = (big_neg ? BigInt(-big.mantissa) : big.mantissa) << kGrs;
  BigInt small_mag = (small_neg ? BigInt(-small.mantissa) : small.mantissa) << kGrs;
  const int d = big.exponent - small.exponent;
  if (d > 0) {
    const int limit = bit_length(small_mag);
    if (d >= limit) {
      small_mag = 1;  // everything lands in the sticky bit
    } else {
      const bool sticky = (small_mag & ((BigInt(1) << d) - 1)) != 0;
      small_mag >>= d;
      if (sticky) small_mag |= 1;
    }
  }

  // The working register's bit 0 has weight 2^(big.exponent - kGrs).
  BigInt sum;
  bool neg;
  if (big_neg == small_neg) {
    sum = big_mag + small_mag;
    neg = big_neg;
  } else if (big_mag >= small_mag) {
    sum = big_mag - small_mag;
    neg = big_neg;
  } else {
    sum = small_mag - big_mag;
    neg = small_neg;
  }
  if (sum == 0) return {};

  int exp = big.exponent - kGrs;
  const int want = target + kGrs;
  int len = bit_length(sum);
  if (len > want) {
    const int sh = len - want;
    const bool sticky = (sum & ((BigInt(1) << sh) - 1)) != 0;
    sum >>= sh;
    if (sticky) sum |= 1;
    exp += sh;
  } else if (len < want) {
    sum <<= want - len;
    exp -= want - len;
  }

  // Round off the guard, round and sticky bits.
  BigInt q = sum >> kGrs;
  const unsigned grs = static_cast<unsigned>(sum & 7);
  exp += kGrs;
  if ((grs & 4u) != 0 && ((grs & 3u) != 0 || bit_test(q, 0))) ++q;
  if (bit_length(q) > target) {
    q >>= 1;
    ++exp;
  }
  return {neg ? BigInt(-q) : q, exp};
}

/// Result of a normalising reduction: the rounded sum and the combined
/// special flags. value() is NaN/Inf when a flag is raised.
struct DotGeneralResult {
  NormOperand sum;
  SpecialFlags flags;
  bool overflow = false;

  ExactValue value() const {
    if (flags.any()) return flags.special_value();
    return sum.value();
  }
};

/// Converts one Dot output into an adder operand: the combined scale is
/// applied by exponent addition only.
inline NormOperand dot_to_operand(const DotResult& r, const NormAddConfig& cfg) {
  if (r.flags.any()) return {};
  return normalize_operand(r.acc.raw(), r.acc.lsb_exponent() + r.combined_scale.exponent(), cfg);
}

/// Pinned reduction order: a pairwise tree that sums adjacent operands level
/// by level (0+1, 2+3, ...), carrying an odd trailing operand up unchanged.
inline NormOperand norm_add_tree(std::vector<NormOperand> level, const NormAddConfig& cfg) {
  if (level.empty()) return {};
  if (level.size() == 1) return normalize_operand(level[0].mantissa, level[0].exponent, cfg);
  while (level.size() > 1) {
    std::vector<NormOperand> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      next.push_back(norm_add(level[i], level[i + 1], cfg));
    }
    if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
    level = std::move(next);
  }
  return std::move(level.front());
}

/// Reduces Dot outputs with normalising adders in the pinned tree order.
inline DotGeneralResult reduce_dots(std::span<const DotResult> dots, const NormAddConfig& cfg) {
  detail::check_width(cfg);
  DotGeneralResult out;
  std::vector<NormOperand> operands;
  operands.reserve(dots.size());
  for (const DotResult& r : dots) {
    out.flags.merge(r.flags);
    out.overflow = out.overflow || r.overflow;
    operands.push_back(dot_to_operand(r, cfg));
  }
  if (!out.flags.any()) out.sum = norm_add_tree(std::move(operands), cfg);
  return out;
}

/// DotGeneral(X, Y, S, T) = sum_c Dot(X_c, Y_c, S_c, T_c) over C block pairs.
inline DotGeneralResult dot_general(std::span<const MxBlock> x, std::span<const MxBlock> y,
                                    const BlockFormat& fmt, const NormAddConfig& cfg) {
  if (x.size() != y.size() || x.empty()) {
    throw ShapeMismatch("dot_general: " + std::to_string(x.size()) + " vs " +
                        std::to_string(y.size()) + " blocks");
  }
  std::vector<DotResult> dots;
  dots.reserve(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) dots.push_back(dot(x[c], y[c], fmt));
  return reduce_dots(dots, cfg);
}

inline DotGeneralResult dot_general(std::span<const MxBlock> x, std::span<const MxBlock> y,
                                    const BlockFormat& fmt) {
  return dot_general(x, y, fmt, default_norm_add_config(fmt));
}

}  // namespace mxkit
