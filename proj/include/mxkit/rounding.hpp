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

// Round-to-nearest-even on exact dyadic magnitudes. Every conversion in the
// library funnels through these two routines so that no result depends on
// host floating-point behaviour.

#include <boost/multiprecision/cpp_int.hpp>

#include <cassert>
#include <cstdint>

namespace mxkit {

using BigInt = boost::multiprecision::cpp_int;

/// Number of significant bits of |v|; 0 for v == 0.
inline int bit_length(const BigInt& v) {
  if (v == 0) return 0;
  return static_cast<int>(boost::multiprecision::msb(abs(v))) + 1;
}

/// True when v fits a two's-complement integer of `width` bits.
inline bool fits_signed(const BigInt& v, int width) {
  if (width <= 0) return v == 0;
  const BigInt limit = BigInt(1) << (width - 1);
  return v >= -limit && v < limit;
}

struct ShiftResult {
  BigInt value;
  bool inexact = false;
};

/// Shifts a non-negative magnitude right by `shift` bits, rounding to nearest
/// with ties to even.
inline ShiftResult rne_shift_right(const BigInt& magnitude, int shift) {
  assert(magnitude >= 0);
  if (shift <= 0) return {magnitude << -shift, false};
  BigInt q = magnitude >> shift;
  const BigInt rem = magnitude - (q << shift);
  if (rem == 0) return {q, false};
  const BigInt half = BigInt(1) << (shift - 1);
  if (rem > half || (rem == half && bit_test(q, 0))) ++q;
  return {q, true};
}

/// A binary floating-point grid with unbounded exponent range above.
/// Normal values are 1.f * 2^x with x >= min_exponent and `precision`
/// significand bits (hidden bit included); below that the grid is uniform
/// with quantum 2^(min_exponent - precision + 1).
struct BinaryGrid {
  int precision;
  int min_exponent;
};

/// magnitude = significand * 2^exponent.
struct RoundedMagnitude {
  BigInt significand;
  int exponent = 0;
  bool inexact = false;
};

/// Rounds magnitude * 2^exponent onto `grid`. The result significand is
/// below 2^precision; it is at least 2^(precision-1) unless the value is
/// subnormal, in which case exponent == min_exponent - precision + 1.
inline RoundedMagnitude round_to_grid(const BigInt& magnitude, int exponent,
                                      BinaryGrid grid) {
  assert(magnitude >= 0);
  const int subnormal_quantum = grid.min_exponent - grid.precision + 1;
  if (magnitude == 0) return {BigInt(0), subnormal_quantum, false};
  const int top = exponent + bit_length(magnitude) - 1;
  const int quantum =
      (top >= grid.min_exponent ? top : grid.min_exponent) - grid.precision + 1;
  ShiftResult s = rne_shift_right(magnitude, quantum - exponent);
  RoundedMagnitude r{std::move(s.value), quantum, s.inexact};
  if (bit_length(r.significand) > grid.precision) {
    // Rounding carried into a new binade; the significand is a power of two.
    r.significand >>= 1;
    ++r.exponent;
  }
  return r;
}

/// Rounds magnitude * 2^exponent to an integer multiple of 2^quantum.
/// Returned significand is that integer multiple.
inline RoundedMagnitude round_to_quantum(const BigInt& magnitude, int exponent,
                                         int quantum) {
  ShiftResult s = rne_shift_right(magnitude, quantum - exponent);
  return {std::move(s.value), quantum, s.inexact};
}

}  // namespace mxkit
