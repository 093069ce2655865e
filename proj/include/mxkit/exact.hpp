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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

#include "mxkit/rounding.hpp"

namespace mxkit {

enum class ValueClass : std::uint8_t { Finite, Infinity, NaN };

/// An extended real: a signed dyadic rational magnitude * 2^exponent, a signed
/// infinity, or NaN. Zero keeps its sign.
class ExactValue {
 public:
  ExactValue() = default;

  static ExactValue zero(bool negative = false) {
    ExactValue v;
    v.negative_ = negative;
    return v;
  }
  static ExactValue infinity(bool negative) {
    ExactValue v;
    v.class_ = ValueClass::Infinity;
    v.negative_ = negative;
    return v;
  }
  static ExactValue nan() {
    ExactValue v;
    v.class_ = ValueClass::NaN;
    return v;
  }

  /// significand * 2^exponent; the significand carries the sign.
  static ExactValue dyadic(const BigInt& significand, int exponent) {
    ExactValue v;
    v.negative_ = significand < 0;
    v.magnitude_ = v.negative_ ? BigInt(-significand) : significand;
    v.exponent_ = exponent;
    v.canonicalize();
    return v;
  }
  static ExactValue dyadic(bool negative, const BigInt& magnitude, int exponent) {
    ExactValue v;
    v.negative_ = negative;
    v.magnitude_ = magnitude;
    v.exponent_ = exponent;
    v.canonicalize();
    return v;
  }

  static ExactValue from_float(float f) {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    const bool neg = (bits >> 31) != 0;
    const int biased = static_cast<int>((bits >> 23) & 0xFF);
    const std::uint32_t frac = bits & 0x7FFFFF;
    if (biased == 0xFF) return frac != 0 ? nan() : infinity(neg);
    if (biased == 0) return dyadic(neg, BigInt(frac), -149);
    return dyadic(neg, BigInt(frac | 0x800000u), biased - 150);
  }

  static ExactValue from_double(double d) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    const bool neg = (bits >> 63) != 0;
    const int biased = static_cast<int>((bits >> 52) & 0x7FF);
    const std::uint64_t frac = bits & ((std::uint64_t{1} << 52) - 1);
    if (biased == 0x7FF) return frac != 0 ? nan() : infinity(neg);
    if (biased == 0) return dyadic(neg, BigInt(frac), -1074);
    return dyadic(neg, BigInt(frac | (std::uint64_t{1} << 52)), biased - 1075);
  }

  ValueClass value_class() const { return class_; }
  bool is_nan() const { return class_ == ValueClass::NaN; }
  bool is_inf() const { return class_ == ValueClass::Infinity; }
  bool is_finite() const { return class_ == ValueClass::Finite; }
  bool is_zero() const { return is_finite() && magnitude_ == 0; }
  bool negative() const { return negative_; }

  /// Odd (canonical) magnitude; meaningful for finite values only.
  const BigInt& magnitude() const { return magnitude_; }
  int exponent() const { return exponent_; }

  /// Signed significand paired with exponent().
  BigInt significand() const { return negative_ ? BigInt(-magnitude_) : magnitude_; }

  /// floor(log2 |v|) of a finite non-zero value.
  int floor_log2() const { return exponent_ + bit_length(magnitude_) - 1; }

  /// Multiplies a finite value by 2^shift.
  ExactValue scaled_by_pow2(int shift) const {
    ExactValue v = *this;
    if (v.is_finite() && v.magnitude_ != 0) v.exponent_ += shift;
    return v;
  }

  ExactValue negated() const {
    ExactValue v = *this;
    if (!v.is_nan()) v.negative_ = !v.negative_;
    return v;
  }

  /// Nearest binary64, for diagnostics and metrics only.
  double to_double() const {
    if (is_nan()) return std::numeric_limits<double>::quiet_NaN();
    if (is_inf()) return negative_ ? -HUGE_VAL : HUGE_VAL;
    RoundedMagnitude r = round_to_grid(magnitude_, exponent_, BinaryGrid{53, -1022});
    double d = std::ldexp(r.significand.convert_to<double>(), r.exponent);
    return negative_ ? -d : d;
  }

  /// Exact equality of values; +0 == -0, NaN != NaN.
  friend bool operator==(const ExactValue& a, const ExactValue& b) {
    if (a.is_nan() || b.is_nan()) return false;
    if (a.is_zero() && b.is_zero()) return true;
    return a.class_ == b.class_ && a.negative_ == b.negative_ &&
           a.magnitude_ == b.magnitude_ && (a.is_inf() || a.exponent_ == b.exponent_);
  }

  /// Same value and, for zeros, the same sign; NaN matches NaN.
  bool identical(const ExactValue& other) const {
    if (is_nan() || other.is_nan()) return is_nan() && other.is_nan();
    return *this == other && negative_ == other.negative_;
  }

  std::string to_string() const {
    if (is_nan()) return "nan";
    if (is_inf()) return negative_ ? "-inf" : "inf";
    return (negative_ ? "-" : "") + magnitude_.str() + "p" + std::to_string(exponent_);
  }

 private:
  void canonicalize() {
    if (magnitude_ == 0) {
      exponent_ = 0;
      return;
    }
    const auto tz = static_cast<int>(boost::multiprecision::lsb(magnitude_));
    magnitude_ >>= tz;
    exponent_ += tz;
  }

  ValueClass class_ = ValueClass::Finite;
  bool negative_ = false;
  BigInt magnitude_ = 0;
  int exponent_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const ExactValue& v) {
  return os << v.to_string();
}

/// Compares |a| and |b| for finite values: negative, zero or positive.
inline int compare_magnitude(const ExactValue& a, const ExactValue& b) {
  if (a.magnitude() == 0 || b.magnitude() == 0) {
    return (a.magnitude() != 0) - (b.magnitude() != 0);
  }
  const int la = a.floor_log2();
  const int lb = b.floor_log2();
  if (la != lb) return la < lb ? -1 : 1;
  const int e = std::min(a.exponent(), b.exponent());
  const BigInt ma = a.magnitude() << (a.exponent() - e);
  const BigInt mb = b.magnitude() << (b.exponent() - e);
  return ma < mb ? -1 : (ma > mb ? 1 : 0);
}

/// Sum of finite values, exact.
inline ExactValue exact_add(const ExactValue& a, const ExactValue& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const int e = std::min(a.exponent(), b.exponent());
  return ExactValue::dyadic((a.significand() << (a.exponent() - e)) +
                                (b.significand() << (b.exponent() - e)),
                            e);
}

}  // namespace mxkit
