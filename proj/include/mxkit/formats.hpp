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

// Element and scale formats of MX blocks and their bit-level encodings.
//
// Floating-point elements EeMm use sign | exponent | mantissa with bias
// 2^(e-1)-1 and subnormals. Integer elements INTb are two's complement with
// an implicit 2^-(b-2) factor (one sign bit, one integer bit, b-2 fraction
// bits), so the largest representable power of two is 1.0.
//
// Special-value policies follow the OCP FP8 encodings:
//   none      every code is finite
//   inf-nan   top exponent reserved, mantissa 0 = Inf, otherwise NaN (E5M2)
//   nan-only  only S.1..1.1..1 is NaN (E4M3)

#include <bit>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mxkit/error.hpp"
#include "mxkit/exact.hpp"
#include "mxkit/rounding.hpp"

namespace mxkit {

/// Raw element bit pattern, right-aligned.
using Code = std::uint16_t;

enum class FormatKind : std::uint8_t { FloatingPoint, Integer };
enum class SpecialKind : std::uint8_t { None, InfNaN, NaNOnly };
enum class OverflowMode : std::uint8_t { Overflow, Saturating };

struct SpecialPolicy {
  SpecialKind kind = SpecialKind::None;
  OverflowMode mode = OverflowMode::Overflow;

  friend bool operator==(const SpecialPolicy&, const SpecialPolicy&) = default;
};

class ElementFormat {
 public:
  static constexpr int kMinExponentBits = 2;
  static constexpr int kMaxExponentBits = 6;
  static constexpr int kMinMantissaBits = 1;
  static constexpr int kMaxMantissaBits = 5;
  static constexpr int kMinIntBits = 2;
  static constexpr int kMaxIntBits = 8;

  static ElementFormat floating_point(int exponent_bits, int mantissa_bits,
                                      SpecialPolicy specials = {}) {
    if (exponent_bits < kMinExponentBits || exponent_bits > kMaxExponentBits ||
        mantissa_bits < kMinMantissaBits || mantissa_bits > kMaxMantissaBits) {
      throw InvalidFormat("floating-point element E" + std::to_string(exponent_bits) +
                          "M" + std::to_string(mantissa_bits) + " outside e in [2,6], m in [1,5]");
    }
    ElementFormat f;
    f.kind_ = FormatKind::FloatingPoint;
    f.e_ = exponent_bits;
    f.m_ = mantissa_bits;
    f.bits_ = 1 + exponent_bits + mantissa_bits;
    // The mode only changes behaviour when special encodings exist.
    if (specials.kind == SpecialKind::None) specials.mode = OverflowMode::Overflow;
    f.specials_ = specials;
    return f;
  }

  static ElementFormat integer(int bits) {
    if (bits < kMinIntBits || bits > kMaxIntBits) {
      throw InvalidFormat("integer element INT" + std::to_string(bits) + " outside b in [2,8]");
    }
    ElementFormat f;
    f.kind_ = FormatKind::Integer;
    f.bits_ = bits;
    return f;
  }

  FormatKind kind() const { return kind_; }
  bool is_fp() const { return kind_ == FormatKind::FloatingPoint; }
  bool is_int() const { return kind_ == FormatKind::Integer; }
  int exponent_bits() const { return e_; }
  int mantissa_bits() const { return m_; }
  /// Total encoded width in bits.
  int bits() const { return bits_; }
  SpecialPolicy specials() const { return specials_; }
  OverflowMode mode() const { return specials_.mode; }
  int bias() const { return (1 << (e_ - 1)) - 1; }

  bool has_inf() const { return specials_.kind == SpecialKind::InfNaN; }
  bool has_nan() const { return specials_.kind != SpecialKind::None; }

  /// Exponent of the smallest normal FP value.
  int min_normal_exponent() const { return 1 - bias(); }
  /// Weight of the least significant bit of any element value.
  int quantum_exponent() const { return is_fp() ? 1 - bias() - m_ : -(bits_ - 2); }

  /// Largest biased exponent field used by finite values.
  int max_finite_biased_exponent() const {
    const int all_ones = (1 << e_) - 1;
    return specials_.kind == SpecialKind::InfNaN ? all_ones - 1 : all_ones;
  }

  std::uint32_t code_count() const { return std::uint32_t{1} << bits_; }

  /// Short name such as "e4m3" or "int8".
  std::string name() const {
    if (is_int()) return "int" + std::to_string(bits_);
    return "e" + std::to_string(e_) + "m" + std::to_string(m_);
  }

  /// Full spec string; parse_element_format(spec_string()) == *this.
  std::string spec_string() const {
    if (is_int() || specials_.kind == SpecialKind::None) {
      return is_int() || !default_has_specials() ? name() : name() + ":none";
    }
    std::string s = name();
    s += specials_.kind == SpecialKind::InfNaN ? ":inf-nan" : ":nan-only";
    s += specials_.mode == OverflowMode::Overflow ? ":ofl" : ":sat";
    return s;
  }

  friend bool operator==(const ElementFormat&, const ElementFormat&) = default;

 private:
  bool default_has_specials() const {
    return (e_ == 5 && m_ == 2) || (e_ == 4 && m_ == 3);
  }

  FormatKind kind_ = FormatKind::Integer;
  int e_ = 0;
  int m_ = 0;
  int bits_ = 8;
  SpecialPolicy specials_{};
};

namespace formats {
inline ElementFormat e5m2() {
  return ElementFormat::floating_point(5, 2, {SpecialKind::InfNaN, OverflowMode::Overflow});
}
inline ElementFormat e4m3() {
  return ElementFormat::floating_point(4, 3, {SpecialKind::NaNOnly, OverflowMode::Overflow});
}
inline ElementFormat e3m2() { return ElementFormat::floating_point(3, 2); }
inline ElementFormat e2m3() { return ElementFormat::floating_point(2, 3); }
inline ElementFormat e2m1() { return ElementFormat::floating_point(2, 1); }
inline ElementFormat int8() { return ElementFormat::integer(8); }

/// The six concrete element types of the MX standard.
inline std::vector<ElementFormat> concrete() {
  return {e5m2(), e4m3(), e3m2(), e2m3(), e2m1(), int8()};
}

/// Every supported element type with its default special policy.
inline std::vector<ElementFormat> all_supported() {
  std::vector<ElementFormat> out;
  for (int e = ElementFormat::kMinExponentBits; e <= ElementFormat::kMaxExponentBits; ++e) {
    for (int m = ElementFormat::kMinMantissaBits; m <= ElementFormat::kMaxMantissaBits; ++m) {
      out.push_back(ElementFormat::floating_point(e, m));
    }
  }
  for (int b = ElementFormat::kMinIntBits; b <= ElementFormat::kMaxIntBits; ++b) {
    out.push_back(ElementFormat::integer(b));
  }
  return out;
}
}  // namespace formats

/// Parses "e4m3", "e5m2:inf-nan:sat", "e3m2:none", "int5", ...
///
///   format := fp | int
///   fp     := 'e' E 'm' M [':' policy] [':' mode]
///   int    := 'int' B
///   policy := 'none' | 'inf-nan' | 'nan-only'
///   mode   := 'ofl' | 'overflow' | 'sat' | 'saturating'
///
/// e5m2 defaults to inf-nan, e4m3 to nan-only, other FP formats to none; the
/// mode defaults to ofl.
inline ElementFormat parse_element_format(std::string_view text) {
  std::string s;
  for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = s.find(':', start);
    parts.push_back(s.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  const std::string& base = parts[0];
  auto bad = [&]() { return ParseError("bad element format '" + std::string(text) + "'"); };
  auto parse_digit = [&](char c) {
    if (c < '0' || c > '9') throw bad();
    return c - '0';
  };
  if (base.rfind("int", 0) == 0) {
    if (base.size() != 4 || parts.size() != 1) throw bad();
    return ElementFormat::integer(parse_digit(base[3]));
  }
  if (base.size() != 4 || base[0] != 'e' || base[2] != 'm' || parts.size() > 3) throw bad();
  const int e = parse_digit(base[1]);
  const int m = parse_digit(base[3]);
  SpecialPolicy policy;
  if (e == 5 && m == 2) policy.kind = SpecialKind::InfNaN;
  if (e == 4 && m == 3) policy.kind = SpecialKind::NaNOnly;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (p == "none") {
      policy.kind = SpecialKind::None;
    } else if (p == "inf-nan") {
      policy.kind = SpecialKind::InfNaN;
    } else if (p == "nan-only") {
      policy.kind = SpecialKind::NaNOnly;
    } else if (p == "ofl" || p == "overflow") {
      policy.mode = OverflowMode::Overflow;
    } else if (p == "sat" || p == "saturating") {
      policy.mode = OverflowMode::Saturating;
    } else {
      throw bad();
    }
  }
  return ElementFormat::floating_point(e, m, policy);
}

// ---------------------------------------------------------------------------
// Element codes

enum class ElementClass : std::uint8_t { Finite, PosInf, NegInf, NaN };

/// Decoded element: value = significand * 2^exponent when finite.
struct DecodedElement {
  ElementClass cls = ElementClass::Finite;
  bool negative = false;
  std::int64_t significand = 0;  // signed
  int exponent = 0;

  bool is_special() const { return cls != ElementClass::Finite; }
};

inline DecodedElement decode_fast(const ElementFormat& fmt, Code code) {
  DecodedElement d;
  if (fmt.is_int()) {
    const int b = fmt.bits();
    std::int64_t raw = code & ((1u << b) - 1);
    if (raw & (std::int64_t{1} << (b - 1))) raw -= std::int64_t{1} << b;
    d.negative = raw < 0;
    d.significand = raw;
    d.exponent = fmt.quantum_exponent();
    return d;
  }
  const int e = fmt.exponent_bits();
  const int m = fmt.mantissa_bits();
  const int exp_all_ones = (1 << e) - 1;
  const int man_all_ones = (1 << m) - 1;
  d.negative = ((code >> (e + m)) & 1u) != 0;
  const int biased = (code >> m) & exp_all_ones;
  const int mant = code & man_all_ones;
  switch (fmt.specials().kind) {
    case SpecialKind::InfNaN:
      if (biased == exp_all_ones) {
        d.cls = mant == 0 ? (d.negative ? ElementClass::NegInf : ElementClass::PosInf)
                          : ElementClass::NaN;
        return d;
      }
      break;
    case SpecialKind::NaNOnly:
      if (biased == exp_all_ones && mant == man_all_ones) {
        d.cls = ElementClass::NaN;
        return d;
      }
      break;
    case SpecialKind::None:
      break;
  }
  std::int64_t sig = biased == 0 ? mant : (mant | (1 << m));
  d.exponent = (biased == 0 ? 1 : biased) - fmt.bias() - m;
  d.significand = d.negative ? -sig : sig;
  return d;
}

/// Exact value of an element code, or NaN/Inf per the special policy.
inline ExactValue decode_element(const ElementFormat& fmt, Code code) {
  const DecodedElement d = decode_fast(fmt, code);
  switch (d.cls) {
    case ElementClass::NaN:
      return ExactValue::nan();
    case ElementClass::PosInf:
      return ExactValue::infinity(false);
    case ElementClass::NegInf:
      return ExactValue::infinity(true);
    case ElementClass::Finite:
      break;
  }
  const std::int64_t mag = d.significand < 0 ? -d.significand : d.significand;
  return ExactValue::dyadic(d.negative, BigInt(mag), d.exponent);
}

/// Exponent of the largest power of two representable in the format.
inline int format_emax(const ElementFormat& fmt) {
  if (fmt.is_int()) return 0;
  return fmt.max_finite_biased_exponent() - fmt.bias();
}

/// Canonical NaN code (positive sign, all-ones exponent and mantissa).
inline Code nan_code(const ElementFormat& fmt) {
  return static_cast<Code>((1u << (fmt.bits() - 1)) - 1);
}

inline Code inf_code(const ElementFormat& fmt, bool negative) {
  const Code sign = negative ? static_cast<Code>(1u << (fmt.bits() - 1)) : 0;
  return static_cast<Code>(sign | (((1u << fmt.exponent_bits()) - 1) << fmt.mantissa_bits()));
}

inline Code max_finite_code(const ElementFormat& fmt, bool negative) {
  if (fmt.is_int()) {
    const int b = fmt.bits();
    return negative ? static_cast<Code>(1u << (b - 1)) : static_cast<Code>((1u << (b - 1)) - 1);
  }
  const int m = fmt.mantissa_bits();
  const int mant = fmt.specials().kind == SpecialKind::NaNOnly ? (1 << m) - 2 : (1 << m) - 1;
  const Code sign = negative ? static_cast<Code>(1u << (fmt.bits() - 1)) : 0;
  return static_cast<Code>(sign | (fmt.max_finite_biased_exponent() << m) | mant);
}

/// Largest finite magnitude of the format.
inline ExactValue max_finite(const ElementFormat& fmt) {
  return decode_element(fmt, max_finite_code(fmt, false));
}

namespace detail {

/// Packs an FP magnitude already rounded onto the format grid. The caller
/// guarantees it does not exceed the largest finite value.
inline Code pack_fp(const ElementFormat& fmt, bool negative, const RoundedMagnitude& r) {
  const int m = fmt.mantissa_bits();
  const Code sign = negative ? static_cast<Code>(1u << (fmt.bits() - 1)) : 0;
  const auto sig = r.significand.convert_to<std::uint32_t>();
  if (sig < (1u << m)) return static_cast<Code>(sign | sig);  // subnormal or zero
  const int biased = r.exponent + m + fmt.bias();
  return static_cast<Code>(sign | (biased << m) | (sig - (1u << m)));
}

inline BinaryGrid fp_grid(const ElementFormat& fmt) {
  return BinaryGrid{fmt.mantissa_bits() + 1, fmt.min_normal_exponent()};
}

}  // namespace detail

/// Code of a value in the format's value set. -0 keeps its sign for FP.
/// Throws NotRepresentable otherwise.
inline Code encode_element(const ElementFormat& fmt, const ExactValue& value) {
  auto fail = [&]() {
    return NotRepresentable(value.to_string() + " is not representable in " + fmt.spec_string());
  };
  if (value.is_nan()) {
    if (!fmt.has_nan()) throw fail();
    return nan_code(fmt);
  }
  if (value.is_inf()) {
    if (!fmt.has_inf()) throw fail();
    return inf_code(fmt, value.negative());
  }
  if (fmt.is_int()) {
    const RoundedMagnitude r =
        round_to_quantum(value.magnitude(), value.exponent(), fmt.quantum_exponent());
    const BigInt limit = BigInt(1) << (fmt.bits() - 1);
    if (r.inexact || r.significand > limit || (!value.negative() && r.significand == limit)) {
      throw fail();
    }
    const auto mag = r.significand.convert_to<std::int64_t>();
    const std::int64_t raw = value.negative() ? -mag : mag;
    return static_cast<Code>(raw & ((std::int64_t{1} << fmt.bits()) - 1));
  }
  if (compare_magnitude(value, max_finite(fmt)) > 0) throw fail();
  const RoundedMagnitude r =
      round_to_grid(value.magnitude(), value.exponent(), detail::fp_grid(fmt));
  if (r.inexact) throw fail();
  return detail::pack_fp(fmt, value.negative(), r);
}

inline Code encode_element(const ElementFormat& fmt, double value) {
  return encode_element(fmt, ExactValue::from_double(value));
}

// ---------------------------------------------------------------------------
// Shared scale

/// E8M0 shared scale: byte b in [0,254] is 2^(b-127); 255 is NaN.
struct ScaleE8M0 {
  static constexpr int kBias = 127;
  static constexpr std::uint8_t kNaN = 0xFF;
  static constexpr int kMinExponent = -127;
  static constexpr int kMaxExponent = 127;

  std::uint8_t byte = kBias;

  static constexpr ScaleE8M0 nan() { return ScaleE8M0{kNaN}; }
  static constexpr ScaleE8M0 one() { return ScaleE8M0{kBias}; }

  /// 2^exponent, clamped into the representable range.
  static constexpr ScaleE8M0 from_exponent(int exponent) {
    if (exponent < kMinExponent) exponent = kMinExponent;
    if (exponent > kMaxExponent) exponent = kMaxExponent;
    return ScaleE8M0{static_cast<std::uint8_t>(exponent + kBias)};
  }

  constexpr bool is_nan() const { return byte == kNaN; }
  constexpr int exponent() const { return static_cast<int>(byte) - kBias; }

  friend constexpr bool operator==(ScaleE8M0, ScaleE8M0) = default;
};

inline ExactValue scale_value(ScaleE8M0 s) {
  if (s.is_nan()) return ExactValue::nan();
  return ExactValue::dyadic(false, BigInt(1), s.exponent());
}

/// Product of two scales: adds exponents, propagates NaN and saturates.
constexpr ScaleE8M0 scale_mul(ScaleE8M0 s, ScaleE8M0 t) {
  if (s.is_nan() || t.is_nan()) return ScaleE8M0::nan();
  return ScaleE8M0::from_exponent(s.exponent() + t.exponent());
}

// ---------------------------------------------------------------------------
// Blocks

struct BlockFormat {
  static constexpr int kMinLog2BlockSize = 2;
  static constexpr int kMaxLog2BlockSize = 9;

  ElementFormat element;
  int k = 32;

  BlockFormat(ElementFormat elem, int block_size) : element(elem), k(block_size) {
    if (!valid_block_size(block_size)) {
      throw InvalidFormat("block size " + std::to_string(block_size) +
                          " is not a power of two in [4, 512]");
    }
  }

  static bool valid_block_size(int k) {
    return k > 0 && std::has_single_bit(static_cast<unsigned>(k)) &&
           std::countr_zero(static_cast<unsigned>(k)) >= kMinLog2BlockSize &&
           std::countr_zero(static_cast<unsigned>(k)) <= kMaxLog2BlockSize;
  }

  int log2_k() const { return std::countr_zero(static_cast<unsigned>(k)); }

  friend bool operator==(const BlockFormat&, const BlockFormat&) = default;
};

/// k element codes sharing one E8M0 scale.
struct MxBlock {
  ScaleE8M0 scale;
  std::vector<Code> codes;

  friend bool operator==(const MxBlock&, const MxBlock&) = default;
};

inline bool block_is_valid(const MxBlock& block, const BlockFormat& fmt) {
  if (static_cast<int>(block.codes.size()) != fmt.k) return false;
  for (Code c : block.codes) {
    if (c >= fmt.element.code_count()) return false;
  }
  return true;
}

}  // namespace mxkit
