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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "mxkit/formats.hpp"
#include "oracle/reference.hpp"

namespace mxkit {
namespace {

std::vector<ElementFormat> all_policy_variants() {
  std::vector<ElementFormat> out;
  for (const ElementFormat& f : formats::all_supported()) {
    if (f.is_int()) {
      out.push_back(f);
      continue;
    }
    for (SpecialKind k : {SpecialKind::None, SpecialKind::InfNaN, SpecialKind::NaNOnly}) {
      for (OverflowMode m : {OverflowMode::Overflow, OverflowMode::Saturating}) {
        out.push_back(ElementFormat::floating_point(f.exponent_bits(), f.mantissa_bits(), {k, m}));
      }
    }
  }
  return out;
}

TEST(Formats, E2M1ValueTable) {
  const std::vector<double> expected = {0, 0.5, 1, 1.5, 2, 3, 4, 6};
  const ElementFormat f = formats::e2m1();
  for (Code c = 0; c < 16; ++c) {
    const double mag = expected[c & 7];
    EXPECT_EQ(decode_element(f, c).to_double(), (c & 8) ? -mag : mag) << "code " << c;
  }
}

TEST(Formats, DecodeExamples) {
  EXPECT_EQ(decode_element(formats::e2m1(), 0b0010).to_double(), 1.0);
  const ExactValue zero = decode_element(formats::e2m1(), 0b0000);
  EXPECT_TRUE(zero.is_zero());
  EXPECT_FALSE(zero.negative());
  EXPECT_EQ(decode_element(formats::int8(), 64).to_double(), 1.0);
  const ExactValue inf = decode_element(formats::e5m2(), 0b0'11111'00);
  EXPECT_TRUE(inf.is_inf());
  EXPECT_FALSE(inf.negative());
  EXPECT_TRUE(decode_element(formats::e5m2(), 0b1'11111'01).is_nan());
  EXPECT_TRUE(decode_element(formats::e4m3(), 0x7F).is_nan());
  EXPECT_TRUE(decode_element(formats::e4m3(), 0xFF).is_nan());
  EXPECT_EQ(decode_element(formats::e4m3(), 0x7E).to_double(), 448.0);
  EXPECT_EQ(decode_element(formats::e5m2(), 0x7B).to_double(), 57344.0);
}

TEST(Formats, EncodeExamples) {
  EXPECT_EQ(encode_element(formats::e2m1(), 6.0), 0b0111);
  EXPECT_EQ(encode_element(formats::int8(), -2.0), 0x80);  // raw -128
  EXPECT_THROW(encode_element(formats::e2m1(), 2.5), NotRepresentable);
  EXPECT_THROW(encode_element(formats::int8(), 2.0), NotRepresentable);
  EXPECT_THROW(encode_element(formats::e2m1(), ExactValue::nan()), NotRepresentable);
  EXPECT_THROW(encode_element(formats::e4m3(), ExactValue::infinity(false)), NotRepresentable);
  EXPECT_EQ(encode_element(formats::e2m1(), -0.0), 0b1000);
  EXPECT_EQ(encode_element(formats::int8(), -0.0), 0);
}

TEST(Formats, EmaxExamples) {
  EXPECT_EQ(format_emax(formats::e2m1()), 2);
  EXPECT_EQ(format_emax(formats::e4m3()), 8);
  EXPECT_EQ(format_emax(formats::e5m2()), 15);
  EXPECT_EQ(format_emax(ElementFormat::integer(5)), 0);
}

TEST(Formats, EmaxIsLargestRepresentablePowerOfTwo) {
  for (const ElementFormat& f : all_policy_variants()) {
    const int emax = format_emax(f);
    EXPECT_NO_THROW(encode_element(f, std::ldexp(1.0, emax))) << f.spec_string();
    EXPECT_THROW(encode_element(f, std::ldexp(1.0, emax + 1)), NotRepresentable) << f.spec_string();
  }
}

TEST(Formats, DecodeMatchesOracleForEveryCode) {
  for (const ElementFormat& f : all_policy_variants()) {
    for (std::uint32_t c = 0; c < f.code_count(); ++c) {
      const ExactValue v = decode_element(f, static_cast<Code>(c));
      const auto ref = oracle::decode(f, c);
      ASSERT_EQ(ref.has_value(), v.is_finite()) << f.spec_string() << " code " << c;
      if (!ref) continue;
      oracle::Rational got = oracle::Rational(v.significand()) * oracle::pow2(v.exponent());
      ASSERT_EQ(got, *ref) << f.spec_string() << " code " << c;
    }
  }
}

TEST(Formats, EncodeDecodeRoundTrip) {
  for (const ElementFormat& f : all_policy_variants()) {
    for (std::uint32_t c = 0; c < f.code_count(); ++c) {
      const ExactValue v = decode_element(f, static_cast<Code>(c));
      const Code back = encode_element(f, v);
      if (v.is_nan()) {
        EXPECT_TRUE(decode_element(f, back).is_nan());
      } else if (f.is_int() && v.is_zero()) {
        EXPECT_EQ(back, 0);
      } else {
        EXPECT_EQ(back, c) << f.spec_string();
      }
    }
  }
}

TEST(Formats, SignMagnitudeOrderIsMonotone) {
  for (const ElementFormat& f : all_policy_variants()) {
    if (!f.is_fp()) continue;
    const std::uint32_t half = f.code_count() / 2;
    double prev = -1.0;
    for (std::uint32_t c = 0; c < half; ++c) {
      const ExactValue pos = decode_element(f, static_cast<Code>(c));
      const ExactValue neg = decode_element(f, static_cast<Code>(c + half));
      if (!pos.is_finite()) continue;
      EXPECT_GT(pos.to_double(), prev) << f.spec_string() << " code " << c;
      EXPECT_EQ(neg.to_double(), -pos.to_double());
      prev = pos.to_double();
    }
  }
}

TEST(Formats, IntegerDecodeRule) {
  for (int b = 2; b <= 8; ++b) {
    const ElementFormat f = ElementFormat::integer(b);
    for (std::uint32_t c = 0; c < f.code_count(); ++c) {
      const int raw = c >= (1u << (b - 1)) ? static_cast<int>(c) - (1 << b) : static_cast<int>(c);
      EXPECT_EQ(decode_element(f, static_cast<Code>(c)).to_double(), std::ldexp(raw, -(b - 2)));
    }
  }
  // INT2 elements are {-2, -1, 0, 1}.
  std::set<double> int2;
  for (Code c = 0; c < 4; ++c) int2.insert(decode_element(ElementFormat::integer(2), c).to_double());
  EXPECT_EQ(int2, (std::set<double>{-2, -1, 0, 1}));
}

TEST(Formats, ParameterRanges) {
  EXPECT_THROW(ElementFormat::floating_point(1, 2), InvalidFormat);
  EXPECT_THROW(ElementFormat::floating_point(7, 2), InvalidFormat);
  EXPECT_THROW(ElementFormat::floating_point(3, 0), InvalidFormat);
  EXPECT_THROW(ElementFormat::floating_point(3, 6), InvalidFormat);
  EXPECT_THROW(ElementFormat::integer(1), InvalidFormat);
  EXPECT_THROW(ElementFormat::integer(9), InvalidFormat);
  EXPECT_EQ(ElementFormat::floating_point(6, 5).bits(), 12);
  EXPECT_EQ(formats::all_supported().size(), 25u + 7u);
}

TEST(Formats, ParseFormatStrings) {
  EXPECT_EQ(parse_element_format("e4m3"), formats::e4m3());
  EXPECT_EQ(parse_element_format("E5M2"), formats::e5m2());
  EXPECT_EQ(parse_element_format("e2m1"), formats::e2m1());
  EXPECT_EQ(parse_element_format("int5"), ElementFormat::integer(5));
  const ElementFormat sat = parse_element_format("e3m2:inf-nan:sat");
  EXPECT_EQ(sat.specials().kind, SpecialKind::InfNaN);
  EXPECT_EQ(sat.mode(), OverflowMode::Saturating);
  EXPECT_EQ(parse_element_format("e4m3:none").specials().kind, SpecialKind::None);
  EXPECT_EQ(parse_element_format("e4m3:saturating").mode(), OverflowMode::Saturating);
  EXPECT_THROW(parse_element_format("e7m1"), InvalidFormat);
  EXPECT_THROW(parse_element_format("fp8"), ParseError);
  EXPECT_THROW(parse_element_format("e4m3:bogus"), ParseError);
  EXPECT_THROW(parse_element_format("int8:sat"), ParseError);
  for (const ElementFormat& f : all_policy_variants()) {
    EXPECT_EQ(parse_element_format(f.spec_string()), f) << f.spec_string();
  }
}

TEST(Scale, ValueAndProduct) {
  EXPECT_EQ(scale_value(ScaleE8M0{127}).to_double(), 1.0);
  EXPECT_TRUE(scale_value(ScaleE8M0::nan()).is_nan());
  EXPECT_EQ(scale_mul(ScaleE8M0{126}, ScaleE8M0{128}).byte, 127);
  for (int b = 0; b < 256; ++b) {
    EXPECT_EQ(scale_mul(ScaleE8M0{255}, ScaleE8M0{static_cast<std::uint8_t>(b)}).byte, 255);
    EXPECT_EQ(scale_mul(ScaleE8M0{static_cast<std::uint8_t>(b)}, ScaleE8M0{255}).byte, 255);
  }
  EXPECT_EQ(scale_mul(ScaleE8M0{254}, ScaleE8M0{254}).byte, 254);
  EXPECT_EQ(scale_mul(ScaleE8M0{0}, ScaleE8M0{0}).byte, 0);
  EXPECT_EQ(scale_value(ScaleE8M0{0}).floor_log2(), -127);
}

TEST(Blocks, BlockSizeConstraint) {
  for (int k : {4, 8, 16, 32, 64, 128, 256, 512}) EXPECT_NO_THROW(BlockFormat(formats::int8(), k));
  for (int k : {0, 1, 2, 3, 12, 1024}) EXPECT_THROW(BlockFormat(formats::int8(), k), InvalidFormat);
  const BlockFormat bf(formats::e2m1(), 4);
  EXPECT_TRUE(block_is_valid(MxBlock{ScaleE8M0::one(), {0, 1, 2, 15}}, bf));
  EXPECT_FALSE(block_is_valid(MxBlock{ScaleE8M0::one(), {0, 1, 2, 16}}, bf));
  EXPECT_FALSE(block_is_valid(MxBlock{ScaleE8M0::one(), {0, 1, 2}}, bf));
}

}  // namespace
}  // namespace mxkit
