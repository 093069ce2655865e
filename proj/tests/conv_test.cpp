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
#include <vector>

#include "mxkit/conv.hpp"
#include "mxkit/random.hpp"
#include "oracle/reference.hpp"

namespace mxkit {
namespace {

using oracle::Rational;

Rational to_rational(const ExactValue& v) {
  return Rational(v.significand()) * oracle::pow2(v.exponent());
}

Tensor random_tensor(Rng& rng, std::vector<std::size_t> dims) {
  Tensor t = Tensor::zeros(std::move(dims));
  for (float& x : t.data) x = static_cast<float>(rng.gaussian());
  return t;
}

// Exact convolution of the dequantized operands, loops in filter-major order.
std::vector<Rational> exact_conv(const QuantizedTensor& a, const QuantizedTensor& f) {
  const auto& ad = a.dims;
  const auto& fd = f.dims;
  const std::size_t oh = ad[1] - fd[2] + 1, ow = ad[2] - fd[3] + 1;
  std::vector<Rational> out(ad[0] * oh * ow * fd[0], Rational(0));
  auto deq = [](const QuantizedTensor& q, std::size_t i) {
    return to_rational(dequantize_element(q.scheme.element, q.scales[i], q.codes[i]));
  };
  for (std::size_t l = 0; l < fd[0]; ++l) {
    for (std::size_t j = 0; j < fd[3]; ++j) {
      for (std::size_t i = 0; i < fd[2]; ++i) {
        for (std::size_t c = 0; c < fd[1]; ++c) {
          const Rational w = deq(f, ((l * fd[1] + c) * fd[2] + i) * fd[3] + j);
          for (std::size_t n = 0; n < ad[0]; ++n) {
            for (std::size_t h = 0; h < oh; ++h) {
              for (std::size_t x = 0; x < ow; ++x) {
                out[((n * oh + h) * ow + x) * fd[0] + l] +=
                    w * deq(a, ((n * ad[1] + h + i) * ad[2] + x + j) * ad[3] + c);
              }
            }
          }
        }
      }
    }
  }
  return out;
}

// Max-power-of-two scaling can push an FP8 block maximum past the largest
// finite value; the saturating variants keep the operands finite.
std::vector<ElementFormat> finite_formats() {
  return {parse_element_format("e5m2:sat"), parse_element_format("e4m3:sat"), formats::e3m2(),
          formats::e2m3(), formats::e2m1(), formats::int8()};
}

TEST(ConvReference, Examples) {
  Tensor a = Tensor::zeros({1, 2, 2, 1});
  a.data = {1, 2, 3, 4};
  Tensor f = Tensor::zeros({1, 1, 1, 1});
  f.data = {2};
  EXPECT_EQ(conv2d_reference(a, f).data, (std::vector<float>{2, 4, 6, 8}));
  EXPECT_EQ(conv2d_reference(a, f).dims, (std::vector<std::size_t>{1, 2, 2, 1}));

  Rng rng(61);
  const Tensor big = random_tensor(rng, {1, 5, 6, 1});
  Tensor id = Tensor::zeros({1, 1, 3, 3});
  id.at4(0, 0, 1, 1) = 1.0f;
  const Tensor out = conv2d_reference(big, id);
  ASSERT_EQ(out.dims, (std::vector<std::size_t>{1, 3, 4, 1}));
  for (std::size_t h = 0; h < 3; ++h) {
    for (std::size_t w = 0; w < 4; ++w) EXPECT_EQ(out.at4(0, h, w, 0), big.at4(0, h + 1, w + 1, 0));
  }
}

TEST(ConvReference, ShapeChecks) {
  EXPECT_THROW(conv2d_reference(Tensor::zeros({1, 4, 4, 3}), Tensor::zeros({2, 4, 3, 3})), ShapeMismatch);
  EXPECT_THROW(conv2d_reference(Tensor::zeros({1, 2, 2, 3}), Tensor::zeros({2, 3, 3, 3})), ShapeMismatch);
  EXPECT_THROW(conv2d_reference(Tensor::zeros({4, 4, 3}), Tensor::zeros({2, 3, 3, 3})), ShapeMismatch);
}

TEST(ConvMx, AllOnesSingleBlock) {
  const int k = 32;
  Tensor a = Tensor::zeros({1, 1, 1, static_cast<std::size_t>(k)});
  Tensor f = Tensor::zeros({1, static_cast<std::size_t>(k), 1, 1});
  for (float& x : a.data) x = 1.0f;
  for (float& x : f.data) x = 1.0f;
  const QuantScheme s = QuantScheme::mx(formats::int8(), k);
  const Tensor out = conv2d_mx(quantize_tensor(a, s, kActivationChannelAxis), quantize_tensor(f, s, kWeightChannelAxis),
                               NormAddConfig{64});
  ASSERT_EQ(out.data.size(), 1u);
  EXPECT_EQ(out.data[0], static_cast<float>(k));
}

TEST(ConvMx, WideConfigMatchesExactAndReference) {
  Rng rng(62);
  for (const ElementFormat& f : finite_formats()) {
    for (std::size_t c : {8u, 40u}) {
      const Tensor a = random_tensor(rng, {1, 4, 5, c});
      const Tensor w = random_tensor(rng, {2, c, 2, 3});
      const QuantScheme s = QuantScheme::mx(f, 8);
      const QuantizedTensor qa = quantize_tensor(a, s, kActivationChannelAxis);
      const QuantizedTensor qw = quantize_tensor(w, s, kWeightChannelAxis);
      const ConvResult r = conv2d_mx_exact(qa, qw, NormAddConfig{256});
      const std::vector<Rational> want = exact_conv(qa, qw);
      ASSERT_EQ(r.outputs.size(), want.size());
      for (std::size_t i = 0; i < want.size(); ++i) ASSERT_EQ(to_rational(r.outputs[i].value()), want[i]) << f.spec_string();
      EXPECT_EQ(r.to_tensor().data, conv2d_reference(dequantize_tensor(qa), dequantize_tensor(qw)).data)
          << f.spec_string();
    }
  }
}

TEST(ConvMx, NarrowConfigBoundedAndConverging) {
  Rng rng(63);
  const ElementFormat f = parse_element_format("e4m3:sat");
  const Tensor a = random_tensor(rng, {1, 5, 5, 48});
  const Tensor w = random_tensor(rng, {3, 48, 3, 3});
  const QuantScheme s = QuantScheme::mx(f, 16);
  const QuantizedTensor qa = quantize_tensor(a, s, kActivationChannelAxis);
  const QuantizedTensor qw = quantize_tensor(w, s, kWeightChannelAxis);
  const std::vector<Rational> want = exact_conv(qa, qw);
  const std::size_t dots = 3 * 3 * 3;  // c-blocks x kh x kw
  double prev = -1;
  for (int width : {8, 12, 16, 24, 32, 48, 96}) {
    const ConvResult r = conv2d_mx_exact(qa, qw, NormAddConfig{width});
    double total = 0;
    for (std::size_t o = 0; o < want.size(); ++o) {
      // Sum of |terms| for this output, from the dequantized operands.
      const std::size_t l = o % 3, x = (o / 3) % 3, h = o / 9;
      Rational abs_terms = 0;
      for (std::size_t c = 0; c < 48; ++c) {
        for (std::size_t i = 0; i < 3; ++i) {
          for (std::size_t j = 0; j < 3; ++j) {
            const std::size_t ai = ((h + i) * 5 + x + j) * 48 + c;
            const std::size_t wi = ((l * 48 + c) * 3 + i) * 3 + j;
            abs_terms += abs(to_rational(dequantize_element(f, qa.scales[ai], qa.codes[ai])) *
                             to_rational(dequantize_element(f, qw.scales[wi], qw.codes[wi])));
          }
        }
      }
      const Rational err = abs(to_rational(r.outputs[o].value()) - want[o]);
      ASSERT_LE(err, Rational(static_cast<long long>(dots)) * oracle::pow2(-width + 1) * abs_terms);
      total += err.convert_to<double>();
    }
    if (prev >= 0) {
      EXPECT_LE(total, prev) << "width " << width;
    }
    prev = total;
  }
  EXPECT_EQ(prev, 0.0);
}

TEST(ConvPerChannel, MatchesDequantizedReference) {
  Rng rng(64);
  for (const ElementFormat& f : finite_formats()) {
    const Tensor a = random_tensor(rng, {2, 4, 4, 6});
    const Tensor w = random_tensor(rng, {3, 6, 3, 3});
    const QuantScheme s = QuantScheme::per_channel(f);
    const QuantizedTensor qa = quantize_tensor(a, s, kActivationChannelAxis);
    const QuantizedTensor qw = quantize_tensor(w, s, kWeightChannelAxis);
    const ConvResult r = conv2d_per_channel_exact(qa, qw, NormAddConfig{256});
    const std::vector<Rational> want = exact_conv(qa, qw);
    for (std::size_t i = 0; i < want.size(); ++i) ASSERT_EQ(to_rational(r.outputs[i].value()), want[i]) << f.spec_string();
    EXPECT_EQ(r.to_tensor().data, conv2d_reference(dequantize_tensor(qa), dequantize_tensor(qw)).data);
  }
}

TEST(ConvPerChannel, SingleChannelEqualsPerTensor) {
  Rng rng(65);
  const Tensor a = random_tensor(rng, {1, 5, 5, 1});
  const Tensor w = random_tensor(rng, {2, 1, 3, 3});
  const ElementFormat f = formats::e2m3();
  const Tensor pc = conv2d_per_channel(quantize_tensor(a, QuantScheme::per_channel(f), kActivationChannelAxis),
                                       quantize_tensor(w, QuantScheme::per_channel(f), kWeightChannelAxis),
                                       NormAddConfig{32});
  const Tensor pt = conv2d_per_tensor(quantize_tensor(a, QuantScheme::per_tensor(f), kActivationChannelAxis),
                                      quantize_tensor(w, QuantScheme::per_tensor(f), kWeightChannelAxis),
                                      NormAddConfig{32});
  EXPECT_EQ(pc.data, pt.data);
}

TEST(ConvPerChannel, ActivationScaleShiftMovesOnlyExponents) {
  Rng rng(66);
  const Tensor a = random_tensor(rng, {1, 4, 4, 5});
  const Tensor w = random_tensor(rng, {2, 5, 2, 2});
  const QuantScheme s = QuantScheme::per_channel(formats::int8());
  QuantizedTensor qa = quantize_tensor(a, s, kActivationChannelAxis);
  const QuantizedTensor qw = quantize_tensor(w, s, kWeightChannelAxis);
  const ConvResult base = conv2d_per_channel_exact(qa, qw, NormAddConfig{14});
  for (ScaleE8M0& sc : qa.scales) sc = ScaleE8M0{static_cast<std::uint8_t>(sc.byte + 5)};
  const ConvResult shifted = conv2d_per_channel_exact(qa, qw, NormAddConfig{14});
  for (std::size_t i = 0; i < base.outputs.size(); ++i) {
    EXPECT_EQ(shifted.outputs[i].sum.mantissa, base.outputs[i].sum.mantissa);
    if (base.outputs[i].sum.mantissa != 0) {
      EXPECT_EQ(shifted.outputs[i].sum.exponent, base.outputs[i].sum.exponent + 5);
    }
  }
}

TEST(ConvPerTensor, MatchesExact) {
  Rng rng(67);
  const Tensor a = random_tensor(rng, {1, 4, 4, 7});
  const Tensor w = random_tensor(rng, {2, 7, 3, 3});
  const QuantScheme s = QuantScheme::per_tensor(formats::e3m2());
  const QuantizedTensor qa = quantize_tensor(a, s, kActivationChannelAxis);
  const QuantizedTensor qw = quantize_tensor(w, s, kWeightChannelAxis);
  const ConvResult r = conv2d_per_tensor_exact(qa, qw, NormAddConfig{256});
  const std::vector<Rational> want = exact_conv(qa, qw);
  for (std::size_t i = 0; i < want.size(); ++i) ASSERT_EQ(to_rational(r.outputs[i].value()), want[i]);
}

TEST(Conv, SchemeChecks) {
  Rng rng(68);
  const Tensor a = random_tensor(rng, {1, 4, 4, 8});
  const Tensor w = random_tensor(rng, {2, 8, 3, 3});
  const QuantizedTensor mx_a = quantize_tensor(a, QuantScheme::mx(formats::int8(), 4), kActivationChannelAxis);
  const QuantizedTensor mx_w = quantize_tensor(w, QuantScheme::mx(formats::int8(), 4), kWeightChannelAxis);
  const QuantizedTensor mx_w8 = quantize_tensor(w, QuantScheme::mx(formats::int8(), 8), kWeightChannelAxis);
  const QuantizedTensor fp_w = quantize_tensor(w, QuantScheme::mx(formats::e4m3(), 4), kWeightChannelAxis);
  const QuantizedTensor pc_w = quantize_tensor(w, QuantScheme::per_channel(formats::int8()), kWeightChannelAxis);
  const QuantizedTensor wrong_axis = quantize_tensor(w, QuantScheme::mx(formats::int8(), 4), 0);
  const NormAddConfig cfg{32};
  EXPECT_NO_THROW(conv2d_mx(mx_a, mx_w, cfg));
  EXPECT_THROW(conv2d_mx(mx_a, mx_w8, cfg), SchemeMismatch);
  EXPECT_THROW(conv2d_mx(mx_a, fp_w, cfg), SchemeMismatch);
  EXPECT_THROW(conv2d_mx(mx_a, pc_w, cfg), SchemeMismatch);
  EXPECT_THROW(conv2d_mx(mx_a, wrong_axis, cfg), SchemeMismatch);
  EXPECT_THROW(conv2d_per_channel(mx_a, mx_w, cfg), SchemeMismatch);
}

}  // namespace
}  // namespace mxkit
