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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mxkit/random.hpp"
#include "mxkit/scale.hpp"

namespace mxkit {
namespace {

constexpr float kInf = std::numeric_limits<float>::infinity();
constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

ScaleE8M0 scale_of(std::vector<float> v, const ElementFormat& f) {
  return compute_scale(std::span<const float>(v), f);
}

// Independent oracle: frexp gives the binade of the largest magnitude.
int oracle_scale_byte(const std::vector<float>& v, const ElementFormat& f) {
  float m = 0;
  for (float x : v) m = std::max(m, std::fabs(x));
  if (m == 0) return 127;
  int e;
  std::frexp(m, &e);
  return std::clamp(e - 1 - format_emax(f) + 127, 0, 254);
}

TEST(ComputeScale, Examples) {
  EXPECT_EQ(scale_of({0.75f, -3.0f, 0.125f, 0.0f}, formats::e2m1()).byte, 126);
  EXPECT_EQ(scale_of({0, 0, 0, 0}, formats::e2m1()).byte, 127);
  EXPECT_EQ(scale_of({0.0f, -0.0f, 0.0f, 0.0f}, formats::int8()).byte, 127);
  EXPECT_EQ(scale_of({1.0f, kNaN, 1.0f, 1.0f}, formats::e5m2()).byte, 255);
  EXPECT_EQ(scale_of({1.0f, kNaN, 1.0f, 1.0f}, formats::e2m1()).byte, 255);
  EXPECT_EQ(scale_of(std::vector<float>(32, 1.0f), formats::int8()).byte, 127);
}

TEST(ComputeScale, InfinityHandling) {
  // E5M2 can carry the Inf through the element; the finite lanes set the scale.
  EXPECT_EQ(scale_of({kInf, 2.0f, 0.5f, 0.0f}, formats::e5m2()).byte, 127 + 1 - 15);
  EXPECT_EQ(scale_of({-kInf, 0, 0, 0}, formats::e5m2()).byte, 127);
  EXPECT_EQ(scale_of({kInf, 2.0f, 0.5f, 0.0f}, formats::e4m3()).byte, 255);
  EXPECT_EQ(scale_of({kInf, 2.0f, 0.5f, 0.0f}, formats::e2m1()).byte, 255);
  EXPECT_EQ(scale_of({kInf, 2.0f, 0.5f, 0.0f}, formats::int8()).byte, 255);
}

TEST(ComputeScale, Clamping) {
  const float tiny = std::numeric_limits<float>::denorm_min();  // 2^-149
  EXPECT_EQ(scale_of({tiny, 0, 0, 0}, formats::e2m1()).byte, 0);
  EXPECT_EQ(scale_of({std::ldexp(1.0f, 127), 0, 0, 0}, formats::int8()).byte, 254);
  EXPECT_EQ(scale_of({std::ldexp(1.0f, -127), 0, 0, 0}, formats::int8()).byte, 0);
  EXPECT_EQ(scale_of({std::ldexp(1.0f, -126), 0, 0, 0}, formats::int8()).byte, 1);
}

TEST(ComputeScale, MatchesOracleAndNormalizesMaximum) {
  Rng rng(11);
  for (const ElementFormat& f : formats::all_supported()) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<float> v(static_cast<std::size_t>(4 << rng.uniform_int(0, 5)));
      const int spread = rng.uniform_int(0, 60);
      for (float& x : v) {
        x = static_cast<float>((rng.uniform01() * 2 - 1) * std::ldexp(1.0, rng.uniform_int(-spread, spread)));
      }
      const ScaleE8M0 s = scale_of(v, f);
      ASSERT_EQ(s.byte, oracle_scale_byte(v, f)) << f.spec_string();
      float m = 0;
      for (float x : v) m = std::max(m, std::fabs(x));
      if (m > 0 && s.byte > 0 && s.byte < 254) {
        int e;
        std::frexp(std::ldexp(static_cast<double>(m), -s.exponent()), &e);
        EXPECT_EQ(e - 1, format_emax(f));
      }
    }
  }
}

TEST(ComputeScale, PermutationAndPowerOfTwoShift) {
  Rng rng(12);
  for (const ElementFormat& f : formats::concrete()) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<float> v(32);
      for (float& x : v) x = static_cast<float>(rng.gaussian());
      const ScaleE8M0 s = scale_of(v, f);
      std::vector<float> p = v;
      std::reverse(p.begin(), p.end());
      std::rotate(p.begin(), p.begin() + rng.uniform_int(0, 31), p.end());
      EXPECT_EQ(scale_of(p, f).byte, s.byte);
      const int n = rng.uniform_int(-20, 20);
      std::vector<float> shifted = v;
      for (float& x : shifted) x = std::ldexp(x, n);
      EXPECT_EQ(scale_of(shifted, f).exponent(), s.exponent() + n);
    }
  }
}

TEST(ScalePipeline, DepthAndStages) {
  EXPECT_EQ(comparator_tree_depth(32), 5);
  EXPECT_EQ(pipeline_stages(32), 3);
  EXPECT_EQ(comparator_tree_depth(4), 2);
  EXPECT_EQ(pipeline_stages(4), 1);
  EXPECT_EQ(comparator_tree_depth(512), 9);
  EXPECT_EQ(pipeline_stages(512), 5);
  for (int k = 2; k <= 1024; ++k) {
    const int depth = comparator_tree_depth(k);
    EXPECT_GE(1 << depth, k);
    EXPECT_LT(1 << (depth - 1), k);
    EXPECT_EQ(pipeline_stages(k), (depth + 1) / 2);
  }
}

}  // namespace
}  // namespace mxkit
