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

#include <bit>
#include <span>
#include <vector>

#include "mxkit/exact.hpp"
#include "mxkit/formats.hpp"

namespace mxkit {

/// How a block's shared scale is chosen: the standard-recommended largest
/// power of two, or a constant pre-computed byte.
struct ScaleRule {
  enum class Method : std::uint8_t { MaxPow2, Fixed };

  Method method = Method::MaxPow2;
  ScaleE8M0 fixed{};

  static ScaleRule max_pow2() { return {}; }
  static ScaleRule fixed_scale(ScaleE8M0 s) { return {Method::Fixed, s}; }

  friend bool operator==(const ScaleRule&, const ScaleRule&) = default;
};

/// Shared scale 2^(floor(log2 max|v|) - emax), clamped into E8M0.
///
/// A NaN anywhere yields the NaN scale. Infinities are skipped when the
/// element format can encode them and force the NaN scale otherwise. A block
/// with no non-zero finite value gets scale 1.0.
inline ScaleE8M0 compute_scale(std::span<const ExactValue> values, const ElementFormat& fmt) {
  bool any = false;
  int max_log2 = 0;
  for (const ExactValue& v : values) {
    if (v.is_nan()) return ScaleE8M0::nan();
    if (v.is_inf()) {
      if (!fmt.has_inf()) return ScaleE8M0::nan();
      continue;
    }
    if (v.is_zero()) continue;
    const int l = v.floor_log2();
    if (!any || l > max_log2) max_log2 = l;
    any = true;
  }
  if (!any) return ScaleE8M0::one();
  return ScaleE8M0::from_exponent(max_log2 - format_emax(fmt));
}

inline ScaleE8M0 compute_scale(std::span<const float> values, const ElementFormat& fmt) {
  std::vector<ExactValue> exact;
  exact.reserve(values.size());
  for (float f : values) exact.push_back(ExactValue::from_float(f));
  return compute_scale(std::span<const ExactValue>(exact), fmt);
}

/// Depth of the max-magnitude comparator tree over a block of k values.
constexpr int comparator_tree_depth(int k) {
  return k <= 1 ? 0 : std::bit_width(static_cast<unsigned>(k - 1));
}

/// Pipeline stages of the scale computation; each stage spans at most two
/// comparator levels.
constexpr int pipeline_stages(int k) { return (comparator_tree_depth(k) + 1) / 2; }

}  // namespace mxkit
