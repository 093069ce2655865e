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

// Normalisation of dot-product outputs back into wide floats or MX blocks.

#include <span>
#include <vector>

#include "mxkit/convert.hpp"
#include "mxkit/dot.hpp"
#include "mxkit/dotgeneral.hpp"
#include "mxkit/wide.hpp"

namespace mxkit {

inline float normalize_dot_output_f32(const DotResult& r) { return to_binary32(r.value()); }
inline BFloat16 normalize_dot_output_bf16(const DotResult& r) { return to_bfloat16(r.value()); }
inline float normalize_dot_output_f32(const DotGeneralResult& r) { return to_binary32(r.value()); }
inline BFloat16 normalize_dot_output_bf16(const DotGeneralResult& r) {
  return to_bfloat16(r.value());
}

/// Emits k dot outputs as one MX block. The block scale is recomputed from
/// the exact output values with the max-power-of-two rule before rounding.
inline MxBlock normalize_dot_outputs_mx(std::span<const DotResult> outputs,
                                        const BlockFormat& fmt) {
  std::vector<ExactValue> values;
  values.reserve(outputs.size());
  for (const DotResult& r : outputs) values.push_back(r.value());
  return quantize_block(std::span<const ExactValue>(values), fmt, ScaleRule::max_pow2());
}

inline MxBlock normalize_dot_outputs_mx(std::span<const DotGeneralResult> outputs,
                                        const BlockFormat& fmt) {
  std::vector<ExactValue> values;
  values.reserve(outputs.size());
  for (const DotGeneralResult& r : outputs) values.push_back(r.value());
  return quantize_block(std::span<const ExactValue>(values), fmt, ScaleRule::max_pow2());
}

}  // namespace mxkit
