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

#include <cmath>
#include <limits>

#include "mxkit/error.hpp"
#include "mxkit/tensor.hpp"

namespace mxkit {

struct ErrorMetrics {
  double mse = 0.0;
  double max_abs = 0.0;
  /// 10 log10(sum ref^2 / sum (ref - test)^2); +inf when the error is zero.
  double sqnr_db = std::numeric_limits<double>::infinity();
};

inline ErrorMetrics error_metrics(const Tensor& ref, const Tensor& test) {
  if (ref.dims != test.dims) {
    throw ShapeMismatch("error_metrics: " + dims_to_string(ref.dims) + " vs " +
                        dims_to_string(test.dims));
  }
  ErrorMetrics m;
  if (ref.size() == 0) return m;
  double signal = 0.0;
  double noise = 0.0;
  bool saw_nan = false;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double r = ref.data[i];
    const double d = r - static_cast<double>(test.data[i]);
    signal += r * r;
    noise += d * d;
    m.max_abs = std::fmax(m.max_abs, std::fabs(d));
    saw_nan = saw_nan || std::isnan(d);
  }
  if (saw_nan) m.max_abs = std::numeric_limits<double>::quiet_NaN();
  m.mse = noise / static_cast<double>(ref.size());
  if (std::isnan(noise)) {
    m.sqnr_db = noise;
  } else if (noise == 0.0) {
    m.sqnr_db = std::numeric_limits<double>::infinity();
  } else {
    m.sqnr_db = 10.0 * std::log10(signal / noise);
  }
  return m;
}

}  // namespace mxkit
