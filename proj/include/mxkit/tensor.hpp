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

// Tensor-level quantization under per-tensor, per-channel and MX scale
// sharing. Scales are stored expanded (one entry per element, repeated
// across each sharing group); compact_scales() removes the repetition.
//
// Layouts: activations N x H x W x C, weights K x C x H' x W'. The principal
// (scale-sharing) dimension is the input channel axis C.

#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "mxkit/convert.hpp"
#include "mxkit/error.hpp"
#include "mxkit/formats.hpp"
#include "mxkit/scale.hpp"
#include "mxkit/wide.hpp"

namespace mxkit {

inline std::size_t element_count(const std::vector<std::size_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string dims_to_string(const std::vector<std::size_t>& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i != 0) s += "x";
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

/// Dense row-major binary32 tensor.
struct Tensor {
  std::vector<std::size_t> dims;
  std::vector<float> data;

  Tensor() = default;
  Tensor(std::vector<std::size_t> d, std::vector<float> values)
      : dims(std::move(d)), data(std::move(values)) {
    if (data.size() != element_count(dims)) {
      throw ShapeMismatch("tensor data length " + std::to_string(data.size()) +
                          " does not match dims " + dims_to_string(dims));
    }
  }

  static Tensor zeros(std::vector<std::size_t> d) {
    const std::size_t n = element_count(d);
    return Tensor(std::move(d), std::vector<float>(n, 0.0f));
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return dims.size(); }

  float& at4(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    return data[((a * dims[1] + b) * dims[2] + c) * dims[3] + d];
  }
  float at4(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
    return data[((a * dims[1] + b) * dims[2] + c) * dims[3] + d];
  }
};

inline constexpr std::size_t kActivationChannelAxis = 3;
inline constexpr std::size_t kWeightChannelAxis = 1;

enum class Regime : std::uint8_t { PerTensor, PerChannel, MX };

inline std::string regime_name(Regime r) {
  switch (r) {
    case Regime::PerTensor:
      return "per-tensor";
    case Regime::PerChannel:
      return "per-channel";
    case Regime::MX:
      return "mx";
  }
  return "?";
}

inline Regime parse_regime(std::string_view s) {
  if (s == "per-tensor" || s == "tensor") return Regime::PerTensor;
  if (s == "per-channel" || s == "channel") return Regime::PerChannel;
  if (s == "mx") return Regime::MX;
  throw ParseError("unknown regime '" + std::string(s) + "'");
}

struct QuantScheme {
  Regime regime = Regime::MX;
  int block_size = 32;  // MX only
  ElementFormat element = formats::int8();
  ScaleRule scale_rule{};

  static QuantScheme per_tensor(ElementFormat fmt, ScaleRule rule = {}) {
    return {Regime::PerTensor, 0, fmt, rule};
  }
  static QuantScheme per_channel(ElementFormat fmt, ScaleRule rule = {}) {
    return {Regime::PerChannel, 0, fmt, rule};
  }
  static QuantScheme mx(ElementFormat fmt, int k, ScaleRule rule = {}) {
    (void)BlockFormat(fmt, k);  // validates k
    return {Regime::MX, k, fmt, rule};
  }

  std::string describe() const {
    std::string s = regime_name(regime) + " " + element.spec_string();
    if (regime == Regime::MX) s += " k=" + std::to_string(block_size);
    return s;
  }

  friend bool operator==(const QuantScheme&, const QuantScheme&) = default;
};

struct QuantizedTensor {
  std::vector<std::size_t> dims;
  std::size_t axis = 0;  // principal dimension
  QuantScheme scheme;
  std::vector<Code> codes;
  std::vector<ScaleE8M0> scales;  // expanded, same length as codes
};

/// dims viewed as outer x channels x inner around `axis`.
struct AxisSplit {
  std::size_t outer = 1;
  std::size_t channels = 1;
  std::size_t inner = 1;
};

inline AxisSplit split_axis(const std::vector<std::size_t>& dims, std::size_t axis) {
  if (axis >= dims.size()) {
    throw ShapeMismatch("principal axis " + std::to_string(axis) + " out of range for " +
                        dims_to_string(dims));
  }
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= dims[i];
  s.channels = dims[axis];
  for (std::size_t i = axis + 1; i < dims.size(); ++i) s.inner *= dims[i];
  return s;
}

/// Calls fn(indices) once per shared-scale group, in compact-scale order:
/// per-tensor one group; per-channel one per c; MX one per (outer, c-block,
/// inner), matching the reshaped K x ceil(C/k) x H' x W' x k layout.
template <class Fn>
void for_each_scale_group(const std::vector<std::size_t>& dims, std::size_t axis,
                          const QuantScheme& scheme, Fn&& fn) {
  const AxisSplit s = split_axis(dims, axis);
  std::vector<std::size_t> idx;
  switch (scheme.regime) {
    case Regime::PerTensor:
      idx.resize(element_count(dims));
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      fn(idx);
      return;
    case Regime::PerChannel:
      for (std::size_t c = 0; c < s.channels; ++c) {
        idx.clear();
        for (std::size_t o = 0; o < s.outer; ++o) {
          for (std::size_t i = 0; i < s.inner; ++i) idx.push_back((o * s.channels + c) * s.inner + i);
        }
        fn(idx);
      }
      return;
    case Regime::MX: {
      const auto k = static_cast<std::size_t>(scheme.block_size);
      const std::size_t blocks = (s.channels + k - 1) / k;
      for (std::size_t o = 0; o < s.outer; ++o) {
        for (std::size_t b = 0; b < blocks; ++b) {
          for (std::size_t i = 0; i < s.inner; ++i) {
            idx.clear();
            for (std::size_t c = b * k; c < std::min(s.channels, b * k + k); ++c) {
              idx.push_back((o * s.channels + c) * s.inner + i);
            }
            fn(idx);
          }
        }
      }
      return;
    }
  }
}

/// Splits the principal axis C into ceil(C/k) x k, moving the k lanes to the
/// innermost position and zero-padding so that the padded C is a multiple of k.
inline Tensor reshape_pad_principal(const Tensor& t, std::size_t axis, std::size_t k) {
  if (k == 0) throw ShapeMismatch("reshape_pad_principal: k must be positive");
  const AxisSplit s = split_axis(t.dims, axis);
  const std::size_t blocks = (s.channels + k - 1) / k;
  std::vector<std::size_t> dims = t.dims;
  dims[axis] = blocks;
  dims.push_back(k);
  Tensor out = Tensor::zeros(dims);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t c = 0; c < s.channels; ++c) {
      for (std::size_t i = 0; i < s.inner; ++i) {
        const std::size_t b = c / k;
        const std::size_t p = c % k;
        out.data[((o * blocks + b) * s.inner + i) * k + p] =
            t.data[(o * s.channels + c) * s.inner + i];
      }
    }
  }
  return out;
}

/// Inverse of reshape_pad_principal: drops padding, restoring C channels.
inline Tensor unpad_principal(const Tensor& padded, std::size_t axis, std::size_t channels) {
  if (padded.rank() < 2 || axis + 1 >= padded.rank()) {
    throw ShapeMismatch("unpad_principal: tensor " + dims_to_string(padded.dims) +
                        " has no block axis");
  }
  const std::size_t k = padded.dims.back();
  std::vector<std::size_t> dims(padded.dims.begin(), padded.dims.end() - 1);
  const std::size_t blocks = dims[axis];
  if (blocks * k < channels || (channels + k - 1) / k != blocks) {
    throw ShapeMismatch("unpad_principal: " + std::to_string(channels) +
                        " channels do not fit the padded layout");
  }
  dims[axis] = channels;
  const AxisSplit s = split_axis(dims, axis);
  Tensor out = Tensor::zeros(dims);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t c = 0; c < s.channels; ++c) {
      for (std::size_t i = 0; i < s.inner; ++i) {
        out.data[(o * s.channels + c) * s.inner + i] =
            padded.data[((o * blocks + c / k) * s.inner + i) * k + c % k];
      }
    }
  }
  return out;
}

/// Quantizes t with zero point 0 and one E8M0 scale per sharing group.
/// Padding lanes of a partial MX block are zeros and never affect the scale.
inline QuantizedTensor quantize_tensor(const Tensor& t, const QuantScheme& scheme,
                                       std::size_t axis) {
  QuantizedTensor q;
  q.dims = t.dims;
  q.axis = axis;
  q.scheme = scheme;
  q.codes.assign(t.size(), Code{0});
  q.scales.assign(t.size(), ScaleE8M0::one());
  std::vector<ExactValue> values;
  for_each_scale_group(t.dims, axis, scheme, [&](const std::vector<std::size_t>& idx) {
    values.clear();
    for (std::size_t i : idx) values.push_back(ExactValue::from_float(t.data[i]));
    const QuantizedGroup g = quantize_values(values, scheme.element, scheme.scale_rule);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      q.codes[idx[j]] = g.codes[j];
      q.scales[idx[j]] = g.scale;
    }
  });
  return q;
}

inline Tensor dequantize_tensor(const QuantizedTensor& q) {
  Tensor out = Tensor::zeros(q.dims);
  for (std::size_t i = 0; i < q.codes.size(); ++i) {
    out.data[i] = to_binary32(dequantize_element(q.scheme.element, q.scales[i], q.codes[i]));
  }
  return out;
}

/// One scale per sharing group, in for_each_scale_group order.
inline std::vector<ScaleE8M0> compact_scales(const QuantizedTensor& q) {
  std::vector<ScaleE8M0> out;
  for_each_scale_group(q.dims, q.axis, q.scheme, [&](const std::vector<std::size_t>& idx) {
    out.push_back(idx.empty() ? ScaleE8M0::one() : q.scales[idx.front()]);
  });
  return out;
}

/// Rebuilds the expanded scale tensor from compact scales.
inline std::vector<ScaleE8M0> expand_scales(const std::vector<std::size_t>& dims, std::size_t axis,
                                            const QuantScheme& scheme,
                                            const std::vector<ScaleE8M0>& compact) {
  std::vector<ScaleE8M0> out(element_count(dims), ScaleE8M0::one());
  std::size_t g = 0;
  for_each_scale_group(dims, axis, scheme, [&](const std::vector<std::size_t>& idx) {
    if (g >= compact.size()) throw ShapeMismatch("expand_scales: too few compact scales");
    for (std::size_t i : idx) out[i] = compact[g];
    ++g;
  });
  if (g != compact.size()) throw ShapeMismatch("expand_scales: too many compact scales");
  return out;
}

/// True when every sharing group holds a single repeated scale.
inline bool scales_consistent(const QuantizedTensor& q) {
  bool ok = q.scales.size() == element_count(q.dims);
  if (!ok) return false;
  for_each_scale_group(q.dims, q.axis, q.scheme, [&](const std::vector<std::size_t>& idx) {
    for (std::size_t i : idx) ok = ok && q.scales[i] == q.scales[idx.front()];
  });
  return ok;
}

}  // namespace mxkit
