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

// 2D convolution (valid padding, stride 1) in three forms: a binary64
// reference on real-valued tensors, and decompositions of quantized tensors
// into exact (Kulisch) sums within scale boundaries plus normalising adds
// across them.
//
//   out[n,h,w,l] = sum_c sum_h' sum_w' A[n, h+h', w+w', c] * F[l, c, h', w']

#include <cstddef>
#include <string>
#include <vector>

#include "mxkit/dot.hpp"
#include "mxkit/dotgeneral.hpp"
#include "mxkit/error.hpp"
#include "mxkit/tensor.hpp"
#include "mxkit/wide.hpp"

namespace mxkit {

struct ConvGeometry {
  std::size_t n, h, w, c;     // activations
  std::size_t k, kh, kw;      // filters
  std::size_t out_h, out_w;

  std::vector<std::size_t> output_dims() const { return {n, out_h, out_w, k}; }
  std::size_t outputs() const { return n * out_h * out_w * k; }
};

inline ConvGeometry conv_geometry(const std::vector<std::size_t>& act,
                                  const std::vector<std::size_t>& filt) {
  if (act.size() != 4 || filt.size() != 4) {
    throw ShapeMismatch("conv2d: expected rank-4 NHWC activations and KCHW filters, got " +
                        dims_to_string(act) + " and " + dims_to_string(filt));
  }
  if (act[3] != filt[1] || filt[2] > act[1] || filt[3] > act[2] || filt[2] == 0 ||
      filt[3] == 0) {
    throw ShapeMismatch("conv2d: incompatible shapes " + dims_to_string(act) + " and " +
                        dims_to_string(filt));
  }
  return {act[0], act[1], act[2], act[3], filt[0], filt[2], filt[3],
          act[1] - filt[2] + 1, act[2] - filt[3] + 1};
}

/// Direct summation in binary64, rounded once to binary32 per output.
inline Tensor conv2d_reference(const Tensor& a, const Tensor& f) {
  const ConvGeometry g = conv_geometry(a.dims, f.dims);
  Tensor out = Tensor::zeros(g.output_dims());
  for (std::size_t n = 0; n < g.n; ++n) {
    for (std::size_t h = 0; h < g.out_h; ++h) {
      for (std::size_t w = 0; w < g.out_w; ++w) {
        for (std::size_t l = 0; l < g.k; ++l) {
          double acc = 0.0;
          for (std::size_t c = 0; c < g.c; ++c) {
            for (std::size_t i = 0; i < g.kh; ++i) {
              for (std::size_t j = 0; j < g.kw; ++j) {
                acc += static_cast<double>(a.at4(n, h + i, w + j, c)) *
                       static_cast<double>(f.at4(l, c, i, j));
              }
            }
          }
          out.at4(n, h, w, l) = static_cast<float>(acc);
        }
      }
    }
  }
  return out;
}

/// Unrounded convolution outputs, one reduction result per output element.
struct ConvResult {
  std::vector<std::size_t> dims;
  std::vector<DotGeneralResult> outputs;

  Tensor to_tensor() const {
    Tensor t = Tensor::zeros(dims);
    for (std::size_t i = 0; i < outputs.size(); ++i) t.data[i] = to_binary32(outputs[i].value());
    return t;
  }
};

namespace detail {

inline void check_operands(const QuantizedTensor& a, const QuantizedTensor& f, Regime regime) {
  if (a.scheme.regime != regime || f.scheme.regime != regime) {
    throw SchemeMismatch("conv2d: expected " + regime_name(regime) + " operands, got " +
                         a.scheme.describe() + " and " + f.scheme.describe());
  }
  if (a.scheme.element != f.scheme.element || a.scheme.block_size != f.scheme.block_size) {
    throw SchemeMismatch("conv2d: operands use different schemes: " + a.scheme.describe() +
                         " and " + f.scheme.describe());
  }
  if (regime != Regime::PerTensor &&
      (a.axis != kActivationChannelAxis || f.axis != kWeightChannelAxis)) {
    throw SchemeMismatch("conv2d: scales must be shared along the input-channel axis");
  }
}

inline std::size_t act_index(const ConvGeometry& g, std::size_t n, std::size_t h, std::size_t w,
                             std::size_t c) {
  return ((n * g.h + h) * g.w + w) * g.c + c;
}

inline std::size_t filt_index(const ConvGeometry& g, std::size_t l, std::size_t c, std::size_t i,
                              std::size_t j) {
  return ((l * g.c + c) * g.kh + i) * g.kw + j;
}

template <class PerOutput>
ConvResult for_each_output(const ConvGeometry& g, PerOutput&& per_output) {
  ConvResult r;
  r.dims = g.output_dims();
  r.outputs.reserve(g.outputs());
  for (std::size_t n = 0; n < g.n; ++n) {
    for (std::size_t h = 0; h < g.out_h; ++h) {
      for (std::size_t w = 0; w < g.out_w; ++w) {
        for (std::size_t l = 0; l < g.k; ++l) r.outputs.push_back(per_output(n, h, w, l));
      }
    }
  }
  return r;
}

}  // namespace detail

/// MX convolution: for each (c-block, h', w') an exact Dot over the k lanes
/// of the block; the Dot outputs, offset by their scale exponents, are summed
/// by normalising adders in (c-block, h', w') order.
inline ConvResult conv2d_mx_exact(const QuantizedTensor& a, const QuantizedTensor& f,
                                  const NormAddConfig& cfg) {
  detail::check_operands(a, f, Regime::MX);
  const ConvGeometry g = conv_geometry(a.dims, f.dims);
  const auto k = static_cast<std::size_t>(a.scheme.block_size);
  const std::size_t blocks = (g.c + k - 1) / k;
  const ElementFormat& fmt = a.scheme.element;
  std::vector<Code> xa(k), xf(k);
  std::vector<DotResult> dots;
  return detail::for_each_output(g, [&](std::size_t n, std::size_t h, std::size_t w,
                                        std::size_t l) {
    dots.clear();
    for (std::size_t b = 0; b < blocks; ++b) {
      for (std::size_t i = 0; i < g.kh; ++i) {
        for (std::size_t j = 0; j < g.kw; ++j) {
          for (std::size_t p = 0; p < k; ++p) {
            const std::size_t c = b * k + p;
            xa[p] = c < g.c ? a.codes[detail::act_index(g, n, h + i, w + j, c)] : Code{0};
            xf[p] = c < g.c ? f.codes[detail::filt_index(g, l, c, i, j)] : Code{0};
          }
          const ScaleE8M0 t = a.scales[detail::act_index(g, n, h + i, w + j, b * k)];
          const ScaleE8M0 s = f.scales[detail::filt_index(g, l, b * k, i, j)];
          dots.push_back(dot_codes(xa, xf, fmt, t, s));
        }
      }
    }
    return reduce_dots(dots, cfg);
  });
}

inline Tensor conv2d_mx(const QuantizedTensor& a, const QuantizedTensor& f,
                        const NormAddConfig& cfg) {
  return conv2d_mx_exact(a, f, cfg).to_tensor();
}

/// Per-channel convolution: scales factor out of the h', w' sums (exact);
/// the per-channel partial sums are combined by normalising adders over c.
inline ConvResult conv2d_per_channel_exact(const QuantizedTensor& a, const QuantizedTensor& f,
                                           const NormAddConfig& cfg) {
  detail::check_operands(a, f, Regime::PerChannel);
  const ConvGeometry g = conv_geometry(a.dims, f.dims);
  const ElementFormat& fmt = a.scheme.element;
  std::vector<Code> xa(g.kh * g.kw), xf(g.kh * g.kw);
  std::vector<DotResult> dots;
  return detail::for_each_output(g, [&](std::size_t n, std::size_t h, std::size_t w,
                                        std::size_t l) {
    dots.clear();
    for (std::size_t c = 0; c < g.c; ++c) {
      for (std::size_t i = 0; i < g.kh; ++i) {
        for (std::size_t j = 0; j < g.kw; ++j) {
          xa[i * g.kw + j] = a.codes[detail::act_index(g, n, h + i, w + j, c)];
          xf[i * g.kw + j] = f.codes[detail::filt_index(g, l, c, i, j)];
        }
      }
      const ScaleE8M0 t = a.scales[detail::act_index(g, n, h, w, c)];
      const ScaleE8M0 s = f.scales[detail::filt_index(g, l, c, 0, 0)];
      dots.push_back(dot_codes(xa, xf, fmt, t, s));
    }
    return reduce_dots(dots, cfg);
  });
}

inline Tensor conv2d_per_channel(const QuantizedTensor& a, const QuantizedTensor& f,
                                 const NormAddConfig& cfg) {
  return conv2d_per_channel_exact(a, f, cfg).to_tensor();
}

/// Per-tensor convolution: one exact sum over (c, h', w') per output, the
/// two tensor scales applied once.
inline ConvResult conv2d_per_tensor_exact(const QuantizedTensor& a, const QuantizedTensor& f,
                                          const NormAddConfig& cfg) {
  detail::check_operands(a, f, Regime::PerTensor);
  const ConvGeometry g = conv_geometry(a.dims, f.dims);
  const ElementFormat& fmt = a.scheme.element;
  const std::size_t terms = g.c * g.kh * g.kw;
  std::vector<Code> xa(terms), xf(terms);
  const ScaleE8M0 t = a.scales.empty() ? ScaleE8M0::one() : a.scales.front();
  const ScaleE8M0 s = f.scales.empty() ? ScaleE8M0::one() : f.scales.front();
  return detail::for_each_output(g, [&](std::size_t n, std::size_t h, std::size_t w,
                                        std::size_t l) {
    std::size_t p = 0;
    for (std::size_t c = 0; c < g.c; ++c) {
      for (std::size_t i = 0; i < g.kh; ++i) {
        for (std::size_t j = 0; j < g.kw; ++j, ++p) {
          xa[p] = a.codes[detail::act_index(g, n, h + i, w + j, c)];
          xf[p] = f.codes[detail::filt_index(g, l, c, i, j)];
        }
      }
    }
    const DotResult d = dot_codes(xa, xf, fmt, t, s);
    return reduce_dots(std::span<const DotResult>(&d, 1), cfg);
  });
}

inline Tensor conv2d_per_tensor(const QuantizedTensor& a, const QuantizedTensor& f,
                                const NormAddConfig& cfg) {
  return conv2d_per_tensor_exact(a, f, cfg).to_tensor();
}

}  // namespace mxkit
