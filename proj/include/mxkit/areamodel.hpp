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

// FPGA area estimation for fully unrolled quantized layers.
//
// Multiplier arrays, normalising-adder trees and output normalisers are
// modelled as linear in their instance count. Integer (Kulisch) adder trees
// are summed adder by adder: an adder at tree level l adds (b + l)-bit
// outputs, so its cost is (b + l) times the per-bit unit cost.
//
// Area units are whatever the calibration is expressed in (typically LUTs).

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mxkit/dot.hpp"
#include "mxkit/error.hpp"
#include "mxkit/formats.hpp"
#include "mxkit/tensor.hpp"

namespace mxkit {

struct LinearModel {
  double slope = 0.0;
  double intercept = 0.0;

  double operator()(double n) const { return slope * n + intercept; }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// Ordinary least squares over (n, area) points. Computed in exact rational
/// arithmetic from the binary64 inputs and rounded once, so collinear data
/// gives back its coefficients exactly.
inline LinearModel fit_linear(std::span<const std::pair<double, double>> points) {
  using boost::multiprecision::cpp_rational;
  if (points.size() < 2) throw Degenerate("fit_linear: need at least two points");
  auto exact = [](double d) {
    const ExactValue v = ExactValue::from_double(d);
    if (!v.is_finite()) throw Degenerate("fit_linear: non-finite point");
    cpp_rational r(v.significand());
    if (v.exponent() >= 0) return cpp_rational(r * (BigInt(1) << v.exponent()));
    return cpp_rational(r / (BigInt(1) << -v.exponent()));
  };
  cpp_rational sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    const cpp_rational rx = exact(x);
    const cpp_rational ry = exact(y);
    sx += rx;
    sy += ry;
    sxx += rx * rx;
    sxy += rx * ry;
  }
  const cpp_rational n(static_cast<long long>(points.size()));
  const cpp_rational denom = n * sxx - sx * sx;
  if (denom == 0) throw Degenerate("fit_linear: all abscissae are equal");
  const cpp_rational slope = (n * sxy - sx * sy) / denom;
  const cpp_rational intercept = (sy - slope * sx) / n;
  return {slope.convert_to<double>(), intercept.convert_to<double>()};
}

enum class AreaBlock : std::uint8_t { Multiplier, FpAdderTree, Normalizer, IntAdder };

inline std::string area_block_name(AreaBlock b) {
  switch (b) {
    case AreaBlock::Multiplier:
      return "multiplier";
    case AreaBlock::FpAdderTree:
      return "fp_adder_tree";
    case AreaBlock::Normalizer:
      return "normalizer";
    case AreaBlock::IntAdder:
      return "int_adder";
  }
  return "?";
}

/// Calibration coefficients. Linear models are keyed by element format name
/// ("e2m1", "int5", ...); the key "*" is a fallback for any format.
struct AreaCalibration {
  static constexpr const char* kAnyFormat = "*";

  std::map<std::string, LinearModel> multiplier;
  std::map<std::string, LinearModel> fp_adder_tree;
  std::map<std::string, LinearModel> normalizer;
  double int_adder_unit_cost = 1.0;

  const std::map<std::string, LinearModel>& table(AreaBlock b) const {
    switch (b) {
      case AreaBlock::Multiplier:
        return multiplier;
      case AreaBlock::FpAdderTree:
        return fp_adder_tree;
      default:
        return normalizer;
    }
  }
  std::map<std::string, LinearModel>& table(AreaBlock b) {
    return const_cast<std::map<std::string, LinearModel>&>(std::as_const(*this).table(b));
  }

  /// Model for `format_key` (or the "*" fallback); MissingCalibration if none.
  const LinearModel& lookup(AreaBlock b, const std::string& format_key) const {
    const auto& t = table(b);
    if (auto it = t.find(format_key); it != t.end()) return it->second;
    if (auto it = t.find(kAnyFormat); it != t.end()) return it->second;
    throw MissingCalibration("no " + area_block_name(b) + " calibration for format " +
                             format_key);
  }

  void validate() const {
    auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!ok(int_adder_unit_cost)) throw ParseError("int_adder unit cost must be finite and >= 0");
    for (AreaBlock b : {AreaBlock::Multiplier, AreaBlock::FpAdderTree, AreaBlock::Normalizer}) {
      for (const auto& [key, m] : table(b)) {
        if (!ok(m.slope) || !ok(m.intercept)) {
          throw ParseError(area_block_name(b) + " " + key +
                           ": coefficients must be finite and non-negative");
        }
      }
    }
  }

  /// Proxy calibration from bit-width costs, for use when no synthesis data
  /// is available. NOT measured: adders cost one unit per bit, multipliers
  /// grow with the square of the significand width plus the shifter into the
  /// b_int-bit fixed-point product, and a normalising adder is costed as
  /// three passes over its b_int + 12-bit datapath (align, add, normalise).
  static AreaCalibration proxy() {
    AreaCalibration c;
    c.int_adder_unit_cost = 1.0;
    for (const ElementFormat& f : formats::all_supported()) {
      const int b_int = product_width(f);
      const int sig = f.is_int() ? f.bits() : f.mantissa_bits() + 1;
      const double mult = f.is_int() ? double(sig * sig) : double(sig * sig + b_int);
      c.multiplier[f.name()] = {mult, 0.0};
      c.fp_adder_tree[f.name()] = {3.0 * (b_int + 12), 0.0};
      c.normalizer[f.name()] = {2.0 * (b_int + 9), 0.0};
    }
    return c;
  }

  friend bool operator==(const AreaCalibration&, const AreaCalibration&) = default;
};

namespace area_detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, int line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

}  // namespace area_detail

/// Calibration text: one `block_kind format slope intercept` record per
/// line; '#' starts a comment. block_kind is multiplier, fp_adder_tree,
/// normalizer or int_adder; format is a format name or '*'. For int_adder
/// the format must be '*', slope is the cost per adder output bit and the
/// intercept must be 0.
inline AreaCalibration parse_calibration(std::string_view text) {
  AreaCalibration c;
  c.int_adder_unit_cost = 0.0;
  bool have_int = false;
  std::istringstream is{std::string(text)};
  int lineno = 0;
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto tok = area_detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 4) {
      throw ParseError("line " + std::to_string(lineno) + ": expected 4 fields");
    }
    const double slope = area_detail::parse_double(tok[2], lineno);
    const double intercept = area_detail::parse_double(tok[3], lineno);
    const std::string& fmt = tok[1];
    if (fmt != AreaCalibration::kAnyFormat) (void)parse_element_format(fmt);
    if (tok[0] == "int_adder") {
      if (fmt != AreaCalibration::kAnyFormat || intercept != 0.0) {
        throw ParseError("line " + std::to_string(lineno) + ": int_adder takes '*' and intercept 0");
      }
      c.int_adder_unit_cost = slope;
      have_int = true;
      continue;
    }
    AreaBlock b;
    if (tok[0] == "multiplier") {
      b = AreaBlock::Multiplier;
    } else if (tok[0] == "fp_adder_tree") {
      b = AreaBlock::FpAdderTree;
    } else if (tok[0] == "normalizer") {
      b = AreaBlock::Normalizer;
    } else {
      throw ParseError("line " + std::to_string(lineno) + ": unknown block kind '" + tok[0] + "'");
    }
    c.table(b)[fmt] = {slope, intercept};
  }
  if (!have_int) throw ParseError("calibration has no int_adder record");
  c.validate();
  return c;
}

/// Deterministic text form; parse_calibration(write_calibration(c)) == c.
inline std::string write_calibration(const AreaCalibration& c) {
  std::string out = "# block_kind format slope intercept\n";
  out += "int_adder * " + area_detail::format_double(c.int_adder_unit_cost) + " 0\n";
  for (AreaBlock b : {AreaBlock::Multiplier, AreaBlock::FpAdderTree, AreaBlock::Normalizer}) {
    for (const auto& [key, m] : c.table(b)) {
      out += area_block_name(b) + " " + key + " " + area_detail::format_double(m.slope) + " " +
             area_detail::format_double(m.intercept) + "\n";
    }
  }
  return out;
}

inline AreaCalibration load_calibration_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open calibration file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_calibration(ss.str());
}

// ---------------------------------------------------------------------------
// Block models

/// Sum of adder areas in a pairwise integer adder tree over `leaves` inputs
/// of `input_width` bits. For leaves = 2^L this is
///   sum_{l=1..L} (leaves / 2^l) * (input_width + l) * unit_cost.
/// Other leaf counts pair adjacent nodes and carry an odd node up a level.
inline double area_int_adder_tree(std::size_t leaves, int input_width, const AreaCalibration& cal) {
  double bits = 0.0;
  int level = 0;
  for (std::size_t n = leaves; n > 1; n = (n + 1) / 2) {
    ++level;
    bits += static_cast<double>(n / 2) * (input_width + level);
  }
  return bits * cal.int_adder_unit_cost;
}

inline double area_multiplier_array(std::size_t n, const ElementFormat& fmt,
                                    const AreaCalibration& cal) {
  return cal.lookup(AreaBlock::Multiplier, fmt.name())(static_cast<double>(n));
}

inline double area_fp_adder_tree(std::size_t n, const AreaCalibration& cal,
                                 const std::string& format_key = AreaCalibration::kAnyFormat) {
  return cal.lookup(AreaBlock::FpAdderTree, format_key)(static_cast<double>(n));
}

inline double area_normalizer(std::size_t n_outputs, const AreaCalibration& cal,
                              const std::string& format_key = AreaCalibration::kAnyFormat) {
  return cal.lookup(AreaBlock::Normalizer, format_key)(static_cast<double>(n_outputs));
}

// ---------------------------------------------------------------------------
// Network estimates

struct LayerShape {
  enum class Kind : std::uint8_t { Conv2d, Linear };

  Kind kind = Kind::Linear;
  std::size_t out_channels = 1;  // K, or output features
  std::size_t in_channels = 1;   // C, or input features
  std::size_t kernel_h = 1;
  std::size_t kernel_w = 1;
  std::size_t out_h = 1;
  std::size_t out_w = 1;

  static LayerShape conv2d(std::size_t k, std::size_t c, std::size_t kh, std::size_t kw,
                           std::size_t oh, std::size_t ow) {
    return {Kind::Conv2d, k, c, kh, kw, oh, ow};
  }
  static LayerShape linear(std::size_t in, std::size_t out) {
    return {Kind::Linear, out, in, 1, 1, 1, 1};
  }

  std::size_t outputs() const { return out_channels * out_h * out_w; }
  std::size_t products_per_output() const { return in_channels * kernel_h * kernel_w; }

  void validate() const {
    if (out_channels == 0 || in_channels == 0 || kernel_h == 0 || kernel_w == 0 || out_h == 0 ||
        out_w == 0) {
      throw ShapeMismatch("layer dimensions must be positive");
    }
  }
};

/// Parses a layers file: `conv2d K C KH KW OH OW` or `linear IN OUT` per line,
/// '#' comments.
inline std::vector<LayerShape> parse_layers(std::string_view text) {
  std::vector<LayerShape> out;
  std::istringstream is{std::string(text)};
  int lineno = 0;
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto tok = area_detail::split_ws(line);
    if (tok.empty()) continue;
    std::vector<std::size_t> v;
    for (std::size_t i = 1; i < tok.size(); ++i) {
      std::size_t x = 0;
      const auto res = std::from_chars(tok[i].data(), tok[i].data() + tok[i].size(), x);
      if (res.ec != std::errc() || res.ptr != tok[i].data() + tok[i].size()) {
        throw ParseError("line " + std::to_string(lineno) + ": bad integer '" + tok[i] + "'");
      }
      v.push_back(x);
    }
    if (tok[0] == "conv2d" && v.size() == 6) {
      out.push_back(LayerShape::conv2d(v[0], v[1], v[2], v[3], v[4], v[5]));
    } else if (tok[0] == "linear" && v.size() == 2) {
      out.push_back(LayerShape::linear(v[0], v[1]));
    } else {
      throw ParseError("line " + std::to_string(lineno) + ": expected 'conv2d K C KH KW OH OW' or 'linear IN OUT'");
    }
    out.back().validate();
  }
  return out;
}

inline std::vector<LayerShape> load_layers_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open layers file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_layers(ss.str());
}

struct AreaBreakdown {
  std::size_t multipliers = 0;
  std::size_t int_adders = 0;
  std::size_t norm_adders = 0;  // normalising adders inside reductions
  std::size_t normalized_outputs = 0;
  double multiplier_area = 0.0;
  double int_adder_area = 0.0;
  double norm_adder_area = 0.0;
  double normalizer_area = 0.0;

  double total() const { return multiplier_area + int_adder_area + norm_adder_area + normalizer_area; }

  AreaBreakdown& operator+=(const AreaBreakdown& o) {
    multipliers += o.multipliers;
    int_adders += o.int_adders;
    norm_adders += o.norm_adders;
    normalized_outputs += o.normalized_outputs;
    multiplier_area += o.multiplier_area;
    int_adder_area += o.int_adder_area;
    norm_adder_area += o.norm_adder_area;
    normalizer_area += o.normalizer_area;
    return *this;
  }
};

struct NetworkArea {
  std::vector<AreaBreakdown> layers;
  AreaBreakdown total;
  /// FP8 element formats need very wide exact accumulators (b_int grows as
  /// 2^E), so their estimates are flagged.
  bool fp8_warning = false;
};

/// Leaf counts of the exact (integer) adder trees that one output's
/// reduction splits into. Zero-padded lanes of a partial MX block are
/// constants and are not counted.
inline std::vector<std::size_t> exact_tree_leaves(const LayerShape& layer, const QuantScheme& scheme) {
  const std::size_t c = layer.in_channels;
  const std::size_t spatial = layer.kernel_h * layer.kernel_w;
  std::vector<std::size_t> leaves;
  switch (scheme.regime) {
    case Regime::PerTensor:
      leaves.push_back(c * spatial);
      break;
    case Regime::PerChannel:
      leaves.assign(c, spatial);
      break;
    case Regime::MX: {
      const auto k = static_cast<std::size_t>(scheme.block_size);
      for (std::size_t s = 0; s < spatial; ++s) {
        for (std::size_t b = 0; b < c / k; ++b) leaves.push_back(k);
        if (c % k != 0) leaves.push_back(c % k);
      }
      break;
    }
  }
  return leaves;
}

inline AreaBreakdown estimate_layer_area(const LayerShape& layer, const QuantScheme& scheme,
                                         const AreaCalibration& cal) {
  layer.validate();
  const ElementFormat& fmt = scheme.element;
  const int b_int = product_width(fmt);
  const std::size_t outputs = layer.outputs();
  const std::vector<std::size_t> trees = exact_tree_leaves(layer, scheme);

  AreaBreakdown a;
  a.multipliers = outputs * layer.products_per_output();
  a.multiplier_area = area_multiplier_array(a.multipliers, fmt, cal);
  double per_output_int = 0.0;
  std::size_t per_output_int_adders = 0;
  for (std::size_t leaves : trees) {
    per_output_int += area_int_adder_tree(leaves, b_int, cal);
    per_output_int_adders += leaves - 1;
  }
  a.int_adders = outputs * per_output_int_adders;
  a.int_adder_area = static_cast<double>(outputs) * per_output_int;
  a.norm_adders = outputs * (trees.size() - 1);
  if (a.norm_adders > 0) a.norm_adder_area = area_fp_adder_tree(a.norm_adders, cal, fmt.name());
  a.normalized_outputs = outputs;
  a.normalizer_area = area_normalizer(outputs, cal, fmt.name());
  return a;
}

/// Area of unrolling every listed layer under one quantization scheme; other
/// operations are ignored.
inline NetworkArea estimate_network_area(std::span<const LayerShape> layers,
                                         const QuantScheme& scheme, const AreaCalibration& cal) {
  NetworkArea net;
  net.fp8_warning = scheme.element.is_fp() && scheme.element.bits() == 8;
  for (const LayerShape& l : layers) {
    net.layers.push_back(estimate_layer_area(l, scheme, cal));
    net.total += net.layers.back();
  }
  return net;
}

}  // namespace mxkit
