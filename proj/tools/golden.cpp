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

#include "golden.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mxkit/convert.hpp"
#include "mxkit/dot.hpp"
#include "mxkit/dotgeneral.hpp"
#include "mxkit/error.hpp"
#include "mxkit/random.hpp"

namespace mxkit::cli {
namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_digits_for(int bits) { return (bits + 3) / 4; }

std::string hex_fixed(BigInt v, int digits) {
  std::string s(static_cast<std::size_t>(digits), '0');
  for (int i = digits - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kHexDigits[static_cast<unsigned>(v & 15)];
    v >>= 4;
  }
  return s;
}

std::string twos_hex(const BigInt& v, int width) {
  const BigInt modulus = BigInt(1) << width;
  BigInt u = v % modulus;
  if (u < 0) u += modulus;
  return hex_fixed(u, hex_digits_for(width));
}

BigInt parse_hex(const std::string& s) {
  if (s.empty()) throw ParseError("empty hex field");
  BigInt v = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      d = c - 'a' + 10;
    } else {
      throw ParseError("bad hex digit in '" + s + "'");
    }
    v = (v << 4) | d;
  }
  return v;
}

BigInt parse_twos(const std::string& s, int width) {
  if (static_cast<int>(s.size()) != hex_digits_for(width)) {
    throw ParseError("field '" + s + "' is not " + std::to_string(hex_digits_for(width)) + " hex digits");
  }
  const BigInt u = parse_hex(s);
  if (u >> width != 0) throw ParseError("field '" + s + "' exceeds " + std::to_string(width) + " bits");
  return bit_test(u, static_cast<unsigned>(width - 1)) ? BigInt(u - (BigInt(1) << width)) : u;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

long long parse_int(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ParseError("bad integer '" + s + "'");
  }
  if (used != s.size()) throw ParseError("bad integer '" + s + "'");
  return v;
}

std::string scale_hex(ScaleE8M0 s) { return hex_fixed(s.byte, 2); }

ScaleE8M0 parse_scale(const std::string& s) {
  if (s.size() != 2) throw ParseError("scale '" + s + "' is not two hex digits");
  return ScaleE8M0{static_cast<std::uint8_t>(parse_hex(s).convert_to<unsigned>())};
}

std::string lanes_hex(const std::vector<Code>& codes, const ElementFormat& fmt) {
  std::vector<std::string> parts;
  parts.reserve(codes.size());
  for (Code c : codes) parts.push_back(hex_fixed(c, hex_digits_for(fmt.bits())));
  return join(parts, ',');
}

std::vector<Code> parse_lanes(const std::string& s, const ElementFormat& fmt, int k) {
  std::vector<Code> out;
  for (const std::string& p : split(s, ',')) {
    if (static_cast<int>(p.size()) != hex_digits_for(fmt.bits())) {
      throw ParseError("lane '" + p + "' has the wrong width for " + fmt.name());
    }
    const BigInt v = parse_hex(p);
    if (v >= fmt.code_count()) throw ParseError("lane '" + p + "' out of range for " + fmt.name());
    out.push_back(static_cast<Code>(v.convert_to<unsigned>()));
  }
  if (static_cast<int>(out.size()) != k) throw ParseError("expected " + std::to_string(k) + " lanes");
  return out;
}

std::string flags_text(const SpecialFlags& f) {
  if (f.nan) return "nan";
  if (f.inf_sign > 0) return "+inf";
  if (f.inf_sign < 0) return "-inf";
  return "-";
}

std::string rule_text(const ScaleRule& r) {
  return r.method == ScaleRule::Method::MaxPow2 ? "maxpow2" : "fixed:" + scale_hex(r.fixed);
}

ScaleRule parse_rule(const std::string& s) {
  if (s == "maxpow2") return ScaleRule::max_pow2();
  if (s.rfind("fixed:", 0) == 0) return ScaleRule::fixed_scale(parse_scale(s.substr(6)));
  throw ParseError("bad scale rule '" + s + "'");
}

int parse_width(const std::string& s) {
  const long long w = parse_int(s);
  if (w < 2 || w > 4096) throw ParseError("bad mantissa width '" + s + "'");
  return static_cast<int>(w);
}

BlockFormat parse_block(const std::string& fmt, const std::string& k) {
  return BlockFormat(parse_element_format(fmt), static_cast<int>(parse_int(k)));
}

std::vector<std::string> expect_fields(const std::vector<std::string>& f, std::size_t inputs) {
  if (f.size() < inputs) throw ParseError(f[0] + " record needs " + std::to_string(inputs) + " input fields");
  return {f.begin(), f.begin() + static_cast<std::ptrdiff_t>(inputs)};
}

// ---------------------------------------------------------------------------
// Record evaluation: inputs in, complete line out.

std::string eval_dot(std::vector<std::string> in) {
  const BlockFormat bf = parse_block(in[1], in[2]);
  const ScaleE8M0 sa = parse_scale(in[3]);
  const ScaleE8M0 sb = parse_scale(in[5]);
  const auto a = parse_lanes(in[4], bf.element, bf.k);
  const auto b = parse_lanes(in[6], bf.element, bf.k);
  const DotResult r = dot_codes(a, b, bf.element, sa, sb);
  in.push_back(twos_hex(r.acc.raw(), r.acc.width()));
  in.push_back(std::to_string(r.acc.lsb_exponent()));
  in.push_back(scale_hex(r.combined_scale));
  in.push_back(flags_text(r.flags));
  in.push_back(r.overflow ? "1" : "0");
  return join(in, '\t');
}

std::string eval_dotgeneral(std::vector<std::string> in) {
  const BlockFormat bf = parse_block(in[1], in[2]);
  const NormAddConfig cfg{parse_width(in[3])};
  auto blocks = [&](const std::string& scales, const std::string& lanes) {
    const auto s = split(scales, ',');
    const auto l = split(lanes, '/');
    if (s.size() != l.size()) throw ParseError("scale and block counts differ");
    std::vector<MxBlock> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      out.push_back(MxBlock{parse_scale(s[i]), parse_lanes(l[i], bf.element, bf.k)});
    }
    return out;
  };
  const std::vector<MxBlock> x = blocks(in[4], in[5]);
  const std::vector<MxBlock> y = blocks(in[6], in[7]);
  const DotGeneralResult r = dot_general(x, y, bf, cfg);
  in.push_back(twos_hex(r.sum.mantissa, cfg.mantissa_width));
  in.push_back(std::to_string(r.sum.exponent));
  in.push_back(flags_text(r.flags));
  return join(in, '\t');
}

std::string eval_quantize(std::vector<std::string> in) {
  const BlockFormat bf = parse_block(in[1], in[2]);
  const ScaleRule rule = parse_rule(in[3]);
  std::vector<float> values;
  for (const std::string& p : split(in[4], ',')) {
    if (p.size() != 8) throw ParseError("binary32 lane '" + p + "' is not 8 hex digits");
    values.push_back(std::bit_cast<float>(parse_hex(p).convert_to<std::uint32_t>()));
  }
  const MxBlock b = quantize_block(std::span<const float>(values), bf, rule);
  in.push_back(scale_hex(b.scale));
  in.push_back(lanes_hex(b.codes, bf.element));
  return join(in, '\t');
}

std::string eval_normadd(std::vector<std::string> in) {
  const NormAddConfig cfg{parse_width(in[1])};
  const NormOperand x{parse_twos(in[2], cfg.mantissa_width), static_cast<int>(parse_int(in[3]))};
  const NormOperand y{parse_twos(in[4], cfg.mantissa_width), static_cast<int>(parse_int(in[5]))};
  const NormOperand r = norm_add(x, y, cfg);
  in.push_back(twos_hex(r.mantissa, cfg.mantissa_width));
  in.push_back(std::to_string(r.exponent));
  return join(in, '\t');
}

// ---------------------------------------------------------------------------
// Record construction

std::string dot_inputs(const BlockFormat& bf, ScaleE8M0 sa, const std::vector<Code>& a, ScaleE8M0 sb,
                       const std::vector<Code>& b) {
  return join({"dot", bf.element.spec_string(), std::to_string(bf.k), scale_hex(sa), lanes_hex(a, bf.element),
               scale_hex(sb), lanes_hex(b, bf.element)},
              '\t');
}

std::string dotgeneral_inputs(const BlockFormat& bf, int width, const std::vector<MxBlock>& x,
                              const std::vector<MxBlock>& y) {
  auto scales = [](const std::vector<MxBlock>& v) {
    std::vector<std::string> s;
    for (const MxBlock& b : v) s.push_back(scale_hex(b.scale));
    return join(s, ',');
  };
  auto lanes = [&](const std::vector<MxBlock>& v) {
    std::vector<std::string> s;
    for (const MxBlock& b : v) s.push_back(lanes_hex(b.codes, bf.element));
    return join(s, '/');
  };
  return join({"dotgeneral", bf.element.spec_string(), std::to_string(bf.k), std::to_string(width), scales(x),
               lanes(x), scales(y), lanes(y)},
              '\t');
}

// Short input lists are padded with zeros to the block size.
std::string quantize_inputs(const BlockFormat& bf, const ScaleRule& rule, std::vector<float> v) {
  v.resize(static_cast<std::size_t>(bf.k), 0.0f);
  std::vector<std::string> lanes;
  for (float f : v) lanes.push_back(hex_fixed(std::bit_cast<std::uint32_t>(f), 8));
  return join({"quantize", bf.element.spec_string(), std::to_string(bf.k), rule_text(rule), join(lanes, ',')}, '\t');
}

std::string normadd_inputs(int width, const NormOperand& x, const NormOperand& y) {
  return join({"normadd", std::to_string(width), twos_hex(x.mantissa, width), std::to_string(x.exponent),
               twos_hex(y.mantissa, width), std::to_string(y.exponent)},
              '\t');
}

class Generator {
 public:
  explicit Generator(const GoldenOptions& opts) : opts_(opts), rng_(opts.seed) {}

  std::vector<std::string> run() {
    std::vector<std::string> inputs;
    for (const ElementFormat& f : opts_.formats) directed_for_format(f, inputs);
    if (wants(GoldenOp::NormAdd)) directed_normadd(inputs);
    if (inputs.size() > opts_.count) inputs.resize(opts_.count);
    std::size_t i = 0;
    while (inputs.size() < opts_.count) {
      const GoldenOp op = opts_.ops[i % opts_.ops.size()];
      const ElementFormat& f = opts_.formats[(i / opts_.ops.size()) % opts_.formats.size()];
      ++i;
      switch (op) {
        case GoldenOp::Dot:
          inputs.push_back(random_dot(f));
          break;
        case GoldenOp::DotGeneral:
          inputs.push_back(random_dotgeneral(f));
          break;
        case GoldenOp::Quantize:
          inputs.push_back(random_quantize(f));
          break;
        case GoldenOp::NormAdd:
          inputs.push_back(random_normadd());
          break;
      }
    }
    std::vector<std::string> records;
    records.reserve(inputs.size());
    for (const std::string& in : inputs) {
      const std::string line = recompute_golden_record(in);
      if (recompute_golden_record(line) != line) {
        throw std::logic_error("golden record failed its self-check: " + line);
      }
      records.push_back(line);
    }
    return records;
  }

 private:
  bool wants(GoldenOp op) const {
    for (GoldenOp o : opts_.ops) {
      if (o == op) return true;
    }
    return false;
  }

  int pick_k(std::initializer_list<int> choices) {
    if (opts_.block_size) return *opts_.block_size;
    return *(choices.begin() + rng_.below(choices.size()));
  }

  Code finite_code(const ElementFormat& f) {
    while (true) {
      const Code c = static_cast<Code>(rng_.below(f.code_count()));
      if (!decode_fast(f, c).is_special()) return c;
    }
  }

  Code lane_code(const ElementFormat& f) {
    if (f.has_nan() && rng_.below(256) == 0) return static_cast<Code>(rng_.below(f.code_count()));
    return finite_code(f);
  }

  ScaleE8M0 random_scale() {
    const auto r = rng_.below(64);
    if (r == 0) return ScaleE8M0::nan();
    if (r == 1) return ScaleE8M0{0};
    if (r == 2) return ScaleE8M0{254};
    return ScaleE8M0{static_cast<std::uint8_t>(110 + rng_.below(36))};
  }

  MxBlock random_block(const ElementFormat& f, int k) {
    MxBlock b{random_scale(), {}};
    for (int i = 0; i < k; ++i) b.codes.push_back(lane_code(f));
    return b;
  }

  std::string random_dot(const ElementFormat& f) {
    const BlockFormat bf(f, pick_k({4, 8, 16, 32, 64}));
    const MxBlock a = random_block(f, bf.k);
    const MxBlock b = random_block(f, bf.k);
    return dot_inputs(bf, a.scale, a.codes, b.scale, b.codes);
  }

  std::string random_dotgeneral(const ElementFormat& f) {
    const BlockFormat bf(f, pick_k({4, 8, 16, 32}));
    const std::size_t c = 1 + rng_.below(4);
    std::vector<MxBlock> x, y;
    for (std::size_t i = 0; i < c; ++i) {
      x.push_back(random_block(f, bf.k));
      y.push_back(random_block(f, bf.k));
    }
    const int width = rng_.below(2) == 0 ? default_norm_add_config(bf).mantissa_width
                                         : 3 + static_cast<int>(rng_.below(40));
    return dotgeneral_inputs(bf, width, x, y);
  }

  // Midpoint between two adjacent non-negative finite values of f.
  ExactValue random_midpoint(const ElementFormat& f) {
    while (true) {
      const Code c = static_cast<Code>(rng_.below(f.code_count() / 2));
      const Code next = static_cast<Code>(c + 1);
      if (next >= f.code_count() / 2) continue;
      const ExactValue lo = decode_element(f, c);
      const ExactValue hi = decode_element(f, next);
      if (!lo.is_finite() || !hi.is_finite()) continue;
      return exact_add(lo, hi).scaled_by_pow2(-1);
    }
  }

  float random_lane(const ElementFormat& f, int scale_exp) {
    const auto r = rng_.below(64);
    if (r == 0) return std::numeric_limits<float>::quiet_NaN();
    if (r == 1) return std::numeric_limits<float>::infinity();
    if (r == 2) return -std::numeric_limits<float>::infinity();
    if (r < 6) return 0.0f;
    if (r < 14) {
      const ExactValue m = random_midpoint(f).scaled_by_pow2(scale_exp);
      return to_binary32(rng_.below(2) ? m.negated() : m);
    }
    const int e = std::clamp(format_emax(f) + scale_exp - 12 + static_cast<int>(rng_.below(15)), -126, 127);
    const std::uint32_t bits = (static_cast<std::uint32_t>(rng_.below(2)) << 31) |
                               (static_cast<std::uint32_t>(e + 127) << 23) |
                               static_cast<std::uint32_t>(rng_.below(1u << 23));
    return std::bit_cast<float>(bits);
  }

  std::string random_quantize(const ElementFormat& f) {
    const BlockFormat bf(f, pick_k({4, 8, 16, 32}));
    const bool fixed = rng_.below(4) == 0;
    const ScaleE8M0 s{static_cast<std::uint8_t>(110 + rng_.below(36))};
    const ScaleRule rule = fixed ? ScaleRule::fixed_scale(s) : ScaleRule::max_pow2();
    std::vector<float> v;
    for (int i = 0; i < bf.k; ++i) v.push_back(random_lane(f, s.exponent()));
    return quantize_inputs(bf, rule, v);
  }

  NormOperand random_operand(int width, int exponent) {
    const auto r = rng_.below(8);
    if (r == 0) return {0, exponent};
    BigInt mag;
    if (r == 1) {
      mag = 1 + rng_.below((std::uint64_t{1} << (width - 1)) - 1);  // possibly unnormalised
    } else {
      mag = (BigInt(1) << (width - 2)) | BigInt(rng_.below(std::uint64_t{1} << (width - 2)));
    }
    return {rng_.below(2) ? BigInt(-mag) : mag, exponent};
  }

  std::string random_normadd() {
    const int width = 3 + static_cast<int>(rng_.below(38));
    const int xe = -20 + static_cast<int>(rng_.below(41));
    const int ye = xe - (width + 4) + static_cast<int>(rng_.below(static_cast<std::uint64_t>(2 * width + 9)));
    return normadd_inputs(width, random_operand(width, xe), random_operand(width, ye));
  }

  void directed_for_format(const ElementFormat& f, std::vector<std::string>& out) {
    const ScaleE8M0 one = ScaleE8M0::one();
    // A fixed block size replaces the usual k = 4 and k = 32 of the directed cases.
    const int small_k = opts_.block_size.value_or(4);
    const int large_k = opts_.block_size.value_or(32);
    if (wants(GoldenOp::Dot)) {
      const BlockFormat b4(f, small_k), b32(f, large_k);
      const Code unit = encode_element(f, 1.0);
      const std::vector<Code> ones(b4.k, unit);
      out.push_back(dot_inputs(b4, one, ones, one, ones));
      const Code hi = max_finite_code(f, false), lo = max_finite_code(f, true);
      out.push_back(dot_inputs(b32, one, std::vector<Code>(b32.k, hi), one, std::vector<Code>(b32.k, hi)));
      out.push_back(dot_inputs(b32, one, std::vector<Code>(b32.k, lo), one, std::vector<Code>(b32.k, lo)));
      out.push_back(dot_inputs(b32, one, std::vector<Code>(b32.k, hi), one, std::vector<Code>(b32.k, lo)));
      out.push_back(dot_inputs(b4, ScaleE8M0::nan(), ones, one, ones));
      out.push_back(dot_inputs(b4, ScaleE8M0{254}, ones, ScaleE8M0{254}, ones));
      out.push_back(dot_inputs(b4, ScaleE8M0{0}, ones, ScaleE8M0{0}, ones));
      if (f.has_nan()) {
        std::vector<Code> with_nan = ones;
        with_nan[2] = nan_code(f);
        out.push_back(dot_inputs(b4, one, with_nan, one, ones));
      }
      if (f.has_inf()) {
        std::vector<Code> inf = ones, zero = ones, conflict = ones;
        inf[0] = inf_code(f, false);
        zero[0] = 0;
        conflict[1] = inf_code(f, true);
        conflict[0] = inf_code(f, false);
        out.push_back(dot_inputs(b4, one, inf, one, ones));
        out.push_back(dot_inputs(b4, one, inf, one, zero));
        out.push_back(dot_inputs(b4, one, conflict, one, ones));
      }
    }
    if (wants(GoldenOp::DotGeneral)) {
      const BlockFormat b4(f, small_k);
      const Code unit = encode_element(f, 1.0);
      const MxBlock ones{ScaleE8M0::one(), std::vector<Code>(b4.k, unit)};
      out.push_back(dotgeneral_inputs(b4, default_norm_add_config(b4).mantissa_width, {ones, ones}, {ones, ones}));
      MxBlock nan_block = ones;
      nan_block.scale = ScaleE8M0::nan();
      out.push_back(dotgeneral_inputs(b4, 8, {ones, nan_block}, {ones, ones}));
      MxBlock tiny = ones;
      tiny.scale = ScaleE8M0{100};
      out.push_back(dotgeneral_inputs(b4, 6, {ones, tiny}, {ones, ones}));
    }
    if (wants(GoldenOp::Quantize)) {
      const BlockFormat b4(f, small_k);
      const ScaleRule unit = ScaleRule::fixed_scale(ScaleE8M0::one());
      // Ties between adjacent codes.
      std::vector<float> ties;
      for (Code c = 0; ties.size() < 4; ++c) {
        const ExactValue lo = decode_element(f, c), hi = decode_element(f, static_cast<Code>(c + 1));
        if (lo.is_finite() && hi.is_finite() && !lo.negative() && !hi.negative()) {
          ties.push_back(to_binary32(exact_add(lo, hi).scaled_by_pow2(-1)));
        }
      }
      out.push_back(quantize_inputs(b4, unit, ties));
      const float mx = static_cast<float>(max_finite(f).to_double());
      out.push_back(quantize_inputs(b4, unit, {mx * 1.5f, -mx * 1.5f, mx, 0.0f}));
      const float inf = std::numeric_limits<float>::infinity();
      const float nan = std::numeric_limits<float>::quiet_NaN();
      out.push_back(quantize_inputs(b4, ScaleRule::max_pow2(), {inf, -1.0f, 0.5f, 0.0f}));
      out.push_back(quantize_inputs(b4, ScaleRule::max_pow2(), {1.0f, nan, 0.5f, 0.0f}));
      out.push_back(quantize_inputs(b4, ScaleRule::max_pow2(), {0.0f, -0.0f, 0.0f, 0.0f}));
      out.push_back(quantize_inputs(b4, ScaleRule::max_pow2(), {std::numeric_limits<float>::denorm_min(), 0, 0, 0}));
      out.push_back(quantize_inputs(b4, ScaleRule::max_pow2(), {0x1p127f, 1.0f, -0x1p126f, 0}));
    }
  }

  void directed_normadd(std::vector<std::string>& out) {
    out.push_back(normadd_inputs(8, {3, -1}, {5, -1}));    // 1.5 + 2.5 = 4
    out.push_back(normadd_inputs(8, {77, 3}, {-77, 3}));   // exact cancellation
    out.push_back(normadd_inputs(4, {4, 0}, {1, -1}));     // 4.5 ties to 4
    out.push_back(normadd_inputs(4, {5, 0}, {1, -1}));     // 5.5 ties to 6
    out.push_back(normadd_inputs(4, {4, 0}, {1, -20}));    // far operand in sticky only
    out.push_back(normadd_inputs(4, {4, 0}, {-1, -20}));   // sticky on a subtraction
    out.push_back(normadd_inputs(6, {16, 0}, {-31, -5}));  // one-bit cancellation
    out.push_back(normadd_inputs(32, {0, 0}, {0, 9}));     // zero + zero
  }

  const GoldenOptions& opts_;
  Rng rng_;
};

}  // namespace

std::string golden_op_name(GoldenOp op) {
  switch (op) {
    case GoldenOp::Dot:
      return "dot";
    case GoldenOp::DotGeneral:
      return "dotgeneral";
    case GoldenOp::Quantize:
      return "quantize";
    case GoldenOp::NormAdd:
      return "normadd";
  }
  return "?";
}

GoldenOp parse_golden_op(const std::string& s) {
  for (GoldenOp op : {GoldenOp::Dot, GoldenOp::DotGeneral, GoldenOp::Quantize, GoldenOp::NormAdd}) {
    if (golden_op_name(op) == s) return op;
  }
  throw ParseError("unknown golden op '" + s + "'");
}

std::string recompute_golden_record(const std::string& line) {
  const std::vector<std::string> f = split(line, '\t');
  if (f[0] == "dot") return eval_dot(expect_fields(f, 7));
  if (f[0] == "dotgeneral") return eval_dotgeneral(expect_fields(f, 8));
  if (f[0] == "quantize") return eval_quantize(expect_fields(f, 5));
  if (f[0] == "normadd") return eval_normadd(expect_fields(f, 6));
  throw ParseError("unknown record type '" + f[0] + "'");
}

std::vector<std::string> generate_golden_records(const GoldenOptions& opts) {
  if (opts.ops.empty()) throw ParseError("golden: no operations selected");
  if (opts.formats.empty()) throw ParseError("golden: no formats selected");
  return Generator(opts).run();
}

std::string golden_file_text(const GoldenOptions& opts) {
  std::ostringstream os;
  os << "# mxkit golden vectors v1\n";
  os << "# seed " << opts.seed << ", " << opts.count << " records\n";
  os << "# dot\tformat\tk\tscale_a\tlanes_a\tscale_b\tlanes_b\tacc\tlsb_exp\tscale\tflags\toverflow\n";
  os << "# dotgeneral\tformat\tk\twidth\tscales_a\tblocks_a\tscales_b\tblocks_b\tmantissa\texponent\tflags\n";
  os << "# quantize\tformat\tk\trule\tinputs\tscale\tcodes\n";
  os << "# normadd\twidth\tx_mant\tx_exp\ty_mant\ty_exp\tmantissa\texponent\n";
  for (const std::string& r : generate_golden_records(opts)) os << r << '\n';
  return os.str();
}

VerifyReport verify_golden(std::istream& is) {
  VerifyReport rep;
  std::size_t lineno = 0;
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    ++rep.records;
    try {
      const std::string want = recompute_golden_record(line);
      if (want != line) {
        rep.mismatches.push_back("line " + std::to_string(lineno) + ": expected\n  " + want + "\ngot\n  " + line);
      }
    } catch (const std::exception& e) {
      rep.mismatches.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rep;
}

}  // namespace mxkit::cli
