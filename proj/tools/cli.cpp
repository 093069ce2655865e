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

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "golden.hpp"
#include "mxkit/areamodel.hpp"
#include "mxkit/metrics.hpp"
#include "mxkit/tensor_io.hpp"
#include "sweep.hpp"

namespace mxkit::cli {
namespace {

struct SchemeFlags {
  std::string format = "int8";
  int block_size = 32;
  std::string regime = "mx";
  std::string scale = "maxpow2";
  std::string mode;

  void attach(CLI::App* app) {
    app->add_option("--format", format, "element format, e.g. e4m3, e2m1, int8")->capture_default_str();
    app->add_option("--block-size", block_size, "MX block size k")->capture_default_str();
    app->add_option("--regime", regime, "mx, per-channel or per-tensor")->capture_default_str();
    app->add_option("--scale", scale, "maxpow2 or fixed:<byte>")->capture_default_str();
    app->add_option("--mode", mode, "overflow or saturating");
  }

  ElementFormat element() const {
    ElementFormat f = parse_element_format(format);
    if (mode.empty()) return f;
    OverflowMode m;
    if (mode == "overflow") {
      m = OverflowMode::Overflow;
    } else if (mode == "saturating") {
      m = OverflowMode::Saturating;
    } else {
      throw ParseError("--mode must be overflow or saturating, got '" + mode + "'");
    }
    if (f.is_int()) return f;
    return ElementFormat::floating_point(f.exponent_bits(), f.mantissa_bits(), {f.specials().kind, m});
  }

  ScaleRule rule() const {
    if (scale == "maxpow2") return ScaleRule::max_pow2();
    if (scale.rfind("fixed:", 0) == 0) {
      const std::string v = scale.substr(6);
      unsigned byte = 0;
      const bool hex = v.rfind("0x", 0) == 0;
      const char* first = v.data() + (hex ? 2 : 0);
      const auto r = std::from_chars(first, v.data() + v.size(), byte, hex ? 16 : 10);
      if (first == v.data() + v.size() || r.ec != std::errc() || r.ptr != v.data() + v.size() || byte > 255) {
        throw ParseError("bad --scale '" + scale + "'");
      }
      return ScaleRule::fixed_scale(ScaleE8M0{static_cast<std::uint8_t>(byte)});
    }
    throw ParseError("--scale must be maxpow2 or fixed:<byte>, got '" + scale + "'");
  }

  QuantScheme scheme() const {
    switch (parse_regime(regime)) {
      case Regime::PerTensor:
        return QuantScheme::per_tensor(element(), rule());
      case Regime::PerChannel:
        return QuantScheme::per_channel(element(), rule());
      case Regime::MX:
        break;
    }
    return QuantScheme::mx(element(), block_size, rule());
  }
};

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParseError("cannot write " + path);
  os << text;
  if (!os) throw ParseError("write failed: " + path);
}

AreaCalibration resolve_calibration(const std::string& flag, const std::optional<std::string>& from_spec,
                                    std::ostream& err) {
  std::string path = flag;
  if (path.empty() && from_spec) path = *from_spec;
  if (path.empty()) {
    if (const char* env = std::getenv("MXKIT_CALIBRATION"); env && *env) path = env;
  }
  if (path.empty()) {
    err << "note: no calibration file; using proxy bit-width costs\n";
    return AreaCalibration::proxy();
  }
  return load_calibration_file(path);
}

std::size_t resolve_axis(int axis, std::size_t rank) {
  const int r = static_cast<int>(rank);
  const int a = axis < 0 ? r + axis : axis;
  if (a < 0 || a >= r) throw ShapeMismatch("--axis " + std::to_string(axis) + " out of range for rank " + std::to_string(rank));
  return static_cast<std::size_t>(a);
}

int cmd_quantize(const std::string& in, const std::string& out_path, const SchemeFlags& flags, int axis,
                 std::ostream& out) {
  const Tensor t = read_tensor_file(in);
  const QuantizedTensor q = quantize_tensor(t, flags.scheme(), resolve_axis(axis, t.rank()));
  const ErrorMetrics m = error_metrics(t, dequantize_tensor(q));
  if (!out_path.empty()) {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw ParseError("cannot write " + out_path);
    write_quantized(os, q);
  }
  out << "scheme\t" << q.scheme.describe() << "\n";
  out << "mse\t" << number(m.mse) << "\n";
  out << "max_abs\t" << number(m.max_abs) << "\n";
  out << "sqnr_db\t" << number(m.sqnr_db) << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_flag, std::optional<std::uint64_t> seed,
              const std::string& cal_flag, std::ostream& out, std::ostream& err) {
  const std::string base = std::filesystem::path(spec_path).parent_path().string();
  SweepSpec spec = parse_sweep_spec(read_text(spec_path), base);
  if (seed) spec.seed = *seed;
  const AreaCalibration cal = resolve_calibration(cal_flag, spec.calibration_path, err);
  const std::vector<SweepRow> rows = run_sweep(spec, sweep_inputs(spec), cal);
  if (std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.fp8_warning; })) {
    err << "warning: FP8 area estimates assume very wide exact accumulators\n";
  }
  const std::string csv = sweep_csv(rows);
  const std::string target = !out_flag.empty() ? out_flag : spec.output.value_or("");
  if (target.empty()) {
    out << csv;
  } else {
    write_text(target, csv);
  }
  return kExitOk;
}

int cmd_golden(const std::string& ops, const std::vector<std::string>& fmts, std::size_t count,
               std::uint64_t seed, std::optional<int> block_size, const std::string& out_path,
               const std::string& verify_path, std::ostream& out, std::ostream& err) {
  if (!verify_path.empty()) {
    std::ifstream is(verify_path);
    if (!is) throw ParseError("cannot open " + verify_path);
    const VerifyReport rep = verify_golden(is);
    for (const std::string& m : rep.mismatches) err << "mismatch: " << m << "\n";
    out << rep.records << " records, " << rep.mismatches.size() << " mismatches\n";
    return rep.ok() ? kExitOk : kExitMismatch;
  }
  GoldenOptions opts;
  if (ops != "all") {
    opts.ops.clear();
    std::istringstream is(ops);
    for (std::string op; std::getline(is, op, ',');) opts.ops.push_back(parse_golden_op(op));
    if (opts.ops.empty()) throw ParseError("--op: empty list");
  }
  if (!fmts.empty()) {
    opts.formats.clear();
    for (const std::string& f : fmts) opts.formats.push_back(parse_element_format(f));
  }
  if (block_size && !BlockFormat::valid_block_size(*block_size)) {
    throw InvalidFormat("--block-size " + std::to_string(*block_size) + " is not a power of two in [4, 512]");
  }
  opts.count = count;
  opts.seed = seed;
  opts.block_size = block_size;
  const std::string text = golden_file_text(opts);
  if (out_path.empty()) {
    out << text;
  } else {
    write_text(out_path, text);
  }
  return kExitOk;
}

int cmd_area(const std::string& layers_path, const SchemeFlags& flags, const std::string& cal_flag,
             std::ostream& out, std::ostream& err) {
  const std::vector<LayerShape> layers = load_layers_file(layers_path);
  const QuantScheme scheme = flags.scheme();
  const AreaCalibration cal = resolve_calibration(cal_flag, std::nullopt, err);
  const NetworkArea net = estimate_network_area(layers, scheme, cal);
  if (net.fp8_warning) {
    err << "warning: " << scheme.element.name()
        << " is an FP8 format; its exact accumulator is very wide and the estimate is pessimistic\n";
  }
  out << "# " << scheme.describe() << "\n";
  out << "layer\tmultipliers\tint_adders\tnorm_adders\tmultiplier_area\tint_adder_area\tnorm_adder_area"
         "\tnormalizer_area\ttotal\n";
  auto row = [&](const std::string& name, const AreaBreakdown& a) {
    out << name << "\t" << a.multipliers << "\t" << a.int_adders << "\t" << a.norm_adders << "\t"
        << number(a.multiplier_area) << "\t" << number(a.int_adder_area) << "\t" << number(a.norm_adder_area)
        << "\t" << number(a.normalizer_area) << "\t" << number(a.total()) << "\n";
  };
  for (std::size_t i = 0; i < net.layers.size(); ++i) row(std::to_string(i), net.layers[i]);
  row("total", net.total);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"mxkit: MX block-scaled arithmetic toolkit", "mxkit"};
  app.require_subcommand(1);

  SchemeFlags q_flags;
  std::string q_in, q_out;
  int q_axis = -1;
  CLI::App* quantize = app.add_subcommand("quantize", "quantize an MXT1 tensor and report error metrics");
  quantize->add_option("input", q_in, "MXT1 tensor")->required();
  quantize->add_option("-o,--output", q_out, "MXQ1 output file");
  quantize->add_option("--axis", q_axis, "principal axis (negative counts from the end)")->capture_default_str();
  q_flags.attach(quantize);

  std::string s_spec, s_out, s_cal;
  std::optional<std::uint64_t> s_seed;
  CLI::App* sweep = app.add_subcommand("sweep", "error-versus-area sweep from a JSON spec");
  sweep->add_option("spec", s_spec, "sweep spec (JSON)")->required();
  sweep->add_option("-o,--output", s_out, "CSV output file");
  sweep->add_option("--seed", s_seed, "overrides the spec seed");
  sweep->add_option("--calibration", s_cal, "area calibration file");

  std::string g_ops = "all", g_out, g_verify;
  std::vector<std::string> g_formats;
  std::size_t g_count = 1000;
  std::uint64_t g_seed = 1;
  std::optional<int> g_k;
  CLI::App* golden = app.add_subcommand("golden", "generate or verify golden vectors");
  golden->add_option("--op", g_ops, "comma list of dot,dotgeneral,quantize,normadd, or all")->capture_default_str();
  golden->add_option("--format", g_formats, "element formats (default: the six concrete ones)");
  golden->add_option("--count", g_count, "records to emit")->capture_default_str();
  golden->add_option("--seed", g_seed, "PRNG seed")->capture_default_str();
  golden->add_option("--block-size", g_k, "fixed block size (default: random per record)");
  golden->add_option("-o,--output", g_out, "output file");
  golden->add_option("--verify", g_verify, "replay every record of FILE");

  SchemeFlags a_flags;
  std::string a_layers, a_cal;
  CLI::App* area = app.add_subcommand("area", "estimate adder-tree area for a list of layers");
  area->add_option("layers", a_layers, "layers file")->required();
  area->add_option("--calibration", a_cal, "area calibration file");
  a_flags.attach(area);

  std::string c_out;
  CLI::App* calibration = app.add_subcommand("calibration", "write the built-in proxy calibration");
  calibration->add_option("-o,--output", c_out, "output file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*quantize) return cmd_quantize(q_in, q_out, q_flags, q_axis, out);
    if (*sweep) return cmd_sweep(s_spec, s_out, s_seed, s_cal, out, err);
    if (*golden) return cmd_golden(g_ops, g_formats, g_count, g_seed, g_k, g_out, g_verify, out, err);
    if (*area) return cmd_area(a_layers, a_flags, a_cal, out, err);
    if (*calibration) {
      const std::string text = write_calibration(AreaCalibration::proxy());
      if (c_out.empty()) {
        out << text;
      } else {
        write_text(c_out, text);
      }
      return kExitOk;
    }
  } catch (const MissingCalibration& e) {
    err << "error: missing calibration: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace mxkit::cli
