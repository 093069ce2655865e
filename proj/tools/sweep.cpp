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

#include "sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <tuple>

#include "mxkit/convert.hpp"
#include "mxkit/metrics.hpp"
#include "mxkit/random.hpp"
#include "mxkit/tensor_io.hpp"

namespace mxkit::cli {
namespace {

using nlohmann::json;

std::string resolve(const std::string& base_dir, const std::string& p) {
  const std::filesystem::path path(p);
  if (path.is_absolute() || base_dir.empty()) return p;
  return (std::filesystem::path(base_dir) / path).string();
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double metric_of(const SweepRow& r, const std::string& metric) {
  if (metric == "mse") return r.mse;
  if (metric == "max_abs") return r.max_abs;
  return -r.sqnr_db;  // higher SQNR is better
}

std::size_t principal_axis(const Tensor& t, int axis) {
  const int rank = static_cast<int>(t.rank());
  const int a = axis < 0 ? rank + axis : axis;
  if (a < 0 || a >= rank) {
    throw ShapeMismatch("sweep: axis " + std::to_string(axis) + " out of range for " + dims_to_string(t.dims));
  }
  return static_cast<std::size_t>(a);
}

}  // namespace

SweepSpec parse_sweep_spec(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("sweep spec: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("sweep spec: top level must be an object");

  SweepSpec s;
  std::vector<std::string> problems;
  auto note = [&](const std::string& m) { problems.push_back(m); };

  try {
    for (const auto& [key, _] : j.items()) {
      static const std::vector<std::string> known = {"formats", "block_sizes", "regimes", "inputs",
                                                     "random",  "axis",        "metric",  "layers",
                                                     "calibration", "seed",    "output"};
      if (std::find(known.begin(), known.end(), key) == known.end()) note("unknown key '" + key + "'");
    }
    if (!j.contains("formats") || !j["formats"].is_array() || j["formats"].empty()) {
      note("'formats' must be a non-empty list");
    } else {
      for (const auto& f : j["formats"]) {
        try {
          s.formats.push_back(parse_element_format(f.get<std::string>()));
        } catch (const Error& e) {
          note("format '" + f.get<std::string>() + "': " + e.what());
        }
      }
    }
    if (j.contains("block_sizes")) s.block_sizes = j["block_sizes"].get<std::vector<int>>();
    if (j.contains("regimes")) {
      s.regimes.clear();
      for (const auto& r : j["regimes"]) {
        try {
          s.regimes.push_back(parse_regime(r.get<std::string>()));
        } catch (const Error& e) {
          note(e.what());
        }
      }
      if (s.regimes.empty()) note("'regimes' must not be empty");
    }
    const bool has_mx = std::find(s.regimes.begin(), s.regimes.end(), Regime::MX) != s.regimes.end();
    if (has_mx) {
      if (s.block_sizes.empty()) note("'block_sizes' must not be empty for mx");
      for (int k : s.block_sizes) {
        if (!BlockFormat::valid_block_size(k)) {
          note("invalid configuration: block size " + std::to_string(k) + " (must be a power of two in [4, 512])");
        }
      }
    }
    if (j.contains("inputs")) {
      for (const auto& p : j["inputs"]) s.inputs.push_back(resolve(base_dir, p.get<std::string>()));
    }
    if (j.contains("random")) {
      const json& r = j["random"];
      s.random_count = r.value("count", std::size_t{0});
      if (r.contains("shape")) s.random_shape = r["shape"].get<std::vector<std::size_t>>();
      if (s.random_shape.empty() || element_count(s.random_shape) == 0) note("'random.shape' must be non-empty");
    }
    if (s.inputs.empty() && s.random_count == 0) note("no inputs: give 'inputs' or 'random.count'");
    s.axis = j.value("axis", -1);
    s.metric = j.value("metric", std::string("mse"));
    if (s.metric != "mse" && s.metric != "max_abs" && s.metric != "sqnr_db") {
      note("'metric' must be mse, max_abs or sqnr_db");
    }
    if (j.contains("layers")) s.layers_path = resolve(base_dir, j["layers"].get<std::string>());
    if (j.contains("calibration")) s.calibration_path = resolve(base_dir, j["calibration"].get<std::string>());
    s.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("output")) s.output = resolve(base_dir, j["output"].get<std::string>());
  } catch (const json::exception& e) {
    note(std::string("bad value: ") + e.what());
  }

  if (!problems.empty()) {
    std::string msg = "invalid sweep spec:";
    for (const std::string& p : problems) msg += "\n  " + p;
    throw ParseError(msg);
  }
  return s;
}

std::vector<Tensor> sweep_inputs(const SweepSpec& spec) {
  std::vector<Tensor> out;
  for (const std::string& p : spec.inputs) out.push_back(read_tensor_file(p));
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < spec.random_count; ++i) {
    Tensor t = Tensor::zeros(spec.random_shape);
    for (float& x : t.data) x = static_cast<float>(rng.gaussian());
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const std::vector<Tensor>& inputs,
                                const AreaCalibration& cal) {
  if (inputs.empty()) throw ParseError("sweep: no input tensors");
  std::vector<LayerShape> layers;
  if (spec.layers_path) {
    layers = load_layers_file(*spec.layers_path);
  } else {
    const Tensor& t = inputs.front();
    layers.push_back(LayerShape::linear(t.dims[principal_axis(t, spec.axis)], 1));
  }

  std::vector<QuantScheme> schemes;
  for (const ElementFormat& f : spec.formats) {
    for (Regime r : spec.regimes) {
      if (r == Regime::MX) {
        for (int k : spec.block_sizes) schemes.push_back(QuantScheme::mx(f, k));
      } else {
        schemes.push_back(r == Regime::PerTensor ? QuantScheme::per_tensor(f) : QuantScheme::per_channel(f));
      }
    }
  }

  std::vector<SweepRow> rows;
  for (const QuantScheme& s : schemes) {
    SweepRow row;
    row.format = s.element.spec_string();
    row.regime = s.regime;
    row.block_size = s.regime == Regime::MX ? s.block_size : 0;
    std::vector<double> mses;
    double sqnr_sum = 0.0;
    for (const Tensor& t : inputs) {
      const std::size_t axis = principal_axis(t, spec.axis);
      const ErrorMetrics m = error_metrics(t, dequantize_tensor(quantize_tensor(t, s, axis)));
      mses.push_back(m.mse);
      row.max_abs = std::isnan(m.max_abs) || std::isnan(row.max_abs) ? std::numeric_limits<double>::quiet_NaN()
                                                                      : std::max(row.max_abs, m.max_abs);
      sqnr_sum += m.sqnr_db;
    }
    double total = 0.0;
    for (double m : mses) total += m;
    row.mse = total / static_cast<double>(mses.size());
    std::sort(mses.begin(), mses.end());
    const std::size_t n = mses.size();
    row.median_mse = n % 2 ? mses[n / 2] : 0.5 * (mses[n / 2 - 1] + mses[n / 2]);
    row.sqnr_db = sqnr_sum / static_cast<double>(n);
    const NetworkArea area = estimate_network_area(layers, s, cal);
    row.area = area.total.total();
    row.fp8_warning = area.fp8_warning;
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.format, a.regime, a.block_size) < std::tie(b.format, b.regime, b.block_size);
  });
  rows.erase(std::unique(rows.begin(), rows.end(),
                         [](const SweepRow& a, const SweepRow& b) {
                           return std::tie(a.format, a.regime, a.block_size) ==
                                  std::tie(b.format, b.regime, b.block_size);
                         }),
             rows.end());
  mark_pareto(rows, spec.metric);
  return rows;
}

void mark_pareto(std::vector<SweepRow>& rows, const std::string& metric) {
  for (SweepRow& r : rows) {
    const double m = metric_of(r, metric);
    r.pareto = !std::isnan(m);
    for (const SweepRow& o : rows) {
      const double om = metric_of(o, metric);
      if (std::isnan(om)) continue;
      const bool no_worse = om <= m && o.area <= r.area;
      const bool better = om < m || o.area < r.area;
      if (no_worse && better) {
        r.pareto = false;
        break;
      }
    }
  }
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "format,regime,block_size,mse,median_mse,max_abs,sqnr_db,area,fp8_warning,pareto\n";
  for (const SweepRow& r : rows) {
    out += r.format + "," + regime_name(r.regime) + "," + std::to_string(r.block_size) + "," + number(r.mse) + "," +
           number(r.median_mse) + "," + number(r.max_abs) + "," + number(r.sqnr_db) + "," + number(r.area) + "," +
           (r.fp8_warning ? "1" : "0") + "," + (r.pareto ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace mxkit::cli
