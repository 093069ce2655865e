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

// Error-versus-area sweeps over quantization configurations.
//
// A sweep spec is a JSON object:
//
//   {
//     "formats":     ["int4", "int8", "e2m1", ...],    required, non-empty
//     "block_sizes": [8, 32],                          MX block sizes
//     "regimes":     ["mx", "per-channel", "per-tensor"],
//     "inputs":      ["a.mxt", ...],                   MXT1 tensors
//     "random":      {"count": 16, "shape": [64, 64]}, Gaussian tensors
//     "axis":        -1,                               principal axis (negative counts from the end)
//     "metric":      "mse" | "max_abs" | "sqnr_db",    Pareto metric
//     "layers":      "net.layers",                     area workload
//     "calibration": "cal.txt",
//     "seed":        1,
//     "output":      "out.csv"
//   }
//
// Relative paths are resolved against the spec file's directory. Without a
// layers file the area workload is one linear layer with in = C, out = 1.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mxkit/areamodel.hpp"
#include "mxkit/tensor.hpp"

namespace mxkit::cli {

struct SweepSpec {
  std::vector<ElementFormat> formats;
  std::vector<int> block_sizes = {32};
  std::vector<Regime> regimes = {Regime::MX};
  std::vector<std::string> inputs;
  std::size_t random_count = 0;
  std::vector<std::size_t> random_shape = {64, 64};
  int axis = -1;
  std::string metric = "mse";
  std::optional<std::string> layers_path;
  std::optional<std::string> calibration_path;
  std::uint64_t seed = 1;
  std::optional<std::string> output;
};

/// Parses and validates a spec. Every problem found is listed in the
/// ParseError message, one per line.
SweepSpec parse_sweep_spec(const std::string& json_text, const std::string& base_dir);

struct SweepRow {
  std::string format;
  Regime regime = Regime::MX;
  int block_size = 0;
  double mse = 0.0;         // mean over inputs
  double median_mse = 0.0;
  double max_abs = 0.0;     // max over inputs
  double sqnr_db = 0.0;     // mean over inputs
  double area = 0.0;
  bool fp8_warning = false;
  bool pareto = false;
};

/// Tensors the sweep is evaluated on, in a fixed order: files, then random.
std::vector<Tensor> sweep_inputs(const SweepSpec& spec);

/// One row per (format, regime, block size); per-tensor and per-channel rows
/// ignore block sizes. Rows are sorted by format, regime, block size.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const std::vector<Tensor>& inputs,
                                const AreaCalibration& cal);

/// Marks rows not dominated in (metric, area). Lower is better except for
/// sqnr_db.
void mark_pareto(std::vector<SweepRow>& rows, const std::string& metric);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace mxkit::cli
