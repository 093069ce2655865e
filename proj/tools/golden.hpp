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

// Golden test vectors for hardware testbenches.
//
// One record per line, tab-separated fields, lanes as fixed-width
// lower-case hex separated by commas (lane 0 first). Lines starting with '#'
// are comments. Record layouts:
//
//   dot        fmt k scale_a lanes_a scale_b lanes_b | acc lsb_exp scale flags overflow
//   dotgeneral fmt k width scales_a blocks_a scales_b blocks_b | mantissa exponent flags
//   quantize   fmt k rule inputs | scale codes
//   normadd    width x_mant x_exp y_mant y_exp | mantissa exponent
//
// acc is the two's-complement register in ceil(b_o / 4) digits; mantissas
// are two's complement in ceil(width / 4) digits; exponents are decimal;
// blocks of a dotgeneral record are separated by '/'; quantize inputs are
// binary32 bit patterns; rule is "maxpow2" or "fixed:<hex byte>"; flags is
// "-", "nan", "+inf" or "-inf".

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mxkit/formats.hpp"

namespace mxkit::cli {

enum class GoldenOp { Dot, DotGeneral, Quantize, NormAdd };

std::string golden_op_name(GoldenOp op);
GoldenOp parse_golden_op(const std::string& s);

struct GoldenOptions {
  std::vector<GoldenOp> ops = {GoldenOp::Dot, GoldenOp::DotGeneral, GoldenOp::Quantize,
                               GoldenOp::NormAdd};
  std::vector<ElementFormat> formats = formats::concrete();
  std::size_t count = 1000;
  std::uint64_t seed = 1;
  std::optional<int> block_size;  // random per record when unset
};

/// Directed edge cases first, then seeded random records, `count` in total.
/// Every record is recomputed from its own text before it is returned.
std::vector<std::string> generate_golden_records(const GoldenOptions& opts);

/// Full file text: header comments followed by the records.
std::string golden_file_text(const GoldenOptions& opts);

/// Recomputes the outputs of a record from its inputs and returns the
/// complete line. Throws ParseError on malformed records.
std::string recompute_golden_record(const std::string& line);

struct VerifyReport {
  std::size_t records = 0;
  std::vector<std::string> mismatches;

  bool ok() const { return mismatches.empty(); }
};

VerifyReport verify_golden(std::istream& is);

}  // namespace mxkit::cli
