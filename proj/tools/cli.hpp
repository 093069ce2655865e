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

// Command-line front end. run() is the whole program minus process setup so
// tests can drive it in-process.
//
//   mxkit quantize IN.mxt [-o OUT.mxq] [scheme flags] [--axis A]
//   mxkit sweep SPEC.json [-o OUT.csv] [--seed S] [--calibration FILE]
//   mxkit golden [--op OPS] [--format F]... [--count N] [--seed S] [-o FILE]
//   mxkit golden --verify FILE
//   mxkit area LAYERS [scheme flags] [--calibration FILE]
//   mxkit calibration [-o FILE]
//
// Scheme flags: --format, --block-size, --regime, --scale {maxpow2|fixed:<byte>},
// --mode {overflow|saturating}. The calibration file defaults to
// $MXKIT_CALIBRATION, then to the built-in proxy.
//
// Exit codes: 0 success, 1 golden verification mismatch, 2 usage, parse or
// shape errors.

#include <iosfwd>
#include <string>
#include <vector>

namespace mxkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitError = 2;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mxkit::cli
