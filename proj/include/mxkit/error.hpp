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

#include <stdexcept>
#include <string>

namespace mxkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value is not a member of the element format's value set.
class NotRepresentable : public Error {
 public:
  using Error::Error;
};

/// Format parameters or block sizes outside the supported ranges.
class InvalidFormat : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// Operands were quantized under incompatible schemes.
class SchemeMismatch : public Error {
 public:
  using Error::Error;
};

/// The area calibration has no record for a requested block/format.
class MissingCalibration : public Error {
 public:
  using Error::Error;
};

/// Least-squares fit without two distinct abscissae.
class Degenerate : public Error {
 public:
  using Error::Error;
};

/// Malformed text or binary input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace mxkit
