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

#include "mxkit/areamodel.hpp"
#include "mxkit/conv.hpp"
#include "mxkit/convert.hpp"
#include "mxkit/dot.hpp"
#include "mxkit/dotgeneral.hpp"
#include "mxkit/error.hpp"
#include "mxkit/exact.hpp"
#include "mxkit/formats.hpp"
#include "mxkit/metrics.hpp"
#include "mxkit/normalize.hpp"
#include "mxkit/random.hpp"
#include "mxkit/rounding.hpp"
#include "mxkit/scale.hpp"
#include "mxkit/tensor.hpp"
#include "mxkit/tensor_io.hpp"
#include "mxkit/wide.hpp"
