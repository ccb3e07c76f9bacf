// Copyright 2026 The cornerdtc Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cornerdtc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

#define CORNERDTC_DEFINE_ERROR(NAME)          \
    class NAME : public Error {               \
       public:                                \
        using Error::Error;                   \
    };

CORNERDTC_DEFINE_ERROR(DegenerateGeometry)
CORNERDTC_DEFINE_ERROR(InvalidOffset)
CORNERDTC_DEFINE_ERROR(DimensionMismatch)
CORNERDTC_DEFINE_ERROR(NonHermitianResidual)
CORNERDTC_DEFINE_ERROR(NoCornerPresent)
CORNERDTC_DEFINE_ERROR(ResonantEta)
CORNERDTC_DEFINE_ERROR(EmptySeries)
CORNERDTC_DEFINE_ERROR(GridMismatch)
CORNERDTC_DEFINE_ERROR(UnsupportedGeometry)
CORNERDTC_DEFINE_ERROR(SeedRequired)
CORNERDTC_DEFINE_ERROR(ParseError)
CORNERDTC_DEFINE_ERROR(NonAdjacentGate)

#undef CORNERDTC_DEFINE_ERROR

class NoConvergence : public Error {
   public:
    NoConvergence(const std::string &what, size_t iterations, double residual)
        : Error(what + " (iterations=" + std::to_string(iterations) + ", residual=" + std::to_string(residual) + ")"),
          iterations(iterations),
          residual(residual) {
    }
    size_t iterations;
    double residual;
};

class ConfigInvalid : public Error {
   public:
    ConfigInvalid(size_t line, const std::string &key, const std::string &why)
        : Error("config line " + std::to_string(line) + ", key '" + key + "': " + why), line(line), key(key) {
    }
    size_t line;
    std::string key;
};

}  // namespace cornerdtc
