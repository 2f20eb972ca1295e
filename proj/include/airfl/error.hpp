// SPDX-License-Identifier: Apache-2.0
//
// airfl: over-the-air federated learning simulator with pairwise-cancellable noise
// Copyright (C) 2026 The airfl authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef AIRFL_ERROR_HPP
#define AIRFL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace airfl
{

// Numeric values are mirrored by airfl_status in airfl.h; keep them in sync.
enum class ErrorCode : int
{
    invalid_argument = 1,
    domain = 2,
    empty_system = 3,
    pairing = 4,
    degenerate_channel = 5,
    precondition = 6,
    dimension_mismatch = 7,
    config_io = 8,
    config_schema = 9,
    divergence = 10,
    output_io = 11,
};

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string &what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &what)
{
    throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const char *what)
{
    if (!ok)
        throw Error(code, what);
}

const char *error_code_name(ErrorCode code) noexcept;

} // namespace airfl

#endif
