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

#ifndef AIRFL_PARALLEL_HPP
#define AIRFL_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace airfl
{

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Work items must not share mutable state; callers reduce
// per-item results in index order so output does not depend on `threads`.
// If any item throws, the exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &body);

unsigned resolve_threads(unsigned requested) noexcept;

} // namespace airfl

#endif
