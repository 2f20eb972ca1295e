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

#include "airfl/error.hpp"
#include "airfl/parallel.hpp"
#include "airfl/rng.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace airfl
{

const char *error_code_name(ErrorCode code) noexcept
{
    switch (code)
    {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::empty_system: return "empty system";
    case ErrorCode::pairing: return "pairing error";
    case ErrorCode::degenerate_channel: return "degenerate channel";
    case ErrorCode::precondition: return "precondition violation";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::config_io: return "configuration file error";
    case ErrorCode::config_schema: return "configuration schema error";
    case ErrorCode::divergence: return "training diverged";
    case ErrorCode::output_io: return "output error";
    }
    return "unknown error";
}

// ---- Rng -----------------------------------------------------------------

namespace
{
void push_u64(std::vector<std::uint32_t> &words, std::uint64_t x)
{
    words.push_back(static_cast<std::uint32_t>(x & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(x >> 32));
}
} // namespace

Rng::Rng(std::uint64_t seed)
{
    std::vector<std::uint32_t> words;
    push_u64(words, seed);
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
}

Rng::Rng(std::seed_seq &seq) : engine_(seq) {}

Rng Rng::stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
{
    std::vector<std::uint32_t> words;
    push_u64(words, seed);
    // Length marker keeps (seed, {a}) and (seed, {a, 0}) apart.
    push_u64(words, 0x9e3779b97f4a7c15ull ^ keys.size());
    for (auto k : keys)
        push_u64(words, k);
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

Rng Rng::stream(std::uint64_t seed, StreamTag tag, std::initializer_list<std::uint64_t> keys)
{
    std::vector<std::uint32_t> words;
    push_u64(words, seed);
    push_u64(words, 0x9e3779b97f4a7c15ull ^ (keys.size() + 1));
    push_u64(words, static_cast<std::uint64_t>(tag));
    for (auto k : keys)
        push_u64(words, k);
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

double Rng::uniform(double lo, double hi)
{
    if (lo == hi)
        return lo;
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(engine_);
}

std::size_t Rng::index_below(std::size_t n)
{
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
}

// ---- parallel_for --------------------------------------------------------

unsigned resolve_threads(unsigned requested) noexcept
{
    if (requested != 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &body)
{
    if (n == 0)
        return;
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(resolve_threads(threads), n));
    if (workers == 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;)
                {
                    const auto i = next.fetch_add(1);
                    if (i >= n || failed.load(std::memory_order_relaxed))
                        return;
                    try
                    {
                        body(i);
                    }
                    catch (...)
                    {
                        errors[i] = std::current_exception();
                        failed = true;
                    }
                }
            });
    }
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace airfl
