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

#ifndef AIRFL_RNG_HPP
#define AIRFL_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace airfl
{

// Keys that separate independent random streams derived from one master seed.
enum class StreamTag : std::uint64_t
{
    channel = 1,
    pairing = 2,
    secrets = 3,
    task = 4,
    training = 5,
    secrecy_mc = 6,
    noise_check = 7,
};

// Seedable generator. Every stochastic routine takes one of these by reference,
// so a run is a pure function of the seeds that built its streams.
class Rng
{
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed);

    // Independent stream keyed by (seed, keys...). Two calls with the same
    // arguments produce identical sequences, whatever thread runs them.
    static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);
    static Rng stream(std::uint64_t seed, StreamTag tag, std::initializer_list<std::uint64_t> keys = {});

    double standard_normal() { return normal_(engine_); }
    double normal(double mean, double stddev) { return mean + stddev * normal_(engine_); }
    double uniform(double lo, double hi);
    std::size_t index_below(std::size_t n);

    engine_type &engine() noexcept { return engine_; }

private:
    explicit Rng(std::seed_seq &seq);

    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace airfl

#endif
