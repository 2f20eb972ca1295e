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

#ifndef AIRFL_AIRCOMP_HPP
#define AIRFL_AIRCOMP_HPP

#include "airfl/channel.hpp"
#include "airfl/pcran.hpp"
#include "airfl/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace airfl
{

// Scales g onto the L_s ball if it lies outside.
std::vector<double> clip_gradient(std::span<const double> g, double L_s);

// One user's channel-scaled analog contribution.
struct TransmitFrame
{
    std::vector<double> payload;
};

// payload = |h_k| (sqrt(alpha_k P_k) / L_s * s_k + sqrt(beta_k P_k) * n_k).
// s_k must already be clipped to the L_s ball.
TransmitFrame build_transmit(std::span<const double> s_k, std::span<const double> n_k, std::size_t k,
                             const PowerAllocation &alloc, std::span<const double> h2);

// Over-the-air sum of all frames plus the receiver noise vector z.
std::vector<double> superpose(std::span<const TransmitFrame> frames, std::span<const double> z);

struct AggregateEstimate
{
    std::vector<double> s_hat;
    NoiseStats noise_stats;
};

// s_hat = r / (m K).
AggregateEstimate postprocess(std::span<const double> r, double m, std::size_t users,
                              const NoiseStats &stats = {});

struct RoundOutput
{
    AggregateEstimate estimate;
    std::vector<double> noise_term;  // sum_k |h_k| sqrt(beta_k P_k) n_k as received
};

// Full uplink round: noise generation, transmit frames, superposition with
// one receiver-side AWGN vector, and post-processing. `gradients` are clipped
// here, so callers may pass raw local gradients.
RoundOutput aggregate_round(std::span<const std::vector<double>> gradients, const PowerAllocation &alloc,
                            const ChannelRealization &channel, const NoisePlan &plan, double sigma_z2,
                            const NoiseStats &stats, Rng &rng);

} // namespace airfl

#endif
