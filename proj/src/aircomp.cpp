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

#include "airfl/aircomp.hpp"
#include "airfl/error.hpp"

#include <cmath>
#include <numeric>

namespace airfl
{

namespace
{
double l2_norm(std::span<const double> v)
{
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}
} // namespace

std::vector<double> clip_gradient(std::span<const double> g, double L_s)
{
    require(std::isfinite(L_s) && L_s > 0.0, ErrorCode::invalid_argument, "L_s must be > 0");
    std::vector<double> out(g.begin(), g.end());
    const double norm = l2_norm(g);
    if (norm > L_s)
    {
        const double scale = L_s / norm;
        for (auto &x : out)
            x *= scale;
    }
    return out;
}

TransmitFrame build_transmit(std::span<const double> s_k, std::span<const double> n_k, std::size_t k,
                             const PowerAllocation &alloc, std::span<const double> h2)
{
    require(k < alloc.users() && k < h2.size(), ErrorCode::invalid_argument, "user index out of range");
    if (s_k.size() != n_k.size())
        fail(ErrorCode::dimension_mismatch, "gradient and noise vectors differ in dimension");
    require(l2_norm(s_k) <= alloc.L_s * (1.0 + 1e-12), ErrorCode::precondition,
            "gradient exceeds the L_s bound; clip before transmitting");

    const double amp = std::sqrt(h2[k]);
    const double signal = amp * std::sqrt(alloc.alpha[k] * alloc.power[k]) / alloc.L_s;
    const double noise = amp * std::sqrt(alloc.beta[k] * alloc.power[k]);

    TransmitFrame frame;
    frame.payload.resize(s_k.size());
    for (std::size_t i = 0; i < s_k.size(); ++i)
        frame.payload[i] = signal * s_k[i] + noise * n_k[i];
    return frame;
}

std::vector<double> superpose(std::span<const TransmitFrame> frames, std::span<const double> z)
{
    require(!frames.empty(), ErrorCode::empty_system, "superposition needs at least one transmitter");
    std::vector<double> r(z.begin(), z.end());
    for (const auto &f : frames)
    {
        if (f.payload.size() != r.size())
            fail(ErrorCode::dimension_mismatch, "frame dimension differs from the receiver noise dimension");
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] += f.payload[i];
    }
    return r;
}

AggregateEstimate postprocess(std::span<const double> r, double m, std::size_t users, const NoiseStats &stats)
{
    require(std::isfinite(m) && m > 0.0, ErrorCode::domain, "degenerate alignment: m must be > 0");
    require(users >= 1, ErrorCode::empty_system, "post-processing needs at least one user");
    const double inv = 1.0 / (m * static_cast<double>(users));
    AggregateEstimate out;
    out.s_hat.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        out.s_hat[i] = r[i] * inv;
    out.noise_stats = stats;
    return out;
}

RoundOutput aggregate_round(std::span<const std::vector<double>> gradients, const PowerAllocation &alloc,
                            const ChannelRealization &channel, const NoisePlan &plan, double sigma_z2,
                            const NoiseStats &stats, Rng &rng)
{
    const auto K = alloc.users();
    if (gradients.size() != K || channel.users() != K)
        fail(ErrorCode::dimension_mismatch, "gradients, channel and allocation disagree on the user count");
    require(K >= 1, ErrorCode::empty_system, "round needs at least one user");
    const auto d = gradients.front().size();

    const auto noise = draw_user_noise(plan, alloc, channel.h2, d, rng);

    std::vector<TransmitFrame> frames;
    frames.reserve(K);
    RoundOutput out;
    out.noise_term.assign(d, 0.0);
    for (std::size_t k = 0; k < K; ++k)
    {
        if (gradients[k].size() != d)
            fail(ErrorCode::dimension_mismatch, "local gradients differ in dimension");
        const auto s = clip_gradient(gradients[k], alloc.L_s);
        frames.push_back(build_transmit(s, noise[k], k, alloc, channel.h2));
        const double g = noise_amplitude(channel.h2[k], alloc.beta[k], alloc.power[k]);
        for (std::size_t i = 0; i < d; ++i)
            out.noise_term[i] += g * noise[k][i];
    }

    const auto z = awgn(d, sigma_z2, rng);
    const auto r = superpose(frames, z);
    out.estimate = postprocess(r, alloc.m, K, stats);
    return out;
}

} // namespace airfl
