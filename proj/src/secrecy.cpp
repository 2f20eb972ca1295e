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

#include "airfl/secrecy.hpp"
#include "airfl/error.hpp"
#include "airfl/parallel.hpp"
#include "airfl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace airfl
{

namespace
{
bool nonneg(double x)
{
    return std::isfinite(x) && x >= 0.0;
}

double log2_1p(double x)
{
    return std::log1p(x) / std::numbers::ln2;
}

constexpr std::size_t samples_per_block = 4096;
} // namespace

double SecrecyInputs::signal_factor() const
{
    return std::sqrt(alpha_a * P_a) / L_s;
}

void SecrecyInputs::validate() const
{
    require(nonneg(alpha_a) && nonneg(P_a) && nonneg(h2_a) && nonneg(h2_ev) && nonneg(sigma_z2) &&
                nonneg(sigma_a2) && nonneg(sigma_zprime2),
            ErrorCode::invalid_argument, "secrecy inputs must be finite and >= 0");
    require(std::isfinite(L_s) && L_s > 0.0, ErrorCode::invalid_argument, "L_s must be > 0");
    require(sigma_zprime2 >= sigma_z2, ErrorCode::invalid_argument, "server residual noise must be >= sigma_z2");
    require(sigma_zprime2 > 0.0, ErrorCode::domain, "server residual noise power is zero");
    require(sigma_z2 + sigma_a2 > 0.0, ErrorCode::domain, "eavesdropper noise power is zero");
}

SecrecyPoint secrecy_point(const SecrecyInputs &in)
{
    in.validate();
    const double S = in.signal_factor();
    const double ev_noise = in.sigma_z2 + in.sigma_a2;

    SecrecyPoint p;
    p.snr_s = S * in.h2_a / in.sigma_zprime2;
    p.c_s = log2_1p(p.snr_s);
    p.snr_ev = S * in.h2_ev / ev_noise;
    p.c_ev = log2_1p(p.snr_ev);
    // log2((1 + snr_s) / (1 + snr_ev)), kept accurate when the two links are close.
    p.c = std::max(log2_1p((p.snr_s - p.snr_ev) / (1.0 + p.snr_ev)), 0.0);
    return p;
}

std::size_t SecrecySweep::points() const noexcept
{
    return alpha.size() * power_db.size() * delta_h.size() * sigma_A2.size();
}

void SecrecySweep::validate() const
{
    require(points() > 0, ErrorCode::invalid_argument, "empty sweep: every grid needs at least one value");
    for (double a : alpha)
        require(nonneg(a) && a <= 1.0, ErrorCode::invalid_argument, "alpha values must lie in [0, 1]");
    for (double p : power_db)
        require(std::isfinite(p), ErrorCode::invalid_argument, "power values must be finite");
    for (double dh : delta_h)
        require(nonneg(dh), ErrorCode::invalid_argument, "delta_h values must be >= 0");
    for (double s : sigma_A2)
        require(nonneg(s), ErrorCode::invalid_argument, "sigma_A2 values must be >= 0");
    require(nonneg(sigma_a2), ErrorCode::invalid_argument, "sigma_a2 must be >= 0");
    require(std::isfinite(sigma_z2) && sigma_z2 > 0.0, ErrorCode::invalid_argument, "sigma_z2 must be > 0");
    require(std::isfinite(L_s) && L_s > 0.0, ErrorCode::invalid_argument, "L_s must be > 0");
    require(nonneg(fixed_gain), ErrorCode::invalid_argument, "fixed gain must be >= 0");
}

std::vector<SweepPoint> monte_carlo_secrecy(const SecrecySweep &sweep, std::size_t samples, std::uint64_t seed,
                                            unsigned threads)
{
    sweep.validate();
    require(samples >= 1, ErrorCode::invalid_argument, "Monte Carlo needs at least one sample");

    // Flatten the grid once; inputs differ only in the fading draw.
    std::vector<SweepPoint> grid;
    std::vector<SecrecyInputs> base;
    grid.reserve(sweep.points());
    base.reserve(sweep.points());
    for (double a : sweep.alpha)
        for (double pdb : sweep.power_db)
            for (double dh : sweep.delta_h)
                for (double sA : sweep.sigma_A2)
                {
                    grid.push_back({a, pdb, dh, sA, {}});
                    SecrecyInputs in;
                    in.alpha_a = a;
                    in.P_a = db_to_linear(pdb);
                    in.L_s = sweep.L_s;
                    in.sigma_z2 = sweep.sigma_z2;
                    in.sigma_a2 = sweep.sigma_a2_mode == SigmaA2Mode::linked ? (1.0 - a) * in.P_a * sweep.sigma_a2
                                                                            : sweep.sigma_a2;
                    in.sigma_zprime2 = sA + sweep.sigma_z2;
                    base.push_back(in);
                }

    const auto n_points = grid.size();
    if (sweep.fading_mode == FadingMode::fixed)
    {
        // Every sample sees the same channel, so the mean is the point value.
        for (std::size_t i = 0; i < n_points; ++i)
        {
            auto in = base[i];
            in.h2_a = sweep.fixed_gain;
            in.h2_ev = eavesdropper_gain(sweep.fixed_gain, grid[i].delta_h);
            grid[i].mean = secrecy_point(in);
        }
        return grid;
    }

    const auto n_blocks = (samples + samples_per_block - 1) / samples_per_block;
    std::vector<std::vector<SecrecyPoint>> partial(n_blocks, std::vector<SecrecyPoint>(n_points));

    parallel_for(n_blocks, threads, [&](std::size_t b) {
        auto rng = Rng::stream(seed, StreamTag::secrecy_mc, {b});
        auto &acc = partial[b];
        const auto first = b * samples_per_block;
        const auto last = std::min(samples, first + samples_per_block);
        for (auto s = first; s < last; ++s)
        {
            const double h2 = sample_rayleigh_gain(rng);
            for (std::size_t i = 0; i < n_points; ++i)
            {
                auto in = base[i];
                in.h2_a = h2;
                in.h2_ev = eavesdropper_gain(h2, grid[i].delta_h);
                const auto p = secrecy_point(in);
                acc[i].snr_s += p.snr_s;
                acc[i].c_s += p.c_s;
                acc[i].snr_ev += p.snr_ev;
                acc[i].c_ev += p.c_ev;
                acc[i].c += p.c;
            }
        }
    });

    const double inv = 1.0 / static_cast<double>(samples);
    for (std::size_t i = 0; i < n_points; ++i)
    {
        SecrecyPoint sum;
        for (const auto &block : partial)
        {
            sum.snr_s += block[i].snr_s;
            sum.c_s += block[i].c_s;
            sum.snr_ev += block[i].snr_ev;
            sum.c_ev += block[i].c_ev;
            sum.c += block[i].c;
        }
        grid[i].mean = {sum.snr_s * inv, sum.c_s * inv, sum.snr_ev * inv, sum.c_ev * inv, sum.c * inv};
    }
    return grid;
}

} // namespace airfl
