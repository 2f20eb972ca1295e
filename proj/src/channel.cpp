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

#include "airfl/channel.hpp"
#include "airfl/error.hpp"

#include <algorithm>
#include <cmath>

namespace airfl
{

void ChannelConfig::validate() const
{
    require(std::isfinite(sigma_z2) && sigma_z2 >= 0.0, ErrorCode::invalid_argument, "sigma_z2 must be >= 0");
    require(std::isfinite(delta_h) && delta_h >= 0.0, ErrorCode::invalid_argument, "delta_h must be >= 0");
    for (double g : fixed_gains)
        require(std::isfinite(g) && g >= 0.0, ErrorCode::invalid_argument, "fixed gains must be >= 0");
}

double db_to_linear(double db) noexcept
{
    return std::pow(10.0, db / 10.0);
}

double linear_to_db(double linear) noexcept
{
    return 10.0 * std::log10(linear);
}

double eavesdropper_gain(double h2, double delta_h) noexcept
{
    return std::max(h2 - delta_h, 0.0);
}

double sample_rayleigh_gain(Rng &rng)
{
    // Real and imaginary parts ~ N(0, 1/2).
    constexpr double sd = 0.70710678118654752440;
    const double re = sd * rng.standard_normal();
    const double im = sd * rng.standard_normal();
    return re * re + im * im;
}

ChannelRealization sample_channel(const ChannelConfig &config, std::size_t users, Rng &rng)
{
    require(users >= 1, ErrorCode::empty_system, "channel needs at least one user");
    config.validate();

    ChannelRealization out;
    if (config.fading_mode == FadingMode::fixed)
    {
        if (config.fixed_gains.size() != users)
            fail(ErrorCode::dimension_mismatch, "fixed mode needs exactly one gain per user");
        out.h2 = config.fixed_gains;
    }
    else
    {
        out.h2.resize(users);
        for (auto &g : out.h2)
            g = sample_rayleigh_gain(rng);
    }

    out.h2_ev.resize(users);
    std::transform(out.h2.begin(), out.h2.end(), out.h2_ev.begin(),
                   [&](double g) { return eavesdropper_gain(g, config.delta_h); });
    return out;
}

std::vector<double> awgn(std::size_t dim, double sigma2, Rng &rng)
{
    require(dim >= 1, ErrorCode::invalid_argument, "awgn dimension must be >= 1");
    require(std::isfinite(sigma2) && sigma2 >= 0.0, ErrorCode::domain, "noise variance must be >= 0");
    // Draws are consumed even at zero variance so stream positions do not
    // depend on the noise level.
    std::vector<double> z(dim);
    const double sd = std::sqrt(sigma2);
    for (auto &x : z)
        x = sd * rng.standard_normal();
    return z;
}

} // namespace airfl
