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

#ifndef AIRFL_CHANNEL_HPP
#define AIRFL_CHANNEL_HPP

#include "airfl/rng.hpp"

#include <cstddef>
#include <vector>

namespace airfl
{

enum class FadingMode
{
    rayleigh,
    fixed
};

// All power-like quantities are linear. Use db_to_linear at the boundary.
struct ChannelConfig
{
    FadingMode fading_mode = FadingMode::rayleigh;
    double sigma_z2 = 1.0;              // receiver noise variance
    double delta_h = 0.0;               // server-minus-eavesdropper power gain gap
    std::vector<double> fixed_gains;    // |h_k|^2 per user, fixed mode only

    void validate() const;
};

// Per-user power gains of the server link and the eavesdropper link.
struct ChannelRealization
{
    std::vector<double> h2;
    std::vector<double> h2_ev;

    std::size_t users() const noexcept { return h2.size(); }
};

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;

// Eavesdropper gain under the gap rule: max(h2 - delta_h, 0).
double eavesdropper_gain(double h2, double delta_h) noexcept;

// Rayleigh mode draws h = x + jy with x, y ~ N(0, 1/2), so |h|^2 is
// exponential with unit mean. Fixed mode replays config.fixed_gains, which
// must hold exactly K entries.
ChannelRealization sample_channel(const ChannelConfig &config, std::size_t users, Rng &rng);

// One Rayleigh power gain. Exposed for Monte Carlo loops that need a single draw.
double sample_rayleigh_gain(Rng &rng);

std::vector<double> awgn(std::size_t dim, double sigma2, Rng &rng);

} // namespace airfl

#endif
