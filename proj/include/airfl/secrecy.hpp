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

#ifndef AIRFL_SECRECY_HPP
#define AIRFL_SECRECY_HPP

#include "airfl/channel.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace airfl
{

struct SecrecyInputs
{
    double alpha_a = 0.0;
    double P_a = 0.0;           // linear
    double L_s = 1.0;
    double h2_a = 0.0;          // server link |h_a|^2
    double h2_ev = 0.0;         // eavesdropper link |h_a^(e)|^2
    double sigma_z2 = 1.0;
    double sigma_a2 = 0.0;      // victim's artificial-noise power seen by the eavesdropper
    double sigma_zprime2 = 1.0; // residual noise at the server, >= sigma_z2

    // S = sqrt(alpha_a P_a) / L_s. Enters the SNRs as printed, i.e. not squared.
    double signal_factor() const;
    void validate() const;
};

struct SecrecyPoint
{
    double snr_s = 0.0;
    double c_s = 0.0;   // bits
    double snr_ev = 0.0;
    double c_ev = 0.0;  // bits
    double c = 0.0;     // max(c_s - c_ev, 0)
};

SecrecyPoint secrecy_point(const SecrecyInputs &in);

// Where the eavesdropper-side noise power sigma_a2 comes from.
enum class SigmaA2Mode
{
    literal,  // sigma_a2 is the configured value
    linked    // sigma_a2 = beta_a * P_a * configured value, beta_a = 1 - alpha_a
};

struct SecrecySweep
{
    std::vector<double> alpha;
    std::vector<double> power_db;
    std::vector<double> delta_h;
    std::vector<double> sigma_A2;     // residual artificial-noise power at the server, linear
    double sigma_a2 = 0.0;            // linear
    double sigma_z2 = 1.0;
    double L_s = 1.0;
    SigmaA2Mode sigma_a2_mode = SigmaA2Mode::literal;
    FadingMode fading_mode = FadingMode::rayleigh;
    double fixed_gain = 1.0;          // server gain used in fixed mode

    std::size_t points() const noexcept;
    void validate() const;
};

struct SweepPoint
{
    double alpha = 0.0;
    double power_db = 0.0;
    double delta_h = 0.0;
    double sigma_A2 = 0.0;
    SecrecyPoint mean;
};

// Sample-mean secrecy metrics per sweep point. Every sweep point is evaluated
// on the same fading draws (common random numbers); draws come in fixed-size
// blocks with one generator stream per block, so the result does not depend
// on `threads`. Order: alpha outermost, then power, delta_h, sigma_A2.
std::vector<SweepPoint> monte_carlo_secrecy(const SecrecySweep &sweep, std::size_t samples, std::uint64_t seed,
                                            unsigned threads = 1);

} // namespace airfl

#endif
