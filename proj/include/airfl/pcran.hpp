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

#ifndef AIRFL_PCRAN_HPP
#define AIRFL_PCRAN_HPP

#include "airfl/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace airfl
{

enum class NoiseRole
{
    positive,
    negative
};

// Secret shared by the two users of a pair. The positive-role user draws
// N(+mu, sigma2_pos), the negative-role user N(-mu, sigma2_neg).
struct PairSecret
{
    double mu = 0.0;
    double sigma2_pos = 1.0;
    double sigma2_neg = 1.0;

    void validate() const;
};

struct UserPair
{
    std::size_t positive;
    std::size_t negative;
};

// Perfect matching over users 0..K-1 (zero-based).
struct Pairing
{
    std::vector<UserPair> pairs;

    std::size_t users() const noexcept { return 2 * pairs.size(); }
    // Throws unless the pairs partition {0, ..., users - 1}.
    void validate(std::size_t users) const;
};

// Uniform random perfect matching. Within a pair the lower user index takes
// the positive role; pairs are listed by their positive member.
Pairing form_pairs(std::size_t users, Rng &rng);

struct SecretRange
{
    double mu_lo = 0.5;
    double mu_hi = 2.0;
    double sigma2_lo = 0.5;
    double sigma2_hi = 1.0;

    void validate() const;
};

// One secret per pair: mu ~ U[mu_lo, mu_hi], each role's variance ~ U[sigma2_lo, sigma2_hi].
std::vector<PairSecret> draw_secrets(const Pairing &pairing, const SecretRange &range, Rng &rng);

std::vector<double> draw_pcran(const PairSecret &secret, NoiseRole role, std::size_t dim, Rng &rng);

struct Alignment
{
    double m = 0.0;
    std::vector<double> alpha;
};

// Channel-inversion alignment limited by the weakest user q = argmin h2*P:
//   m = sqrt(alpha_cap * h2[q] P[q]) / L_s,   alpha[k] = alpha_cap * h2[q] P[q] / (h2[k] P[k]).
// alpha_cap = 1 spends the weakest user's whole budget on its gradient; a
// smaller cap reserves power for noise while keeping every user aligned to m.
Alignment compute_alignment(std::span<const double> h2, std::span<const double> power, double L_s,
                            double alpha_cap = 1.0);

struct PowerAllocation
{
    std::vector<double> power;  // P_k, linear
    std::vector<double> alpha;
    std::vector<double> beta;
    double m = 0.0;
    double L_s = 1.0;

    std::size_t users() const noexcept { return power.size(); }
    // Checks the split bounds and that |h_k| sqrt(alpha_k P_k) / L_s == m for
    // every user with alpha_k > 0 (relative tolerance 1e-9).
    void validate(std::span<const double> h2) const;
};

struct BetaAllocation
{
    double psi = 0.0;                     // DP noise budget
    std::vector<double> z;                // Z_k, noise power granted to user k
    std::vector<double> beta_unclamped;   // Z_k / (h2_k P_k)
    std::vector<double> beta;             // clamped into [0, 1 - alpha_k]
    std::vector<char> clamped;            // 1 where the clamp changed beta_k
};

// Psi = max_p (min_q h2[q] P[q] / eps[p]) * ln(1.25 / delta) - sigma_z2.
double dp_noise_budget(std::span<const double> h2, std::span<const double> power,
                       std::span<const double> eps, double delta, double sigma_z2);

// Sequential fill of the budget in user order:
//   Z_k = min(cap_k, (psi - sum_{p<k} U_p)^+),  U_p = Z_p,  beta_k = Z_k / (h2_k P_k).
// An empty alpha clamps beta into [0, 1].
BetaAllocation allocate_beta(double psi, std::span<const double> h2, std::span<const double> power,
                             std::span<const double> caps, std::span<const double> alpha = {});

BetaAllocation optimize_beta_dp(std::span<const double> h2, std::span<const double> power,
                                std::span<const double> eps, double delta, double sigma_z2,
                                std::span<const double> caps, std::span<const double> alpha = {});

// Pre-equalization of the artificial noise. Raw user k arrives with amplitude
// g_k = |h_k| sqrt(beta_k P_k); scaling its noise by c / g_k with
// c = min_k g_k makes every user's noise arrive with the same amplitude c,
// which is what lets opposite means cancel exactly.
struct NoiseEqualization
{
    double common_gain = 0.0;
    std::vector<double> scale;
};

double noise_amplitude(double h2, double beta, double power) noexcept;
NoiseEqualization equalize_noise(std::span<const double> h2, std::span<const double> power,
                                 std::span<const double> beta);

// Everything a round needs to generate the artificial noise of all users.
struct NoisePlan
{
    Pairing pairing;
    std::vector<PairSecret> secrets;  // one per pair, same order
    bool equalize = true;

    void validate(std::size_t users) const;
};

// n_k for every user, already multiplied by the equalization scale when
// plan.equalize is set. Row k is user k's d-dimensional noise vector.
std::vector<std::vector<double>> draw_user_noise(const NoisePlan &plan, const PowerAllocation &alloc,
                                                 std::span<const double> h2, std::size_t dim, Rng &rng);

// Statistics of the artificial-noise term as it arrives at the server,
// before the 1/(mK) post-processing.
struct NoiseStats
{
    double M = 0.0;             // common arrival amplitude of the noise
    double sigma_A2 = 0.0;      // sum over pairs of (sigma2_pos + sigma2_neg)
    double sigma_zprime2 = 0.0; // M^2 sigma_A2 + sigma_z2
    double mean_A = 0.0;        // predicted per-coordinate mean of the noise term
    double estimate_var = 0.0;  // sigma_zprime2 / (m K)^2, per-coordinate variance of s_hat
};

// With equalization M is the common amplitude c and mean_A is exactly zero.
// Without it, M is the amplitude for which M^2 sigma_A2 equals the true
// variance sum g_k^2 sigma_k^2, and mean_A collects the uncancelled means.
NoiseStats aggregate_noise_stats(const NoisePlan &plan, const PowerAllocation &alloc,
                                 std::span<const double> h2, double sigma_z2);

} // namespace airfl

#endif
