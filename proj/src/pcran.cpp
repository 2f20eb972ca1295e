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

#include "airfl/pcran.hpp"
#include "airfl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace airfl
{

namespace
{
void require_same_size(std::size_t a, std::size_t b, const char *what)
{
    if (a != b)
        fail(ErrorCode::dimension_mismatch, what);
}

bool finite_nonnegative(double x)
{
    return std::isfinite(x) && x >= 0.0;
}
} // namespace

// ---- pairs and secrets ---------------------------------------------------

void PairSecret::validate() const
{
    require(std::isfinite(mu), ErrorCode::invalid_argument, "pair secret mean must be finite");
    require(finite_nonnegative(sigma2_pos) && finite_nonnegative(sigma2_neg), ErrorCode::invalid_argument,
            "pair secret variances must be >= 0");
}

void Pairing::validate(std::size_t users) const
{
    if (2 * pairs.size() != users)
        fail(ErrorCode::pairing, "pairing covers " + std::to_string(2 * pairs.size()) + " users, expected " +
                                     std::to_string(users));
    std::vector<char> seen(users, 0);
    for (const auto &p : pairs)
    {
        for (auto k : {p.positive, p.negative})
        {
            if (k >= users || seen[k])
                fail(ErrorCode::pairing, "pairing is not a partition of the users");
            seen[k] = 1;
        }
    }
}

Pairing form_pairs(std::size_t users, Rng &rng)
{
    if (users < 2 || users % 2 != 0)
        fail(ErrorCode::pairing, "pairwise noise needs an even number of users >= 2, got " + std::to_string(users));

    std::vector<std::size_t> perm(users);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng.engine());

    Pairing out;
    out.pairs.reserve(users / 2);
    for (std::size_t i = 0; i < users; i += 2)
    {
        const auto a = perm[i];
        const auto b = perm[i + 1];
        out.pairs.push_back({std::min(a, b), std::max(a, b)});
    }
    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const UserPair &x, const UserPair &y) { return x.positive < y.positive; });
    return out;
}

void SecretRange::validate() const
{
    require(std::isfinite(mu_lo) && std::isfinite(mu_hi) && mu_lo <= mu_hi, ErrorCode::invalid_argument,
            "secret mean range must satisfy lo <= hi");
    require(finite_nonnegative(sigma2_lo) && std::isfinite(sigma2_hi) && sigma2_lo <= sigma2_hi,
            ErrorCode::invalid_argument, "secret variance range must satisfy 0 <= lo <= hi");
}

std::vector<PairSecret> draw_secrets(const Pairing &pairing, const SecretRange &range, Rng &rng)
{
    range.validate();
    std::vector<PairSecret> out;
    out.reserve(pairing.pairs.size());
    for (std::size_t i = 0; i < pairing.pairs.size(); ++i)
    {
        PairSecret s;
        s.mu = rng.uniform(range.mu_lo, range.mu_hi);
        s.sigma2_pos = rng.uniform(range.sigma2_lo, range.sigma2_hi);
        s.sigma2_neg = rng.uniform(range.sigma2_lo, range.sigma2_hi);
        out.push_back(s);
    }
    return out;
}

std::vector<double> draw_pcran(const PairSecret &secret, NoiseRole role, std::size_t dim, Rng &rng)
{
    secret.validate();
    require(dim >= 1, ErrorCode::invalid_argument, "noise dimension must be >= 1");
    const bool pos = role == NoiseRole::positive;
    const double mean = pos ? secret.mu : -secret.mu;
    const double sd = std::sqrt(pos ? secret.sigma2_pos : secret.sigma2_neg);
    std::vector<double> n(dim);
    for (auto &x : n)
        x = rng.normal(mean, sd);
    return n;
}

// ---- alignment and power split -------------------------------------------

Alignment compute_alignment(std::span<const double> h2, std::span<const double> power, double L_s, double alpha_cap)
{
    require_same_size(h2.size(), power.size(), "gains and powers differ in length");
    require(!h2.empty(), ErrorCode::empty_system, "alignment needs at least one user");
    require(std::isfinite(L_s) && L_s > 0.0, ErrorCode::invalid_argument, "L_s must be > 0");
    require(std::isfinite(alpha_cap) && alpha_cap > 0.0 && alpha_cap <= 1.0, ErrorCode::invalid_argument,
            "alpha cap must lie in (0, 1]");
    for (double p : power)
        require(std::isfinite(p) && p > 0.0, ErrorCode::invalid_argument, "transmit powers must be > 0");
    for (double g : h2)
    {
        require(std::isfinite(g) && g >= 0.0, ErrorCode::invalid_argument, "channel gains must be >= 0");
        require(g > 0.0, ErrorCode::degenerate_channel, "zero channel gain: channel inversion impossible");
    }

    std::size_t q = 0;
    for (std::size_t k = 1; k < h2.size(); ++k)
        if (h2[k] * power[k] < h2[q] * power[q])
            q = k;
    const double worst = h2[q] * power[q];

    Alignment out;
    out.m = std::sqrt(alpha_cap * worst) / L_s;
    out.alpha.resize(h2.size());
    for (std::size_t k = 0; k < h2.size(); ++k)
        out.alpha[k] = k == q ? alpha_cap : alpha_cap * worst / (h2[k] * power[k]);
    return out;
}

void PowerAllocation::validate(std::span<const double> h2) const
{
    const auto K = users();
    require(K >= 1, ErrorCode::empty_system, "allocation has no users");
    require_same_size(alpha.size(), K, "alpha length differs from user count");
    require_same_size(beta.size(), K, "beta length differs from user count");
    require_same_size(h2.size(), K, "gain length differs from user count");
    require(std::isfinite(m) && m > 0.0, ErrorCode::domain, "alignment constant m must be > 0");
    require(std::isfinite(L_s) && L_s > 0.0, ErrorCode::invalid_argument, "L_s must be > 0");
    constexpr double slack = 1e-12;
    for (std::size_t k = 0; k < K; ++k)
    {
        require(std::isfinite(power[k]) && power[k] > 0.0, ErrorCode::invalid_argument, "powers must be > 0");
        require(alpha[k] >= 0.0 && alpha[k] <= 1.0, ErrorCode::invalid_argument, "alpha must lie in [0, 1]");
        require(beta[k] >= 0.0 && beta[k] <= 1.0 - alpha[k] + slack, ErrorCode::invalid_argument,
                "beta must lie in [0, 1 - alpha]");
        if (alpha[k] > 0.0)
        {
            const double mk = std::sqrt(h2[k]) * std::sqrt(alpha[k] * power[k]) / L_s;
            require(std::abs(mk - m) <= 1e-9 * m, ErrorCode::precondition,
                    "allocation breaks alignment: |h_k| sqrt(alpha_k P_k) / L_s != m");
        }
    }
}

// ---- DP-driven noise power -----------------------------------------------

double dp_noise_budget(std::span<const double> h2, std::span<const double> power, std::span<const double> eps,
                       double delta, double sigma_z2)
{
    require_same_size(h2.size(), power.size(), "gains and powers differ in length");
    require_same_size(h2.size(), eps.size(), "epsilon list length differs from user count");
    require(!h2.empty(), ErrorCode::empty_system, "noise budget needs at least one user");
    require(std::isfinite(delta) && delta > 0.0 && delta < 1.0, ErrorCode::invalid_argument, "delta must lie in (0, 1)");
    for (double e : eps)
        require(std::isfinite(e) && e > 0.0, ErrorCode::invalid_argument, "epsilon values must be > 0");

    double worst = h2[0] * power[0];
    for (std::size_t q = 1; q < h2.size(); ++q)
        worst = std::min(worst, h2[q] * power[q]);

    double best = worst / eps[0];
    for (std::size_t p = 1; p < eps.size(); ++p)
        best = std::max(best, worst / eps[p]);
    return best * std::log(1.25 / delta) - sigma_z2;
}

BetaAllocation allocate_beta(double psi, std::span<const double> h2, std::span<const double> power,
                             std::span<const double> caps, std::span<const double> alpha)
{
    const auto K = h2.size();
    require_same_size(power.size(), K, "gains and powers differ in length");
    require_same_size(caps.size(), K, "cap list length differs from user count");
    if (!alpha.empty())
        require_same_size(alpha.size(), K, "alpha length differs from user count");
    require(!std::isnan(psi), ErrorCode::invalid_argument, "noise budget is NaN");

    BetaAllocation out;
    out.psi = psi;
    out.z.resize(K);
    out.beta_unclamped.resize(K);
    out.beta.resize(K);
    out.clamped.resize(K);

    double used = 0.0;
    for (std::size_t k = 0; k < K; ++k)
    {
        require(finite_nonnegative(caps[k]), ErrorCode::invalid_argument, "noise caps must be >= 0");
        const double hp = h2[k] * power[k];
        require(std::isfinite(hp) && hp > 0.0, ErrorCode::degenerate_channel, "h2 * P must be > 0 for every user");

        const double z = std::min(caps[k], std::max(psi - used, 0.0));
        used += z;
        out.z[k] = z;
        out.beta_unclamped[k] = z / hp;
        const double upper = alpha.empty() ? 1.0 : std::max(1.0 - alpha[k], 0.0);
        out.beta[k] = std::clamp(out.beta_unclamped[k], 0.0, upper);
        out.clamped[k] = out.beta[k] != out.beta_unclamped[k];
    }
    return out;
}

BetaAllocation optimize_beta_dp(std::span<const double> h2, std::span<const double> power,
                                std::span<const double> eps, double delta, double sigma_z2,
                                std::span<const double> caps, std::span<const double> alpha)
{
    const double psi = dp_noise_budget(h2, power, eps, delta, sigma_z2);
    return allocate_beta(psi, h2, power, caps, alpha);
}

// ---- noise generation and statistics -------------------------------------

double noise_amplitude(double h2, double beta, double power) noexcept
{
    return std::sqrt(h2 * beta * power);
}

NoiseEqualization equalize_noise(std::span<const double> h2, std::span<const double> power,
                                 std::span<const double> beta)
{
    require_same_size(h2.size(), power.size(), "gains and powers differ in length");
    require_same_size(h2.size(), beta.size(), "beta length differs from user count");
    require(!h2.empty(), ErrorCode::empty_system, "equalization needs at least one user");

    std::vector<double> g(h2.size());
    for (std::size_t k = 0; k < g.size(); ++k)
        g[k] = noise_amplitude(h2[k], beta[k], power[k]);

    NoiseEqualization out;
    out.common_gain = *std::min_element(g.begin(), g.end());
    out.scale.resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
        out.scale[k] = g[k] > 0.0 ? out.common_gain / g[k] : 0.0;
    return out;
}

void NoisePlan::validate(std::size_t users) const
{
    pairing.validate(users);
    if (secrets.size() != pairing.pairs.size())
        fail(ErrorCode::dimension_mismatch, "need exactly one secret per pair");
    for (const auto &s : secrets)
        s.validate();
}

std::vector<std::vector<double>> draw_user_noise(const NoisePlan &plan, const PowerAllocation &alloc,
                                                 std::span<const double> h2, std::size_t dim, Rng &rng)
{
    const auto K = alloc.users();
    plan.validate(K);
    require_same_size(h2.size(), K, "gain length differs from user count");

    std::vector<std::vector<double>> noise(K);
    for (std::size_t i = 0; i < plan.pairing.pairs.size(); ++i)
    {
        const auto &pair = plan.pairing.pairs[i];
        noise[pair.positive] = draw_pcran(plan.secrets[i], NoiseRole::positive, dim, rng);
        noise[pair.negative] = draw_pcran(plan.secrets[i], NoiseRole::negative, dim, rng);
    }

    if (plan.equalize)
    {
        const auto eq = equalize_noise(h2, alloc.power, alloc.beta);
        for (std::size_t k = 0; k < K; ++k)
            for (auto &x : noise[k])
                x *= eq.scale[k];
    }
    return noise;
}

NoiseStats aggregate_noise_stats(const NoisePlan &plan, const PowerAllocation &alloc, std::span<const double> h2,
                                 double sigma_z2)
{
    const auto K = alloc.users();
    plan.validate(K);
    require_same_size(h2.size(), K, "gain length differs from user count");
    require(std::isfinite(alloc.m) && alloc.m > 0.0, ErrorCode::domain, "alignment constant m must be > 0");
    require(finite_nonnegative(sigma_z2), ErrorCode::domain, "sigma_z2 must be >= 0");

    NoiseStats out;
    for (const auto &s : plan.secrets)
        out.sigma_A2 += s.sigma2_pos + s.sigma2_neg;

    const auto eq = equalize_noise(h2, alloc.power, alloc.beta);
    if (plan.equalize)
    {
        const double c = eq.common_gain;
        out.M = c;
        for (const auto &s : plan.secrets)
            out.mean_A += c * s.mu + c * (-s.mu);
        out.sigma_zprime2 = out.M * out.M * out.sigma_A2 + sigma_z2;
    }
    else
    {
        double var = 0.0;
        for (std::size_t i = 0; i < plan.pairing.pairs.size(); ++i)
        {
            const auto &pair = plan.pairing.pairs[i];
            const auto &s = plan.secrets[i];
            const double gp = noise_amplitude(h2[pair.positive], alloc.beta[pair.positive], alloc.power[pair.positive]);
            const double gn = noise_amplitude(h2[pair.negative], alloc.beta[pair.negative], alloc.power[pair.negative]);
            var += gp * gp * s.sigma2_pos + gn * gn * s.sigma2_neg;
            out.mean_A += (gp - gn) * s.mu;
        }
        out.M = out.sigma_A2 > 0.0 ? std::sqrt(var / out.sigma_A2) : eq.common_gain;
        out.sigma_zprime2 = var + sigma_z2;
    }

    const double scale = alloc.m * static_cast<double>(K);
    out.estimate_var = out.sigma_zprime2 / (scale * scale);
    return out;
}

} // namespace airfl
