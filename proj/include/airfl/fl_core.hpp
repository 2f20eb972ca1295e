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

#ifndef AIRFL_FL_CORE_HPP
#define AIRFL_FL_CORE_HPP

#include "airfl/channel.hpp"
#include "airfl/pcran.hpp"
#include "airfl/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace airfl
{

// Row-major feature matrix (size() x d) with one label per row.
struct UserDataset
{
    std::size_t d = 0;
    std::vector<double> features;
    std::vector<double> labels;

    std::size_t size() const noexcept { return labels.size(); }
    std::span<const double> row(std::size_t j) const { return {features.data() + j * d, d}; }
};

// Ridge regression split across users:
//   f((u, v); w) = 1/2 (u.w - v)^2 + reg_lambda/2 |w|^2
// F is reg_lambda-strongly convex and mu-smooth with
// mu = lambda_max(pooled second-moment matrix) + reg_lambda.
struct SyntheticTask
{
    std::size_t d = 0;
    std::vector<UserDataset> users;
    double reg_lambda = 1e-3;
    double mu = 0.0;

    std::size_t total_points() const noexcept;
    void validate() const;
};

struct TaskSpec
{
    std::size_t users = 2;
    std::size_t points_per_user = 20;
    std::size_t d = 30;
    double reg_lambda = 1e-3;
    double weight_scale = 2.0;  // ground-truth weights ~ N(0, weight_scale^2)
    double label_noise = 0.1;   // label noise standard deviation
};

// Features u ~ N(0, I/d), labels v = u.w_true + noise.
SyntheticTask make_ridge_task(const TaskSpec &spec, Rng &rng);

double smoothness(const SyntheticTask &task);

struct RidgeOptimum
{
    std::vector<double> w;
    double loss = 0.0;
};

RidgeOptimum ridge_optimum(const SyntheticTask &task);

double global_loss(std::span<const double> w, const SyntheticTask &task);
std::vector<double> local_gradient(std::span<const double> w, const UserDataset &data, double reg_lambda);

enum class StepSchedule
{
    inverse_time,  // eta_t = 1 / (reg_lambda t)
    constant
};

struct LearningRate
{
    StepSchedule schedule = StepSchedule::inverse_time;
    double eta = 0.1;  // constant schedule only

    double at(std::size_t t, double reg_lambda) const;
};

struct BoundInputs
{
    double mu = 0.0;
    double lambda = 0.0;
    double T = 0.0;
    double L_s = 1.0;
    double d = 0.0;
    double m = 0.0;
    double K = 0.0;
    double noise_power_sum = 0.0;  // sum_k |h_k|^2 beta_k P_k
    double sigma_z2 = 0.0;
};

// (2 mu / (lambda^2 T)) (L_s^2 + d / (m^2 K^2) (noise_power_sum + sigma_z2))
double convergence_bound(const BoundInputs &in);

enum class BetaMode
{
    fixed,
    dp
};

struct DpSettings
{
    std::vector<double> eps;
    double delta = 1e-5;
    std::vector<double> caps;
};

struct OverAirConfig
{
    ChannelConfig channel;
    double power = 1000.0;  // per-user P_k, linear
    double L_s = 1.0;
    double alpha_cap = 1.0; // alpha of the weakest user, see compute_alignment
    BetaMode beta_mode = BetaMode::fixed;
    double beta = 0.0;
    DpSettings dp;
    SecretRange secrets;
    bool equalize = true;
    std::size_t T = 1000;
    LearningRate learning_rate;

    void validate() const;
};

struct TrainState
{
    std::vector<double> w;
    std::size_t t = 0;
    double eta = 0.0;
    std::vector<double> loss_history;  // index t holds F(w) after t updates
};

struct TrainResult
{
    TrainState state;
    std::vector<double> gap_history;    // F(w) - F(w*) per index of loss_history
    std::vector<double> bound_history;  // convergence_bound with T = t; index 0 unused
    ChannelRealization channel;
    PowerAllocation allocation;
    NoiseStats noise_stats;
    double noise_power_sum = 0.0;
    double G2 = 0.0;                    // empirical mean |s_hat|^2 over all rounds
    bool beta_clamped = false;
};

// Runs T rounds starting from w = 0. The channel, pairing and pair secrets are
// drawn once from rng and held for the whole run; each round then draws its
// artificial noise and receiver noise from the same generator.
// Throws ErrorCode::divergence if the loss exceeds 1e6 times the initial loss.
TrainResult train_over_air(const SyntheticTask &task, const OverAirConfig &config, Rng &rng);

} // namespace airfl

#endif
