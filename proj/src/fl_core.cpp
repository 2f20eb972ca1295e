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

#include "airfl/fl_core.hpp"
#include "airfl/aircomp.hpp"
#include "airfl/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace airfl
{

namespace
{
double dot(std::span<const double> a, std::span<const double> b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Pooled second-moment matrix and cross term: (1/|D|) sum u u^T, (1/|D|) sum u v.
void pooled_moments(const SyntheticTask &task, Eigen::MatrixXd &C, Eigen::VectorXd &b)
{
    const auto d = static_cast<Eigen::Index>(task.d);
    C = Eigen::MatrixXd::Zero(d, d);
    b = Eigen::VectorXd::Zero(d);
    for (const auto &user : task.users)
        for (std::size_t j = 0; j < user.size(); ++j)
        {
            Eigen::Map<const Eigen::VectorXd> u(user.row(j).data(), d);
            C.selfadjointView<Eigen::Lower>().rankUpdate(u);
            b += user.labels[j] * u;
        }
    C = C.selfadjointView<Eigen::Lower>();
    const double n = static_cast<double>(task.total_points());
    C /= n;
    b /= n;
}
} // namespace

// ---- task ----------------------------------------------------------------

std::size_t SyntheticTask::total_points() const noexcept
{
    std::size_t n = 0;
    for (const auto &u : users)
        n += u.size();
    return n;
}

void SyntheticTask::validate() const
{
    require(d >= 1, ErrorCode::invalid_argument, "model dimension must be >= 1");
    require(!users.empty(), ErrorCode::empty_system, "task has no users");
    require(std::isfinite(reg_lambda) && reg_lambda > 0.0, ErrorCode::invalid_argument, "reg_lambda must be > 0");
    require(mu >= reg_lambda, ErrorCode::invalid_argument, "smoothness mu must be >= reg_lambda");
    const auto n = users.front().size();
    require(n >= 1, ErrorCode::invalid_argument, "user datasets must be nonempty");
    for (const auto &u : users)
    {
        require(u.size() == n, ErrorCode::invalid_argument, "all users must hold the same number of points");
        if (u.d != d || u.features.size() != n * d)
            fail(ErrorCode::dimension_mismatch, "dataset feature dimension differs from the model dimension");
    }
}

SyntheticTask make_ridge_task(const TaskSpec &spec, Rng &rng)
{
    require(spec.users >= 1, ErrorCode::empty_system, "task needs at least one user");
    require(spec.points_per_user >= 1 && spec.d >= 1, ErrorCode::invalid_argument,
            "points per user and dimension must be >= 1");
    require(std::isfinite(spec.reg_lambda) && spec.reg_lambda > 0.0, ErrorCode::invalid_argument,
            "reg_lambda must be > 0");
    require(spec.weight_scale >= 0.0 && spec.label_noise >= 0.0, ErrorCode::invalid_argument,
            "weight scale and label noise must be >= 0");

    std::vector<double> w_true(spec.d);
    for (auto &x : w_true)
        x = spec.weight_scale * rng.standard_normal();

    const double feature_sd = 1.0 / std::sqrt(static_cast<double>(spec.d));
    SyntheticTask task;
    task.d = spec.d;
    task.reg_lambda = spec.reg_lambda;
    task.users.resize(spec.users);
    for (auto &user : task.users)
    {
        user.d = spec.d;
        user.features.resize(spec.points_per_user * spec.d);
        user.labels.resize(spec.points_per_user);
        for (std::size_t j = 0; j < spec.points_per_user; ++j)
        {
            double *u = user.features.data() + j * spec.d;
            for (std::size_t i = 0; i < spec.d; ++i)
                u[i] = feature_sd * rng.standard_normal();
            user.labels[j] = dot(user.row(j), w_true) + spec.label_noise * rng.standard_normal();
        }
    }
    task.mu = smoothness(task);
    return task;
}

double smoothness(const SyntheticTask &task)
{
    Eigen::MatrixXd C;
    Eigen::VectorXd b;
    pooled_moments(task, C, b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff() + task.reg_lambda;
}

RidgeOptimum ridge_optimum(const SyntheticTask &task)
{
    Eigen::MatrixXd C;
    Eigen::VectorXd b;
    pooled_moments(task, C, b);
    C.diagonal().array() += task.reg_lambda;
    const Eigen::VectorXd w = C.ldlt().solve(b);

    RidgeOptimum out;
    out.w.assign(w.data(), w.data() + w.size());
    out.loss = global_loss(out.w, task);
    return out;
}

double global_loss(std::span<const double> w, const SyntheticTask &task)
{
    if (w.size() != task.d)
        fail(ErrorCode::dimension_mismatch, "model vector dimension differs from the task dimension");
    double residual = 0.0;
    for (const auto &user : task.users)
        for (std::size_t j = 0; j < user.size(); ++j)
        {
            const double e = dot(user.row(j), w) - user.labels[j];
            residual += 0.5 * e * e;
        }
    return residual / static_cast<double>(task.total_points()) + 0.5 * task.reg_lambda * dot(w, w);
}

std::vector<double> local_gradient(std::span<const double> w, const UserDataset &data, double reg_lambda)
{
    if (w.size() != data.d)
        fail(ErrorCode::dimension_mismatch, "model vector dimension differs from the dataset dimension");
    require(data.size() >= 1, ErrorCode::invalid_argument, "dataset is empty");
    std::vector<double> g(data.d, 0.0);
    for (std::size_t j = 0; j < data.size(); ++j)
    {
        const auto u = data.row(j);
        const double e = dot(u, w) - data.labels[j];
        for (std::size_t i = 0; i < data.d; ++i)
            g[i] += e * u[i];
    }
    const double inv = 1.0 / static_cast<double>(data.size());
    for (std::size_t i = 0; i < data.d; ++i)
        g[i] = g[i] * inv + reg_lambda * w[i];
    return g;
}

double LearningRate::at(std::size_t t, double reg_lambda) const
{
    if (schedule == StepSchedule::constant)
        return eta;
    require(t >= 1, ErrorCode::invalid_argument, "iteration index starts at 1");
    return 1.0 / (reg_lambda * static_cast<double>(t));
}

// ---- bound ---------------------------------------------------------------

double convergence_bound(const BoundInputs &in)
{
    require(std::isfinite(in.T) && in.T > 0.0, ErrorCode::domain, "T must be > 0");
    require(std::isfinite(in.m) && in.m > 0.0, ErrorCode::domain, "m must be > 0");
    require(std::isfinite(in.K) && in.K > 0.0, ErrorCode::domain, "K must be > 0");
    require(std::isfinite(in.lambda) && in.lambda > 0.0, ErrorCode::domain, "lambda must be > 0");
    require(std::isfinite(in.mu) && in.mu > 0.0 && std::isfinite(in.d) && in.d > 0.0 && std::isfinite(in.L_s) &&
                in.L_s > 0.0,
            ErrorCode::domain, "mu, d and L_s must be > 0");
    require(std::isfinite(in.noise_power_sum) && in.noise_power_sum >= 0.0 && std::isfinite(in.sigma_z2) &&
                in.sigma_z2 >= 0.0,
            ErrorCode::domain, "noise powers must be >= 0");

    const double mK = in.m * in.K;
    const double noise = in.d / (mK * mK) * (in.noise_power_sum + in.sigma_z2);
    return 2.0 * in.mu / (in.lambda * in.lambda * in.T) * (in.L_s * in.L_s + noise);
}

// ---- training over the air -----------------------------------------------

void OverAirConfig::validate() const
{
    channel.validate();
    require(std::isfinite(power) && power > 0.0, ErrorCode::invalid_argument, "transmit power must be > 0");
    require(std::isfinite(L_s) && L_s > 0.0, ErrorCode::invalid_argument, "L_s must be > 0");
    require(alpha_cap > 0.0 && alpha_cap <= 1.0, ErrorCode::invalid_argument, "alpha must lie in (0, 1]");
    if (beta_mode == BetaMode::fixed)
        require(beta >= 0.0 && alpha_cap + beta <= 1.0 + 1e-12, ErrorCode::invalid_argument,
                "beta must satisfy 0 <= beta <= 1 - alpha");
    secrets.validate();
    require(T >= 1, ErrorCode::invalid_argument, "T must be >= 1");
    if (learning_rate.schedule == StepSchedule::constant)
        require(std::isfinite(learning_rate.eta) && learning_rate.eta > 0.0, ErrorCode::invalid_argument,
                "constant learning rate must be > 0");
}

TrainResult train_over_air(const SyntheticTask &task, const OverAirConfig &config, Rng &rng)
{
    task.validate();
    config.validate();
    const auto K = task.users.size();
    const auto d = task.d;

    TrainResult out;
    out.channel = sample_channel(config.channel, K, rng);
    const auto &h2 = out.channel.h2;

    NoisePlan plan;
    plan.pairing = form_pairs(K, rng);
    plan.secrets = draw_secrets(plan.pairing, config.secrets, rng);
    plan.equalize = config.equalize;

    auto &alloc = out.allocation;
    alloc.power.assign(K, config.power);
    alloc.L_s = config.L_s;
    auto align = compute_alignment(h2, alloc.power, config.L_s, config.alpha_cap);
    alloc.m = align.m;
    alloc.alpha = std::move(align.alpha);
    if (config.beta_mode == BetaMode::dp)
    {
        const auto b = optimize_beta_dp(h2, alloc.power, config.dp.eps, config.dp.delta, config.channel.sigma_z2,
                                        config.dp.caps, alloc.alpha);
        alloc.beta = b.beta;
        out.beta_clamped = std::any_of(b.clamped.begin(), b.clamped.end(), [](char c) { return c != 0; });
    }
    else
    {
        alloc.beta.assign(K, config.beta);
    }
    alloc.validate(h2);

    out.noise_stats = aggregate_noise_stats(plan, alloc, h2, config.channel.sigma_z2);
    for (std::size_t k = 0; k < K; ++k)
        out.noise_power_sum += h2[k] * alloc.beta[k] * alloc.power[k];

    const auto optimum = ridge_optimum(task);
    BoundInputs bound;
    bound.mu = task.mu;
    bound.lambda = task.reg_lambda;
    bound.L_s = config.L_s;
    bound.d = static_cast<double>(d);
    bound.m = alloc.m;
    bound.K = static_cast<double>(K);
    bound.noise_power_sum = out.noise_power_sum;
    bound.sigma_z2 = config.channel.sigma_z2;

    auto &state = out.state;
    state.w.assign(d, 0.0);
    state.loss_history.reserve(config.T + 1);
    out.gap_history.reserve(config.T + 1);
    out.bound_history.reserve(config.T + 1);

    const double initial = global_loss(state.w, task);
    state.loss_history.push_back(initial);
    out.gap_history.push_back(initial - optimum.loss);
    out.bound_history.push_back(0.0);
    const double limit = 1e6 * std::max(initial, std::numeric_limits<double>::min());

    std::vector<std::vector<double>> grads(K);
    double g2_sum = 0.0;
    for (std::size_t t = 1; t <= config.T; ++t)
    {
        for (std::size_t k = 0; k < K; ++k)
            grads[k] = local_gradient(state.w, task.users[k], task.reg_lambda);
        const auto round = aggregate_round(grads, alloc, out.channel, plan, config.channel.sigma_z2,
                                           out.noise_stats, rng);
        const auto &s_hat = round.estimate.s_hat;

        state.t = t;
        state.eta = config.learning_rate.at(t, task.reg_lambda);
        for (std::size_t i = 0; i < d; ++i)
            state.w[i] -= state.eta * s_hat[i];
        g2_sum += dot(s_hat, s_hat);

        const double loss = global_loss(state.w, task);
        if (!(loss <= limit))
            fail(ErrorCode::divergence, "training diverged at iteration " + std::to_string(t) +
                                            ": loss exceeds 1e6 times the initial loss");
        state.loss_history.push_back(loss);
        out.gap_history.push_back(loss - optimum.loss);
        bound.T = static_cast<double>(t);
        out.bound_history.push_back(convergence_bound(bound));
    }
    out.G2 = g2_sum / static_cast<double>(config.T);
    return out;
}

} // namespace airfl
