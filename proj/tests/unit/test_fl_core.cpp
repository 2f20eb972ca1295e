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

#include "support/errors.hpp"
#include "support/reference.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace airfl;
using testing::error_of;

namespace
{

SyntheticTask small_task(std::size_t users, std::uint64_t seed, std::size_t d = 6)
{
    TaskSpec spec;
    spec.users = users;
    spec.points_per_user = 15;
    spec.d = d;
    Rng rng(seed);
    return make_ridge_task(spec, rng);
}

std::vector<double> random_w(std::size_t d, Rng &rng)
{
    std::vector<double> w(d);
    for (auto &x : w)
        x = rng.normal(0.0, 2.0);
    return w;
}

double norm(const std::vector<double> &v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

} // namespace

TEST_SUITE("fl_core")
{
    TEST_CASE("loss matches the brute-force sum")
    {
        const auto task = small_task(4, 1);
        const auto pooled = reference::pool(task);
        Rng rng(2);
        for (int i = 0; i < 50; ++i)
        {
            const auto w = random_w(task.d, rng);
            CHECK(global_loss(w, task) == doctest::Approx(reference::loss(pooled, w)).epsilon(1e-12));
        }
    }

    TEST_CASE("perfect fit has zero loss")
    {
        SyntheticTask task;
        task.d = 1;
        task.reg_lambda = 0.0;
        task.users.push_back(UserDataset{1, {1.0}, {1.0}});
        const std::vector<double> w{1.0};
        CHECK(global_loss(w, task) == 0.0);
    }

    TEST_CASE("gradient agrees with central differences")
    {
        const auto task = small_task(2, 3);
        Rng rng(4);
        const double h = 1e-6;
        for (int trial = 0; trial < 10; ++trial)
        {
            const auto w = random_w(task.d, rng);
            for (const auto &user : task.users)
            {
                SyntheticTask one;
                one.d = task.d;
                one.reg_lambda = task.reg_lambda;
                one.users = {user};
                const auto g = local_gradient(w, user, task.reg_lambda);
                double worst = 0.0;
                for (std::size_t i = 0; i < task.d; ++i)
                {
                    auto wp = w, wm = w;
                    wp[i] += h;
                    wm[i] -= h;
                    const double fd = (global_loss(wp, one) - global_loss(wm, one)) / (2.0 * h);
                    worst = std::max(worst, std::abs(fd - g[i]));
                }
                CHECK(worst <= 1e-4);
            }
        }
    }

    TEST_CASE("gradient vanishes at the optimum")
    {
        const auto task = small_task(1, 5);
        const auto opt = ridge_optimum(task);
        CHECK(norm(local_gradient(opt.w, task.users[0], task.reg_lambda)) <= 1e-8);
        CHECK(opt.loss == doctest::Approx(global_loss(opt.w, task)).epsilon(1e-12));
        CHECK(opt.loss >= 0.0);

        const auto pooled_task = small_task(4, 6);
        const auto pooled_opt = ridge_optimum(pooled_task);
        CHECK(norm(reference::gradient(reference::pool(pooled_task), pooled_opt.w)) <= 1e-8);
    }

    TEST_CASE("zero labels at zero weights give zero gradient")
    {
        auto task = small_task(1, 7);
        std::fill(task.users[0].labels.begin(), task.users[0].labels.end(), 0.0);
        const std::vector<double> w(task.d, 0.0);
        CHECK(norm(local_gradient(w, task.users[0], 0.5)) == 0.0);
    }

    TEST_CASE("smoothness is the top eigenvalue plus the regularizer")
    {
        const auto task = small_task(3, 8);
        const auto pooled = reference::pool(task);
        // Power iteration on the pooled second-moment matrix.
        std::vector<double> v(task.d, 1.0);
        double lambda_max = 0.0;
        for (int it = 0; it < 2000; ++it)
        {
            std::vector<double> next(task.d, 0.0);
            for (const auto &u : pooled.u)
            {
                double dotp = 0.0;
                for (std::size_t i = 0; i < task.d; ++i)
                    dotp += u[i] * v[i];
                for (std::size_t i = 0; i < task.d; ++i)
                    next[i] += dotp * u[i] / static_cast<double>(pooled.u.size());
            }
            lambda_max = norm(next);
            for (std::size_t i = 0; i < task.d; ++i)
                v[i] = next[i] / lambda_max;
        }
        CHECK(task.mu == doctest::Approx(lambda_max + task.reg_lambda).epsilon(1e-9));
        CHECK(smoothness(task) == task.mu);
    }

    TEST_CASE("bound hand value and scaling")
    {
        BoundInputs in{1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
        CHECK(convergence_bound(in) == 3.0);
        const double b = convergence_bound(in);
        in.T = 4.0;
        CHECK(convergence_bound(in) == doctest::Approx(b / 2.0).epsilon(1e-15));

        BoundInputs quiet{2.5, 0.1, 7.0, 1.5, 30.0, 0.8, 4.0, 0.0, 0.0};
        CHECK(convergence_bound(quiet) == doctest::Approx(2.0 * 2.5 * 1.5 * 1.5 / (0.01 * 7.0)).epsilon(1e-14));
    }

    TEST_CASE("bound matches the reference formula")
    {
        Rng rng(10);
        for (int i = 0; i < 1000; ++i)
        {
            BoundInputs in{rng.uniform(0.1, 5), rng.uniform(1e-3, 1), rng.uniform(1, 1e4), rng.uniform(0.1, 3),
                           rng.uniform(1, 100), rng.uniform(0.1, 50), std::floor(rng.uniform(1, 50)),
                           rng.uniform(0, 1e4), rng.uniform(0, 5)};
            const double ref = reference::bound(in.mu, in.lambda, in.T, in.L_s, in.d, in.m, in.K, in.noise_power_sum,
                                                in.sigma_z2);
            CHECK(convergence_bound(in) == doctest::Approx(ref).epsilon(1e-13));
        }
    }

    TEST_CASE("bound rejects degenerate inputs")
    {
        BoundInputs in{1.0, 1.0, 2.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0};
        CHECK(error_of([&] { convergence_bound(in); }) == ErrorCode::domain);
        in.m = 1.0;
        in.T = 0.0;
        CHECK(error_of([&] { convergence_bound(in); }) == ErrorCode::domain);
    }

    TEST_CASE("learning-rate schedules")
    {
        LearningRate lr;
        CHECK(lr.at(10, 1e-3) == doctest::Approx(100.0));
        lr.schedule = StepSchedule::constant;
        lr.eta = 0.25;
        CHECK(lr.at(1, 1e-3) == 0.25);
    }

    TEST_CASE("noiseless channel reproduces centralized descent")
    {
        const auto task = small_task(2, 11);
        OverAirConfig cfg;
        cfg.channel.sigma_z2 = 0.0;
        cfg.beta = 0.0;
        cfg.L_s = 1e6;
        cfg.T = 200;
        cfg.learning_rate = {StepSchedule::constant, 0.5};
        Rng rng(12);
        const auto res = train_over_air(task, cfg, rng);
        const auto ref = reference::gd_losses(reference::pool(task), 0.5, cfg.T);
        REQUIRE(res.state.loss_history.size() == ref.size());
        for (std::size_t t = 0; t < ref.size(); ++t)
            CHECK(res.state.loss_history[t] == doctest::Approx(ref[t]).epsilon(1e-10));
    }

    TEST_CASE("training is deterministic for a fixed seed")
    {
        const auto task = small_task(4, 13);
        OverAirConfig cfg;
        cfg.alpha_cap = 0.5;
        cfg.beta = 0.5;
        cfg.T = 100;
        Rng a(77), b(77);
        const auto x = train_over_air(task, cfg, a);
        const auto y = train_over_air(task, cfg, b);
        CHECK(x.state.loss_history == y.state.loss_history);
        CHECK(x.state.w == y.state.w);
    }

    TEST_CASE("training reports the bound and the gap")
    {
        const auto task = small_task(4, 14);
        OverAirConfig cfg;
        cfg.alpha_cap = 0.5;
        cfg.beta = 0.3;
        cfg.T = 50;
        Rng rng(15);
        const auto res = train_over_air(task, cfg, rng);
        const auto opt = ridge_optimum(task);
        REQUIRE(res.gap_history.size() == 51);
        REQUIRE(res.bound_history.size() == 51);
        for (std::size_t t = 0; t <= 50; ++t)
            CHECK(res.gap_history[t] == doctest::Approx(res.state.loss_history[t] - opt.loss).epsilon(1e-12));
        double sum = 0.0;
        for (std::size_t k = 0; k < 4; ++k)
            sum += res.channel.h2[k] * 0.3 * cfg.power;
        CHECK(res.noise_power_sum == doctest::Approx(sum));
        const double ref = reference::bound(task.mu, task.reg_lambda, 50.0, cfg.L_s, task.d, res.allocation.m, 4.0, sum,
                                            cfg.channel.sigma_z2);
        CHECK(res.bound_history[50] == doctest::Approx(ref).epsilon(1e-12));
    }

    TEST_CASE("dp mode keeps every beta inside its budget")
    {
        const auto task = small_task(4, 16);
        OverAirConfig cfg;
        cfg.alpha_cap = 0.3;
        cfg.beta_mode = BetaMode::dp;
        cfg.dp = {{1.0, 1.0, 1.0, 1.0}, 0.01, {500.0, 500.0, 500.0, 500.0}};
        cfg.T = 20;
        Rng rng(17);
        const auto res = train_over_air(task, cfg, rng);
        for (std::size_t k = 0; k < 4; ++k)
        {
            CHECK(res.allocation.beta[k] >= 0.0);
            CHECK(res.allocation.beta[k] + res.allocation.alpha[k] <= 1.0 + 1e-12);
        }
    }

    TEST_CASE("divergence is detected")
    {
        const auto task = small_task(2, 18);
        OverAirConfig cfg;
        cfg.channel.sigma_z2 = 0.0;
        cfg.L_s = 1e6;
        cfg.T = 500;
        cfg.learning_rate = {StepSchedule::constant, 1e3};
        Rng rng(19);
        CHECK(error_of([&] { train_over_air(task, cfg, rng); }) == ErrorCode::divergence);
    }

    TEST_CASE("odd user counts are rejected")
    {
        const auto task = small_task(3, 20);
        OverAirConfig cfg;
        cfg.alpha_cap = 0.5;
        cfg.beta = 0.5;
        Rng rng(21);
        CHECK(error_of([&] { train_over_air(task, cfg, rng); }) == ErrorCode::pairing);
    }
}
