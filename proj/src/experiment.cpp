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
#include "airfl/experiment.hpp"
#include "airfl/parallel.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace airfl
{

std::vector<std::string> experiment_columns(ExperimentKind kind)
{
    switch (kind)
    {
    case ExperimentKind::fig3: return {"alpha", "P_db", "delta_h", "sigma_A2_db", "mean_c", "mean_c_s", "mean_c_ev"};
    case ExperimentKind::fig4: return {"P_db", "sigma_A2_db", "alpha", "delta_h", "mean_c", "mean_c_s", "mean_c_ev"};
    case ExperimentKind::fig5: return {"t", "K", "alpha", "beta", "bound", "simulated_loss", "simulated_gap"};
    case ExperimentKind::train: return {"t", "loss", "gap", "bound"};
    case ExperimentKind::noise_check:
        return {"coord",    "noise_mean", "noise_std_err",  "noise_var",      "pred_noise_var",
                "resid_var", "pred_resid_var", "rel_err", "excess_kurtosis"};
    }
    return {};
}

namespace
{

ResultTable empty_table(ExperimentKind kind)
{
    ResultTable t;
    t.columns = experiment_columns(kind);
    t.integer_column.assign(t.columns.size(), 0);
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        t.integer_column[i] = t.columns[i] == "t" || t.columns[i] == "K" || t.columns[i] == "coord";
    return t;
}

[[noreturn]] void rethrow_with_context(const Error &e, const std::string &context)
{
    throw Error(e.code(), context + ": " + e.what());
}

// ---- secrecy figures -----------------------------------------------------

ResultTable run_secrecy(const ExperimentConfig &c)
{
    SecrecySweep sweep;
    sweep.alpha = c.alpha;
    sweep.power_db = c.power_db;
    sweep.delta_h = c.delta_h;
    sweep.sigma_A2 = c.sigma_A2;
    sweep.sigma_a2 = c.sigma_a2;
    sweep.sigma_z2 = c.sigma_z2;
    sweep.L_s = c.L_s;
    sweep.sigma_a2_mode = c.sigma_a2_mode;
    sweep.fading_mode = c.fading_mode;
    if (c.fading_mode == FadingMode::fixed)
        sweep.fixed_gain = c.fixed_gains.front();

    const auto points = monte_carlo_secrecy(sweep, c.samples, c.seed, c.threads);

    const auto nP = c.power_db.size(), nD = c.delta_h.size(), nS = c.sigma_A2.size();
    auto at = [&](std::size_t a, std::size_t p, std::size_t dh, std::size_t s) -> const SweepPoint & {
        return points[((a * nP + p) * nD + dh) * nS + s];
    };

    auto table = empty_table(c.experiment);
    if (c.experiment == ExperimentKind::fig3)
    {
        for (std::size_t a = 0; a < c.alpha.size(); ++a)
            for (std::size_t p = 0; p < nP; ++p)
                for (std::size_t dh = 0; dh < nD; ++dh)
                    for (std::size_t s = 0; s < nS; ++s)
                    {
                        const auto &pt = at(a, p, dh, s);
                        table.rows.push_back({pt.alpha, pt.power_db, pt.delta_h, c.sigma_A2_db[s], pt.mean.c,
                                              pt.mean.c_s, pt.mean.c_ev});
                    }
    }
    else
    {
        for (std::size_t p = 0; p < nP; ++p)
            for (std::size_t s = 0; s < nS; ++s)
                for (std::size_t a = 0; a < c.alpha.size(); ++a)
                    for (std::size_t dh = 0; dh < nD; ++dh)
                    {
                        const auto &pt = at(a, p, dh, s);
                        table.rows.push_back({pt.power_db, c.sigma_A2_db[s], pt.alpha, pt.delta_h, pt.mean.c,
                                              pt.mean.c_s, pt.mean.c_ev});
                    }
    }
    return table;
}

// ---- training figures ----------------------------------------------------

OverAirConfig over_air_config(const ExperimentConfig &c, std::size_t K, double alpha, double beta)
{
    OverAirConfig oc;
    oc.channel.fading_mode = c.fading_mode;
    oc.channel.sigma_z2 = c.sigma_z2;
    oc.channel.fixed_gains = c.fixed_gains;
    oc.power = c.power.front();
    oc.L_s = c.L_s;
    oc.alpha_cap = alpha;
    oc.beta = beta;
    oc.secrets = c.secrets;
    oc.equalize = c.equalize;
    oc.T = c.T;
    oc.learning_rate = c.learning_rate;
    if (c.dp_enabled)
    {
        oc.beta_mode = BetaMode::dp;
        oc.dp.delta = c.dp.delta;
        oc.dp.eps = c.dp.eps.size() == 1 ? std::vector<double>(K, c.dp.eps.front()) : c.dp.eps;
        oc.dp.caps = c.dp.caps.size() == 1 ? std::vector<double>(K, c.dp.caps.front()) : c.dp.caps;
    }
    return oc;
}

SyntheticTask task_for(const ExperimentConfig &c, std::size_t K)
{
    TaskSpec spec;
    spec.users = K;
    spec.points_per_user = c.points_per_user;
    spec.d = c.d;
    spec.reg_lambda = c.reg_lambda;
    spec.weight_scale = c.weight_scale;
    spec.label_noise = c.label_noise;
    auto rng = Rng::stream(c.seed, StreamTag::task, {K});
    return make_ridge_task(spec, rng);
}

bool recorded(std::size_t t, const ExperimentConfig &c)
{
    return t == 1 || t == c.T || t % c.record_every == 0;
}

// Mean histories over runs for one (K, alpha, beta) curve. Runs of different
// curves with the same K share channel, pairing and noise streams.
struct CurveMeans
{
    std::vector<double> loss, gap, bound;
};

std::vector<CurveMeans> train_curves(const ExperimentConfig &c, const std::vector<std::size_t> &users,
                                     const std::vector<std::pair<double, double>> &splits)
{
    std::vector<SyntheticTask> tasks;
    for (auto K : users)
        tasks.push_back(task_for(c, K));

    const auto n_curves = users.size() * splits.size();
    std::vector<TrainResult> results(n_curves * c.runs);
    parallel_for(results.size(), c.threads, [&](std::size_t job) {
        const auto curve = job / c.runs;
        const auto run = job % c.runs;
        const auto ki = curve / splits.size();
        const auto [alpha, beta] = splits[curve % splits.size()];
        const auto K = users[ki];
        auto rng = Rng::stream(c.seed, StreamTag::training, {K, run});
        try
        {
            results[job] = train_over_air(tasks[ki], over_air_config(c, K, alpha, beta), rng);
        }
        catch (const Error &e)
        {
            std::ostringstream ctx;
            ctx << experiment_name(c.experiment) << " (K=" << K << ", alpha=" << alpha << ", beta=" << beta
                << ", run " << run << ")";
            rethrow_with_context(e, ctx.str());
        }
    });

    // Running means keep a column of identical values exactly equal to that value.
    std::vector<CurveMeans> means(n_curves);
    for (std::size_t curve = 0; curve < n_curves; ++curve)
    {
        auto &m = means[curve];
        m.loss.assign(c.T + 1, 0.0);
        m.gap.assign(c.T + 1, 0.0);
        m.bound.assign(c.T + 1, 0.0);
        for (std::size_t run = 0; run < c.runs; ++run)
        {
            const auto &r = results[curve * c.runs + run];
            const double w = 1.0 / static_cast<double>(run + 1);
            for (std::size_t t = 0; t <= c.T; ++t)
            {
                m.loss[t] += (r.state.loss_history[t] - m.loss[t]) * w;
                m.gap[t] += (r.gap_history[t] - m.gap[t]) * w;
                m.bound[t] += (r.bound_history[t] - m.bound[t]) * w;
            }
        }
    }
    return means;
}

ResultTable run_fig5(const ExperimentConfig &c)
{
    const auto means = train_curves(c, c.users_grid, c.ab_pairs);
    auto table = empty_table(c.experiment);
    for (std::size_t ki = 0; ki < c.users_grid.size(); ++ki)
        for (std::size_t pi = 0; pi < c.ab_pairs.size(); ++pi)
        {
            const auto &m = means[ki * c.ab_pairs.size() + pi];
            for (std::size_t t = 1; t <= c.T; ++t)
                if (recorded(t, c))
                    table.rows.push_back({static_cast<double>(t), static_cast<double>(c.users_grid[ki]),
                                          c.ab_pairs[pi].first, c.ab_pairs[pi].second, m.bound[t], m.loss[t],
                                          m.gap[t]});
        }
    return table;
}

ResultTable run_train(const ExperimentConfig &c)
{
    const auto means = train_curves(c, {c.users}, {{c.alpha.front(), c.beta}});
    const auto &m = means.front();
    auto table = empty_table(c.experiment);
    for (std::size_t t = 1; t <= c.T; ++t)
        if (recorded(t, c))
            table.rows.push_back({static_cast<double>(t), m.loss[t], m.gap[t], m.bound[t]});
    return table;
}

// ---- noise cancellation check ---------------------------------------------

constexpr std::size_t rounds_per_block = 1024;

ResultTable run_noise_check(const ExperimentConfig &c)
{
    const auto K = c.users;
    const auto d = c.d;

    auto setup = Rng::stream(c.seed, StreamTag::noise_check, {0});
    ChannelConfig cc;
    cc.fading_mode = c.fading_mode;
    cc.sigma_z2 = c.sigma_z2;
    cc.fixed_gains = c.fixed_gains;
    const auto channel = sample_channel(cc, K, setup);

    NoisePlan plan;
    plan.pairing = form_pairs(K, setup);
    plan.secrets = draw_secrets(plan.pairing, c.secrets, setup);
    plan.equalize = c.equalize;

    std::vector<std::vector<double>> grads(K);
    std::vector<double> true_mean(d, 0.0);
    for (auto &g : grads)
    {
        std::vector<double> raw(d);
        for (auto &x : raw)
            x = setup.standard_normal();
        g = clip_gradient(raw, c.L_s);
        for (std::size_t i = 0; i < d; ++i)
            true_mean[i] += g[i] / static_cast<double>(K);
    }

    PowerAllocation alloc;
    alloc.power.assign(K, c.power.front());
    alloc.L_s = c.L_s;
    auto align = compute_alignment(channel.h2, alloc.power, c.L_s, c.alpha.front());
    alloc.m = align.m;
    alloc.alpha = std::move(align.alpha);
    alloc.beta.assign(K, c.beta);
    alloc.validate(channel.h2);
    const auto stats = aggregate_noise_stats(plan, alloc, channel.h2, c.sigma_z2);

    // Per block and coordinate: power sums of the noise term (1..4) and of the residual (1..2).
    using Sums = std::array<double, 6>;
    const auto n_blocks = (c.samples + rounds_per_block - 1) / rounds_per_block;
    std::vector<std::vector<Sums>> partial(n_blocks, std::vector<Sums>(d, Sums{}));
    parallel_for(n_blocks, c.threads, [&](std::size_t b) {
        auto rng = Rng::stream(c.seed, StreamTag::noise_check, {1, b});
        auto &acc = partial[b];
        const auto first = b * rounds_per_block;
        const auto last = std::min(c.samples, first + rounds_per_block);
        for (auto n = first; n < last; ++n)
        {
            const auto out = aggregate_round(grads, alloc, channel, plan, c.sigma_z2, stats, rng);
            for (std::size_t i = 0; i < d; ++i)
            {
                const double a = out.noise_term[i];
                const double e = out.estimate.s_hat[i] - true_mean[i];
                acc[i][0] += a;
                acc[i][1] += a * a;
                acc[i][2] += a * a * a;
                acc[i][3] += a * a * a * a;
                acc[i][4] += e;
                acc[i][5] += e * e;
            }
        }
    });

    const double N = static_cast<double>(c.samples);
    const double pred_noise_var = stats.sigma_zprime2 - c.sigma_z2;
    auto table = empty_table(c.experiment);
    for (std::size_t i = 0; i < d; ++i)
    {
        Sums s{};
        for (const auto &block : partial)
            for (std::size_t j = 0; j < s.size(); ++j)
                s[j] += block[i][j];
        const double mean = s[0] / N;
        const double m2 = s[1] / N - mean * mean;
        const double m4 = s[3] / N - 4.0 * mean * s[2] / N + 6.0 * mean * mean * s[1] / N - 3.0 * mean * mean * mean * mean;
        const double kurt = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
        const double e_mean = s[4] / N;
        const double resid_var = s[5] / N - e_mean * e_mean;
        const double rel = stats.estimate_var > 0.0 ? std::abs(resid_var - stats.estimate_var) / stats.estimate_var : 0.0;
        table.rows.push_back({static_cast<double>(i), mean, std::sqrt(std::max(m2, 0.0) / N), m2, pred_noise_var,
                              resid_var, stats.estimate_var, rel, kurt});
    }
    return table;
}

} // namespace

ResultTable run_experiment(const ExperimentConfig &config)
{
    config.validate();
    switch (config.experiment)
    {
    case ExperimentKind::fig3:
    case ExperimentKind::fig4:
        return run_secrecy(config);
    case ExperimentKind::fig5:
        return run_fig5(config);
    case ExperimentKind::train:
        return run_train(config);
    case ExperimentKind::noise_check:
        return run_noise_check(config);
    }
    fail(ErrorCode::invalid_argument, "unknown experiment");
}

} // namespace airfl
