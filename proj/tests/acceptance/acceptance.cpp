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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Pass criterion numbers as arguments to run
// a subset.

#include "airfl/aircomp.hpp"
#include "airfl/experiment.hpp"
#include "airfl/fl_core.hpp"
#include "airfl/pcran.hpp"
#include "airfl/secrecy.hpp"

#include "support/reference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace airfl;

namespace
{

struct Outcome
{
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string &what)
    {
        if (!ok)
        {
            if (pass)
                detail << "first failure: ";
            else
                detail << "; ";
            detail << what;
            pass = false;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool rel_close(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// ---- 1: secrecy versus alpha -------------------------------------------

void fig3_trends(Outcome &o)
{
    const auto start = std::chrono::steady_clock::now();
    auto c = parse_config(R"({"experiment": "fig3", "sigma_a2_db": 25, "sigma_z2": 1, "samples": 100000,
                              "alpha": [0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5],
                              "power_db": [25, 30], "delta_h": [0, 0.5], "seed": 1})");
    const auto t = run_experiment(c);
    const double elapsed = seconds_since(start);

    std::map<std::tuple<double, double, double>, double> c_at;  // (P, dh, alpha) -> mean c
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        c_at[{t.at(r, "P_db"), t.at(r, "delta_h"), t.at(r, "alpha")}] = t.at(r, "mean_c");

    int alpha_violations = 0, gap_violations = 0;
    for (double P : {25.0, 30.0})
    {
        for (double dh : {0.0, 0.5})
            for (std::size_t i = 1; i < c.alpha.size(); ++i)
                alpha_violations += c_at.at({P, dh, c.alpha[i]}) < c_at.at({P, dh, c.alpha[i - 1]});
        for (double a : c.alpha)
            gap_violations += c_at.at({P, 0.5, a}) < c_at.at({P, 0.0, a});
    }
    o.check(alpha_violations == 0, std::to_string(alpha_violations) + " decreases in alpha");
    o.check(gap_violations == 0, std::to_string(gap_violations) + " points where delta_h > 0 is worse");
    o.check(elapsed < 60.0, "runtime " + std::to_string(elapsed) + " s");
    o.detail << (o.pass ? "" : "; ") << "violations (alpha, delta_h) = " << alpha_violations << "/" << gap_violations
             << ", c(0.5, 30 dB, dh 0.5) = " << c_at.at({30.0, 0.5, 0.5}) << " bit, " << elapsed
             << " s";
}

// ---- 2: secrecy versus residual noise and power -----------------------

void fig4_trends(Outcome &o)
{
    auto c = parse_config(R"({"experiment": "fig4", "samples": 100000, "seed": 2, "delta_h": 0.5,
                              "power_db": [0, 5, 10, 15, 20, 25, 30], "sigma_A2_db": [0, 5, 10, 15, 20]})");
    const auto t = run_experiment(c);
    std::map<std::pair<double, double>, double> c_at;  // (P, sigma_A2 dB) -> mean c
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        c_at[{t.at(r, "P_db"), t.at(r, "sigma_A2_db")}] = t.at(r, "mean_c");

    int noise_violations = 0, dominance_violations = 0, power_violations = 0;
    for (double P : c.power_db)
    {
        for (std::size_t s = 1; s < c.sigma_A2_db.size(); ++s)
        {
            noise_violations += c_at.at({P, c.sigma_A2_db[s]}) > c_at.at({P, c.sigma_A2_db[s - 1]});
            dominance_violations += c_at.at({P, c.sigma_A2_db[s]}) > c_at.at({P, 0.0});
        }
    }
    for (double s : c.sigma_A2_db)
        for (std::size_t p = 1; p < c.power_db.size(); ++p)
            power_violations += c_at.at({c.power_db[p], s}) < c_at.at({c.power_db[p - 1], s});
    o.check(noise_violations == 0, std::to_string(noise_violations) + " increases in sigma_A2");
    o.check(dominance_violations == 0, "0 dB curve dominated at " + std::to_string(dominance_violations) + " points");
    o.check(power_violations == 0, std::to_string(power_violations) + " decreases in P");
    o.detail << (o.pass ? "" : "; ") << "violations (sigma_A2, dominance, power) = " << noise_violations << "/"
             << dominance_violations << "/" << power_violations;
}

// ---- 3: convergence bound ---------------------------------------------

void bound_oracle(Outcome &o)
{
    const BoundInputs hand{1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    const double b = convergence_bound(hand);
    o.check(std::abs(b - 3.0) <= 1e-12 * 3.0, "hand point gives " + std::to_string(b));

    Rng rng(3);
    int halving = 0, k_doubling = 0, oracle = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i)
    {
        BoundInputs in{rng.uniform(0.1, 5), rng.uniform(1e-3, 1), std::floor(rng.uniform(1, 1e4)),
                       rng.uniform(0.1, 3), std::floor(rng.uniform(1, 100)), rng.uniform(0.1, 50),
                       std::floor(rng.uniform(1, 50)), 0.0, rng.uniform(0, 5)};
        const double per_user = rng.uniform(0, 1e3);
        in.noise_power_sum = per_user * in.K;
        const double base = convergence_bound(in);
        oracle += !rel_close(base, reference::bound(in.mu, in.lambda, in.T, in.L_s, in.d, in.m, in.K,
                                                    in.noise_power_sum, in.sigma_z2), 1e-12);
        auto twice_T = in;
        twice_T.T *= 2.0;
        halving += !rel_close(convergence_bound(twice_T), base / 2.0, 1e-14);
        auto twice_K = in;
        twice_K.K *= 2.0;
        twice_K.noise_power_sum = per_user * twice_K.K;
        k_doubling += !(convergence_bound(twice_K) < base);
    }
    o.check(oracle == 0, std::to_string(oracle) + " disagreements with the reference formula");
    o.check(halving == 0, std::to_string(halving) + " cases where doubling T did not halve the bound");
    o.check(k_doubling == 0, std::to_string(k_doubling) + " cases where doubling K did not lower the bound");
    o.detail << (o.pass ? "" : "; ") << "bound(hand) = " << b << ", " << trials
             << " random inputs checked for T and K doubling";
}

// ---- 4: secrecy capacity ------------------------------------------------

void secrecy_oracle(Outcome &o)
{
    SecrecyInputs hand;
    hand.alpha_a = 1.0;
    hand.P_a = 1.0;
    hand.L_s = 1.0;
    hand.h2_a = 2.0;
    hand.h2_ev = 1.0;
    hand.sigma_z2 = 1.0;
    hand.sigma_a2 = 1.0;
    hand.sigma_zprime2 = 1.0;
    const double c = secrecy_point(hand).c;
    o.check(c == 1.0, "hand point gives " + std::to_string(c) + " bit");

    Rng rng(4);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i)
    {
        SecrecyInputs in;
        in.alpha_a = rng.uniform(0.0, 1.0);
        in.P_a = db_to_linear(rng.uniform(-10.0, 40.0));
        in.L_s = rng.uniform(0.1, 5.0);
        in.h2_a = sample_rayleigh_gain(rng);
        in.h2_ev = sample_rayleigh_gain(rng);
        in.sigma_z2 = rng.uniform(0.01, 3.0);
        in.sigma_a2 = db_to_linear(rng.uniform(-10.0, 30.0));
        in.sigma_zprime2 = in.sigma_z2 + db_to_linear(rng.uniform(-10.0, 30.0));
        const auto p = secrecy_point(in);
        const double S = std::sqrt(in.alpha_a * in.P_a) / in.L_s;
        const double snr = S * in.h2_a / in.sigma_zprime2;
        worst = std::max(worst, std::abs(p.c_s - std::log2(1.0 + snr)) / std::max(1.0, std::abs(p.c_s)));
    }
    o.check(worst <= 1e-12, "c_s identity off by " + std::to_string(worst));
    o.detail << (o.pass ? "" : "; ") << "C(hand) = " << c << " bit, worst c_s identity error " << worst
             << " over 10000 inputs";
}

// ---- 5: noise cancellation and unbiasedness --------------------------------

void noise_cancellation(Outcome &o)
{
    const std::size_t K = 4, d = 4, N = 1000000;
    const double P = db_to_linear(30.0), alpha_cap = 0.5, beta = 0.5, L_s = 1.0, sigma_z2 = 1.0;

    Rng setup(5);
    ChannelConfig cc;
    const auto channel = sample_channel(cc, K, setup);
    NoisePlan plan;
    plan.pairing = form_pairs(K, setup);
    plan.secrets = draw_secrets(plan.pairing, SecretRange{}, setup);

    PowerAllocation alloc;
    alloc.power.assign(K, P);
    alloc.L_s = L_s;
    const auto al = compute_alignment(channel.h2, alloc.power, L_s, alpha_cap);
    alloc.m = al.m;
    alloc.alpha = al.alpha;
    alloc.beta.assign(K, beta);
    const auto stats = aggregate_noise_stats(plan, alloc, channel.h2, sigma_z2);

    // Prediction built directly from the channel and the secrets.
    double min_gp = std::numeric_limits<double>::infinity(), c_amp = min_gp;
    for (std::size_t k = 0; k < K; ++k)
    {
        min_gp = std::min(min_gp, channel.h2[k] * P);
        c_amp = std::min(c_amp, std::sqrt(channel.h2[k] * beta * P));
    }
    const double m = std::sqrt(alpha_cap * min_gp) / L_s;
    double sigma_A2 = 0.0;
    for (const auto &s : plan.secrets)
        sigma_A2 += s.sigma2_pos + s.sigma2_neg;
    const double predicted = (c_amp * c_amp * sigma_A2 + sigma_z2) / (m * m * K * K);

    std::vector<std::vector<double>> grads{{0.3, -0.2, 0.5, 0.1}, {-0.6, 0.4, 0.0, 0.2},
                                           {0.1, 0.1, -0.3, 0.7}, {0.2, -0.5, 0.4, -0.4}};
    std::vector<double> truth(d, 0.0);
    for (const auto &g : grads)
        for (std::size_t i = 0; i < d; ++i)
            truth[i] += g[i] / K;

    std::vector<double> a1(d), a2(d), e1(d), e2(d);
    Rng rng(55);
    for (std::size_t n = 0; n < N; ++n)
    {
        const auto out = aggregate_round(grads, alloc, channel, plan, sigma_z2, stats, rng);
        for (std::size_t i = 0; i < d; ++i)
        {
            const double a = out.noise_term[i];
            const double e = out.estimate.s_hat[i] - truth[i];
            a1[i] += a;
            a2[i] += a * a;
            e1[i] += e;
            e2[i] += e * e;
        }
    }
    double worst_z = 0.0, worst_rel = 0.0;
    for (std::size_t i = 0; i < d; ++i)
    {
        const double mean = a1[i] / N;
        const double se = std::sqrt((a2[i] / N - mean * mean) / N);
        const double e_mean = e1[i] / N;
        const double var = e2[i] / N - e_mean * e_mean;
        worst_z = std::max(worst_z, std::abs(mean) / se);
        worst_rel = std::max(worst_rel, std::abs(var - predicted) / predicted);
    }
    o.check(rel_close(stats.estimate_var, predicted, 1e-12), "library prediction differs from the oracle");
    o.check(worst_z <= 5.0, "noise mean " + std::to_string(worst_z) + " standard errors from 0");
    o.check(worst_rel <= 0.02, "variance off by " + std::to_string(100 * worst_rel) + "%");
    o.detail << (o.pass ? "" : "; ") << "N = 1e6, worst |mean|/SE = " << worst_z << ", worst variance error "
             << 100.0 * worst_rel << "%";
}

// ---- 6: noiseless equivalence ----------------------------------------------

void noiseless_equivalence(Outcome &o)
{
    TaskSpec spec;
    spec.users = 2;
    Rng task_rng(6);
    const auto task = make_ridge_task(spec, task_rng);

    OverAirConfig cfg;
    cfg.channel.sigma_z2 = 0.0;
    cfg.beta = 0.0;
    cfg.L_s = 1e6;  // wide enough that no gradient is clipped
    cfg.T = 1000;
    const double eta = 1.0 / task.mu;
    cfg.learning_rate = {StepSchedule::constant, eta};
    Rng rng(66);
    const auto res = train_over_air(task, cfg, rng);
    const auto ref = reference::gd_losses(reference::pool(task), eta, cfg.T);

    double worst = 0.0;
    for (std::size_t t = 0; t < ref.size(); ++t)
        worst = std::max(worst, std::abs(res.state.loss_history[t] - ref[t]) / std::abs(ref[t]));
    o.check(res.state.loss_history.size() == ref.size(), "history length mismatch");
    o.check(worst <= 1e-10, "relative loss error " + std::to_string(worst));
    o.detail << (o.pass ? "" : "; ") << "1000 iterations, worst relative loss error " << worst;
}

// ---- 7: bound validity -----------------------------------------------------

void bound_validity(Outcome &o)
{
    const auto start = std::chrono::steady_clock::now();
    auto c = parse_config(R"({"experiment": "fig5", "users_grid": [2, 10, 20], "ab_pairs": [[0.5, 0.5], [0.3, 0.7]],
                              "power_db": 30, "d": 30, "reg_lambda": 0.001, "T": 1000, "runs": 50,
                              "record_every": 1, "seed": 7})");
    const auto t = run_experiment(c);
    const double elapsed = seconds_since(start);

    int violations = 0;
    std::size_t checked = 0;
    std::map<std::pair<double, double>, double> terminal;  // (K, beta) -> terminal loss
    double tightest = 0.0;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
    {
        const double beta = t.at(r, "beta");
        if (t.at(r, "alpha") == 0.5 && beta == 0.5)
        {
            ++checked;
            violations += t.at(r, "simulated_gap") > t.at(r, "bound");
            tightest = std::max(tightest, t.at(r, "simulated_gap") / t.at(r, "bound"));
        }
        if (t.at(r, "t") == c.T)
            terminal[{t.at(r, "K"), beta}] = t.at(r, "simulated_loss");
    }
    o.check(checked == 3 * c.T, "expected every iteration of 3 curves, got " + std::to_string(checked));
    o.check(violations == 0, std::to_string(violations) + " iterations with mean gap above the bound");
    for (double K : {2.0, 10.0, 20.0})
        o.check(terminal.at({K, 0.5}) <= terminal.at({K, 0.7}),
                "K=" + std::to_string(int(K)) + ": beta 0.5 ends above beta 0.7");
    o.check(elapsed < 300.0, "runtime " + std::to_string(elapsed) + " s");
    o.detail << (o.pass ? "" : "; ") << checked << " iterations checked, max gap/bound " << tightest
             << ", terminal loss K=2 beta .5/.7 = " << terminal.at({2.0, 0.5}) << "/" << terminal.at({2.0, 0.7})
             << ", " << elapsed << " s";
}

// ---- 8: DP power allocation ---------------------------------------------

void dp_allocation(Outcome &o)
{
    Rng rng(8);
    int range_violations = 0, budget_violations = 0, psi_mismatch = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i)
    {
        const auto K = 1 + rng.index_below(12);
        std::vector<double> h2(K), P(K), eps(K), caps(K), alpha(K);
        for (std::size_t k = 0; k < K; ++k)
        {
            h2[k] = std::max(sample_rayleigh_gain(rng), 1e-6);
            P[k] = db_to_linear(rng.uniform(0.0, 30.0));
            eps[k] = rng.uniform(0.05, 10.0);
            caps[k] = rng.uniform(0.0, 2.0 * h2[k] * P[k]);
            alpha[k] = rng.uniform(0.0, 1.0);
        }
        const double delta = rng.uniform(1e-6, 0.5);
        const double sigma_z2 = rng.uniform(0.0, 2.0);
        const auto b = optimize_beta_dp(h2, P, eps, delta, sigma_z2, caps, alpha);

        double min_gain = std::numeric_limits<double>::infinity(), max_ratio = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            min_gain = std::min(min_gain, h2[k] * P[k]);
        for (std::size_t p = 0; p < K; ++p)
            max_ratio = std::max(max_ratio, min_gain / eps[p]);
        const double psi = max_ratio * std::log(1.25 / delta) - sigma_z2;
        psi_mismatch += !(std::abs(b.psi - psi) <= 1e-12 * std::max(1.0, std::abs(psi)));

        double used = 0.0;
        for (std::size_t k = 0; k < K; ++k)
        {
            range_violations += !(b.beta[k] >= 0.0 && b.beta[k] <= 1.0 - alpha[k]);
            used += b.z[k];
        }
        budget_violations += !(used <= std::max(psi, 0.0) * (1.0 + 1e-12));
    }
    o.check(psi_mismatch == 0, std::to_string(psi_mismatch) + " budgets differ from the oracle");
    o.check(range_violations == 0, std::to_string(range_violations) + " betas outside [0, 1 - alpha]");
    o.check(budget_violations == 0, std::to_string(budget_violations) + " allocations over budget");

    const std::vector<double> one{1.0}, eps{10.0}, caps{1.0};
    const auto single = optimize_beta_dp(one, one, eps, 0.25, 1.0, caps);
    o.check(single.beta.front() == 0.0, "eps=10, delta=0.25 instance gives beta " + std::to_string(single.beta[0]));
    o.detail << (o.pass ? "" : "; ") << trials << " random instances, single-user beta = " << single.beta.front();
}

// ---- 9: determinism ------------------------------------------------------

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism(Outcome &o)
{
    const std::vector<std::string> docs = {
        R"({"experiment": "fig3", "samples": 20000})",
        R"({"experiment": "fig4", "samples": 20000})",
        R"({"experiment": "fig5", "users_grid": [2, 10], "T": 100, "runs": 6, "record_every": 5})",
        R"({"experiment": "train", "users": 6, "T": 200, "runs": 3})",
        R"({"experiment": "train", "users": 4, "alpha": 0.3, "T": 100,
            "dp": {"eps": [1.0], "delta": 0.01, "caps": [200]}})",
        R"({"experiment": "noise-check", "samples": 20000})",
    };
    const auto dir = std::filesystem::temp_directory_path() / "airfl_acceptance";
    std::filesystem::create_directories(dir);
    std::size_t compared = 0;
    for (const auto &doc : docs)
    {
        auto c = parse_config(doc);
        std::vector<std::string> bytes;
        for (unsigned threads : {1u, 1u, 2u, 8u})
        {
            c.threads = threads;
            const auto path = dir / ("run_" + std::to_string(bytes.size()) + ".csv");
            write_csv(run_experiment(c), path);
            bytes.push_back(slurp(path));
        }
        for (std::size_t i = 1; i < bytes.size(); ++i)
        {
            ++compared;
            o.check(bytes[i] == bytes[0], std::string(experiment_name(c.experiment)) + " output changed on rerun " +
                                              std::to_string(i));
        }
        o.check(!bytes[0].empty() && bytes[0].find('\n') != std::string::npos, "empty output");
    }
    std::filesystem::remove_all(dir);
    o.detail << (o.pass ? "" : "; ") << compared << " reruns across 1, 2 and 8 threads byte-identical";
}

struct Criterion
{
    int id;
    const char *name;
    std::function<void(Outcome &)> run;
};

} // namespace

int main(int argc, char **argv)
{
    const std::vector<Criterion> all = {
        {1, "secrecy trends in alpha and delta_h", fig3_trends},
        {2, "secrecy trends in residual noise and power", fig4_trends},
        {3, "convergence bound oracle", bound_oracle},
        {4, "secrecy capacity oracle", secrecy_oracle},
        {5, "noise cancellation and unbiasedness", noise_cancellation},
        {6, "noiseless equivalence with centralized descent", noiseless_equivalence},
        {7, "bound validity on the ridge task", bound_validity},
        {8, "DP power allocation feasibility", dp_allocation},
        {9, "determinism across reruns and thread counts", determinism},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto &c : all)
    {
        if (!selected.empty() && !selected.count(c.id))
            continue;
        Outcome o;
        try
        {
            c.run(o);
        }
        catch (const std::exception &e)
        {
            o.check(false, std::string("exception: ") + e.what());
        }
        std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
