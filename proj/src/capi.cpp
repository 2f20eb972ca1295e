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

#include "airfl/airfl.h"

#include "airfl/error.hpp"
#include "airfl/experiment.hpp"
#include "airfl/fl_core.hpp"
#include "airfl/pcran.hpp"
#include "airfl/secrecy.hpp"

#include <exception>
#include <new>
#include <optional>
#include <string>

struct airfl_config
{
    airfl::ExperimentConfig config;
};

struct airfl_result
{
    airfl::ResultTable table;
    std::string csv;
};

namespace
{

thread_local std::string last_error;

airfl_status to_status(airfl::ErrorCode code)
{
    return static_cast<airfl_status>(static_cast<int>(code));
}

template <class F>
airfl_status guarded(F &&body) noexcept
{
    last_error.clear();
    try
    {
        body();
        return AIRFL_OK;
    }
    catch (const airfl::Error &e)
    {
        last_error = e.what();
        return to_status(e.code());
    }
    catch (const std::bad_alloc &)
    {
        last_error = "out of memory";
        return AIRFL_ERR_INTERNAL;
    }
    catch (const std::exception &e)
    {
        last_error = e.what();
        return AIRFL_ERR_INTERNAL;
    }
    catch (...)
    {
        last_error = "unknown exception";
        return AIRFL_ERR_INTERNAL;
    }
}

void require_arg(const void *p, const char *name)
{
    if (!p)
        airfl::fail(airfl::ErrorCode::invalid_argument, std::string(name) + " is null");
}

std::optional<airfl::ExperimentKind> experiment_kind(const char *name)
{
    if (!name)
        return std::nullopt;
    const auto kind = airfl::parse_experiment_name(name);
    if (!kind)
        airfl::fail(airfl::ErrorCode::invalid_argument, std::string("unknown experiment '") + name + "'");
    return kind;
}

} // namespace

extern "C" {

const char *airfl_version(void)
{
    return "1.0.0";
}

const char *airfl_status_string(airfl_status status)
{
    switch (status)
    {
    case AIRFL_OK: return "ok";
    case AIRFL_ERR_INTERNAL: return "internal error";
    default: break;
    }
    const int code = static_cast<int>(status);
    if (code >= 1 && code <= static_cast<int>(airfl::ErrorCode::output_io))
        return airfl::error_code_name(static_cast<airfl::ErrorCode>(code));
    return "unknown status";
}

const char *airfl_last_error(void)
{
    return last_error.c_str();
}

// ---- configuration -------------------------------------------------------

airfl_status airfl_config_load(const char *path, const char *experiment, airfl_config **out)
{
    return guarded([&] {
        require_arg(path, "path");
        require_arg(out, "out");
        *out = nullptr;
        *out = new airfl_config{airfl::load_config(path, experiment_kind(experiment))};
    });
}

airfl_status airfl_config_parse(const char *json_text, const char *experiment, airfl_config **out)
{
    return guarded([&] {
        require_arg(json_text, "json_text");
        require_arg(out, "out");
        *out = nullptr;
        *out = new airfl_config{airfl::parse_config(json_text, experiment_kind(experiment))};
    });
}

void airfl_config_free(airfl_config *config)
{
    delete config;
}

airfl_status airfl_config_experiment(const airfl_config *config, const char **name)
{
    return guarded([&] {
        require_arg(config, "config");
        require_arg(name, "name");
        *name = airfl::experiment_name(config->config.experiment);
    });
}

airfl_status airfl_config_set_seed(airfl_config *config, uint64_t seed)
{
    return guarded([&] {
        require_arg(config, "config");
        config->config.seed = seed;
    });
}

airfl_status airfl_config_set_samples(airfl_config *config, uint64_t samples)
{
    return guarded([&] {
        require_arg(config, "config");
        if (samples < 1)
            airfl::fail(airfl::ErrorCode::invalid_argument, "samples must be >= 1");
        config->config.samples = static_cast<std::size_t>(samples);
    });
}

airfl_status airfl_config_set_threads(airfl_config *config, unsigned threads)
{
    return guarded([&] {
        require_arg(config, "config");
        config->config.threads = threads;
    });
}

airfl_status airfl_config_set_output(airfl_config *config, const char *path)
{
    return guarded([&] {
        require_arg(config, "config");
        require_arg(path, "path");
        config->config.output = path;
    });
}

airfl_status airfl_config_output(const airfl_config *config, const char **path)
{
    return guarded([&] {
        require_arg(config, "config");
        require_arg(path, "path");
        *path = config->config.output.c_str();
    });
}

// ---- running -------------------------------------------------------------

airfl_status airfl_run(const airfl_config *config, airfl_result **out)
{
    return guarded([&] {
        require_arg(config, "config");
        require_arg(out, "out");
        *out = nullptr;
        auto *r = new airfl_result{airfl::run_experiment(config->config), {}};
        r->csv = r->table.to_csv();
        *out = r;
    });
}

void airfl_result_free(airfl_result *result)
{
    delete result;
}

size_t airfl_result_rows(const airfl_result *result)
{
    return result ? result->table.rows.size() : 0;
}

size_t airfl_result_columns(const airfl_result *result)
{
    return result ? result->table.columns.size() : 0;
}

const char *airfl_result_column_name(const airfl_result *result, size_t column)
{
    if (!result || column >= result->table.columns.size())
        return nullptr;
    return result->table.columns[column].c_str();
}

airfl_status airfl_result_value(const airfl_result *result, size_t row, size_t column, double *value)
{
    return guarded([&] {
        require_arg(result, "result");
        require_arg(value, "value");
        if (row >= result->table.rows.size() || column >= result->table.columns.size())
            airfl::fail(airfl::ErrorCode::invalid_argument, "result index out of range");
        *value = result->table.rows[row][column];
    });
}

const char *airfl_result_csv(const airfl_result *result)
{
    return result ? result->csv.c_str() : nullptr;
}

airfl_status airfl_result_write_csv(const airfl_result *result, const char *path)
{
    return guarded([&] {
        require_arg(result, "result");
        require_arg(path, "path");
        airfl::write_csv(result->table, path);
    });
}

// ---- primitives ----------------------------------------------------------

airfl_status airfl_secrecy_point_eval(const airfl_secrecy_inputs *in, airfl_secrecy_point *out)
{
    return guarded([&] {
        require_arg(in, "in");
        require_arg(out, "out");
        airfl::SecrecyInputs s;
        s.alpha_a = in->alpha_a;
        s.P_a = in->P_a;
        s.L_s = in->L_s;
        s.h2_a = in->h2_a;
        s.h2_ev = in->h2_ev;
        s.sigma_z2 = in->sigma_z2;
        s.sigma_a2 = in->sigma_a2;
        s.sigma_zprime2 = in->sigma_zprime2;
        const auto p = airfl::secrecy_point(s);
        *out = {p.snr_s, p.c_s, p.snr_ev, p.c_ev, p.c};
    });
}

airfl_status airfl_convergence_bound(const airfl_bound_inputs *in, double *bound)
{
    return guarded([&] {
        require_arg(in, "in");
        require_arg(bound, "bound");
        airfl::BoundInputs b;
        b.mu = in->mu;
        b.lambda = in->lambda;
        b.T = in->T;
        b.L_s = in->L_s;
        b.d = in->d;
        b.m = in->m;
        b.K = in->K;
        b.noise_power_sum = in->noise_power_sum;
        b.sigma_z2 = in->sigma_z2;
        *bound = airfl::convergence_bound(b);
    });
}

airfl_status airfl_compute_alignment(const double *h2, const double *power, size_t users, double L_s, double *m_out,
                                     double *alpha_out)
{
    return guarded([&] {
        require_arg(m_out, "m_out");
        if (users > 0)
        {
            require_arg(h2, "h2");
            require_arg(power, "power");
            require_arg(alpha_out, "alpha_out");
        }
        const auto a = airfl::compute_alignment({h2, users}, {power, users}, L_s);
        *m_out = a.m;
        for (size_t k = 0; k < users; ++k)
            alpha_out[k] = a.alpha[k];
    });
}

airfl_status airfl_optimize_beta_dp(const double *h2, const double *power, const double *eps, size_t users,
                                    double delta, double sigma_z2, const double *caps, const double *alpha,
                                    double *beta_out, double *psi_out)
{
    return guarded([&] {
        if (users > 0)
        {
            require_arg(h2, "h2");
            require_arg(power, "power");
            require_arg(eps, "eps");
            require_arg(caps, "caps");
            require_arg(beta_out, "beta_out");
        }
        const auto b = airfl::optimize_beta_dp({h2, users}, {power, users}, {eps, users}, delta, sigma_z2,
                                               {caps, users},
                                               alpha ? std::span<const double>(alpha, users) : std::span<const double>{});
        for (size_t k = 0; k < users; ++k)
            beta_out[k] = b.beta[k];
        if (psi_out)
            *psi_out = b.psi;
    });
}

} // extern "C"
