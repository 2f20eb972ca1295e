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

/* C interface to the airfl simulator. Objects are opaque handles created and
 * released through this API. Every fallible call returns an airfl_status;
 * on failure a description is available from airfl_last_error() on the
 * calling thread until that thread's next API call. */

#ifndef AIRFL_H
#define AIRFL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(AIRFL_BUILDING_LIBRARY)
#    define AIRFL_API __declspec(dllexport)
#  else
#    define AIRFL_API __declspec(dllimport)
#  endif
#else
#  define AIRFL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum airfl_status
{
    AIRFL_OK = 0,
    AIRFL_ERR_INVALID_ARGUMENT = 1,
    AIRFL_ERR_DOMAIN = 2,
    AIRFL_ERR_EMPTY_SYSTEM = 3,
    AIRFL_ERR_PAIRING = 4,
    AIRFL_ERR_DEGENERATE_CHANNEL = 5,
    AIRFL_ERR_PRECONDITION = 6,
    AIRFL_ERR_DIMENSION_MISMATCH = 7,
    AIRFL_ERR_CONFIG_IO = 8,
    AIRFL_ERR_CONFIG_SCHEMA = 9,
    AIRFL_ERR_DIVERGENCE = 10,
    AIRFL_ERR_OUTPUT_IO = 11,
    AIRFL_ERR_INTERNAL = 99
} airfl_status;

/* Monte Carlo sample counts: the default keeps runs short, the full count
 * matches the 10^6-realization setting. */
#define AIRFL_DEFAULT_SAMPLES 100000
#define AIRFL_FULL_SAMPLES 1000000

typedef struct airfl_config airfl_config;
typedef struct airfl_result airfl_result;

AIRFL_API const char *airfl_version(void);
AIRFL_API const char *airfl_status_string(airfl_status status);
AIRFL_API const char *airfl_last_error(void);

/* ---- experiment configuration ---------------------------------------- */

/* `experiment` may be NULL, in which case the document's "experiment" key
 * selects it; when both are given they must agree. */
AIRFL_API airfl_status airfl_config_load(const char *path, const char *experiment, airfl_config **out);
AIRFL_API airfl_status airfl_config_parse(const char *json_text, const char *experiment, airfl_config **out);
AIRFL_API void airfl_config_free(airfl_config *config);

/* Name as used on the command line: fig3, fig4, fig5, train, noise-check. */
AIRFL_API airfl_status airfl_config_experiment(const airfl_config *config, const char **name);
AIRFL_API airfl_status airfl_config_set_seed(airfl_config *config, uint64_t seed);
AIRFL_API airfl_status airfl_config_set_samples(airfl_config *config, uint64_t samples);
AIRFL_API airfl_status airfl_config_set_threads(airfl_config *config, unsigned threads);
AIRFL_API airfl_status airfl_config_set_output(airfl_config *config, const char *path);
/* Output path from the config document or set_output; empty when unset. */
AIRFL_API airfl_status airfl_config_output(const airfl_config *config, const char **path);

/* ---- running experiments ---------------------------------------------- */

AIRFL_API airfl_status airfl_run(const airfl_config *config, airfl_result **out);
AIRFL_API void airfl_result_free(airfl_result *result);

AIRFL_API size_t airfl_result_rows(const airfl_result *result);
AIRFL_API size_t airfl_result_columns(const airfl_result *result);
AIRFL_API const char *airfl_result_column_name(const airfl_result *result, size_t column);
AIRFL_API airfl_status airfl_result_value(const airfl_result *result, size_t row, size_t column, double *value);
/* CSV text owned by the result; valid until airfl_result_free. */
AIRFL_API const char *airfl_result_csv(const airfl_result *result);
AIRFL_API airfl_status airfl_result_write_csv(const airfl_result *result, const char *path);

/* ---- analysis primitives ---------------------------------------------- */

typedef struct airfl_secrecy_inputs
{
    double alpha_a;
    double P_a;
    double L_s;
    double h2_a;
    double h2_ev;
    double sigma_z2;
    double sigma_a2;
    double sigma_zprime2;
} airfl_secrecy_inputs;

typedef struct airfl_secrecy_point
{
    double snr_s;
    double c_s;
    double snr_ev;
    double c_ev;
    double c;
} airfl_secrecy_point;

AIRFL_API airfl_status airfl_secrecy_point_eval(const airfl_secrecy_inputs *in, airfl_secrecy_point *out);

typedef struct airfl_bound_inputs
{
    double mu;
    double lambda;
    double T;
    double L_s;
    double d;
    double m;
    double K;
    double noise_power_sum;
    double sigma_z2;
} airfl_bound_inputs;

AIRFL_API airfl_status airfl_convergence_bound(const airfl_bound_inputs *in, double *bound);

/* alpha_out must hold `users` doubles. */
AIRFL_API airfl_status airfl_compute_alignment(const double *h2, const double *power, size_t users, double L_s,
                                               double *m_out, double *alpha_out);

/* alpha may be NULL (clamp into [0, 1]); beta_out must hold `users` doubles. */
AIRFL_API airfl_status airfl_optimize_beta_dp(const double *h2, const double *power, const double *eps,
                                              size_t users, double delta, double sigma_z2, const double *caps,
                                              const double *alpha, double *beta_out, double *psi_out);

#ifdef __cplusplus
}
#endif

#endif
