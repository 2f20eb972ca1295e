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

// Command-line front end. Talks to the simulator only through the C API.

#include "airfl/airfl.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace
{

struct ConfigDeleter
{
    void operator()(airfl_config *c) const { airfl_config_free(c); }
};
struct ResultDeleter
{
    void operator()(airfl_result *r) const { airfl_result_free(r); }
};

int report(airfl_status status, const char *stage)
{
    std::cerr << "airfl: " << stage << " failed (" << airfl_status_string(status) << "): " << airfl_last_error()
              << '\n';
    return static_cast<int>(status) == 0 ? 1 : static_cast<int>(status);
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Over-the-air federated learning simulator with pairwise-cancellable artificial noise"};
    app.set_version_flag("--version", airfl_version());

    std::string experiment;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<unsigned> threads;
    std::string out_path;
    bool full = false;

    app.add_option("experiment", experiment, "Experiment to run")
        ->required()
        ->check(CLI::IsMember({"fig3", "fig4", "fig5", "train", "noise-check"}));
    app.add_option("--config,-c", config_path, "JSON configuration file")->required();
    app.add_option("--seed", seed, "Override the master seed");
    app.add_option("--samples", samples, "Override the Monte Carlo sample count")->check(CLI::PositiveNumber);
    app.add_flag("--full", full, "Use 10^6 Monte Carlo samples unless --samples is given");
    app.add_option("--threads", threads, "Worker threads (0 = all cores); output does not depend on it");
    app.add_option("--out,-o", out_path, "CSV output path (default: config 'output', else stdout)");

    CLI11_PARSE(app, argc, argv);

    airfl_config *raw_config = nullptr;
    if (auto st = airfl_config_load(config_path.c_str(), experiment.c_str(), &raw_config); st != AIRFL_OK)
        return report(st, "loading configuration");
    std::unique_ptr<airfl_config, ConfigDeleter> config(raw_config);

    if (seed)
        airfl_config_set_seed(config.get(), *seed);
    if (samples)
        airfl_config_set_samples(config.get(), *samples);
    else if (full)
        airfl_config_set_samples(config.get(), AIRFL_FULL_SAMPLES);
    if (threads)
        airfl_config_set_threads(config.get(), *threads);
    if (!out_path.empty())
        airfl_config_set_output(config.get(), out_path.c_str());

    airfl_result *raw_result = nullptr;
    if (auto st = airfl_run(config.get(), &raw_result); st != AIRFL_OK)
        return report(st, experiment.c_str());
    std::unique_ptr<airfl_result, ResultDeleter> result(raw_result);

    const char *target = nullptr;
    airfl_config_output(config.get(), &target);
    if (target && *target)
    {
        if (auto st = airfl_result_write_csv(result.get(), target); st != AIRFL_OK)
            return report(st, "writing output");
        std::cerr << "airfl: wrote " << airfl_result_rows(result.get()) << " rows to " << target << '\n';
    }
    else
    {
        std::fputs(airfl_result_csv(result.get()), stdout);
    }
    return 0;
}
