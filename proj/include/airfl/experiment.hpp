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

#ifndef AIRFL_EXPERIMENT_HPP
#define AIRFL_EXPERIMENT_HPP

#include "airfl/channel.hpp"
#include "airfl/fl_core.hpp"
#include "airfl/pcran.hpp"
#include "airfl/secrecy.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace airfl
{

enum class ExperimentKind
{
    fig3,
    fig4,
    fig5,
    train,
    noise_check
};

const char *experiment_name(ExperimentKind kind) noexcept;
std::optional<ExperimentKind> parse_experiment_name(std::string_view name) noexcept;

inline constexpr std::size_t default_samples = 100000;
inline constexpr std::size_t full_fidelity_samples = 1000000;

// Validated run description. Every power-like field given in dB in the JSON
// document is kept in dB for reporting and converted to linear exactly once
// at load time.
struct ExperimentConfig
{
    ExperimentKind experiment = ExperimentKind::fig3;
    std::uint64_t seed = 1;
    std::size_t samples = default_samples;
    unsigned threads = 1;
    std::string output;

    std::size_t users = 2;
    std::vector<std::size_t> users_grid;
    std::vector<double> power_db;
    std::vector<double> power;
    std::vector<double> alpha;
    double beta = 0.5;
    std::vector<std::pair<double, double>> ab_pairs;  // (alpha, beta) curves for fig5

    double sigma_a2_db = 25.0;
    double sigma_a2 = 0.0;
    SigmaA2Mode sigma_a2_mode = SigmaA2Mode::literal;
    std::vector<double> sigma_A2_db;
    std::vector<double> sigma_A2;
    std::vector<double> delta_h;

    double sigma_z2 = 1.0;
    double L_s = 1.0;
    std::size_t d = 30;
    std::size_t T = 1000;
    double reg_lambda = 1e-3;
    std::size_t runs = 50;
    std::size_t points_per_user = 20;
    std::size_t record_every = 1;
    double weight_scale = 2.0;
    double label_noise = 0.1;
    LearningRate learning_rate;

    FadingMode fading_mode = FadingMode::rayleigh;
    std::vector<double> fixed_gains;

    SecretRange secrets;
    bool equalize = true;

    bool dp_enabled = false;
    DpSettings dp;

    void validate() const;
};

// Default settings for one experiment kind.
ExperimentConfig default_config(ExperimentKind kind);

// Parses one JSON document. The experiment kind comes from `kind` when given,
// otherwise from the document's "experiment" key; if both are present they
// must agree. Defaults for that kind are applied first, then the document's
// keys. Unknown keys, malformed values and constraint violations throw
// ErrorCode::config_schema with a message naming the key; an unreadable file
// throws ErrorCode::config_io.
ExperimentConfig parse_config(std::string_view json_text, std::optional<ExperimentKind> kind = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path &path, std::optional<ExperimentKind> kind = std::nullopt);

// Tabular result with a fixed column schema per experiment kind.
struct ResultTable
{
    std::vector<std::string> columns;
    std::vector<char> integer_column;  // printed without a fractional part
    std::vector<std::vector<double>> rows;

    std::size_t column_index(std::string_view name) const;
    double at(std::size_t row, std::string_view column) const;

    // RFC 4180 CSV with a header row and '\n' line endings. Reals use the
    // shortest representation that parses back to the same double.
    std::string to_csv() const;
};

ResultTable parse_csv(std::string_view text);
void write_csv(const ResultTable &table, const std::filesystem::path &path);

std::vector<std::string> experiment_columns(ExperimentKind kind);

ResultTable run_experiment(const ExperimentConfig &config);

} // namespace airfl

#endif
