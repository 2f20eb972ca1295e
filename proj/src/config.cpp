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

#include "airfl/error.hpp"
#include "airfl/experiment.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace airfl
{

using json = nlohmann::json;

const char *experiment_name(ExperimentKind kind) noexcept
{
    switch (kind)
    {
    case ExperimentKind::fig3: return "fig3";
    case ExperimentKind::fig4: return "fig4";
    case ExperimentKind::fig5: return "fig5";
    case ExperimentKind::train: return "train";
    case ExperimentKind::noise_check: return "noise-check";
    }
    return "unknown";
}

std::optional<ExperimentKind> parse_experiment_name(std::string_view name) noexcept
{
    for (auto k : {ExperimentKind::fig3, ExperimentKind::fig4, ExperimentKind::fig5, ExperimentKind::train,
                   ExperimentKind::noise_check})
        if (name == experiment_name(k))
            return k;
    return std::nullopt;
}

// ---- defaults ------------------------------------------------------------

ExperimentConfig default_config(ExperimentKind kind)
{
    ExperimentConfig c;
    c.experiment = kind;
    switch (kind)
    {
    case ExperimentKind::fig3:
        for (int i = 0; i <= 10; ++i)
            c.alpha.push_back(i / 20.0);
        c.power_db = {25.0, 30.0};
        c.delta_h = {0.0, 0.5};
        c.sigma_A2_db = {0.0};
        break;
    case ExperimentKind::fig4:
        c.alpha = {0.5};
        c.power_db = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
        c.delta_h = {0.5};
        c.sigma_A2_db = {0.0, 5.0, 10.0, 15.0, 20.0};
        break;
    case ExperimentKind::fig5:
        c.users_grid = {2, 10, 20};
        c.ab_pairs = {{0.5, 0.5}, {0.3, 0.7}};
        c.power_db = {30.0};
        c.runs = 50;
        break;
    case ExperimentKind::train:
        c.users = 2;
        c.alpha = {0.5};
        c.beta = 0.5;
        c.power_db = {30.0};
        c.runs = 1;
        break;
    case ExperimentKind::noise_check:
        c.users = 4;
        c.d = 8;
        c.alpha = {0.5};
        c.beta = 0.5;
        c.power_db = {30.0};
        break;
    }
    return c;
}

// ---- parsing -------------------------------------------------------------

namespace
{

[[noreturn]] void schema(const std::string &what)
{
    fail(ErrorCode::config_schema, what);
}

double number(const json &v, const std::string &key)
{
    if (!v.is_number())
        schema("'" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        schema("'" + key + "' must be finite");
    return x;
}

std::uint64_t count(const json &v, const std::string &key)
{
    if (v.is_number_unsigned())
        return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_number_float())
    {
        const double x = v.get<double>();
        if (x >= 0.0 && x == std::floor(x) && x < 1.8e19)
            return static_cast<std::uint64_t>(x);
    }
    schema("'" + key + "' must be a nonnegative integer");
}

bool boolean(const json &v, const std::string &key)
{
    if (!v.is_boolean())
        schema("'" + key + "' must be true or false");
    return v.get<bool>();
}

std::string text(const json &v, const std::string &key)
{
    if (!v.is_string())
        schema("'" + key + "' must be a string");
    return v.get<std::string>();
}

// A scalar is accepted as a one-element grid.
std::vector<double> grid(const json &v, const std::string &key)
{
    if (v.is_number())
        return {number(v, key)};
    if (!v.is_array())
        schema("'" + key + "' must be a number or an array of numbers");
    std::vector<double> out;
    for (const auto &x : v)
        out.push_back(number(x, key));
    return out;
}

std::pair<double, double> range(const json &v, const std::string &key)
{
    const auto g = grid(v, key);
    if (g.size() != 2)
        schema("'" + key + "' must be a [lo, hi] pair");
    return {g[0], g[1]};
}

void check_keys(const json &obj, const std::set<std::string> &allowed, const std::string &where)
{
    for (const auto &item : obj.items())
        if (!allowed.count(item.key()))
            schema("unknown key '" + item.key() + "'" + where);
}

void apply_document(ExperimentConfig &c, const json &doc)
{
    static const std::set<std::string> top = {
        "experiment", "seed",       "samples",     "threads",         "output",       "users",
        "users_grid", "power_db",   "alpha",       "beta",            "ab_pairs",     "sigma_a2_db",
        "sigma_a2_mode", "sigma_A2_db", "delta_h", "sigma_z2",        "L_s",          "d",
        "T",          "reg_lambda", "runs",        "points_per_user", "record_every", "weight_scale",
        "label_noise", "learning_rate", "fading",  "fixed_gains",     "pcran",        "dp"};
    check_keys(doc, top, "");

    for (const auto &item : doc.items())
    {
        const std::string &key = item.key();
        const json &v = item.value();
        if (key == "experiment")
            continue;
        else if (key == "seed")
            c.seed = count(v, key);
        else if (key == "samples")
            c.samples = count(v, key);
        else if (key == "threads")
            c.threads = static_cast<unsigned>(count(v, key));
        else if (key == "output")
            c.output = text(v, key);
        else if (key == "users")
            c.users = count(v, key);
        else if (key == "users_grid")
        {
            c.users_grid.clear();
            if (!v.is_array())
                schema("'users_grid' must be an array of integers");
            for (const auto &x : v)
                c.users_grid.push_back(count(x, key));
        }
        else if (key == "power_db")
            c.power_db = grid(v, key);
        else if (key == "alpha")
            c.alpha = grid(v, key);
        else if (key == "beta")
            c.beta = number(v, key);
        else if (key == "ab_pairs")
        {
            c.ab_pairs.clear();
            if (!v.is_array())
                schema("'ab_pairs' must be an array of [alpha, beta] pairs");
            for (const auto &x : v)
                c.ab_pairs.push_back(range(x, key));
        }
        else if (key == "sigma_a2_db")
            c.sigma_a2_db = number(v, key);
        else if (key == "sigma_a2_mode")
        {
            const auto mode = text(v, key);
            if (mode == "literal")
                c.sigma_a2_mode = SigmaA2Mode::literal;
            else if (mode == "linked")
                c.sigma_a2_mode = SigmaA2Mode::linked;
            else
                schema("'sigma_a2_mode' must be \"literal\" or \"linked\"");
        }
        else if (key == "sigma_A2_db")
            c.sigma_A2_db = grid(v, key);
        else if (key == "delta_h")
            c.delta_h = grid(v, key);
        else if (key == "sigma_z2")
            c.sigma_z2 = number(v, key);
        else if (key == "L_s")
            c.L_s = number(v, key);
        else if (key == "d")
            c.d = count(v, key);
        else if (key == "T")
            c.T = count(v, key);
        else if (key == "reg_lambda")
            c.reg_lambda = number(v, key);
        else if (key == "runs")
            c.runs = count(v, key);
        else if (key == "points_per_user")
            c.points_per_user = count(v, key);
        else if (key == "record_every")
            c.record_every = count(v, key);
        else if (key == "weight_scale")
            c.weight_scale = number(v, key);
        else if (key == "label_noise")
            c.label_noise = number(v, key);
        else if (key == "learning_rate")
        {
            if (!v.is_object())
                schema("'learning_rate' must be an object");
            check_keys(v, {"schedule", "eta"}, " in 'learning_rate'");
            if (v.contains("schedule"))
            {
                const auto s = text(v["schedule"], "learning_rate.schedule");
                if (s == "inverse_time")
                    c.learning_rate.schedule = StepSchedule::inverse_time;
                else if (s == "constant")
                    c.learning_rate.schedule = StepSchedule::constant;
                else
                    schema("'learning_rate.schedule' must be \"inverse_time\" or \"constant\"");
            }
            if (v.contains("eta"))
                c.learning_rate.eta = number(v["eta"], "learning_rate.eta");
        }
        else if (key == "fading")
        {
            const auto f = text(v, key);
            if (f == "rayleigh")
                c.fading_mode = FadingMode::rayleigh;
            else if (f == "fixed")
                c.fading_mode = FadingMode::fixed;
            else
                schema("'fading' must be \"rayleigh\" or \"fixed\"");
        }
        else if (key == "fixed_gains")
            c.fixed_gains = grid(v, key);
        else if (key == "pcran")
        {
            if (!v.is_object())
                schema("'pcran' must be an object");
            check_keys(v, {"mu_range", "sigma2_range", "equalize"}, " in 'pcran'");
            if (v.contains("mu_range"))
                std::tie(c.secrets.mu_lo, c.secrets.mu_hi) = range(v["mu_range"], "pcran.mu_range");
            if (v.contains("sigma2_range"))
                std::tie(c.secrets.sigma2_lo, c.secrets.sigma2_hi) = range(v["sigma2_range"], "pcran.sigma2_range");
            if (v.contains("equalize"))
                c.equalize = boolean(v["equalize"], "pcran.equalize");
        }
        else if (key == "dp")
        {
            if (!v.is_object())
                schema("'dp' must be an object");
            check_keys(v, {"eps", "delta", "caps"}, " in 'dp'");
            for (const char *required : {"eps", "delta", "caps"})
                if (!v.contains(required))
                    schema(std::string("'dp' block needs '") + required + "'");
            c.dp_enabled = true;
            c.dp.eps = grid(v["eps"], "dp.eps");
            c.dp.delta = number(v["delta"], "dp.delta");
            c.dp.caps = grid(v["caps"], "dp.caps");
        }
    }
}

void convert_units(ExperimentConfig &c)
{
    c.power.clear();
    for (double p : c.power_db)
        c.power.push_back(db_to_linear(p));
    c.sigma_a2 = db_to_linear(c.sigma_a2_db);
    c.sigma_A2.clear();
    for (double s : c.sigma_A2_db)
        c.sigma_A2.push_back(db_to_linear(s));
}

} // namespace

void ExperimentConfig::validate() const
{
    const auto kind = experiment;
    const bool secrecy = kind == ExperimentKind::fig3 || kind == ExperimentKind::fig4;
    const bool training = kind == ExperimentKind::fig5 || kind == ExperimentKind::train;

    if (samples < 1)
        schema("'samples' must be >= 1");
    if (power_db.empty())
        schema("'power_db' must not be empty");
    if (!(sigma_z2 >= 0.0))
        schema("'sigma_z2' must be >= 0");
    if (secrecy && !(sigma_z2 > 0.0))
        schema("'sigma_z2' must be > 0 for secrecy experiments");
    if (!(L_s > 0.0))
        schema("'L_s' must be > 0");
    for (double a : alpha)
        if (a < 0.0 || a > 1.0)
            schema("'alpha' values must lie in [0, 1]");
    for (double dh : delta_h)
        if (dh < 0.0)
            schema("'delta_h' values must be >= 0");
    for (double g : fixed_gains)
        if (g < 0.0)
            schema("'fixed_gains' values must be >= 0");
    if (fading_mode == FadingMode::fixed && fixed_gains.empty())
        schema("'fading' is \"fixed\" but 'fixed_gains' is empty");

    if (dp_enabled && kind != ExperimentKind::train)
        schema("'dp' is only supported by the train experiment");

    if (secrecy)
    {
        if (alpha.empty() || delta_h.empty() || sigma_A2_db.empty())
            schema("'alpha', 'delta_h' and 'sigma_A2_db' must not be empty");
        if (fading_mode == FadingMode::fixed && fixed_gains.size() != 1)
            schema("secrecy experiments take exactly one fixed gain");
        return;
    }

    if (d < 1)
        schema("'d' must be >= 1");
    if (alpha.empty() && kind != ExperimentKind::fig5)
        schema("'alpha' must not be empty");
    if (secrets.mu_lo > secrets.mu_hi || secrets.sigma2_lo < 0.0 || secrets.sigma2_lo > secrets.sigma2_hi)
        schema("'pcran' ranges must satisfy lo <= hi with variances >= 0");

    auto check_users = [&](std::size_t K) {
        if (K < 2 || K % 2 != 0)
            schema("'users' must be even and >= 2 for " + std::string(experiment_name(kind)) + ", got " +
                   std::to_string(K));
        if (fading_mode == FadingMode::fixed && fixed_gains.size() != K)
            schema("'fixed_gains' must hold one gain per user");
    };
    auto check_split = [&](double a, double b) {
        if (!(a > 0.0 && a <= 1.0 && b >= 0.0 && a + b <= 1.0 + 1e-12))
            schema("(alpha, beta) must satisfy 0 < alpha, 0 <= beta, alpha + beta <= 1");
    };

    if (kind == ExperimentKind::fig5)
    {
        if (users_grid.empty() || ab_pairs.empty())
            schema("'users_grid' and 'ab_pairs' must not be empty");
        for (auto K : users_grid)
            check_users(K);
        for (const auto &[a, b] : ab_pairs)
            check_split(a, b);
    }
    else
    {
        check_users(users);
        check_split(alpha.front(), beta);
    }

    if (training)
    {
        if (T < 1 || runs < 1 || points_per_user < 1 || record_every < 1)
            schema("'T', 'runs', 'points_per_user' and 'record_every' must be >= 1");
        if (!(reg_lambda > 0.0))
            schema("'reg_lambda' must be > 0");
        if (weight_scale < 0.0 || label_noise < 0.0)
            schema("'weight_scale' and 'label_noise' must be >= 0");
        if (learning_rate.schedule == StepSchedule::constant && !(learning_rate.eta > 0.0))
            schema("'learning_rate.eta' must be > 0");
    }

    if (dp_enabled)
    {
        if (dp.eps.empty() || dp.caps.empty())
            schema("'dp.eps' and 'dp.caps' must not be empty");
        for (double e : dp.eps)
            if (!(e > 0.0))
                schema("'dp.eps' values must be > 0");
        for (double cap : dp.caps)
            if (cap < 0.0)
                schema("'dp.caps' values must be >= 0");
        if (!(dp.delta > 0.0 && dp.delta < 1.0))
            schema("'dp.delta' must lie in (0, 1)");
        for (auto n : {dp.eps.size(), dp.caps.size()})
            if (n != 1 && n != users)
                schema("'dp.eps' and 'dp.caps' need one value or one per user");
    }
}

ExperimentConfig parse_config(std::string_view json_text, std::optional<ExperimentKind> kind)
{
    json doc;
    try
    {
        doc = json::parse(json_text.begin(), json_text.end());
    }
    catch (const json::parse_error &e)
    {
        schema(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object())
        schema("configuration must be a JSON object");

    std::optional<ExperimentKind> named;
    if (doc.contains("experiment"))
    {
        const auto name = text(doc["experiment"], "experiment");
        named = parse_experiment_name(name);
        if (!named)
            schema("unknown experiment '" + name + "'");
    }
    if (kind && named && *kind != *named)
        schema(std::string("configuration is for experiment '") + experiment_name(*named) + "', not '" +
               experiment_name(*kind) + "'");
    if (!kind && !named)
        schema("no experiment given: set 'experiment' or pass it on the command line");

    auto c = default_config(kind ? *kind : *named);
    apply_document(c, doc);
    convert_units(c);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path &path, std::optional<ExperimentKind> kind)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::config_io, "cannot open configuration file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        fail(ErrorCode::config_io, "cannot read configuration file '" + path.string() + "'");
    return parse_config(buf.str(), kind);
}

} // namespace airfl
