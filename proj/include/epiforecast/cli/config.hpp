/*
* Copyright (C) 2026 epiforecast contributors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#pragma once

#include "epiforecast/backtest.hpp"
#include "epiforecast/data.hpp"
#include "epiforecast/error.hpp"
#include "epiforecast/forecasters/spec.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace epiforecast::cli {

/// Bad flags, unknown names or missing files; exit status 1.
class UsageError : public Error {
public:
    using Error::Error;
};

struct HyperparameterOverride {
    std::optional<ForecasterKind> kind; // empty: applies to every selected model
    std::string key;
    std::string value;
};

struct RunConfig {
    std::string config_file;
    std::string input;
    Target target = Target::confirmed;
    std::vector<ForecasterKind> models;
    /// Empty: fit the configured hyperparameters as they are; "default": the
    /// built-in grids; anything else names a grid file.
    std::string grid;
    int horizon = 180;
    double test_fraction = 0.2;
    double validation_fraction = 0.2;
    std::uint64_t seed = 42;
    std::string out = ".";
    bool allow_corrections = false;
    unsigned threads = 0;
    std::vector<HyperparameterOverride> overrides;
    /// Grid axes from [grid.<model>] config sections; they replace the
    /// matching default axes.
    std::map<ForecasterKind, GridAxes> grid_axes;
    std::vector<std::string> model_files;
    std::vector<std::string> forecast_files;
};

/// The five models in report order: prophet, lstm, autoreg, arima, mlp.
std::vector<ForecasterKind> all_models();

ForecasterKind parse_model_name(const std::string& name);
Target parse_target_name(const std::string& name);

/// Parses "key=value" or "model.key=value".
HyperparameterOverride parse_override(const std::string& text);

/**
 * Reads an INI file into `config`. Section [run] holds the flag values
 * (input, target, model, grid, horizon, test_fraction, validation_fraction,
 * seed, out, allow_corrections, threads); a section named after a model
 * holds hyperparameters for that model; [grid.<model>] sections hold
 * comma-separated grid axes.
 */
void load_config_file(const std::string& path, RunConfig& config);

/// Grid file: one section per model, each key a comma-separated axis.
std::map<ForecasterKind, GridAxes> load_grid_file(const std::string& path);

/// Defaults with the config file and --set overrides applied.
Hyperparameters resolve_hyperparameters(const RunConfig& config, ForecasterKind kind);

/// The specs a fit or backtest should consider for `kind`.
std::vector<ForecasterSpec> resolve_grid(const RunConfig& config, ForecasterKind kind);

} // namespace epiforecast::cli
