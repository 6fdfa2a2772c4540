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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace epiforecast {

enum class ForecasterKind { autoreg, arima, lstm, mlp, additive };

/// Lower-case identifier used in files and on the command line.
std::string_view to_string(ForecasterKind kind);

/// Accepts the identifiers above plus "prophet" for the additive model.
std::optional<ForecasterKind> parse_forecaster_kind(std::string_view name);

/// Short name used for report columns and plot series
/// (prophet, lstm, autoreg, arima, mlp).
std::string_view series_name(ForecasterKind kind);

struct ArOrder {
    int p = 1;

    bool operator==(const ArOrder&) const = default;
};

struct ArimaOrder {
    int p = 1;
    int d = 1;
    int q = 0;

    bool operator==(const ArimaOrder&) const = default;
};

struct LstmConfig {
    int layers = 2;
    int num_units = 32;
    int window = 14;
    int epochs = 200;
    double learning_rate = 0.01;
    int batch_size = 8;

    bool operator==(const LstmConfig&) const = default;
};

struct MlpConfig {
    int window = 7;
    int hidden_units = 8;
    int epochs = 2000;
    double learning_rate = 0.05;
    /// Append a day-of-week one-hot of the predicted day to every window.
    bool seasonal = false;

    bool operator==(const MlpConfig&) const = default;
};

struct AdditiveConfig {
    int n_changepoints = 10;
    double changepoint_penalty = 1.0;
    int fourier_order = 3;
    double period_days = 7.0;

    bool operator==(const AdditiveConfig&) const = default;
};

using Hyperparameters = std::variant<ArOrder, ArimaOrder, LstmConfig, MlpConfig, AdditiveConfig>;

/// Which model to fit, with what settings. The seed drives every random
/// initialisation; deterministic models ignore it.
struct ForecasterSpec {
    Hyperparameters hyperparameters;
    std::uint64_t seed = 0;

    ForecasterKind kind() const { return static_cast<ForecasterKind>(hyperparameters.index()); }

    bool operator==(const ForecasterSpec&) const = default;
};

/// Throws ContractError when a field is outside its documented range.
void validate(const ForecasterSpec& spec);

/// e.g. "arima(p=1,d=1,q=2)".
std::string describe(const ForecasterSpec& spec);

Hyperparameters default_hyperparameters(ForecasterKind kind);

/// Sets one field by its name ("p", "num_units", "learning_rate", ...).
/// Unknown names and malformed values are a ContractError.
void set_hyperparameter(Hyperparameters& hp, std::string_view key, std::string_view value);

} // namespace epiforecast
