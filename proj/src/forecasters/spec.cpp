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
#include "epiforecast/forecasters/spec.hpp"

#include "epiforecast/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include <fmt/format.h>

namespace epiforecast {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, std::string_view what)
{
    if (!ok) {
        throw ContractError(std::string(what));
    }
}

int parse_int(std::string_view key, std::string_view value)
{
    int out = 0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || end != value.data() + value.size()) {
        throw ContractError(fmt::format("{} expects an integer, got '{}'", key, value));
    }
    return out;
}

double parse_real(std::string_view key, std::string_view value)
{
    double out = 0.0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || end != value.data() + value.size() || !std::isfinite(out)) {
        throw ContractError(fmt::format("{} expects a number, got '{}'", key, value));
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value)
{
    std::string lower(value);
    for (auto& ch : lower) {
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") {
        return true;
    }
    if (lower == "false" || lower == "0" || lower == "no" || lower == "off") {
        return false;
    }
    throw ContractError(fmt::format("{} expects true or false, got '{}'", key, value));
}

[[noreturn]] void unknown_key(std::string_view kind, std::string_view key)
{
    throw ContractError(fmt::format("{} has no hyperparameter '{}'", kind, key));
}

} // namespace

std::string_view to_string(ForecasterKind kind)
{
    switch (kind) {
    case ForecasterKind::autoreg:
        return "autoreg";
    case ForecasterKind::arima:
        return "arima";
    case ForecasterKind::lstm:
        return "lstm";
    case ForecasterKind::mlp:
        return "mlp";
    case ForecasterKind::additive:
        return "additive";
    }
    return "unknown";
}

std::optional<ForecasterKind> parse_forecaster_kind(std::string_view name)
{
    for (auto k : {ForecasterKind::autoreg, ForecasterKind::arima, ForecasterKind::lstm, ForecasterKind::mlp,
                   ForecasterKind::additive}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    if (name == "prophet") {
        return ForecasterKind::additive;
    }
    if (name == "ar") {
        return ForecasterKind::autoreg;
    }
    return std::nullopt;
}

std::string_view series_name(ForecasterKind kind)
{
    return kind == ForecasterKind::additive ? "prophet" : to_string(kind);
}

void validate(const ForecasterSpec& spec)
{
    std::visit(overloaded{
                   [](const ArOrder& o) { require(o.p >= 1, "AR order p must be >= 1"); },
                   [](const ArimaOrder& o) {
                       require(o.p >= 0 && o.d >= 0 && o.q >= 0, "ARIMA orders must be non-negative");
                       require(o.d > 0 || o.p + o.q >= 1, "ARIMA(0,0,0) is an empty model");
                   },
                   [](const LstmConfig& c) {
                       require(c.layers >= 1, "LSTM needs at least one layer");
                       require(c.num_units >= 1, "LSTM num_units must be >= 1");
                       require(c.window >= 1, "LSTM window must be >= 1");
                       require(c.epochs >= 0, "LSTM epochs must be >= 0");
                       require(c.learning_rate > 0.0 && std::isfinite(c.learning_rate),
                               "LSTM learning rate must be positive");
                       require(c.batch_size >= 1, "LSTM batch size must be >= 1");
                   },
                   [](const MlpConfig& c) {
                       require(c.window >= 1, "MLP window must be >= 1");
                       require(c.hidden_units >= 0, "MLP hidden_units must be >= 0");
                       require(c.epochs >= 0, "MLP epochs must be >= 0");
                       require(c.learning_rate > 0.0 && std::isfinite(c.learning_rate),
                               "MLP learning rate must be positive");
                   },
                   [](const AdditiveConfig& c) {
                       require(c.n_changepoints >= 0, "n_changepoints must be >= 0");
                       require(c.changepoint_penalty >= 0.0, "changepoint penalty must be >= 0");
                       require(c.fourier_order >= 0, "fourier_order must be >= 0");
                       require(c.period_days > 0.0, "period must be positive");
                   },
               },
               spec.hyperparameters);
}

std::string describe(const ForecasterSpec& spec)
{
    return std::visit(
        overloaded{
            [](const ArOrder& o) { return fmt::format("autoreg(p={})", o.p); },
            [](const ArimaOrder& o) { return fmt::format("arima(p={},d={},q={})", o.p, o.d, o.q); },
            [](const LstmConfig& c) {
                return fmt::format("lstm(layers={},units={},window={},epochs={},lr={},batch={})", c.layers,
                                   c.num_units, c.window, c.epochs, c.learning_rate, c.batch_size);
            },
            [](const MlpConfig& c) {
                return fmt::format("mlp(window={},hidden={},epochs={},lr={},seasonal={})", c.window, c.hidden_units,
                                   c.epochs, c.learning_rate, c.seasonal);
            },
            [](const AdditiveConfig& c) {
                return fmt::format("prophet(changepoints={},penalty={},fourier={},period={})", c.n_changepoints,
                                   c.changepoint_penalty, c.fourier_order, c.period_days);
            },
        },
        spec.hyperparameters);
}

Hyperparameters default_hyperparameters(ForecasterKind kind)
{
    switch (kind) {
    case ForecasterKind::autoreg:
        return ArOrder{};
    case ForecasterKind::arima:
        return ArimaOrder{};
    case ForecasterKind::lstm:
        return LstmConfig{};
    case ForecasterKind::mlp:
        return MlpConfig{};
    case ForecasterKind::additive:
        return AdditiveConfig{};
    }
    throw ContractError("unknown forecaster kind");
}

void set_hyperparameter(Hyperparameters& hp, std::string_view key, std::string_view value)
{
    std::visit(overloaded{
                   [&](ArOrder& o) {
                       if (key != "p") {
                           unknown_key("autoreg", key);
                       }
                       o.p = parse_int(key, value);
                   },
                   [&](ArimaOrder& o) {
                       if (key == "p") {
                           o.p = parse_int(key, value);
                       } else if (key == "d") {
                           o.d = parse_int(key, value);
                       } else if (key == "q") {
                           o.q = parse_int(key, value);
                       } else {
                           unknown_key("arima", key);
                       }
                   },
                   [&](LstmConfig& c) {
                       if (key == "layers") {
                           c.layers = parse_int(key, value);
                       } else if (key == "num_units") {
                           c.num_units = parse_int(key, value);
                       } else if (key == "window") {
                           c.window = parse_int(key, value);
                       } else if (key == "epochs") {
                           c.epochs = parse_int(key, value);
                       } else if (key == "learning_rate") {
                           c.learning_rate = parse_real(key, value);
                       } else if (key == "batch_size") {
                           c.batch_size = parse_int(key, value);
                       } else {
                           unknown_key("lstm", key);
                       }
                   },
                   [&](MlpConfig& c) {
                       if (key == "window") {
                           c.window = parse_int(key, value);
                       } else if (key == "hidden_units") {
                           c.hidden_units = parse_int(key, value);
                       } else if (key == "epochs") {
                           c.epochs = parse_int(key, value);
                       } else if (key == "learning_rate") {
                           c.learning_rate = parse_real(key, value);
                       } else if (key == "seasonal") {
                           c.seasonal = parse_bool(key, value);
                       } else {
                           unknown_key("mlp", key);
                       }
                   },
                   [&](AdditiveConfig& c) {
                       if (key == "n_changepoints") {
                           c.n_changepoints = parse_int(key, value);
                       } else if (key == "changepoint_penalty") {
                           c.changepoint_penalty = parse_real(key, value);
                       } else if (key == "fourier_order") {
                           c.fourier_order = parse_int(key, value);
                       } else if (key == "period_days") {
                           c.period_days = parse_real(key, value);
                       } else {
                           unknown_key("prophet", key);
                       }
                   },
               },
               hp);
}

} // namespace epiforecast
