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
#include "epiforecast/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace epiforecast::cli {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const auto item = trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (!item.empty()) {
            out.push_back(item);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& value)
{
    T out{};
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || end != value.data() + value.size()) {
        throw UsageError(fmt::format("{}: cannot parse '{}'", key, value));
    }
    return out;
}

bool parse_flag(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1" || value == "yes" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no" || value == "off") {
        return false;
    }
    throw UsageError(fmt::format("{}: expected true or false, got '{}'", key, value));
}

pt::ptree read_ini(const std::string& path)
{
    if (!std::filesystem::exists(path)) {
        throw UsageError(fmt::format("file not found: {}", path));
    }
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw UsageError(fmt::format("cannot read {}: {}", path, e.what()));
    }
    return tree;
}

GridAxes read_axes(const pt::ptree& section)
{
    GridAxes axes;
    for (const auto& [key, node] : section) {
        auto values = split_list(node.data());
        if (values.empty()) {
            throw UsageError(fmt::format("grid axis '{}' has no values", key));
        }
        axes.emplace_back(key, std::move(values));
    }
    return axes;
}

} // namespace

std::vector<ForecasterKind> all_models()
{
    return {ForecasterKind::additive, ForecasterKind::lstm, ForecasterKind::autoreg, ForecasterKind::arima,
            ForecasterKind::mlp};
}

ForecasterKind parse_model_name(const std::string& name)
{
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    const auto kind = parse_forecaster_kind(lower);
    if (!kind) {
        throw UsageError(fmt::format("unknown model '{}' (expected prophet, lstm, autoreg, arima or mlp)", name));
    }
    return *kind;
}

Target parse_target_name(const std::string& name)
{
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    const auto target = parse_target(lower);
    if (!target) {
        throw UsageError(fmt::format("unknown target '{}' (expected confirmed, deaths or recovered)", name));
    }
    return *target;
}

HyperparameterOverride parse_override(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw UsageError(fmt::format("expected key=value, got '{}'", text));
    }
    HyperparameterOverride o;
    auto key = trim(std::string_view(text).substr(0, eq));
    o.value = trim(std::string_view(text).substr(eq + 1));
    if (const auto dot = key.find('.'); dot != std::string::npos) {
        o.kind = parse_model_name(key.substr(0, dot));
        key = key.substr(dot + 1);
    }
    o.key = key;
    return o;
}

void load_config_file(const std::string& path, RunConfig& config)
{
    const auto tree = read_ini(path);
    config.config_file = path;
    for (const auto& [section, node] : tree) {
        if (section == "run") {
            for (const auto& [key, item] : node) {
                const auto value = trim(item.data());
                if (key == "input") {
                    config.input = value;
                } else if (key == "target") {
                    config.target = parse_target_name(value);
                } else if (key == "model") {
                    config.models.clear();
                    for (const auto& name : split_list(value)) {
                        config.models.push_back(parse_model_name(name));
                    }
                } else if (key == "grid") {
                    config.grid = value;
                } else if (key == "horizon") {
                    config.horizon = parse_number<int>(key, value);
                } else if (key == "test_fraction") {
                    config.test_fraction = parse_number<double>(key, value);
                } else if (key == "validation_fraction") {
                    config.validation_fraction = parse_number<double>(key, value);
                } else if (key == "seed") {
                    config.seed = parse_number<std::uint64_t>(key, value);
                } else if (key == "out") {
                    config.out = value;
                } else if (key == "allow_corrections") {
                    config.allow_corrections = parse_flag(key, value);
                } else if (key == "threads") {
                    config.threads = parse_number<unsigned>(key, value);
                } else {
                    throw UsageError(fmt::format("{}: unknown key '{}' in [run]", path, key));
                }
            }
        } else if (section.starts_with("grid.")) {
            config.grid_axes[parse_model_name(section.substr(5))] = read_axes(node);
        } else {
            const auto kind = parse_model_name(section);
            for (const auto& [key, item] : node) {
                config.overrides.push_back({kind, key, trim(item.data())});
            }
        }
    }
}

std::map<ForecasterKind, GridAxes> load_grid_file(const std::string& path)
{
    std::map<ForecasterKind, GridAxes> out;
    for (const auto& [section, node] : read_ini(path)) {
        out[parse_model_name(section)] = read_axes(node);
    }
    return out;
}

Hyperparameters resolve_hyperparameters(const RunConfig& config, ForecasterKind kind)
{
    Hyperparameters hp = default_hyperparameters(kind);
    for (const auto& o : config.overrides) {
        if (!o.kind || *o.kind == kind) {
            try {
                set_hyperparameter(hp, o.key, o.value);
            } catch (const ContractError& e) {
                throw UsageError(e.what());
            }
        }
    }
    return hp;
}

std::vector<ForecasterSpec> resolve_grid(const RunConfig& config, ForecasterKind kind)
{
    const auto base = resolve_hyperparameters(config, kind);
    if (config.grid.empty()) {
        ForecasterSpec spec{base, config.seed};
        try {
            validate(spec);
        } catch (const ContractError& e) {
            throw UsageError(e.what());
        }
        return {spec};
    }
    GridAxes axes = default_grid_axes(kind);
    std::map<ForecasterKind, GridAxes> replacements = config.grid_axes;
    if (config.grid != "default") {
        for (auto& [k, a] : load_grid_file(config.grid)) {
            replacements[k] = std::move(a);
        }
    }
    if (const auto it = replacements.find(kind); it != replacements.end()) {
        for (const auto& [key, values] : it->second) {
            const auto pos = std::find_if(axes.begin(), axes.end(), [&](const auto& a) { return a.first == key; });
            if (pos != axes.end()) {
                pos->second = values;
            } else {
                axes.emplace_back(key, values);
            }
        }
    }
    try {
        return expand_grid(base, axes, config.seed);
    } catch (const ContractError& e) {
        throw UsageError(fmt::format("invalid {} grid: {}", series_name(kind), e.what()));
    }
}

} // namespace epiforecast::cli
