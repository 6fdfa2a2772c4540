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
#include "epiforecast/error.hpp"
#include "epiforecast/forecasters/model.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace epiforecast {

namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json matrix_to_json(const Eigen::MatrixXd& m)
{
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            data.push_back(m(r, c));
        }
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const json& j)
{
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
        throw LoadError("matrix shape does not match its data");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
        }
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j)
{
    const auto data = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

json hyperparameters_to_json(const Hyperparameters& hp)
{
    return std::visit(overloaded{
                          [](const ArOrder& o) -> json { return {{"p", o.p}}; },
                          [](const ArimaOrder& o) -> json { return {{"p", o.p}, {"d", o.d}, {"q", o.q}}; },
                          [](const LstmConfig& c) -> json {
                              return {{"layers", c.layers},     {"num_units", c.num_units},
                                      {"window", c.window},     {"epochs", c.epochs},
                                      {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size}};
                          },
                          [](const MlpConfig& c) -> json {
                              return {{"window", c.window},
                                      {"hidden_units", c.hidden_units},
                                      {"epochs", c.epochs},
                                      {"learning_rate", c.learning_rate},
                                      {"seasonal", c.seasonal}};
                          },
                          [](const AdditiveConfig& c) -> json {
                              return {{"n_changepoints", c.n_changepoints},
                                      {"changepoint_penalty", c.changepoint_penalty},
                                      {"fourier_order", c.fourier_order},
                                      {"period_days", c.period_days}};
                          },
                      },
                      hp);
}

Hyperparameters hyperparameters_from_json(ForecasterKind kind, const json& j)
{
    switch (kind) {
    case ForecasterKind::autoreg:
        return ArOrder{j.at("p").get<int>()};
    case ForecasterKind::arima:
        return ArimaOrder{j.at("p").get<int>(), j.at("d").get<int>(), j.at("q").get<int>()};
    case ForecasterKind::lstm:
        return LstmConfig{j.at("layers").get<int>(),          j.at("num_units").get<int>(),
                          j.at("window").get<int>(),          j.at("epochs").get<int>(),
                          j.at("learning_rate").get<double>(), j.at("batch_size").get<int>()};
    case ForecasterKind::mlp:
        return MlpConfig{j.at("window").get<int>(), j.at("hidden_units").get<int>(), j.at("epochs").get<int>(),
                         j.at("learning_rate").get<double>(), j.at("seasonal").get<bool>()};
    case ForecasterKind::additive:
        return AdditiveConfig{j.at("n_changepoints").get<int>(), j.at("changepoint_penalty").get<double>(),
                              j.at("fourier_order").get<int>(), j.at("period_days").get<double>()};
    }
    throw LoadError("unknown model kind");
}

json parameters_to_json(const ModelParameters& params)
{
    return std::visit(
        overloaded{
            [](const ArParameters& p) -> json {
                return {{"intercept", p.intercept}, {"coefficients", p.coefficients}};
            },
            [](const ArimaParameters& p) -> json {
                return {{"intercept", p.intercept},
                        {"ar", p.ar},
                        {"ma", p.ma},
                        {"residual_tail", p.residual_tail},
                        {"objective", p.objective},
                        {"initial_objective", p.initial_objective},
                        {"iterations", p.iterations}};
            },
            [](const LstmParameters& p) -> json {
                json layers = json::array();
                for (const auto& layer : p.layers) {
                    layers.push_back({{"weights", matrix_to_json(layer.weights)}, {"bias", vector_to_json(layer.bias)}});
                }
                return {{"layers", layers}, {"head_weights", vector_to_json(p.head_weights)}, {"head_bias", p.head_bias}};
            },
            [](const MlpParameters& p) -> json {
                return {{"hidden_weights", matrix_to_json(p.hidden_weights)},
                        {"hidden_bias", vector_to_json(p.hidden_bias)},
                        {"output_weights", vector_to_json(p.output_weights)},
                        {"output_bias", p.output_bias}};
            },
            [](const AdditiveParameters& p) -> json {
                return {{"changepoints", p.changepoints}, {"coefficients", vector_to_json(p.coefficients)}};
            },
        },
        params);
}

ModelParameters parameters_from_json(ForecasterKind kind, const json& j)
{
    switch (kind) {
    case ForecasterKind::autoreg:
        return ArParameters{j.at("intercept").get<double>(), j.at("coefficients").get<std::vector<double>>()};
    case ForecasterKind::arima: {
        ArimaParameters p;
        p.intercept = j.at("intercept").get<double>();
        p.ar = j.at("ar").get<std::vector<double>>();
        p.ma = j.at("ma").get<std::vector<double>>();
        p.residual_tail = j.at("residual_tail").get<std::vector<double>>();
        p.objective = j.at("objective").get<double>();
        p.initial_objective = j.at("initial_objective").get<double>();
        p.iterations = j.at("iterations").get<int>();
        return p;
    }
    case ForecasterKind::lstm: {
        LstmParameters p;
        for (const auto& layer : j.at("layers")) {
            p.layers.push_back({matrix_from_json(layer.at("weights")), vector_from_json(layer.at("bias"))});
        }
        p.head_weights = vector_from_json(j.at("head_weights"));
        p.head_bias = j.at("head_bias").get<double>();
        return p;
    }
    case ForecasterKind::mlp: {
        MlpParameters p;
        p.hidden_weights = matrix_from_json(j.at("hidden_weights"));
        p.hidden_bias = vector_from_json(j.at("hidden_bias"));
        p.output_weights = vector_from_json(j.at("output_weights"));
        p.output_bias = j.at("output_bias").get<double>();
        return p;
    }
    case ForecasterKind::additive:
        return AdditiveParameters{j.at("changepoints").get<std::vector<double>>(),
                                  vector_from_json(j.at("coefficients"))};
    }
    throw LoadError("unknown model kind");
}

int read_version(const json& doc)
{
    const auto& v = doc.at("schema_version");
    if (v.is_number_integer()) {
        return v.get<int>();
    }
    if (v.is_string()) {
        try {
            std::size_t used = 0;
            const auto s = v.get<std::string>();
            const int n = std::stoi(s, &used);
            if (used == s.size()) {
                return n;
            }
        } catch (const std::exception&) {
        }
    }
    throw LoadError("schema_version is not an integer");
}

void check_shapes(const FittedModel& m)
{
    const bool ok = std::visit(
        overloaded{
            [&](const ArParameters& p) {
                const auto& o = std::get<ArOrder>(m.spec.hyperparameters);
                return p.coefficients.size() == static_cast<std::size_t>(o.p) &&
                       m.train_tail.size() == static_cast<std::size_t>(o.p);
            },
            [&](const ArimaParameters& p) {
                const auto& o = std::get<ArimaOrder>(m.spec.hyperparameters);
                return p.ar.size() == static_cast<std::size_t>(o.p) && p.ma.size() == static_cast<std::size_t>(o.q) &&
                       p.residual_tail.size() == static_cast<std::size_t>(o.q) &&
                       m.train_tail.size() == static_cast<std::size_t>(o.p + o.d) && m.diff_state &&
                       m.diff_state->order == o.d;
            },
            [&](const LstmParameters& p) {
                const auto& c = std::get<LstmConfig>(m.spec.hyperparameters);
                if (p.layers.size() != static_cast<std::size_t>(c.layers) ||
                    m.train_tail.size() != static_cast<std::size_t>(c.window)) {
                    return false;
                }
                int in = 1;
                for (const auto& layer : p.layers) {
                    if (layer.bias.size() != 4 * c.num_units || layer.weights.rows() != 4 * c.num_units ||
                        layer.weights.cols() != in + c.num_units) {
                        return false;
                    }
                    in = c.num_units;
                }
                return p.head_weights.size() == c.num_units;
            },
            [&](const MlpParameters& p) {
                const auto& c = std::get<MlpConfig>(m.spec.hyperparameters);
                const Eigen::Index inputs = c.window + (c.seasonal ? 7 : 0);
                if (m.train_tail.size() != static_cast<std::size_t>(c.window)) {
                    return false;
                }
                if (c.hidden_units == 0) {
                    return p.hidden_weights.size() == 0 && p.output_weights.size() == inputs;
                }
                return p.hidden_weights.rows() == c.hidden_units && p.hidden_weights.cols() == inputs &&
                       p.hidden_bias.size() == c.hidden_units && p.output_weights.size() == c.hidden_units;
            },
            [&](const AdditiveParameters& p) {
                const auto& c = std::get<AdditiveConfig>(m.spec.hyperparameters);
                return p.changepoints.size() == static_cast<std::size_t>(c.n_changepoints) &&
                       p.coefficients.size() == 2 + c.n_changepoints + 2 * c.fourier_order;
            },
        },
        m.parameters);
    if (!ok) {
        throw LoadError("parameter shapes do not match the hyperparameters");
    }
}

} // namespace

std::string serialize_model(const FittedModel& m)
{
    json doc;
    doc["schema_version"] = model_schema_version;
    doc["kind"] = std::string(to_string(m.kind()));
    doc["seed"] = m.spec.seed;
    doc["hyperparameters"] = hyperparameters_to_json(m.spec.hyperparameters);
    doc["scaler"] = {{"min", m.scaler.min}, {"max", m.scaler.max}};
    if (m.diff_state) {
        doc["diff_state"] = {{"order", m.diff_state->order},
                             {"heads", m.diff_state->heads},
                             {"source_kind", m.diff_state->source_kind == SeriesKind::cumulative ? "cumulative"
                                                                                                : "incident"}};
    } else {
        doc["diff_state"] = nullptr;
    }
    doc["parameters"] = parameters_to_json(m.parameters);
    doc["train_tail"] = m.train_tail;
    doc["train_start"] = format_date(m.train_start);
    doc["train_length"] = m.train_length;
    doc["target"] = m.target;
    doc["loss_history"] = m.loss_history;
    doc["warnings"] = m.warnings;
    return doc.dump(2) + "\n";
}

FittedModel deserialize_model(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw LoadError(fmt::format("model file is not valid JSON: {}", e.what()));
    }
    try {
        if (!doc.is_object()) {
            throw LoadError("model file is not a JSON object");
        }
        const int version = read_version(doc);
        if (version != model_schema_version) {
            throw UnsupportedVersionError(fmt::format("unsupported model schema version {} (expected {})", version,
                                                      model_schema_version));
        }
        const auto kind_name = doc.at("kind").get<std::string>();
        const auto kind = parse_forecaster_kind(kind_name);
        if (!kind) {
            throw LoadError(fmt::format("unknown model kind '{}'", kind_name));
        }
        FittedModel m;
        m.spec.hyperparameters = hyperparameters_from_json(*kind, doc.at("hyperparameters"));
        m.spec.seed = doc.at("seed").get<std::uint64_t>();
        validate(m.spec);
        m.scaler.min = doc.at("scaler").at("min").get<double>();
        m.scaler.max = doc.at("scaler").at("max").get<double>();
        if (const auto& ds = doc.at("diff_state"); !ds.is_null()) {
            DifferenceState state;
            state.order = ds.at("order").get<int>();
            state.heads = ds.at("heads").get<std::vector<double>>();
            const auto source = ds.at("source_kind").get<std::string>();
            if (source != "cumulative" && source != "incident") {
                throw LoadError(fmt::format("unknown series kind '{}'", source));
            }
            state.source_kind = source == "cumulative" ? SeriesKind::cumulative : SeriesKind::incident;
            m.diff_state = state;
        }
        m.parameters = parameters_from_json(*kind, doc.at("parameters"));
        m.train_tail = doc.at("train_tail").get<std::vector<double>>();
        const auto start = parse_date(doc.at("train_start").get<std::string>());
        if (!start) {
            throw LoadError("train_start is not a YYYY-MM-DD date");
        }
        m.train_start = *start;
        m.train_length = doc.at("train_length").get<std::size_t>();
        m.target = doc.at("target").get<std::string>();
        m.loss_history = doc.at("loss_history").get<std::vector<double>>();
        m.warnings = doc.at("warnings").get<std::vector<std::string>>();
        check_shapes(m);
        return m;
    } catch (const json::exception& e) {
        throw LoadError(fmt::format("malformed model file: {}", e.what()));
    } catch (const ContractError& e) {
        throw LoadError(fmt::format("invalid hyperparameters in model file: {}", e.what()));
    }
}

void save_model(const FittedModel& m, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot write model file {}", path));
    }
    out << serialize_model(m);
    if (!out) {
        throw Error(fmt::format("failed writing model file {}", path));
    }
}

FittedModel load_model(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoadError(fmt::format("cannot open model file {}", path));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_model(buf.str());
}

} // namespace epiforecast
