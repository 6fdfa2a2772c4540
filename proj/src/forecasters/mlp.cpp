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
#include "epiforecast/forecasters/mlp.hpp"

#include "epiforecast/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace epiforecast {

namespace {

constexpr int weekday_features = 7;

void fill_uniform(Eigen::Ref<Eigen::MatrixXd> m, double range, Rng& rng)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = rng.uniform(-range, range);
        }
    }
}

} // namespace

void mlp_features(std::span<const double> values, Date start, int window, bool seasonal, Eigen::MatrixXd& x,
                  Eigen::VectorXd& y)
{
    const auto n = static_cast<Eigen::Index>(values.size());
    if (window < 1 || window >= n) {
        throw ContractError(fmt::format("window {} invalid for series of length {}", window, n));
    }
    const auto rows = n - window;
    const auto cols = window + (seasonal ? weekday_features : 0);
    x.setZero(rows, cols);
    y.resize(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < window; ++j) {
            x(i, j) = values[static_cast<std::size_t>(i + j)];
        }
        if (seasonal) {
            x(i, window + weekday_index(add_days(start, i + window))) = 1.0;
        }
        y(i) = values[static_cast<std::size_t>(i + window)];
    }
}

MlpParameters init_mlp_parameters(int inputs, int hidden, Rng& rng)
{
    MlpParameters p;
    if (hidden > 0) {
        p.hidden_weights.resize(hidden, inputs);
        fill_uniform(p.hidden_weights, std::sqrt(6.0 / (inputs + hidden)), rng);
        p.hidden_bias = Eigen::VectorXd::Zero(hidden);
        p.output_weights.resize(hidden);
        fill_uniform(p.output_weights, std::sqrt(6.0 / (hidden + 1)), rng);
    } else {
        p.output_weights.resize(inputs);
        fill_uniform(p.output_weights, std::sqrt(6.0 / (inputs + 1)), rng);
    }
    p.output_bias = 0.0;
    return p;
}

Eigen::VectorXd mlp_predict(const MlpParameters& params, const Eigen::MatrixXd& x)
{
    Eigen::VectorXd out;
    if (params.hidden_weights.size() > 0) {
        Eigen::MatrixXd act = x * params.hidden_weights.transpose();
        act.rowwise() += params.hidden_bias.transpose();
        act = act.array().tanh();
        out = act * params.output_weights;
    } else {
        out = x * params.output_weights;
    }
    out.array() += params.output_bias;
    return out;
}

std::pair<double, MlpParameters> mlp_loss_gradient(const MlpParameters& params, const Eigen::MatrixXd& x,
                                                   const Eigen::VectorXd& y)
{
    const auto n = static_cast<double>(x.rows());
    MlpParameters g;
    g.output_bias = 0.0;
    if (params.hidden_weights.size() > 0) {
        Eigen::MatrixXd act = x * params.hidden_weights.transpose();
        act.rowwise() += params.hidden_bias.transpose();
        act = act.array().tanh();
        Eigen::VectorXd pred = act * params.output_weights;
        pred.array() += params.output_bias;
        const Eigen::VectorXd err = pred - y;
        const Eigen::VectorXd d_pred = err * (2.0 / n);
        g.output_weights = act.transpose() * d_pred;
        g.output_bias = d_pred.sum();
        const Eigen::MatrixXd d_act =
            (d_pred * params.output_weights.transpose()).array() * (1.0 - act.array().square());
        g.hidden_weights = d_act.transpose() * x;
        g.hidden_bias = d_act.colwise().sum().transpose();
        return {err.squaredNorm() / n, std::move(g)};
    }
    Eigen::VectorXd pred = x * params.output_weights;
    pred.array() += params.output_bias;
    const Eigen::VectorXd err = pred - y;
    const Eigen::VectorXd d_pred = err * (2.0 / n);
    g.output_weights = x.transpose() * d_pred;
    g.output_bias = d_pred.sum();
    return {err.squaredNorm() / n, std::move(g)};
}

std::size_t parameter_count(const MlpParameters& params)
{
    return static_cast<std::size_t>(params.hidden_weights.size() + params.hidden_bias.size() +
                                    params.output_weights.size()) +
           1;
}

double& parameter_at(MlpParameters& params, std::size_t index)
{
    const auto nw = static_cast<std::size_t>(params.hidden_weights.size());
    if (index < nw) {
        const auto cols = static_cast<std::size_t>(params.hidden_weights.cols());
        return params.hidden_weights(static_cast<Eigen::Index>(index / cols), static_cast<Eigen::Index>(index % cols));
    }
    index -= nw;
    if (index < static_cast<std::size_t>(params.hidden_bias.size())) {
        return params.hidden_bias(static_cast<Eigen::Index>(index));
    }
    index -= static_cast<std::size_t>(params.hidden_bias.size());
    if (index < static_cast<std::size_t>(params.output_weights.size())) {
        return params.output_weights(static_cast<Eigen::Index>(index));
    }
    index -= static_cast<std::size_t>(params.output_weights.size());
    if (index == 0) {
        return params.output_bias;
    }
    throw ContractError("parameter index out of range");
}

FittedModel fit_mlp(const Series& train, const MlpConfig& config, std::uint64_t seed)
{
    validate(ForecasterSpec{config, seed});
    if (train.size() <= static_cast<std::size_t>(config.window) + 1) {
        throw ContractError(fmt::format("MLP window {} needs more than {} observations, got {}", config.window,
                                        config.window + 1, train.size()));
    }
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    mlp_features(train.view(), train.start_date(), config.window, config.seasonal, x, y);
    Rng rng(seed);
    auto params = init_mlp_parameters(static_cast<int>(x.cols()), config.hidden_units, rng);

    FittedModel m;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        auto [loss, grad] = mlp_loss_gradient(params, x, y);
        if (!std::isfinite(loss)) {
            throw DivergenceError(fmt::format("MLP training loss became non-finite in epoch {}", epoch + 1));
        }
        m.loss_history.push_back(loss);
        const double lr = config.learning_rate;
        if (params.hidden_weights.size() > 0) {
            params.hidden_weights -= lr * grad.hidden_weights;
            params.hidden_bias -= lr * grad.hidden_bias;
        }
        params.output_weights -= lr * grad.output_weights;
        params.output_bias -= lr * grad.output_bias;
    }
    const Eigen::VectorXd final_pred = mlp_predict(params, x);
    if (!final_pred.allFinite()) {
        throw DivergenceError("MLP training produced non-finite predictions");
    }

    m.spec = ForecasterSpec{config, seed};
    m.parameters = std::move(params);
    m.train_tail.assign(train.values().end() - config.window, train.values().end());
    m.train_start = train.start_date();
    m.train_length = train.size();
    return m;
}

std::vector<double> forecast_mlp(const FittedModel& m, int h)
{
    if (h < 1) {
        throw ContractError("forecast horizon must be >= 1");
    }
    const auto& params = std::get<MlpParameters>(m.parameters);
    const auto& config = std::get<MlpConfig>(m.spec.hyperparameters);
    const auto w = static_cast<Eigen::Index>(config.window);
    std::vector<double> window = m.train_tail;
    std::vector<double> out;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(1, w + (config.seasonal ? weekday_features : 0));
    for (int k = 0; k < h; ++k) {
        x.setZero();
        for (Eigen::Index j = 0; j < w; ++j) {
            x(0, j) = window[static_cast<std::size_t>(j)];
        }
        if (config.seasonal) {
            x(0, w + weekday_index(add_days(m.train_end(), k + 1))) = 1.0;
        }
        const double next = mlp_predict(params, x)(0);
        out.push_back(next);
        window.erase(window.begin());
        window.push_back(next);
    }
    return out;
}

} // namespace epiforecast
