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
#include "epiforecast/forecasters/lstm.hpp"

#include "epiforecast/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace epiforecast {

namespace {

constexpr double init_range = 0.08;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void check_layer(const LstmLayer& layer)
{
    if (layer.bias.size() % 4 != 0 || layer.weights.rows() != layer.bias.size() || layer.input_dim() < 1) {
        throw ContractError("malformed LSTM layer parameters");
    }
}

void activate(Eigen::Ref<Eigen::MatrixXd> gates, Eigen::Index u)
{
    gates.topRows(3 * u) = gates.topRows(3 * u).unaryExpr([](double v) { return sigmoid(v); });
    gates.bottomRows(u) = gates.bottomRows(u).array().tanh();
}

LstmParameters zeros_like(const LstmParameters& p)
{
    LstmParameters g;
    for (const auto& layer : p.layers) {
        g.layers.push_back({Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                            Eigen::VectorXd::Zero(layer.bias.size())});
    }
    g.head_weights = Eigen::VectorXd::Zero(p.head_weights.size());
    g.head_bias = 0.0;
    return g;
}

} // namespace

LstmState lstm_cell_step(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev, const Eigen::VectorXd& c_prev,
                         const LstmLayer& layer)
{
    check_layer(layer);
    const auto u = static_cast<Eigen::Index>(layer.units());
    if (x.size() != layer.input_dim() || h_prev.size() != u || c_prev.size() != u) {
        throw ContractError(fmt::format("LSTM cell expects input {} and state {}, got {}, {}, {}", layer.input_dim(),
                                        u, x.size(), h_prev.size(), c_prev.size()));
    }
    Eigen::VectorXd input(x.size() + u);
    input << x, h_prev;
    Eigen::MatrixXd gates = layer.weights * input + layer.bias;
    activate(gates, u);
    LstmState out;
    out.c = gates.col(0).segment(u, u).cwiseProduct(c_prev) + gates.col(0).head(u).cwiseProduct(gates.col(0).tail(u));
    out.h = gates.col(0).segment(2 * u, u).cwiseProduct(out.c.array().tanh().matrix());
    return out;
}

LstmCache lstm_forward_batch(const Eigen::MatrixXd& windows, const LstmParameters& params)
{
    if (params.layers.empty()) {
        throw ContractError("LSTM needs at least one layer");
    }
    const auto batch = windows.rows();
    const auto steps = windows.cols();
    if (batch < 1 || steps < 1) {
        throw ContractError("LSTM forward needs a non-empty batch of windows");
    }
    LstmCache cache;
    cache.batch = batch;
    cache.steps = steps;
    cache.layers.resize(params.layers.size());

    Eigen::MatrixXd seq(1, steps * batch);
    for (Eigen::Index t = 0; t < steps; ++t) {
        seq.middleCols(t * batch, batch) = windows.col(t).transpose();
    }
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& layer = params.layers[l];
        check_layer(layer);
        const auto u = static_cast<Eigen::Index>(layer.units());
        const auto in = static_cast<Eigen::Index>(layer.input_dim());
        if (seq.rows() != in) {
            throw ContractError(fmt::format("layer {} expects input dimension {}, got {}", l, in, seq.rows()));
        }
        auto& lc = cache.layers[l];
        lc.inputs.resize(in + u, steps * batch);
        lc.inputs.topRows(in) = seq;
        // The input contribution for every step in one product; the recurrent
        // part has to wait for the previous hidden state.
        lc.gates.noalias() = layer.weights.leftCols(in) * seq;
        lc.gates.colwise() += layer.bias;
        lc.cells.resize(u, (steps + 1) * batch);
        lc.cells.leftCols(batch).setZero();
        lc.cell_tanh.resize(u, steps * batch);
        Eigen::MatrixXd hidden(u, steps * batch);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(u, batch);
        for (Eigen::Index t = 0; t < steps; ++t) {
            const auto cols = t * batch;
            lc.inputs.block(in, cols, u, batch) = h;
            auto gates = lc.gates.middleCols(cols, batch);
            gates.noalias() += layer.weights.rightCols(u) * h;
            activate(gates, u);
            lc.cells.middleCols(cols + batch, batch) =
                gates.middleRows(u, u).cwiseProduct(lc.cells.middleCols(cols, batch)) +
                gates.topRows(u).cwiseProduct(gates.bottomRows(u));
            lc.cell_tanh.middleCols(cols, batch) = lc.cells.middleCols(cols + batch, batch).array().tanh();
            h = gates.middleRows(2 * u, u).cwiseProduct(lc.cell_tanh.middleCols(cols, batch));
            hidden.middleCols(cols, batch) = h;
        }
        seq = std::move(hidden);
    }
    cache.last_hidden = seq.rightCols(batch);
    if (params.head_weights.size() != cache.last_hidden.rows()) {
        throw ContractError("LSTM output head does not match the top layer");
    }
    cache.predictions = params.head_weights.transpose() * cache.last_hidden;
    cache.predictions.array() += params.head_bias;
    return cache;
}

std::pair<double, LstmCache> lstm_forward(std::span<const double> window, const LstmParameters& params)
{
    Eigen::MatrixXd row(1, static_cast<Eigen::Index>(window.size()));
    for (std::size_t t = 0; t < window.size(); ++t) {
        row(0, static_cast<Eigen::Index>(t)) = window[t];
    }
    auto cache = lstm_forward_batch(row, params);
    const double pred = cache.predictions(0);
    return {pred, std::move(cache)};
}

LstmParameters lstm_backward(const LstmCache& cache, const LstmParameters& params,
                             const Eigen::RowVectorXd& d_predictions)
{
    const auto batch = cache.batch;
    const auto steps = cache.steps;
    if (d_predictions.size() != batch || cache.layers.size() != params.layers.size()) {
        throw ContractError("LSTM backward called with a cache from a different forward pass");
    }
    LstmParameters grad = zeros_like(params);
    grad.head_weights.noalias() = cache.last_hidden * d_predictions.transpose();
    grad.head_bias = d_predictions.sum();

    // Gradient arriving at each step's hidden output from the layer above.
    const auto top_units = static_cast<Eigen::Index>(params.layers.back().units());
    Eigen::MatrixXd d_hidden = Eigen::MatrixXd::Zero(top_units, steps * batch);
    d_hidden.rightCols(batch) = params.head_weights * d_predictions;

    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const auto& layer = params.layers[l];
        const auto& lc = cache.layers[l];
        auto& gl = grad.layers[l];
        const auto u = static_cast<Eigen::Index>(layer.units());
        const auto in = static_cast<Eigen::Index>(layer.input_dim());
        Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(u, batch);
        Eigen::MatrixXd dc_next = Eigen::MatrixXd::Zero(u, batch);
        Eigen::MatrixXd d_pre(4 * u, steps * batch);
        for (Eigen::Index t = steps; t-- > 0;) {
            const auto cols = t * batch;
            const auto gates = lc.gates.middleCols(cols, batch);
            const auto i = gates.topRows(u).array();
            const auto f = gates.middleRows(u, u).array();
            const auto o = gates.middleRows(2 * u, u).array();
            const auto g = gates.bottomRows(u).array();
            const auto tc = lc.cell_tanh.middleCols(cols, batch).array();
            const auto c_prev = lc.cells.middleCols(cols, batch).array();
            const Eigen::ArrayXXd dh = d_hidden.middleCols(cols, batch).array() + dh_next.array();
            const Eigen::ArrayXXd dc = dh * o * (1.0 - tc * tc) + dc_next.array();
            d_pre.block(0, cols, u, batch) = (dc * g * i * (1.0 - i)).matrix();
            d_pre.block(u, cols, u, batch) = (dc * c_prev * f * (1.0 - f)).matrix();
            d_pre.block(2 * u, cols, u, batch) = (dh * tc * o * (1.0 - o)).matrix();
            d_pre.block(3 * u, cols, u, batch) = (dc * i * (1.0 - g * g)).matrix();
            dc_next = (dc * f).matrix();
            dh_next.noalias() = layer.weights.rightCols(u).transpose() * d_pre.middleCols(cols, batch);
        }
        gl.weights.noalias() = d_pre * lc.inputs.transpose();
        gl.bias = d_pre.rowwise().sum();
        if (l > 0) {
            d_hidden.noalias() = layer.weights.leftCols(in).transpose() * d_pre;
        }
    }
    return grad;
}

LstmParameters lstm_backward(const LstmCache& cache, const LstmParameters& params, double d_prediction)
{
    Eigen::RowVectorXd d(1);
    d(0) = d_prediction;
    return lstm_backward(cache, params, d);
}

LstmParameters init_lstm_parameters(const LstmConfig& config, int input_dim, Rng& rng)
{
    LstmParameters p;
    const auto u = static_cast<Eigen::Index>(config.num_units);
    Eigen::Index in = input_dim;
    for (int l = 0; l < config.layers; ++l) {
        LstmLayer layer;
        layer.weights.resize(4 * u, in + u);
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
                layer.weights(r, c) = rng.uniform(-init_range, init_range);
            }
        }
        layer.bias = Eigen::VectorXd::Zero(4 * u);
        layer.bias.segment(u, u).setOnes();
        p.layers.push_back(std::move(layer));
        in = u;
    }
    p.head_weights.resize(u);
    for (Eigen::Index k = 0; k < u; ++k) {
        p.head_weights(k) = rng.uniform(-init_range, init_range);
    }
    p.head_bias = 0.0;
    return p;
}

std::size_t parameter_count(const LstmParameters& params)
{
    std::size_t n = 0;
    for (const auto& layer : params.layers) {
        n += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
    }
    return n + static_cast<std::size_t>(params.head_weights.size()) + 1;
}

double& parameter_at(LstmParameters& params, std::size_t index)
{
    for (auto& layer : params.layers) {
        const auto nw = static_cast<std::size_t>(layer.weights.size());
        if (index < nw) {
            // row-major position
            const auto cols = static_cast<std::size_t>(layer.weights.cols());
            return layer.weights(static_cast<Eigen::Index>(index / cols), static_cast<Eigen::Index>(index % cols));
        }
        index -= nw;
        const auto nb = static_cast<std::size_t>(layer.bias.size());
        if (index < nb) {
            return layer.bias(static_cast<Eigen::Index>(index));
        }
        index -= nb;
    }
    const auto nh = static_cast<std::size_t>(params.head_weights.size());
    if (index < nh) {
        return params.head_weights(static_cast<Eigen::Index>(index));
    }
    if (index == nh) {
        return params.head_bias;
    }
    throw ContractError("parameter index out of range");
}

double lstm_training_mse(const LstmParameters& params, const WindowSet& windows)
{
    const auto cache = lstm_forward_batch(windows.inputs, params);
    return (cache.predictions.transpose() - windows.targets).squaredNorm() /
           static_cast<double>(windows.targets.size());
}

LstmTrainer::LstmTrainer(const Series& train, const LstmConfig& config, std::uint64_t seed)
    : config_(config), seed_(seed), rng_(seed), start_(train.start_date()), length_(train.size())
{
    validate(ForecasterSpec{config, seed});
    if (train.size() <= static_cast<std::size_t>(config.window) + 1) {
        throw ContractError(fmt::format("LSTM window {} needs more than {} observations, got {}", config.window,
                                        config.window + 1, train.size()));
    }
    windows_ = make_windows(train, config.window);
    params_ = init_lstm_parameters(config, 1, rng_);
    tail_.assign(train.values().end() - config.window, train.values().end());
}

void LstmTrainer::run_epoch()
{
    const auto n = static_cast<std::size_t>(windows_.targets.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng_.below(i))]);
    }
    const auto bs = static_cast<std::size_t>(config_.batch_size);
    const auto w = windows_.inputs.cols();
    double epoch_loss = 0.0;
    Eigen::MatrixXd xb;
    Eigen::VectorXd yb;
    for (std::size_t begin = 0; begin < n; begin += bs) {
        const auto count = std::min(bs, n - begin);
        xb.resize(static_cast<Eigen::Index>(count), w);
        yb.resize(static_cast<Eigen::Index>(count));
        for (std::size_t k = 0; k < count; ++k) {
            const auto row = static_cast<Eigen::Index>(order[begin + k]);
            xb.row(static_cast<Eigen::Index>(k)) = windows_.inputs.row(row);
            yb(static_cast<Eigen::Index>(k)) = windows_.targets(row);
        }
        const auto cache = lstm_forward_batch(xb, params_);
        const Eigen::RowVectorXd err = cache.predictions - yb.transpose();
        const double batch_loss = err.squaredNorm();
        if (!std::isfinite(batch_loss)) {
            throw DivergenceError(fmt::format("LSTM training loss became non-finite in epoch {}", epochs_done_ + 1));
        }
        epoch_loss += batch_loss;
        const Eigen::RowVectorXd d_pred = err * (2.0 / static_cast<double>(count));
        const auto grad = lstm_backward(cache, params_, d_pred);
        const double lr = config_.learning_rate;
        for (std::size_t l = 0; l < params_.layers.size(); ++l) {
            params_.layers[l].weights -= lr * grad.layers[l].weights;
            params_.layers[l].bias -= lr * grad.layers[l].bias;
        }
        params_.head_weights -= lr * grad.head_weights;
        params_.head_bias -= lr * grad.head_bias;
    }
    ++epochs_done_;
    loss_history_.push_back(epoch_loss / static_cast<double>(n));
}

double LstmTrainer::training_mse() const { return lstm_training_mse(params_, windows_); }

FittedModel LstmTrainer::snapshot() const
{
    FittedModel m;
    auto config = config_;
    config.epochs = epochs_done_;
    m.spec = ForecasterSpec{config, seed_};
    m.parameters = params_;
    m.train_tail = tail_;
    m.train_start = start_;
    m.train_length = length_;
    m.loss_history = loss_history_;
    return m;
}

FittedModel train_lstm(const Series& train, const LstmConfig& config, std::uint64_t seed)
{
    LstmTrainer trainer(train, config, seed);
    for (int e = 0; e < config.epochs; ++e) {
        trainer.run_epoch();
    }
    return trainer.snapshot();
}

std::vector<FittedModel> train_lstm_checkpoints(const Series& train, const LstmConfig& config, std::uint64_t seed,
                                                std::span<const int> checkpoints)
{
    std::vector<int> sorted(checkpoints.begin(), checkpoints.end());
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty() && (sorted.front() < 0 || sorted.back() > config.epochs)) {
        throw ContractError("checkpoint outside [0, epochs]");
    }
    LstmTrainer trainer(train, config, seed);
    std::vector<FittedModel> by_epoch;
    for (int target : sorted) {
        while (trainer.epochs_done() < target) {
            trainer.run_epoch();
        }
        by_epoch.push_back(trainer.snapshot());
    }
    std::vector<FittedModel> out;
    for (int c : checkpoints) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), c);
        out.push_back(by_epoch[static_cast<std::size_t>(it - sorted.begin())]);
    }
    return out;
}

std::vector<double> forecast_lstm(const FittedModel& m, int h)
{
    if (h < 1) {
        throw ContractError("forecast horizon must be >= 1");
    }
    const auto& params = std::get<LstmParameters>(m.parameters);
    std::vector<double> window = m.train_tail;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(h));
    for (int k = 0; k < h; ++k) {
        const double next = lstm_forward(window, params).first;
        out.push_back(next);
        window.erase(window.begin());
        window.push_back(next);
    }
    return out;
}

} // namespace epiforecast
