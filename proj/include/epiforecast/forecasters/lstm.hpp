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

#include "epiforecast/forecasters/model.hpp"
#include "epiforecast/random.hpp"

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace epiforecast {

struct LstmState {
    Eigen::VectorXd h;
    Eigen::VectorXd c;
};

/**
 * One cell update:
 *   i = sig(W_i [x; h] + b_i), f = sig(W_f [x; h] + b_f), o = sig(W_o [x; h] + b_o),
 *   g = tanh(W_g [x; h] + b_g), c' = f*c + i*g, h' = o*tanh(c').
 */
LstmState lstm_cell_step(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev, const Eigen::VectorXd& c_prev,
                         const LstmLayer& layer);

/// Activations kept by the forward pass for backpropagation through time.
/// Column block t (columns t*batch .. t*batch+batch-1) belongs to step t.
struct LstmCache {
    struct Layer {
        Eigen::MatrixXd inputs;    // [x_t; h_{t-1}], (input_dim + units) x (steps * batch)
        Eigen::MatrixXd gates;     // post-activation i, f, o, g stacked, (4 units) x (steps * batch)
        Eigen::MatrixXd cells;     // c_{-1} .. c_{w-1}, units x ((steps + 1) * batch); block 0 is zero
        Eigen::MatrixXd cell_tanh; // tanh(c_t), units x (steps * batch)
    };
    std::vector<Layer> layers;
    Eigen::Index batch = 0;
    Eigen::Index steps = 0;
    Eigen::MatrixXd last_hidden; // top layer h_{w-1}, units x batch
    Eigen::RowVectorXd predictions;
};

/// Runs each row of `windows` (batch x window) through the stacked layers and
/// the linear head applied to the final top-layer hidden state.
LstmCache lstm_forward_batch(const Eigen::MatrixXd& windows, const LstmParameters& params);

/// Single-window convenience wrapper.
std::pair<double, LstmCache> lstm_forward(std::span<const double> window, const LstmParameters& params);

/// Gradient of sum_b d_predictions[b] * prediction[b] w.r.t. every parameter.
/// The result has the same shapes as `params`.
LstmParameters lstm_backward(const LstmCache& cache, const LstmParameters& params,
                             const Eigen::RowVectorXd& d_predictions);
LstmParameters lstm_backward(const LstmCache& cache, const LstmParameters& params, double d_prediction);

/// Uniform [-0.08, 0.08] weights, forget-gate bias 1, other biases 0.
LstmParameters init_lstm_parameters(const LstmConfig& config, int input_dim, Rng& rng);

/// Flat views used by gradient checks and the optimizer.
std::size_t parameter_count(const LstmParameters& params);
double& parameter_at(LstmParameters& params, std::size_t index);

/**
 * Mini-batch gradient descent on windowed data with a fixed learning rate.
 *
 * Each epoch visits a fresh seeded permutation of the windows. The trainer can
 * be snapshotted after any epoch; a snapshot after k epochs is bit-identical
 * to train_lstm with epochs = k.
 */
class LstmTrainer {
public:
    LstmTrainer(const Series& train, const LstmConfig& config, std::uint64_t seed);

    void run_epoch();
    int epochs_done() const { return epochs_done_; }
    double training_mse() const;
    FittedModel snapshot() const;

private:
    LstmConfig config_;
    std::uint64_t seed_;
    WindowSet windows_;
    Rng rng_;
    LstmParameters params_;
    std::vector<double> loss_history_;
    std::vector<double> tail_;
    Date start_;
    std::size_t length_;
    int epochs_done_ = 0;
};

FittedModel train_lstm(const Series& train, const LstmConfig& config, std::uint64_t seed);

/// One training run, snapshotted after each epoch count in `checkpoints`
/// (each <= config.epochs); results are returned in the order given.
std::vector<FittedModel> train_lstm_checkpoints(const Series& train, const LstmConfig& config, std::uint64_t seed,
                                                std::span<const int> checkpoints);

/// In-sample mean squared error of the one-step window predictions.
double lstm_training_mse(const LstmParameters& params, const WindowSet& windows);

std::vector<double> forecast_lstm(const FittedModel& m, int h);

} // namespace epiforecast
