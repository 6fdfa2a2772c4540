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

#include "epiforecast/data.hpp"
#include "epiforecast/forecasters/spec.hpp"
#include "epiforecast/transform.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace epiforecast {

struct ArParameters {
    double intercept = 0.0;
    std::vector<double> coefficients; // phi_1 .. phi_p
};

struct ArimaParameters {
    double intercept = 0.0;
    std::vector<double> ar; // phi_1 .. phi_p
    std::vector<double> ma; // theta_1 .. theta_q
    /// Last q in-sample residuals (oldest first), needed to start the MA recursion.
    std::vector<double> residual_tail;
    double objective = 0.0;
    double initial_objective = 0.0;
    int iterations = 0;
};

/// One LSTM layer. Gate blocks are stacked row-wise in the order
/// input, forget, output, candidate; each block is (units x (input_dim + units)).
struct LstmLayer {
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias;

    int units() const { return static_cast<int>(bias.size() / 4); }
    int input_dim() const { return static_cast<int>(weights.cols()) - units(); }
};

struct LstmParameters {
    std::vector<LstmLayer> layers;
    Eigen::VectorXd head_weights;
    double head_bias = 0.0;
};

struct MlpParameters {
    /// (hidden x inputs); empty when the network has no hidden layer.
    Eigen::MatrixXd hidden_weights;
    Eigen::VectorXd hidden_bias;
    /// Size hidden, or size inputs when there is no hidden layer.
    Eigen::VectorXd output_weights;
    double output_bias = 0.0;
};

struct AdditiveParameters {
    std::vector<double> changepoints;
    /// [intercept, slope, hinge_1..hinge_k, cos_1, sin_1, ..., cos_K, sin_K]
    Eigen::VectorXd coefficients;
};

using ModelParameters = std::variant<ArParameters, ArimaParameters, LstmParameters, MlpParameters, AdditiveParameters>;

/**
 * Everything needed to forecast without the original data.
 *
 * Parameters live on the normalized scale defined by `scaler`; forecast()
 * output is on that scale too and forecast_raw() maps it back to counts.
 * Time index 0 is `train_start`; the model was fitted on indices
 * [0, train_length).
 */
struct FittedModel {
    ForecasterSpec spec;
    ModelParameters parameters;
    MinMaxScaler scaler = MinMaxScaler::identity();
    /// Trailing normalized training values used to seed recursive forecasts.
    std::vector<double> train_tail;
    std::optional<DifferenceState> diff_state;
    Date train_start{};
    std::size_t train_length = 0;
    /// Free-form label of the modelled column, e.g. "deaths". May be empty.
    std::string target;
    std::vector<double> loss_history;
    std::vector<std::string> warnings;

    ForecasterKind kind() const { return spec.kind(); }
    Date train_end() const { return add_days(train_start, static_cast<long long>(train_length) - 1); }
};

/// In-sample one-step predictions for training indices
/// [first_index, first_index + values.size()).
struct InSampleFit {
    std::size_t first_index = 0;
    std::vector<double> values;
};

/// Fits the scaler on `train` (raw), then the model on the scaled series.
FittedModel fit_model(const ForecasterSpec& spec, const Series& train);

/// Fits on a series that is already on the model scale; the identity scaler is attached.
FittedModel fit_normalized(const ForecasterSpec& spec, const Series& normalized_train);

/// h-step point forecast on the model's normalized scale.
std::vector<double> forecast(const FittedModel& m, int h);

/// h-step point forecast mapped back through the scaler.
std::vector<double> forecast_raw(const FittedModel& m, int h);

/// One-step in-sample predictions on the normalized scale. `normalized_train`
/// must be the series the model was fitted on.
InSampleFit fitted_values(const FittedModel& m, const Series& normalized_train);

/// Schema version written by save_model and the only one load_model accepts.
inline constexpr int model_schema_version = 1;

void save_model(const FittedModel& m, const std::string& path);
FittedModel load_model(const std::string& path);
std::string serialize_model(const FittedModel& m);
FittedModel deserialize_model(const std::string& text);

} // namespace epiforecast
