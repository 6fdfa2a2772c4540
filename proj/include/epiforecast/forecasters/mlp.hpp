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

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace epiforecast {

// Feed-forward network: tanh hidden layer, linear output. With zero hidden
// units the network is a linear map of the inputs (an AR model fitted by
// gradient descent).

/// Window features; with `seasonal`, a 7-way day-of-week one-hot of the
/// predicted day is appended. Row i predicts values[i + window].
void mlp_features(std::span<const double> values, Date start, int window, bool seasonal, Eigen::MatrixXd& x,
                  Eigen::VectorXd& y);

MlpParameters init_mlp_parameters(int inputs, int hidden, Rng& rng);

Eigen::VectorXd mlp_predict(const MlpParameters& params, const Eigen::MatrixXd& x);

/// Mean squared error over the rows of x and its gradient.
std::pair<double, MlpParameters> mlp_loss_gradient(const MlpParameters& params, const Eigen::MatrixXd& x,
                                                   const Eigen::VectorXd& y);

std::size_t parameter_count(const MlpParameters& params);
double& parameter_at(MlpParameters& params, std::size_t index);

/// Full-batch gradient descent with a fixed learning rate.
FittedModel fit_mlp(const Series& train, const MlpConfig& config, std::uint64_t seed);
std::vector<double> forecast_mlp(const FittedModel& m, int h);

} // namespace epiforecast
