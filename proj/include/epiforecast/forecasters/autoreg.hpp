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

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace epiforecast {

/// Lagged design [1, y_{t-1}, ..., y_{t-p}] for t = p .. n-1, with targets y_t.
void ar_design(std::span<const double> y, int p, Eigen::MatrixXd& x, Eigen::VectorXd& target);

/// AR(p) with intercept by ordinary least squares on the lagged design.
FittedModel fit_autoreg(const Series& train, ArOrder order);

/// Recursive forecast; earlier forecasts feed later steps.
std::vector<double> forecast_autoreg(const FittedModel& m, int h);

/// Same recursion for bare parameters and an explicit history (oldest first).
std::vector<double> ar_recursion(const ArParameters& params, std::span<const double> history, int h);

} // namespace epiforecast
