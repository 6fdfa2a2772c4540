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

/// Changepoint j (1-based) sits at j * n / (n_changepoints + 1) on the
/// training time axis 0 .. n-1.
std::vector<double> additive_changepoints(std::size_t n, int n_changepoints);

/**
 * Design matrix with columns
 *   [1, t, max(0, t - c_1) .. max(0, t - c_k), cos(2 pi t / P), sin(2 pi t / P), ..., cos(2 pi K t / P), sin(2 pi K t / P)].
 */
Eigen::MatrixXd build_additive_design(std::span<const double> t, const AdditiveConfig& config,
                                      std::span<const double> changepoints);

/// Piecewise-linear trend plus Fourier seasonality by ridge least squares;
/// only the hinge coefficients are penalized.
FittedModel fit_additive(const Series& train, const AdditiveConfig& config);
std::vector<double> forecast_additive(const FittedModel& m, int h);

/// In-sample values X * beta on the training time axis.
std::vector<double> additive_in_sample(const FittedModel& m);

} // namespace epiforecast
