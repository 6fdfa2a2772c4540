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

#include <span>

namespace epiforecast::metrics {

// All scores take (actual, predicted) of equal, non-zero length with finite
// entries; anything else is a ContractError.

/// Mean of squared errors.
double mse(std::span<const double> actual, std::span<const double> predicted);
double rmse(std::span<const double> actual, std::span<const double> predicted);

/// Mean absolute percentage error, in percent. A zero actual value makes the
/// score undefined (UndefinedMetricError); such points are never skipped.
double mape(std::span<const double> actual, std::span<const double> predicted);

/// Mean absolute error scaled by the in-sample naive one-step error of `train`.
double mase(std::span<const double> actual, std::span<const double> predicted, std::span<const double> train);

/// Coefficient of determination 1 - SSE/SST. Reported as `r2`.
double fit_score(std::span<const double> actual, std::span<const double> predicted);

} // namespace epiforecast::metrics
