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
#include <string>
#include <vector>

namespace epiforecast {

/// ARMA coefficients on the differenced scale.
struct ArmaCoefficients {
    double intercept = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
};

/**
 * Conditional-sum-of-squares residuals of an ARMA(p, q) with intercept.
 *
 * For t = p .. n-1:
 *   e_t = z_t - c - sum_i ar_i z_{t-i} - sum_j ma_j e_{t-j},
 * with e_s = 0 for s < p. The first p observations only condition the
 * recursion, so with q = 0 the sum matches the AR least-squares objective.
 */
std::vector<double> arma_css_residuals(const ArmaCoefficients& coef, std::span<const double> z);

/// Sum of squared CSS residuals.
double arima_css_objective(const ArmaCoefficients& coef, std::span<const double> z);

/// Hannan-Rissanen start values: long AR fit, then regression on lagged
/// values and lagged long-AR residuals. Falls back to an AR-only fit (and
/// finally to the sample mean) when a stage is rank deficient.
ArmaCoefficients hannan_rissanen(std::span<const double> z, int p, int q);

struct CssFit {
    ArmaCoefficients coefficients;
    double initial_objective = 0.0;
    double objective = 0.0;
    int iterations = 0;
};

/// Levenberg-Marquardt on the CSS objective from `start`. Stops when the
/// relative decrease drops below 1e-10 or after 200 iterations.
CssFit minimize_css(std::span<const double> z, ArmaCoefficients start);

FittedModel fit_arima(const Series& train, ArimaOrder order);
std::vector<double> forecast_arima(const FittedModel& m, int h);

struct ArimaCandidate {
    ArimaOrder order;
    bool ok = false;
    double mse = 0.0;
    std::string error;
};

struct ArimaSelection {
    ArimaOrder order;
    FittedModel model;
    double mse = 0.0;
    /// Every grid point in enumeration order, including skipped ones.
    std::vector<ArimaCandidate> candidates;
};

/**
 * Fits every (p, d, q) with p <= p_max, d in {0, 1}, q <= q_max (minus the
 * empty ARIMA(0,0,0)) on `train` and scores the |validation|-step forecast by
 * MSE. Ties go to smaller p+d+q, then smaller d, then smaller p. Failed fits
 * are recorded and skipped; if all fail an ExhaustedGridError is thrown.
 */
ArimaSelection grid_search_arima(const Series& train, const Series& validation, int p_max, int q_max);

} // namespace epiforecast
