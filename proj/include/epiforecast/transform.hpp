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

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace epiforecast {

/// Affine map x -> (x - min) / (max - min).
struct MinMaxScaler {
    double min = 0.0;
    double max = 1.0;

    double scale(double x) const { return (x - min) / (max - min); }
    double inverse(double x) const { return x * (max - min) + min; }

    std::vector<double> scale(std::span<const double> xs) const;
    std::vector<double> inverse(std::span<const double> xs) const;

    static MinMaxScaler identity() { return {0.0, 1.0}; }
};

/// Throws DegenerateScaleError on a constant series.
MinMaxScaler fit_scaler(const Series& s);
Series scale(const MinMaxScaler& scaler, const Series& s);
Series inverse_scale(const MinMaxScaler& scaler, const Series& s);

/// What d rounds of first differencing consumed: heads[k] is the first value
/// of the series before pass k.
struct DifferenceState {
    int order = 0;
    std::vector<double> heads;
    SeriesKind source_kind = SeriesKind::incident;
};

std::pair<Series, DifferenceState> difference(const Series& s, int d);
Series integrate(const Series& diffed, const DifferenceState& state);

/// d-fold differencing of a plain vector (no bookkeeping).
std::vector<double> difference_values(std::span<const double> values, int d);

/**
 * Forecast-mode integration: given the last observed levels (at least d of
 * them) and forecasts of the d-th differences, returns forecast levels.
 */
std::vector<double> integrate_forecast(std::span<const double> last_levels, int d, std::span<const double> diffs);

/// Supervised framing: row i = values[i .. i+w-1], target i = values[i+w].
struct WindowSet {
    Eigen::MatrixXd inputs;
    Eigen::VectorXd targets;
    int window = 0;
};

WindowSet make_windows(std::span<const double> values, int w);
inline WindowSet make_windows(const Series& s, int w) { return make_windows(s.view(), w); }

} // namespace epiforecast
