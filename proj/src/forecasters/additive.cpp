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
#include "epiforecast/forecasters/additive.hpp"

#include "epiforecast/error.hpp"
#include "epiforecast/linalg.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

namespace epiforecast {

namespace {

std::vector<double> evaluate(const FittedModel& m, double t0, int count)
{
    const auto& params = std::get<AdditiveParameters>(m.parameters);
    const auto& config = std::get<AdditiveConfig>(m.spec.hyperparameters);
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        t[static_cast<std::size_t>(k)] = t0 + k;
    }
    const Eigen::VectorXd y = build_additive_design(t, config, params.changepoints) * params.coefficients;
    return {y.data(), y.data() + y.size()};
}

} // namespace

std::vector<double> additive_changepoints(std::size_t n, int n_changepoints)
{
    std::vector<double> cps;
    for (int j = 1; j <= n_changepoints; ++j) {
        cps.push_back(static_cast<double>(j) * static_cast<double>(n) / (n_changepoints + 1));
    }
    return cps;
}

Eigen::MatrixXd build_additive_design(std::span<const double> t, const AdditiveConfig& config,
                                      std::span<const double> changepoints)
{
    const auto rows = static_cast<Eigen::Index>(t.size());
    const auto n_cp = static_cast<Eigen::Index>(changepoints.size());
    const Eigen::Index cols = 2 + n_cp + 2 * config.fourier_order;
    Eigen::MatrixXd x(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double tr = t[static_cast<std::size_t>(r)];
        x(r, 0) = 1.0;
        x(r, 1) = tr;
        for (Eigen::Index j = 0; j < n_cp; ++j) {
            x(r, 2 + j) = std::max(0.0, tr - changepoints[static_cast<std::size_t>(j)]);
        }
        for (int k = 1; k <= config.fourier_order; ++k) {
            const double arg = 2.0 * std::numbers::pi * k * tr / config.period_days;
            x(r, 2 + n_cp + 2 * (k - 1)) = std::cos(arg);
            x(r, 2 + n_cp + 2 * (k - 1) + 1) = std::sin(arg);
        }
    }
    return x;
}

FittedModel fit_additive(const Series& train, const AdditiveConfig& config)
{
    ForecasterSpec spec{config, 0};
    validate(spec);
    const auto n = train.size();
    if (n <= static_cast<std::size_t>(config.n_changepoints) + 1) {
        throw ContractError(fmt::format("{} changepoints need more than {} observations, got {}",
                                        config.n_changepoints, config.n_changepoints + 1, n));
    }
    std::vector<double> t(n);
    std::iota(t.begin(), t.end(), 0.0);
    AdditiveParameters params;
    params.changepoints = additive_changepoints(n, config.n_changepoints);
    const Eigen::MatrixXd x = build_additive_design(t, config, params.changepoints);
    const Eigen::Map<const Eigen::VectorXd> y(train.values().data(), static_cast<Eigen::Index>(n));
    std::vector<int> hinges(static_cast<std::size_t>(config.n_changepoints));
    std::iota(hinges.begin(), hinges.end(), 2);
    params.coefficients = linalg::ridge_least_squares(x, y, config.changepoint_penalty, hinges);

    FittedModel m;
    m.spec = spec;
    m.parameters = std::move(params);
    m.train_start = train.start_date();
    m.train_length = n;
    return m;
}

std::vector<double> forecast_additive(const FittedModel& m, int h)
{
    if (h < 1) {
        throw ContractError("forecast horizon must be >= 1");
    }
    return evaluate(m, static_cast<double>(m.train_length), h);
}

std::vector<double> additive_in_sample(const FittedModel& m)
{
    return evaluate(m, 0.0, static_cast<int>(m.train_length));
}

} // namespace epiforecast
