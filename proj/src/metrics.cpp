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
#include "epiforecast/metrics.hpp"

#include "epiforecast/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace epiforecast::metrics {

namespace {

void check_pair(std::span<const double> actual, std::span<const double> predicted)
{
    if (actual.empty() || actual.size() != predicted.size()) {
        throw ContractError(fmt::format("score needs equal non-zero lengths, got {} and {}", actual.size(),
                                        predicted.size()));
    }
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (!std::isfinite(actual[i]) || !std::isfinite(predicted[i])) {
            throw ContractError(fmt::format("non-finite value at position {}", i));
        }
    }
}

} // namespace

double mse(std::span<const double> actual, std::span<const double> predicted)
{
    check_pair(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        sum += e * e;
    }
    return sum / static_cast<double>(actual.size());
}

double rmse(std::span<const double> actual, std::span<const double> predicted)
{
    return std::sqrt(mse(actual, predicted));
}

double mape(std::span<const double> actual, std::span<const double> predicted)
{
    check_pair(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) {
            throw UndefinedMetricError(fmt::format("MAPE undefined: actual value at position {} is zero", i));
        }
        sum += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
    }
    return 100.0 * sum / static_cast<double>(actual.size());
}

double mase(std::span<const double> actual, std::span<const double> predicted, std::span<const double> train)
{
    check_pair(actual, predicted);
    if (train.size() < 2) {
        throw ContractError("MASE needs at least two training values");
    }
    double naive = 0.0;
    for (std::size_t t = 1; t < train.size(); ++t) {
        naive += std::abs(train[t] - train[t - 1]);
    }
    naive /= static_cast<double>(train.size() - 1);
    if (!(naive > 0.0)) {
        throw UndefinedMetricError("MASE undefined: training series is constant");
    }
    double mae = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        mae += std::abs(actual[i] - predicted[i]);
    }
    mae /= static_cast<double>(actual.size());
    return mae / naive;
}

double fit_score(std::span<const double> actual, std::span<const double> predicted)
{
    check_pair(actual, predicted);
    double mean = 0.0;
    for (double y : actual) {
        mean += y;
    }
    mean /= static_cast<double>(actual.size());
    double sse = 0.0;
    double sst = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        const double c = actual[i] - mean;
        sse += e * e;
        sst += c * c;
    }
    if (!(sst > 0.0)) {
        throw UndefinedMetricError("fit score undefined: actual values are constant");
    }
    return 1.0 - sse / sst;
}

} // namespace epiforecast::metrics
