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
#include "epiforecast/forecasters/autoreg.hpp"

#include "epiforecast/error.hpp"
#include "epiforecast/linalg.hpp"

#include <fmt/format.h>

namespace epiforecast {

void ar_design(std::span<const double> y, int p, Eigen::MatrixXd& x, Eigen::VectorXd& target)
{
    const auto n = static_cast<Eigen::Index>(y.size());
    const auto rows = n - p;
    x.resize(rows, p + 1);
    target.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto t = static_cast<std::size_t>(r + p);
        x(r, 0) = 1.0;
        for (int i = 1; i <= p; ++i) {
            x(r, i) = y[t - static_cast<std::size_t>(i)];
        }
        target(r) = y[t];
    }
}

FittedModel fit_autoreg(const Series& train, ArOrder order)
{
    ForecasterSpec spec{order, 0};
    validate(spec);
    const auto n = train.size();
    if (n <= static_cast<std::size_t>(order.p) + 1) {
        throw ContractError(fmt::format("AR({}) needs more than {} observations, got {}", order.p, order.p + 1, n));
    }
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    ar_design(train.view(), order.p, x, y);
    const Eigen::VectorXd beta = linalg::least_squares(x, y);

    ArParameters params;
    params.intercept = beta(0);
    params.coefficients.assign(beta.data() + 1, beta.data() + beta.size());

    FittedModel m;
    m.spec = spec;
    m.parameters = params;
    m.train_tail.assign(train.values().end() - order.p, train.values().end());
    m.train_start = train.start_date();
    m.train_length = n;
    return m;
}

std::vector<double> ar_recursion(const ArParameters& params, std::span<const double> history, int h)
{
    const auto p = params.coefficients.size();
    if (history.size() < p) {
        throw ContractError("AR recursion needs at least p past values");
    }
    std::vector<double> buf(history.end() - static_cast<std::ptrdiff_t>(p), history.end());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(h, 0)));
    for (int k = 0; k < h; ++k) {
        double yhat = params.intercept;
        for (std::size_t i = 1; i <= p; ++i) {
            yhat += params.coefficients[i - 1] * buf[buf.size() - i];
        }
        out.push_back(yhat);
        buf.push_back(yhat);
    }
    return out;
}

std::vector<double> forecast_autoreg(const FittedModel& m, int h)
{
    if (h < 1) {
        throw ContractError("forecast horizon must be >= 1");
    }
    return ar_recursion(std::get<ArParameters>(m.parameters), m.train_tail, h);
}

} // namespace epiforecast
