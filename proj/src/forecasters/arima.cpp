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
#include "epiforecast/forecasters/arima.hpp"

#include "epiforecast/error.hpp"
#include "epiforecast/forecasters/autoreg.hpp"
#include "epiforecast/linalg.hpp"
#include "epiforecast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

namespace epiforecast {

namespace {

constexpr int max_iterations = 200;
constexpr double relative_tolerance = 1e-10;

Eigen::VectorXd pack(const ArmaCoefficients& c)
{
    Eigen::VectorXd beta(1 + c.ar.size() + c.ma.size());
    beta(0) = c.intercept;
    Eigen::Index k = 1;
    for (double a : c.ar) {
        beta(k++) = a;
    }
    for (double m : c.ma) {
        beta(k++) = m;
    }
    return beta;
}

ArmaCoefficients unpack(const Eigen::VectorXd& beta, int p, int q)
{
    ArmaCoefficients c;
    c.intercept = beta(0);
    c.ar.assign(beta.data() + 1, beta.data() + 1 + p);
    c.ma.assign(beta.data() + 1 + p, beta.data() + 1 + p + q);
    return c;
}

/// Residuals for t = p..n-1 and their exact Jacobian w.r.t. (c, ar, ma).
void residuals_and_jacobian(const ArmaCoefficients& coef, std::span<const double> z, Eigen::VectorXd& r,
                            Eigen::MatrixXd& jac)
{
    const auto p = static_cast<Eigen::Index>(coef.ar.size());
    const auto q = static_cast<Eigen::Index>(coef.ma.size());
    const auto n = static_cast<Eigen::Index>(z.size());
    const auto rows = n - p;
    const auto k = 1 + p + q;
    r.resize(rows);
    jac.setZero(rows, k);
    for (Eigen::Index row = 0; row < rows; ++row) {
        const auto t = row + p;
        double pred = coef.intercept;
        for (Eigen::Index i = 1; i <= p; ++i) {
            pred += coef.ar[static_cast<std::size_t>(i - 1)] * z[static_cast<std::size_t>(t - i)];
        }
        for (Eigen::Index j = 1; j <= q; ++j) {
            if (row - j >= 0) {
                pred += coef.ma[static_cast<std::size_t>(j - 1)] * r(row - j);
            }
        }
        r(row) = z[static_cast<std::size_t>(t)] - pred;

        jac(row, 0) = -1.0;
        for (Eigen::Index i = 1; i <= p; ++i) {
            jac(row, i) = -z[static_cast<std::size_t>(t - i)];
        }
        for (Eigen::Index j = 1; j <= q; ++j) {
            if (row - j >= 0) {
                jac(row, p + j) = -r(row - j);
            }
        }
        for (Eigen::Index j = 1; j <= q; ++j) {
            if (row - j >= 0) {
                jac.row(row) -= coef.ma[static_cast<std::size_t>(j - 1)] * jac.row(row - j);
            }
        }
    }
}

ArmaCoefficients ar_only_start(std::span<const double> z, int p, int q)
{
    ArmaCoefficients c;
    c.ma.assign(static_cast<std::size_t>(q), 0.0);
    if (p == 0) {
        double mean = 0.0;
        for (double v : z) {
            mean += v;
        }
        c.intercept = mean / static_cast<double>(z.size());
        return c;
    }
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    ar_design(z, p, x, y);
    const Eigen::VectorXd beta = linalg::least_squares(x, y);
    c.intercept = beta(0);
    c.ar.assign(beta.data() + 1, beta.data() + beta.size());
    return c;
}

ArmaCoefficients zero_start(int p, int q)
{
    ArmaCoefficients c;
    c.ar.assign(static_cast<std::size_t>(p), 0.0);
    c.ma.assign(static_cast<std::size_t>(q), 0.0);
    return c;
}

} // namespace

std::vector<double> arma_css_residuals(const ArmaCoefficients& coef, std::span<const double> z)
{
    const auto p = coef.ar.size();
    const auto q = coef.ma.size();
    std::vector<double> e(z.size(), 0.0);
    for (std::size_t t = p; t < z.size(); ++t) {
        double pred = coef.intercept;
        for (std::size_t i = 1; i <= p; ++i) {
            pred += coef.ar[i - 1] * z[t - i];
        }
        for (std::size_t j = 1; j <= q && j <= t; ++j) {
            pred += coef.ma[j - 1] * e[t - j];
        }
        e[t] = z[t] - pred;
    }
    return e;
}

double arima_css_objective(const ArmaCoefficients& coef, std::span<const double> z)
{
    const auto e = arma_css_residuals(coef, z);
    double sum = 0.0;
    for (std::size_t t = coef.ar.size(); t < e.size(); ++t) {
        sum += e[t] * e[t];
    }
    return sum;
}

ArmaCoefficients hannan_rissanen(std::span<const double> z, int p, int q)
{
    const auto m = static_cast<int>(z.size());
    if (q == 0) {
        return ar_only_start(z, p, 0);
    }
    const int long_order =
        std::min(std::max(p + q + 1, static_cast<int>(std::lround(10.0 * std::log10(static_cast<double>(m))))),
                 (m - 1) / 3);
    try {
        if (long_order < 1) {
            throw SingularFitError("series too short for a long autoregression");
        }
        Eigen::MatrixXd x;
        Eigen::VectorXd y;
        ar_design(z, long_order, x, y);
        const Eigen::VectorXd long_beta = linalg::least_squares(x, y);
        std::vector<double> innovations(z.size(), 0.0);
        const Eigen::VectorXd fitted = x * long_beta;
        for (Eigen::Index r = 0; r < y.size(); ++r) {
            innovations[static_cast<std::size_t>(r + long_order)] = y(r) - fitted(r);
        }

        const int first = long_order + q;
        const int rows = m - first;
        Eigen::MatrixXd x2(std::max(rows, 0), 1 + p + q);
        Eigen::VectorXd y2(std::max(rows, 0));
        for (int r = 0; r < rows; ++r) {
            const auto t = static_cast<std::size_t>(first + r);
            x2(r, 0) = 1.0;
            for (int i = 1; i <= p; ++i) {
                x2(r, i) = z[t - static_cast<std::size_t>(i)];
            }
            for (int j = 1; j <= q; ++j) {
                x2(r, p + j) = innovations[t - static_cast<std::size_t>(j)];
            }
            y2(r) = z[t];
        }
        const Eigen::VectorXd beta = linalg::least_squares(x2, y2);
        auto start = unpack(beta, p, q);
        if (std::isfinite(arima_css_objective(start, z))) {
            return start;
        }
    } catch (const SingularFitError&) {
        // fall through to the AR-only start
    }
    try {
        return ar_only_start(z, p, q);
    } catch (const SingularFitError&) {
        return zero_start(p, q);
    }
}

CssFit minimize_css(std::span<const double> z, ArmaCoefficients start)
{
    const int p = static_cast<int>(start.ar.size());
    const int q = static_cast<int>(start.ma.size());
    Eigen::VectorXd beta = pack(start);
    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    residuals_and_jacobian(start, z, r, jac);
    double obj = r.squaredNorm();
    if (!std::isfinite(obj)) {
        throw DivergenceError("CSS objective is not finite at the start values");
    }
    CssFit fit;
    fit.initial_objective = obj;

    double damping = 1e-3;
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        const Eigen::MatrixXd a = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        bool accepted = false;
        Eigen::VectorXd trial_beta;
        Eigen::VectorXd trial_r;
        Eigen::MatrixXd trial_jac;
        double trial_obj = obj;
        while (damping < 1e16) {
            Eigen::MatrixXd lhs = a;
            for (Eigen::Index i = 0; i < lhs.rows(); ++i) {
                lhs(i, i) += damping * std::max(a(i, i), 1e-12);
            }
            const Eigen::VectorXd step = lhs.ldlt().solve(-g);
            trial_beta = beta + step;
            if (!trial_beta.allFinite()) {
                damping *= 10.0;
                continue;
            }
            residuals_and_jacobian(unpack(trial_beta, p, q), z, trial_r, trial_jac);
            trial_obj = trial_r.squaredNorm();
            if (std::isfinite(trial_obj) && trial_obj <= obj) {
                accepted = true;
                break;
            }
            damping *= 10.0;
        }
        if (!accepted) {
            break;
        }
        const double decrease = obj - trial_obj;
        beta = trial_beta;
        r = trial_r;
        jac = trial_jac;
        obj = trial_obj;
        damping = std::max(damping / 10.0, 1e-12);
        if (decrease <= relative_tolerance * std::max(obj + decrease, 1e-300)) {
            ++iter;
            break;
        }
    }
    if (!std::isfinite(obj)) {
        throw DivergenceError("CSS objective became non-finite");
    }
    fit.coefficients = unpack(beta, p, q);
    fit.objective = obj;
    fit.iterations = iter;
    return fit;
}

FittedModel fit_arima(const Series& train, ArimaOrder order)
{
    ForecasterSpec spec{order, 0};
    validate(spec);
    if (train.size() <= static_cast<std::size_t>(order.d)) {
        throw ContractError(fmt::format("series of length {} cannot be differenced {} times", train.size(), order.d));
    }
    auto [diffed, state] = difference(train, order.d);
    const auto m = diffed.size();
    if (m <= static_cast<std::size_t>(order.p + order.q + 1)) {
        throw ContractError(fmt::format("ARIMA({},{},{}) needs more than {} differenced observations, got {}", order.p,
                                        order.d, order.q, order.p + order.q + 1, m));
    }
    const auto z = diffed.view();
    // A Hannan-Rissanen start with a non-invertible MA part can make the
    // residual recursion explode; start from the AR-only fit when it is better.
    auto start = hannan_rissanen(z, order.p, order.q);
    if (order.q > 0) {
        try {
            const auto fallback = ar_only_start(z, order.p, order.q);
            const double hr = arima_css_objective(start, z);
            if (!std::isfinite(hr) || arima_css_objective(fallback, z) < hr) {
                start = fallback;
            }
        } catch (const SingularFitError&) {
        }
    }
    const auto css = minimize_css(z, start);

    ArimaParameters params;
    params.intercept = css.coefficients.intercept;
    params.ar = css.coefficients.ar;
    params.ma = css.coefficients.ma;
    params.objective = css.objective;
    params.initial_objective = css.initial_objective;
    params.iterations = css.iterations;
    const auto residuals = arma_css_residuals(css.coefficients, z);
    params.residual_tail.assign(residuals.end() - order.q, residuals.end());

    FittedModel model;
    model.spec = spec;
    model.train_start = train.start_date();
    model.train_length = train.size();
    const auto keep = std::min<std::size_t>(train.size(), static_cast<std::size_t>(order.p + order.d));
    model.train_tail.assign(train.values().end() - static_cast<std::ptrdiff_t>(keep), train.values().end());
    model.diff_state = state;

    for (double modulus : linalg::lag_polynomial_root_moduli(params.ar)) {
        if (modulus <= 1.0) {
            model.warnings.push_back(fmt::format("AR polynomial has a root of modulus {:.4f} (non-stationary)", modulus));
            break;
        }
    }
    std::vector<double> neg_ma(params.ma.size());
    std::transform(params.ma.begin(), params.ma.end(), neg_ma.begin(), [](double v) { return -v; });
    for (double modulus : linalg::lag_polynomial_root_moduli(neg_ma)) {
        if (modulus <= 1.0) {
            model.warnings.push_back(fmt::format("MA polynomial has a root of modulus {:.4f} (non-invertible)", modulus));
            break;
        }
    }
    model.parameters = std::move(params);
    return model;
}

std::vector<double> forecast_arima(const FittedModel& m, int h)
{
    if (h < 1) {
        throw ContractError("forecast horizon must be >= 1");
    }
    const auto& params = std::get<ArimaParameters>(m.parameters);
    const auto& order = std::get<ArimaOrder>(m.spec.hyperparameters);
    const auto p = params.ar.size();
    const auto q = params.ma.size();

    std::vector<double> z = difference_values(m.train_tail, order.d);
    std::vector<double> e = params.residual_tail;
    std::vector<double> zhat;
    zhat.reserve(static_cast<std::size_t>(h));
    for (int k = 0; k < h; ++k) {
        double v = params.intercept;
        for (std::size_t i = 1; i <= p; ++i) {
            v += params.ar[i - 1] * z[z.size() - i];
        }
        for (std::size_t j = 1; j <= q; ++j) {
            v += params.ma[j - 1] * e[e.size() - j];
        }
        zhat.push_back(v);
        z.push_back(v);
        e.push_back(0.0);
    }
    return integrate_forecast(m.train_tail, order.d, zhat);
}

ArimaSelection grid_search_arima(const Series& train, const Series& validation, int p_max, int q_max)
{
    if (p_max < 0 || q_max < 0) {
        throw ContractError("grid bounds must be non-negative");
    }
    ArimaSelection sel;
    std::optional<std::size_t> best;
    auto key = [](const ArimaCandidate& c) {
        return std::make_tuple(c.mse, c.order.p + c.order.d + c.order.q, c.order.d, c.order.p);
    };
    std::optional<FittedModel> best_model;
    const int h = static_cast<int>(validation.size());
    for (int p = 0; p <= p_max; ++p) {
        for (int d = 0; d <= 1; ++d) {
            for (int q = 0; q <= q_max; ++q) {
                if (d == 0 && p + q == 0) {
                    continue;
                }
                ArimaCandidate cand;
                cand.order = {p, d, q};
                try {
                    auto model = fit_arima(train, cand.order);
                    const auto fc = forecast_arima(model, h);
                    cand.mse = metrics::mse(validation.view(), fc);
                    cand.ok = std::isfinite(cand.mse);
                    if (!cand.ok) {
                        cand.error = "non-finite validation MSE";
                    } else if (!best || key(cand) < key(sel.candidates[*best])) {
                        best = sel.candidates.size();
                        best_model = std::move(model);
                    }
                } catch (const Error& err) {
                    cand.error = err.what();
                }
                sel.candidates.push_back(std::move(cand));
            }
        }
    }
    if (!best) {
        throw ExhaustedGridError("every ARIMA candidate failed to fit");
    }
    sel.order = sel.candidates[*best].order;
    sel.mse = sel.candidates[*best].mse;
    sel.model = std::move(*best_model);
    return sel;
}

} // namespace epiforecast
