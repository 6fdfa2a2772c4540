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
#include "epiforecast/forecasters/model.hpp"

#include "epiforecast/error.hpp"
#include "epiforecast/forecasters/additive.hpp"
#include "epiforecast/forecasters/arima.hpp"
#include "epiforecast/forecasters/autoreg.hpp"
#include "epiforecast/forecasters/lstm.hpp"
#include "epiforecast/forecasters/mlp.hpp"

namespace epiforecast {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

FittedModel fit_normalized(const ForecasterSpec& spec, const Series& normalized_train)
{
    validate(spec);
    FittedModel m = std::visit(
        overloaded{
            [&](const ArOrder& o) { return fit_autoreg(normalized_train, o); },
            [&](const ArimaOrder& o) { return fit_arima(normalized_train, o); },
            [&](const LstmConfig& c) { return train_lstm(normalized_train, c, spec.seed); },
            [&](const MlpConfig& c) { return fit_mlp(normalized_train, c, spec.seed); },
            [&](const AdditiveConfig& c) { return fit_additive(normalized_train, c); },
        },
        spec.hyperparameters);
    m.spec.seed = spec.seed;
    return m;
}

FittedModel fit_model(const ForecasterSpec& spec, const Series& train)
{
    const MinMaxScaler scaler = fit_scaler(train);
    FittedModel m = fit_normalized(spec, scale(scaler, train));
    m.scaler = scaler;
    return m;
}

std::vector<double> forecast(const FittedModel& m, int h)
{
    switch (m.kind()) {
    case ForecasterKind::autoreg:
        return forecast_autoreg(m, h);
    case ForecasterKind::arima:
        return forecast_arima(m, h);
    case ForecasterKind::lstm:
        return forecast_lstm(m, h);
    case ForecasterKind::mlp:
        return forecast_mlp(m, h);
    case ForecasterKind::additive:
        return forecast_additive(m, h);
    }
    throw ContractError("unknown forecaster kind");
}

std::vector<double> forecast_raw(const FittedModel& m, int h)
{
    return m.scaler.inverse(forecast(m, h));
}

InSampleFit fitted_values(const FittedModel& m, const Series& normalized_train)
{
    if (normalized_train.size() != m.train_length) {
        throw ContractError("fitted_values needs the series the model was fitted on");
    }
    const auto y = normalized_train.view();
    InSampleFit fit;
    switch (m.kind()) {
    case ForecasterKind::autoreg: {
        const auto& params = std::get<ArParameters>(m.parameters);
        const int p = static_cast<int>(params.coefficients.size());
        Eigen::MatrixXd x;
        Eigen::VectorXd target;
        ar_design(y, p, x, target);
        Eigen::VectorXd beta(p + 1);
        beta(0) = params.intercept;
        for (int i = 0; i < p; ++i) {
            beta(i + 1) = params.coefficients[static_cast<std::size_t>(i)];
        }
        const Eigen::VectorXd pred = x * beta;
        fit.first_index = static_cast<std::size_t>(p);
        fit.values.assign(pred.data(), pred.data() + pred.size());
        break;
    }
    case ForecasterKind::arima: {
        const auto& params = std::get<ArimaParameters>(m.parameters);
        const int d = m.diff_state ? m.diff_state->order : 0;
        const auto z = difference_values(y, d);
        const ArmaCoefficients coef{params.intercept, params.ar, params.ma};
        const auto resid = arma_css_residuals(coef, z);
        const auto p = params.ar.size();
        // The one-step level error equals the one-step error of the differences.
        fit.first_index = p + static_cast<std::size_t>(d);
        for (std::size_t t = p; t < z.size(); ++t) {
            fit.values.push_back(y[t + static_cast<std::size_t>(d)] - resid[t]);
        }
        break;
    }
    case ForecasterKind::lstm: {
        const auto& params = std::get<LstmParameters>(m.parameters);
        const auto& config = std::get<LstmConfig>(m.spec.hyperparameters);
        const WindowSet windows = make_windows(y, config.window);
        const auto cache = lstm_forward_batch(windows.inputs, params);
        fit.first_index = static_cast<std::size_t>(config.window);
        fit.values.assign(cache.predictions.data(), cache.predictions.data() + cache.predictions.size());
        break;
    }
    case ForecasterKind::mlp: {
        const auto& params = std::get<MlpParameters>(m.parameters);
        const auto& config = std::get<MlpConfig>(m.spec.hyperparameters);
        Eigen::MatrixXd x;
        Eigen::VectorXd target;
        mlp_features(y, normalized_train.start_date(), config.window, config.seasonal, x, target);
        const Eigen::VectorXd pred = mlp_predict(params, x);
        fit.first_index = static_cast<std::size_t>(config.window);
        fit.values.assign(pred.data(), pred.data() + pred.size());
        break;
    }
    case ForecasterKind::additive:
        fit.first_index = 0;
        fit.values = additive_in_sample(m);
        break;
    }
    return fit;
}

} // namespace epiforecast
