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
#include "epiforecast/error.hpp"
#include "epiforecast/forecasters/mlp.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace epiforecast;
using testing::normalized_series;

namespace {

double loss_only(const MlpParameters& p, const Eigen::MatrixXd& x, const Eigen::VectorXd& y)
{
    return (mlp_predict(p, x) - y).squaredNorm() / static_cast<double>(x.rows());
}

double gradient_check(int inputs, int hidden, std::uint64_t seed)
{
    Rng rng(seed);
    auto p = init_mlp_parameters(inputs, hidden, rng);
    for (std::size_t i = 0; i < parameter_count(p); ++i) {
        parameter_at(p, i) += rng.uniform(-0.3, 0.3);
    }
    Eigen::MatrixXd x(12, inputs);
    Eigen::VectorXd y(12);
    for (Eigen::Index r = 0; r < 12; ++r) {
        for (Eigen::Index c = 0; c < inputs; ++c) {
            x(r, c) = rng.uniform();
        }
        y(r) = rng.uniform();
    }
    auto [loss, grad] = mlp_loss_gradient(p, x, y);
    CHECK(loss == doctest::Approx(loss_only(p, x, y)).epsilon(1e-14));
    const double eps = 1e-5;
    double worst = 0.0;
    for (int probe = 0; probe < 50; ++probe) {
        const auto idx = static_cast<std::size_t>(rng.below(parameter_count(p)));
        auto plus = p;
        auto minus = p;
        parameter_at(plus, idx) += eps;
        parameter_at(minus, idx) -= eps;
        const double fd = (loss_only(plus, x, y) - loss_only(minus, x, y)) / (2 * eps);
        const double an = parameter_at(grad, idx);
        worst = std::max(worst, std::abs(an - fd) / std::max(1.0, std::abs(an)));
    }
    return worst;
}

} // namespace

TEST_CASE("window features with a weekday one-hot")
{
    const std::vector<double> v{1, 2, 3, 4, 5};
    const Date monday = *parse_date("2021-03-08");
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    mlp_features(v, monday, 2, true, x, y);
    REQUIRE(x.rows() == 3);
    REQUIRE(x.cols() == 9);
    CHECK(x(0, 0) == 1);
    CHECK(x(0, 1) == 2);
    CHECK(y(0) == 3);
    // row 0 predicts index 2, a Wednesday
    CHECK(x(0, 2 + 2) == 1);
    CHECK(x.row(0).tail(7).sum() == 1);
    CHECK(x(2, 2 + 4) == 1);
    mlp_features(v, monday, 2, false, x, y);
    CHECK(x.cols() == 2);
}

TEST_CASE("MLP gradients match central finite differences")
{
    CHECK(gradient_check(7, 8, 1) < 1e-4);
    CHECK(gradient_check(14, 3, 2) < 1e-4);
    CHECK(gradient_check(5, 0, 3) < 1e-4);
}

TEST_CASE("initialisation ranges")
{
    Rng rng(5);
    const auto p = init_mlp_parameters(10, 6, rng);
    CHECK(p.hidden_weights.rows() == 6);
    CHECK(p.hidden_weights.cols() == 10);
    CHECK(p.hidden_weights.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 16));
    CHECK(p.output_weights.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 7));
    CHECK(p.hidden_bias.isZero(0.0));
    CHECK(p.output_bias == 0.0);
    CHECK(parameter_count(p) == 60 + 6 + 6 + 1);
    const auto linear = init_mlp_parameters(4, 0, rng);
    CHECK(linear.hidden_weights.size() == 0);
    CHECK(parameter_count(linear) == 5);
}

TEST_CASE("linear network learns a noiseless autoregression")
{
    std::vector<double> y{1.0};
    for (int i = 1; i < 40; ++i) {
        y.push_back(0.5 * y.back() + 0.25);
    }
    MlpConfig config;
    config.window = 1;
    config.hidden_units = 0;
    config.epochs = 5000;
    config.learning_rate = 0.5;
    const auto m = fit_mlp(normalized_series(y), config, 1);
    CHECK(m.loss_history.back() < 1e-6);
    const auto& p = std::get<MlpParameters>(m.parameters);
    CHECK(p.output_weights(0) == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("training is deterministic and decreases the loss")
{
    const auto z = testing::simulate_arma(0.3, {0.6}, {}, 0.05, 120, 21);
    MlpConfig config;
    config.epochs = 300;
    config.seasonal = true;
    const auto a = fit_mlp(normalized_series(z), config, 11);
    const auto b = fit_mlp(normalized_series(z), config, 11);
    CHECK(std::get<MlpParameters>(a.parameters).hidden_weights == std::get<MlpParameters>(b.parameters).hidden_weights);
    CHECK(forecast_mlp(a, 20) == forecast_mlp(b, 20));
    CHECK(a.loss_history.back() < a.loss_history.front());
    const auto c = fit_mlp(normalized_series(z), config, 12);
    CHECK(forecast_mlp(a, 5) != forecast_mlp(c, 5));
}

TEST_CASE("recursive forecast feeds predictions back with future weekdays")
{
    const auto z = testing::simulate_arma(0.3, {0.6}, {}, 0.05, 60, 4);
    MlpConfig config;
    config.window = 3;
    config.epochs = 50;
    config.seasonal = true;
    const auto s = normalized_series(z);
    const auto m = fit_mlp(s, config, 2);
    const auto& p = std::get<MlpParameters>(m.parameters);
    const auto f = forecast_mlp(m, 2);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(1, 10);
    x(0, 0) = z[57];
    x(0, 1) = z[58];
    x(0, 2) = z[59];
    x(0, 3 + weekday_index(add_days(s.end_date(), 1))) = 1.0;
    CHECK(f[0] == mlp_predict(p, x)(0));
    x.setZero();
    x(0, 0) = z[58];
    x(0, 1) = z[59];
    x(0, 2) = f[0];
    x(0, 3 + weekday_index(add_days(s.end_date(), 2))) = 1.0;
    CHECK(f[1] == mlp_predict(p, x)(0));
}

TEST_CASE("MLP errors")
{
    MlpConfig config;
    config.window = 5;
    CHECK_THROWS_AS(fit_mlp(normalized_series({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}), config, 1), ContractError);
    const auto z = testing::simulate_arma(0.3, {0.6}, {}, 0.05, 60, 4);
    config.learning_rate = 1e8;
    config.epochs = 100;
    CHECK_THROWS_WITH_AS(fit_mlp(normalized_series(z), config, 1), doctest::Contains("epoch"), DivergenceError);
}
