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
#include "epiforecast/forecasters/arima.hpp"
#include "epiforecast/forecasters/autoreg.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace epiforecast;
using testing::normalized_series;

TEST_CASE("CSS objective without MA terms is the AR sum of squares")
{
    const auto z = testing::simulate_arma(0.05, {0.4, 0.3}, {}, 0.1, 300, 31);
    const auto m = fit_autoreg(normalized_series(z), ArOrder{2});
    const auto& ar = std::get<ArParameters>(m.parameters);
    const ArmaCoefficients coef{ar.intercept, ar.coefficients, {}};
    CHECK(arima_css_objective(coef, z) == testing::css_oracle(ar.intercept, ar.coefficients, {}, z));

    Eigen::MatrixXd x;
    Eigen::VectorXd t;
    ar_design(z, 2, x, t);
    Eigen::VectorXd beta(3);
    beta << ar.intercept, ar.coefficients[0], ar.coefficients[1];
    CHECK(arima_css_objective(coef, z) == doctest::Approx((t - x * beta).squaredNorm()).epsilon(1e-12));
}

TEST_CASE("CSS objective vanishes at the generating parameters of a noiseless path")
{
    std::vector<double> z{0.9};
    for (int i = 0; i < 50; ++i) {
        z.push_back(0.1 + 0.8 * z.back());
    }
    CHECK(arima_css_objective(ArmaCoefficients{0.1, {0.8}, {}}, z) <= 1e-16);
}

TEST_CASE("CSS objective matches a straight-line evaluation")
{
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const auto z = testing::uniform_vector(rng, 6, -1.0, 1.0);
        const double c = rng.uniform(-0.5, 0.5);
        const double phi = rng.uniform(-0.9, 0.9);
        const double theta = rng.uniform(-0.9, 0.9);
        // e1 = z1 - c - phi z0; e_t = z_t - c - phi z_{t-1} - theta e_{t-1}
        double e = z[1] - c - phi * z[0];
        double sum = e * e;
        for (std::size_t t = 2; t < 6; ++t) {
            e = z[t] - c - phi * z[t - 1] - theta * e;
            sum += e * e;
        }
        const double got = arima_css_objective(ArmaCoefficients{c, {phi}, {theta}}, z);
        REQUIRE(std::abs(got - sum) <= 1e-12 * std::max(1.0, sum));
        REQUIRE(got == doctest::Approx(testing::css_oracle(c, {phi}, {theta}, z)).epsilon(1e-12));
    }
}

TEST_CASE("ARIMA(p,0,0) agrees with the AR fit")
{
    for (int p = 1; p <= 4; ++p) {
        const auto z = testing::simulate_arma(0.02, {0.5, -0.2}, {}, 0.05, 400, 100 + static_cast<unsigned>(p));
        const auto ar = fit_autoreg(normalized_series(z), ArOrder{p});
        const auto arima = fit_arima(normalized_series(z), ArimaOrder{p, 0, 0});
        const auto& a = std::get<ArParameters>(ar.parameters);
        const auto& b = std::get<ArimaParameters>(arima.parameters);
        REQUIRE(b.ar.size() == static_cast<std::size_t>(p));
        CHECK(std::abs(a.intercept - b.intercept) < 1e-6);
        for (int i = 0; i < p; ++i) {
            CHECK(std::abs(a.coefficients[static_cast<std::size_t>(i)] - b.ar[static_cast<std::size_t>(i)]) < 1e-6);
        }
        const auto fa = forecast_autoreg(ar, 20);
        const auto fb = forecast_arima(arima, 20);
        for (int k = 0; k < 20; ++k) {
            CHECK(std::abs(fa[static_cast<std::size_t>(k)] - fb[static_cast<std::size_t>(k)]) < 1e-6);
        }
    }
}

TEST_CASE("ARIMA(1,1,0) recovers phi")
{
    const auto y = testing::simulate_arima1(0.0, {0.7}, {}, 0.02, 500, 4242);
    const auto m = fit_arima(normalized_series(y), ArimaOrder{1, 1, 0});
    CHECK(std::abs(std::get<ArimaParameters>(m.parameters).ar[0] - 0.7) < 0.07);
    REQUIRE(m.diff_state);
    CHECK(m.diff_state->order == 1);
}

TEST_CASE("MA(1) recovers theta")
{
    const auto z = testing::simulate_arma(0.0, {}, {0.5}, 1.0, 1000, 4243);
    const auto m = fit_arima(normalized_series(z), ArimaOrder{0, 0, 1});
    const auto& p = std::get<ArimaParameters>(m.parameters);
    CHECK(std::abs(p.ma[0] - 0.5) < 0.08);
    CHECK(p.objective <= p.initial_objective);
}

TEST_CASE("optimizer never worsens the start")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto z = testing::simulate_arma(0.1, {0.5}, {0.4, -0.2}, 0.3, 250, seed);
        for (const auto order : {ArimaOrder{1, 0, 2}, ArimaOrder{2, 0, 1}, ArimaOrder{0, 1, 3}}) {
            const auto m = fit_arima(normalized_series(z), order);
            const auto& p = std::get<ArimaParameters>(m.parameters);
            REQUIRE(p.objective <= p.initial_objective);
            REQUIRE(std::isfinite(p.objective));
            REQUIRE(p.iterations <= 200);
        }
    }
}

TEST_CASE("forecasts from hand-built models")
{
    FittedModel m;
    m.train_tail = {0.2, 0.5};
    m.train_length = 2;
    m.diff_state = DifferenceState{1, {0.2}, SeriesKind::incident};

    m.spec = ForecasterSpec{ArimaOrder{0, 1, 0}, 0};
    m.parameters = ArimaParameters{0.0, {}, {}, {}, 0.0, 0.0, 0};
    CHECK(forecast_arima(m, 4) == std::vector<double>{0.5, 0.5, 0.5, 0.5});

    m.parameters = ArimaParameters{0.25, {}, {}, {}, 0.0, 0.0, 0};
    CHECK(forecast_arima(m, 3) == std::vector<double>{0.75, 1.0, 1.25});

    // MA(1) on the differences: the first step uses the last residual, later ones do not
    m.spec = ForecasterSpec{ArimaOrder{0, 1, 1}, 0};
    m.parameters = ArimaParameters{0.0, {}, {0.5}, {0.2}, 0.0, 0.0, 0};
    const auto f = forecast_arima(m, 3);
    CHECK(f[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(f[1] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(f[2] == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("fit errors")
{
    CHECK_THROWS_AS(fit_arima(normalized_series({0.1, 0.2, 0.3}), ArimaOrder{2, 0, 1}), ContractError);
    CHECK_THROWS_AS(fit_arima(normalized_series({0.1, 0.2, 0.3}), ArimaOrder{0, 0, 0}), ContractError);
    CHECK_THROWS_AS(fit_arima(normalized_series({0.1, 0.2}), ArimaOrder{0, 3, 0}), ContractError);
}

TEST_CASE("non-invertible or explosive fits carry warnings")
{
    std::vector<double> y{0.01};
    for (int i = 0; i < 60; ++i) {
        y.push_back(y.back() * 1.08);
    }
    const auto m = fit_arima(normalized_series(y), ArimaOrder{1, 0, 0});
    CHECK_FALSE(m.warnings.empty());
}

TEST_CASE("ARIMA grid enumeration")
{
    const auto y = testing::simulate_arima1(0.0, {0.7}, {}, 0.02, 200, 12);
    const auto s = normalized_series(y);
    const auto train = s.slice(0, 160);
    const auto valid = s.slice(160, 40);

    const auto only_rw = grid_search_arima(train, valid, 0, 0);
    REQUIRE(only_rw.candidates.size() == 1);
    CHECK(only_rw.order == ArimaOrder{0, 1, 0});

    const auto sel = grid_search_arima(train, valid, 2, 2);
    CHECK(sel.candidates.size() == 17);
    double best = INFINITY;
    for (const auto& c : sel.candidates) {
        if (c.ok) {
            best = std::min(best, c.mse);
        }
    }
    CHECK(sel.mse == best);
    CHECK(sel.model.kind() == ForecasterKind::arima);
    CHECK_THROWS_AS(grid_search_arima(train, valid, -1, 0), ContractError);
}

TEST_CASE("white noise selection beats the random walk with MSE near the variance")
{
    const auto z = testing::simulate_arma(0.0, {}, {}, 1.0, 600, 55);
    std::vector<double> shifted;
    for (double v : z) {
        shifted.push_back(0.5 + 0.1 * v);
    }
    const auto s = normalized_series(shifted);
    const auto sel = grid_search_arima(s.slice(0, 500), s.slice(500, 100), 1, 1);
    double random_walk = 0.0;
    for (const auto& c : sel.candidates) {
        if (c.order.p == 0 && c.order.d == 1 && c.order.q == 0) {
            random_walk = c.mse;
        }
    }
    CHECK(sel.mse < random_walk);
    CHECK(sel.mse == doctest::Approx(0.01).epsilon(0.35));
}

TEST_CASE("ARIMA fits are deterministic")
{
    const auto z = testing::simulate_arma(0.1, {0.5}, {0.4}, 0.3, 250, 3);
    const auto a = fit_arima(normalized_series(z), ArimaOrder{1, 1, 1});
    const auto b = fit_arima(normalized_series(z), ArimaOrder{1, 1, 1});
    CHECK(forecast_arima(a, 50) == forecast_arima(b, 50));
}
