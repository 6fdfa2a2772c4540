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
#include "epiforecast/forecasters/model.hpp"
#include "oracles.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>

using namespace epiforecast;
using nlohmann::json;

namespace {

Series raw_series()
{
    const auto z = testing::simulate_arma(0.2, {0.7}, {0.3}, 1.0, 120, 91);
    std::vector<double> level;
    double total = 1000.0;
    for (double v : z) {
        total += 5.0 + std::abs(v) * 10.0;
        level.push_back(std::round(total));
    }
    return make_series(level, SeriesKind::cumulative);
}

std::vector<ForecasterSpec> one_of_each()
{
    LstmConfig lstm;
    lstm.num_units = 4;
    lstm.window = 5;
    lstm.epochs = 3;
    MlpConfig mlp;
    mlp.epochs = 20;
    mlp.seasonal = true;
    AdditiveConfig additive;
    additive.n_changepoints = 3;
    return {ForecasterSpec{ArOrder{3}, 1},     ForecasterSpec{ArimaOrder{2, 1, 1}, 2},
            ForecasterSpec{ArimaOrder{1, 0, 0}, 2}, ForecasterSpec{lstm, 3},
            ForecasterSpec{mlp, 4},            ForecasterSpec{additive, 5}};
}

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("epiforecast_io_" + name)).string();
}

} // namespace

TEST_CASE("save/load keeps forecasts bit-identical")
{
    const auto s = raw_series();
    for (const auto& spec : one_of_each()) {
        CAPTURE(describe(spec));
        auto m = fit_model(spec, s);
        m.target = "deaths";
        const auto path = temp_path(std::string(to_string(spec.kind())) + ".json");
        save_model(m, path);
        const auto back = load_model(path);
        CHECK(back.spec == m.spec);
        CHECK(back.target == "deaths");
        CHECK(back.train_start == m.train_start);
        CHECK(back.train_length == m.train_length);
        CHECK(back.scaler.min == m.scaler.min);
        CHECK(back.scaler.max == m.scaler.max);
        CHECK(back.train_tail == m.train_tail);
        CHECK(back.loss_history == m.loss_history);
        CHECK(forecast(back, 180) == forecast(m, 180));
        CHECK(forecast_raw(back, 180) == forecast_raw(m, 180));
        CHECK(serialize_model(back) == serialize_model(m));
        std::filesystem::remove(path);
    }
}

TEST_CASE("serialized form is a versioned JSON document")
{
    const auto m = fit_model(ForecasterSpec{ArimaOrder{1, 1, 0}, 0}, raw_series());
    const auto j = json::parse(serialize_model(m));
    CHECK(j.at("schema_version") == model_schema_version);
    CHECK(j.at("kind") == "arima");
    CHECK(j.at("hyperparameters").at("d") == 1);
    CHECK(j.at("diff_state").at("order") == 1);
    CHECK(j.contains("scaler"));
    CHECK(j.contains("train_tail"));
    CHECK(j.contains("seed"));
}

TEST_CASE("doubles survive text serialisation exactly")
{
    Rng rng(8);
    FittedModel m;
    m.spec = ForecasterSpec{ArOrder{2}, 0};
    m.parameters = ArParameters{rng.normal(), {rng.normal() * 1e-300, rng.normal() * 1e300}};
    m.train_tail = {rng.uniform(), 1.0 / 3.0};
    m.train_length = 2;
    m.scaler = MinMaxScaler{1.0 / 7.0, 123456789.123456789};
    const auto back = deserialize_model(serialize_model(m));
    CHECK(std::get<ArParameters>(back.parameters).coefficients == std::get<ArParameters>(m.parameters).coefficients);
    CHECK(std::get<ArParameters>(back.parameters).intercept == std::get<ArParameters>(m.parameters).intercept);
    CHECK(back.train_tail == m.train_tail);
    CHECK(back.scaler.max == m.scaler.max);
}

TEST_CASE("corrupted and foreign files are rejected")
{
    const auto text = serialize_model(fit_model(ForecasterSpec{ArOrder{2}, 0}, raw_series()));
    CHECK_THROWS_AS(deserialize_model(text.substr(0, text.size() / 2)), LoadError);
    CHECK_THROWS_AS(deserialize_model(""), LoadError);
    CHECK_THROWS_AS(deserialize_model("[1, 2, 3]"), LoadError);

    auto j = json::parse(text);
    j["schema_version"] = "999";
    CHECK_THROWS_AS(deserialize_model(j.dump()), UnsupportedVersionError);
    j["schema_version"] = 999;
    CHECK_THROWS_AS(deserialize_model(j.dump()), UnsupportedVersionError);
    j["schema_version"] = "one";
    CHECK_THROWS_AS(deserialize_model(j.dump()), LoadError);

    j = json::parse(text);
    j["kind"] = "transformer";
    CHECK_THROWS_AS(deserialize_model(j.dump()), LoadError);

    j = json::parse(text);
    j["hyperparameters"]["p"] = 5;
    CHECK_THROWS_AS(deserialize_model(j.dump()), LoadError);

    j = json::parse(text);
    j["hyperparameters"]["p"] = 0;
    CHECK_THROWS_AS(deserialize_model(j.dump()), LoadError);

    j = json::parse(text);
    j.erase("scaler");
    CHECK_THROWS_AS(deserialize_model(j.dump()), LoadError);

    CHECK_THROWS_AS(load_model(temp_path("does_not_exist.json")), LoadError);
}
