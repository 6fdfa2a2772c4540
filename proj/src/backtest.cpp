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
#include "epiforecast/backtest.hpp"

#include "epiforecast/error.hpp"
#include "epiforecast/forecasters/lstm.hpp"
#include "epiforecast/metrics.hpp"
#include "epiforecast/transform.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>
#include <tuple>

#include <fmt/format.h>

namespace epiforecast {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

unsigned worker_count(unsigned requested, std::size_t tasks)
{
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, tasks));
}

// Runs fn(0..n-1) on a small pool. fn must not throw; results are written to
// per-index slots so the outcome does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn)
{
    const unsigned workers = worker_count(threads, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

template <class F>
double defined_or_nan(F&& f)
{
    try {
        return f();
    } catch (const UndefinedMetricError&) {
        return nan;
    }
}

void notify(const FitObserver& observer, std::string_view stage, const Series& s)
{
    if (observer) {
        observer(stage, s);
    }
}

double forecast_mse(const FittedModel& m, const Series& normalized_target)
{
    const auto fc = forecast(m, static_cast<int>(normalized_target.size()));
    if (!std::all_of(fc.begin(), fc.end(), [](double v) { return std::isfinite(v); })) {
        throw DivergenceError("forecast is not finite");
    }
    return metrics::mse(normalized_target.view(), fc);
}

bool same_lstm_run(const ForecasterSpec& a, const ForecasterSpec& b)
{
    if (a.kind() != ForecasterKind::lstm || b.kind() != ForecasterKind::lstm || a.seed != b.seed) {
        return false;
    }
    auto ca = std::get<LstmConfig>(a.hyperparameters);
    auto cb = std::get<LstmConfig>(b.hyperparameters);
    ca.epochs = cb.epochs = 0;
    return ca == cb;
}

// Candidates that differ only in LSTM epoch count share one training run.
std::vector<std::vector<std::size_t>> group_candidates(const std::vector<ForecasterSpec>& grid)
{
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return same_lstm_run(grid[g.front()], grid[i]); });
        if (it != groups.end()) {
            it->push_back(i);
        } else {
            groups.push_back({i});
        }
    }
    return groups;
}

void score_single(const ForecasterSpec& spec, const Series& fit_on, const Series& score_on, GridCandidate& out)
{
    try {
        const auto m = fit_normalized(spec, fit_on);
        out.score = forecast_mse(m, score_on);
        out.ok = true;
    } catch (const Error& e) {
        out.ok = false;
        out.error = e.what();
    }
}

void score_group(const std::vector<ForecasterSpec>& grid, const std::vector<std::size_t>& group, const Series& fit_on,
                 const Series& score_on, std::vector<GridCandidate>& out)
{
    if (group.size() == 1) {
        score_single(grid[group.front()], fit_on, score_on, out[group.front()]);
        return;
    }
    std::vector<int> checkpoints;
    for (auto i : group) {
        checkpoints.push_back(std::get<LstmConfig>(grid[i].hyperparameters).epochs);
    }
    auto config = std::get<LstmConfig>(grid[group.front()].hyperparameters);
    config.epochs = *std::max_element(checkpoints.begin(), checkpoints.end());
    std::vector<FittedModel> models;
    try {
        validate(ForecasterSpec{config, grid[group.front()].seed});
        models = train_lstm_checkpoints(fit_on, config, grid[group.front()].seed, checkpoints);
    } catch (const Error&) {
        // A shared run that fails late would also take down candidates that
        // stop earlier; score those on their own.
        for (auto i : group) {
            score_single(grid[i], fit_on, score_on, out[i]);
        }
        return;
    }
    for (std::size_t k = 0; k < group.size(); ++k) {
        auto& cand = out[group[k]];
        try {
            cand.score = forecast_mse(models[k], score_on);
            cand.ok = true;
        } catch (const Error& e) {
            cand.ok = false;
            cand.error = e.what();
        }
    }
}

} // namespace

HoldoutMetrics evaluate_holdout(const FittedModel& m, const Series& train, const Series& test)
{
    const Series norm_train = scale(m.scaler, train);
    const Series norm_test = scale(m.scaler, test);
    const auto fc = forecast(m, static_cast<int>(test.size()));
    if (!std::all_of(fc.begin(), fc.end(), [](double v) { return std::isfinite(v); })) {
        throw DivergenceError("forecast is not finite");
    }
    HoldoutMetrics r;
    r.test_mse = metrics::mse(norm_test.view(), fc);
    r.rmse_test = metrics::rmse(norm_test.view(), fc);
    r.test_score = defined_or_nan([&] { return metrics::fit_score(norm_test.view(), fc); });
    const auto raw_fc = m.scaler.inverse(fc);
    r.mape_test = defined_or_nan([&] { return metrics::mape(test.view(), raw_fc); });
    r.mase_test = defined_or_nan([&] { return metrics::mase(norm_test.view(), fc, norm_train.view()); });

    const InSampleFit fit = fitted_values(m, norm_train);
    if (fit.values.empty()) {
        r.train_mse = r.train_score = nan;
    } else {
        const auto actual = norm_train.view().subspan(fit.first_index, fit.values.size());
        r.train_mse = metrics::mse(actual, fit.values);
        r.train_score = defined_or_nan([&] { return metrics::fit_score(actual, fit.values); });
    }
    return r;
}

HoldoutResult holdout_eval(const ForecasterSpec& spec, const Series& s, const EvalProtocol& protocol,
                           const FitObserver& observer)
{
    const auto [train, test] = train_test_split(s, protocol.test_fraction);
    notify(observer, "scaler", train);
    notify(observer, "fit", train);
    HoldoutResult out;
    out.model = fit_model(spec, train);
    out.metrics = evaluate_holdout(out.model, train, test);
    out.test_forecast = forecast(out.model, static_cast<int>(test.size()));
    return out;
}

std::size_t rolling_fold_count(std::size_t n, std::size_t initial_train, std::size_t step, int horizon)
{
    if (horizon < 1 || step < 1) {
        throw ContractError("rolling-origin evaluation needs horizon >= 1 and step >= 1");
    }
    const auto h = static_cast<std::size_t>(horizon);
    if (initial_train < 1 || initial_train + h > n) {
        throw ContractError(fmt::format("no complete fold: n = {}, initial_train = {}, horizon = {}", n,
                                        initial_train, horizon));
    }
    return (n - initial_train - h) / step + 1;
}

std::vector<Fold> rolling_origin_eval(const ForecasterSpec& spec, const Series& s, const EvalProtocol& protocol)
{
    const auto folds = rolling_fold_count(s.size(), protocol.initial_train, protocol.step, protocol.horizon);
    std::vector<Fold> out(folds);
    std::vector<std::exception_ptr> errors(folds);
    parallel_for(folds, protocol.threads, [&](std::size_t k) {
        try {
            const std::size_t origin = protocol.initial_train + k * protocol.step;
            const Series train = s.slice(0, origin);
            const Series test = s.slice(origin, static_cast<std::size_t>(protocol.horizon));
            const auto m = fit_model(spec, train);
            out[k] = Fold{origin, forecast_mse(m, scale(m.scaler, test))};
        } catch (...) {
            errors[k] = std::current_exception();
        }
    });
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

GridResult grid_search(const std::vector<ForecasterSpec>& grid, const Series& train, const EvalProtocol& protocol,
                       const FitObserver& observer)
{
    if (grid.empty()) {
        throw ContractError("grid search needs at least one candidate");
    }
    GridResult result;
    result.candidates.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        result.candidates[i].spec = grid[i];
    }

    if (protocol.kind == ProtocolKind::rolling_origin) {
        notify(observer, "selection_fit", train);
        notify(observer, "selection_score", train);
        EvalProtocol inner = protocol;
        inner.threads = 1;
        parallel_for(grid.size(), protocol.threads, [&](std::size_t i) {
            auto& cand = result.candidates[i];
            try {
                const auto folds = rolling_origin_eval(grid[i], train, inner);
                double sum = 0.0;
                for (const auto& f : folds) {
                    sum += f.mse;
                }
                cand.score = sum / static_cast<double>(folds.size());
                cand.ok = true;
            } catch (const Error& e) {
                cand.error = e.what();
            }
        });
    } else {
        const auto [sub, validation] = train_test_split(train, protocol.validation_fraction);
        notify(observer, "scaler", sub);
        const MinMaxScaler scaler = fit_scaler(sub);
        const Series norm_sub = scale(scaler, sub);
        const Series norm_val = scale(scaler, validation);
        notify(observer, "selection_fit", sub);
        notify(observer, "selection_score", validation);
        const auto groups = group_candidates(grid);
        parallel_for(groups.size(), protocol.threads,
                     [&](std::size_t g) { score_group(grid, groups[g], norm_sub, norm_val, result.candidates); });
    }

    std::size_t best = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& c = result.candidates[i];
        if (c.ok && (best == grid.size() || c.score < result.candidates[best].score)) {
            best = i;
        }
    }
    if (best == grid.size()) {
        std::string reasons;
        for (const auto& c : result.candidates) {
            reasons += fmt::format("\n  {}: {}", describe(c.spec), c.error);
        }
        throw ExhaustedGridError(fmt::format("all {} grid candidates failed:{}", grid.size(), reasons));
    }
    result.best_index = best;
    result.best = grid[best];
    result.validation_mse = result.candidates[best].score;
    notify(observer, "scaler", train);
    notify(observer, "fit", train);
    result.model = fit_model(result.best, train);
    return result;
}

BacktestReport compare_models(const std::vector<ModelEntry>& entries, const Series& s, const EvalProtocol& protocol,
                              const FitObserver& observer)
{
    const auto [train, test] = train_test_split(s, protocol.test_fraction);
    BacktestReport report;
    report.protocol = protocol;
    report.train_length = train.size();
    report.test_length = test.size();
    report.train_start = train.start_date();
    report.test_start = test.start_date();
    report.test_end = test.end_date();
    if (train.size() >= 2) {
        const auto val = std::max<long long>(1, std::llround(static_cast<double>(train.size()) *
                                                              protocol.validation_fraction));
        report.validation_length = static_cast<std::size_t>(val);
    }
    report.selection_note = fmt::format(
        "hyperparameters were selected on the last {} days of the training split; the {} test days "
        "({}..{}) were used only for the reported test scores",
        report.validation_length, report.test_length, format_date(report.test_start), format_date(report.test_end));

    for (const auto& entry : entries) {
        ReportRow row;
        row.name = entry.name;
        row.grid_size = entry.grid.size();
        const auto started = std::chrono::steady_clock::now();
        try {
            if (entry.grid.empty()) {
                throw ContractError("empty grid");
            }
            FittedModel model;
            if (entry.grid.size() == 1) {
                row.spec = entry.grid.front();
                row.validation_mse = nan;
                notify(observer, "scaler", train);
                notify(observer, "fit", train);
                model = fit_model(row.spec, train);
            } else {
                auto search = grid_search(entry.grid, train, protocol, observer);
                row.spec = search.best;
                row.validation_mse = search.validation_mse;
                row.grid_failures = static_cast<std::size_t>(std::count_if(
                    search.candidates.begin(), search.candidates.end(), [](const auto& c) { return !c.ok; }));
                model = std::move(search.model);
            }
            row.seed = row.spec.seed;
            row.metrics = evaluate_holdout(model, train, test);
            row.test_forecast = forecast(model, static_cast<int>(test.size()));
            row.ok = true;
        } catch (const Error& e) {
            row.ok = false;
            row.error = e.what();
        }
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        report.rows.push_back(std::move(row));
    }
    return report;
}

GridAxes default_grid_axes(ForecasterKind kind)
{
    switch (kind) {
    case ForecasterKind::autoreg:
        return {{"p", {"1", "2", "3", "4", "5", "6", "7", "8", "9", "10"}}};
    case ForecasterKind::arima:
        return {{"p", {"0", "1", "2", "3", "4", "5"}}, {"d", {"0", "1"}}, {"q", {"0", "1", "2", "3", "4", "5"}}};
    case ForecasterKind::lstm:
        return {{"num_units", {"16", "32", "64"}},
                {"window", {"7", "14", "28"}},
                {"learning_rate", {"0.01", "0.001"}},
                {"epochs", {"200", "500"}}};
    case ForecasterKind::mlp:
        return {{"window", {"7", "14"}},
                {"hidden_units", {"0", "8", "16"}},
                {"learning_rate", {"0.01", "0.05"}},
                {"epochs", {"500", "2000"}},
                {"seasonal", {"false", "true"}}};
    case ForecasterKind::additive:
        return {{"n_changepoints", {"0", "5", "10", "25"}},
                {"changepoint_penalty", {"0.1", "1", "10"}},
                {"fourier_order", {"0", "3"}}};
    }
    throw ContractError("unknown forecaster kind");
}

std::vector<ForecasterSpec> expand_grid(const Hyperparameters& base, const GridAxes& axes, std::uint64_t seed)
{
    std::vector<ForecasterSpec> grid{{base, seed}};
    for (const auto& [key, values] : axes) {
        if (values.empty()) {
            throw ContractError(fmt::format("grid axis '{}' has no values", key));
        }
        std::vector<ForecasterSpec> next;
        for (const auto& spec : grid) {
            for (const auto& value : values) {
                ForecasterSpec s = spec;
                set_hyperparameter(s.hyperparameters, key, value);
                next.push_back(std::move(s));
            }
        }
        grid = std::move(next);
    }
    const auto kind = static_cast<ForecasterKind>(base.index());
    if (kind == ForecasterKind::arima) {
        std::erase_if(grid, [](const ForecasterSpec& s) {
            const auto& o = std::get<ArimaOrder>(s.hyperparameters);
            return o.p + o.d + o.q == 0;
        });
        std::stable_sort(grid.begin(), grid.end(), [](const ForecasterSpec& a, const ForecasterSpec& b) {
            const auto& x = std::get<ArimaOrder>(a.hyperparameters);
            const auto& y = std::get<ArimaOrder>(b.hyperparameters);
            return std::tuple(x.p + x.d + x.q, x.d, x.p) < std::tuple(y.p + y.d + y.q, y.d, y.p);
        });
    }
    for (const auto& spec : grid) {
        validate(spec);
    }
    return grid;
}

std::vector<ForecasterSpec> default_grid(ForecasterKind kind, std::uint64_t seed)
{
    return expand_grid(default_hyperparameters(kind), default_grid_axes(kind), seed);
}

} // namespace epiforecast
