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
#include "epiforecast/forecasters/model.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace epiforecast {

enum class ProtocolKind { holdout, rolling_origin };

struct EvalProtocol {
    ProtocolKind kind = ProtocolKind::holdout;
    /// Holdout: share of the series kept as the test window.
    double test_fraction = 0.2;
    /// Share of the training split carved off its tail to score grid candidates.
    double validation_fraction = 0.2;
    /// Rolling origin: first training length, origin increment and forecast length.
    std::size_t initial_train = 0;
    std::size_t step = 1;
    int horizon = 1;
    /// Worker threads for independent candidates and folds; 0 uses the hardware count.
    unsigned threads = 0;
};

/**
 * Called with every series an evaluation reads before the test window is
 * scored: the stage name is one of "scaler", "selection_fit",
 * "selection_score" and "fit". Used to audit that test data stays unseen.
 */
using FitObserver = std::function<void(std::string_view stage, const Series& series)>;

/// Scores of one fitted model on its split. Train scores use in-sample
/// one-step predictions; everything except MAPE is on the normalized scale.
/// Undefined scores are NaN.
struct HoldoutMetrics {
    double train_mse = 0.0;
    double test_mse = 0.0;
    double train_score = 0.0;
    double test_score = 0.0;
    double rmse_test = 0.0;
    double mape_test = 0.0;
    double mase_test = 0.0;
};

struct HoldoutResult {
    HoldoutMetrics metrics;
    FittedModel model;
    std::vector<double> test_forecast; // normalized
};

/// Fits on the leading (1 - test_fraction) share with the scaler fitted on
/// that share only, then forecasts the test window.
HoldoutResult holdout_eval(const ForecasterSpec& spec, const Series& s, const EvalProtocol& protocol,
                           const FitObserver& observer = {});

/// Metrics of a model fitted by fit_model on `train` against the following `test` window.
HoldoutMetrics evaluate_holdout(const FittedModel& m, const Series& train, const Series& test);

struct Fold {
    std::size_t origin = 0;
    double mse = 0.0;
};

/// floor((n - initial_train - horizon) / step) + 1 folds; throws ContractError when none fit.
std::size_t rolling_fold_count(std::size_t n, std::size_t initial_train, std::size_t step, int horizon);
std::vector<Fold> rolling_origin_eval(const ForecasterSpec& spec, const Series& s, const EvalProtocol& protocol);

struct GridCandidate {
    ForecasterSpec spec;
    bool ok = false;
    double score = 0.0;
    std::string error;
};

struct GridResult {
    std::size_t best_index = 0;
    ForecasterSpec best;
    /// Refit of the best spec on the whole of `train` (scaler included).
    FittedModel model;
    double validation_mse = 0.0;
    std::vector<GridCandidate> candidates; // grid order
};

/**
 * Scores every spec on a validation tail of `train` (or, for a rolling-origin
 * protocol, by the mean fold MSE within `train`) and refits the best one on
 * all of `train`. Ties go to the earlier grid entry. Failing candidates are
 * recorded and skipped; if every candidate fails ExhaustedGridError is thrown.
 */
GridResult grid_search(const std::vector<ForecasterSpec>& grid, const Series& train, const EvalProtocol& protocol,
                       const FitObserver& observer = {});

struct ModelEntry {
    std::string name;
    std::vector<ForecasterSpec> grid;
};

struct ReportRow {
    std::string name;
    bool ok = false;
    std::string error;
    ForecasterSpec spec;
    std::uint64_t seed = 0;
    std::size_t grid_size = 0;
    std::size_t grid_failures = 0;
    double validation_mse = 0.0; // NaN when the grid had one entry
    HoldoutMetrics metrics;
    std::vector<double> test_forecast; // normalized
    double wall_seconds = 0.0;
};

struct BacktestReport {
    std::vector<ReportRow> rows;
    std::size_t train_length = 0;
    std::size_t validation_length = 0;
    std::size_t test_length = 0;
    Date train_start{};
    Date test_start{};
    Date test_end{};
    EvalProtocol protocol;
    std::string selection_note;
};

/// Holdout comparison on one shared split. A failing model is recorded in its
/// row and never aborts the report.
BacktestReport compare_models(const std::vector<ModelEntry>& entries, const Series& s, const EvalProtocol& protocol,
                              const FitObserver& observer = {});

/// Named hyperparameter axes, e.g. {"p", {"0", "1", "2"}}.
using GridAxes = std::vector<std::pair<std::string, std::vector<std::string>>>;

GridAxes default_grid_axes(ForecasterKind kind);

/**
 * Cartesian product of `axes` (first axis outermost) applied on top of
 * `base`. ARIMA grids drop the empty (0,0,0) order and are sorted by p+d+q,
 * then d, then p, so that grid order encodes the preference for simpler
 * orders on ties.
 */
std::vector<ForecasterSpec> expand_grid(const Hyperparameters& base, const GridAxes& axes, std::uint64_t seed);

/// expand_grid over default_grid_axes. Seeds only matter for the neural models.
std::vector<ForecasterSpec> default_grid(ForecasterKind kind, std::uint64_t seed);

} // namespace epiforecast
