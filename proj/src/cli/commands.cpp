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
#include "epiforecast/cli/commands.hpp"

#include "epiforecast/forecasters/model.hpp"
#include "epiforecast/metrics.hpp"
#include "epiforecast/transform.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

namespace epiforecast::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class Stopwatch {
public:
    Stopwatch() : started_wall_(std::chrono::system_clock::now()), started_(std::chrono::steady_clock::now()) {}

    std::string started_at() const
    {
        return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(started_wall_)));
    }
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    }

private:
    std::chrono::system_clock::time_point started_wall_;
    std::chrono::steady_clock::time_point started_;
};

void require_file(const std::string& path, std::string_view what)
{
    if (path.empty()) {
        throw UsageError(fmt::format("missing {}", what));
    }
    if (!fs::is_regular_file(path)) {
        throw UsageError(fmt::format("{} not found: {}", what, path));
    }
}

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw UsageError(fmt::format("cannot create output directory {}: {}", dir, ec.message()));
    }
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error(fmt::format("cannot write {}", path));
    }
}

std::string sidecar_path(const std::string& path)
{
    const fs::path p(path);
    auto stem = p.filename().string();
    for (const auto* ext : {".json", ".csv", ".txt"}) {
        if (stem.ends_with(ext)) {
            stem.resize(stem.size() - std::string_view(ext).size());
            break;
        }
    }
    return (p.parent_path() / (stem + ".meta.json")).string();
}

Series load_target(const RunConfig& config)
{
    require_file(config.input, "input file");
    const auto ds = load_csv(config.input, ParseOptions{config.allow_corrections});
    return extract_series(ds, config.target);
}

json config_json(const RunConfig& config)
{
    json j;
    j["config_file"] = config.config_file;
    j["input"] = config.input;
    j["target"] = std::string(to_string(config.target));
    json models = json::array();
    json hyper = json::object();
    for (auto k : config.models) {
        models.push_back(std::string(series_name(k)));
        hyper[std::string(series_name(k))] = describe(ForecasterSpec{resolve_hyperparameters(config, k), config.seed});
    }
    j["models"] = models;
    j["hyperparameters"] = hyper;
    j["grid"] = config.grid;
    json axes = json::object();
    for (const auto& [k, a] : config.grid_axes) {
        json section = json::object();
        for (const auto& [key, values] : a) {
            section[key] = values;
        }
        axes[std::string(series_name(k))] = section;
    }
    j["grid_axes"] = axes;
    j["horizon"] = config.horizon;
    j["test_fraction"] = config.test_fraction;
    j["validation_fraction"] = config.validation_fraction;
    j["seed"] = config.seed;
    j["out"] = config.out;
    j["allow_corrections"] = config.allow_corrections;
    j["threads"] = config.threads;
    json overrides = json::array();
    for (const auto& o : config.overrides) {
        overrides.push_back(fmt::format("{}{}={}", o.kind ? fmt::format("{}.", series_name(*o.kind)) : "", o.key,
                                        o.value));
    }
    j["overrides"] = overrides;
    j["model_files"] = config.model_files;
    j["forecast_files"] = config.forecast_files;
    return j;
}

void write_sidecar(const std::string& path, std::string_view command, const RunConfig& config, const Stopwatch& clock,
                   json extra = json::object())
{
    json j = std::move(extra);
    j["command"] = std::string(command);
    j["effective_config"] = config_json(config);
    j["started_at"] = clock.started_at();
    j["wall_seconds"] = clock.seconds();
    write_text(sidecar_path(path), j.dump(2) + "\n");
}

std::string first_line(const std::string& s)
{
    return s.substr(0, s.find('\n'));
}

std::string cell(double v)
{
    return std::isnan(v) ? "n/a" : fmt::format("{:.4f}", v);
}

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

struct ForecastRow {
    std::string date;
    std::string target;
    std::string model;
    std::string value;
};

std::vector<ForecastRow> read_forecast_csv(const std::string& path)
{
    require_file(path, "forecast file");
    std::ifstream in(path);
    std::string line;
    if (!std::getline(in, line) || line != "date,target,model,point_forecast") {
        throw UsageError(fmt::format("{} is not a forecast file (bad header)", path));
    }
    std::vector<ForecastRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (fields.size() != 4 || !parse_date(fields[0])) {
            throw UsageError(fmt::format("{} line {}: malformed forecast row", path, line_no));
        }
        rows.push_back({fields[0], fields[1], fields[2], fields[3]});
    }
    return rows;
}

} // namespace

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const UsageError*>(&e) != nullptr) {
        return exit_usage;
    }
    if (dynamic_cast<const ParseError*>(&e) != nullptr || dynamic_cast<const StructuralError*>(&e) != nullptr ||
        dynamic_cast<const ValidationError*>(&e) != nullptr) {
        return exit_data;
    }
    return exit_model;
}

std::string model_path(const RunConfig& config, ForecasterKind kind, Target target)
{
    return (fs::path(config.out) / fmt::format("{}_{}.model.json", series_name(kind), to_string(target))).string();
}

std::string forecast_path(const std::string& out_dir, const std::string& model, const std::string& target)
{
    return (fs::path(out_dir) / fmt::format("{}_{}.forecast.csv", model, target)).string();
}

std::string report_path(const RunConfig& config, const std::string& extension)
{
    return (fs::path(config.out) / fmt::format("report_{}.{}", to_string(config.target), extension)).string();
}

std::string plot_path(const RunConfig& config, const std::string& target)
{
    return (fs::path(config.out) / fmt::format("plot_{}.csv", target)).string();
}

void cmd_validate(const RunConfig& config, std::ostream& out)
{
    require_file(config.input, "input file");
    const auto ds = load_csv(config.input, ParseOptions{config.allow_corrections});
    out << fmt::format("{} records, {}..{}\n", ds.size(), format_date(ds.first_date()), format_date(ds.last_date()));
    for (auto target : {Target::confirmed, Target::deaths, Target::recovered}) {
        const auto drops = ds.decreases(target);
        if (drops.empty()) {
            out << fmt::format("{}: non-decreasing\n", to_string(target));
        } else {
            out << fmt::format("{}: {} decreases (first {}), accepted as corrections\n", to_string(target),
                               drops.size(), format_date(drops.front()));
        }
    }
}

void cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    const Stopwatch clock;
    if (config.models.size() != 1) {
        throw UsageError("fit needs exactly one --model");
    }
    const auto kind = config.models.front();
    const auto grid = resolve_grid(config, kind);
    const Series series = load_target(config);

    FittedModel model;
    json extra;
    if (grid.size() > 1) {
        EvalProtocol protocol;
        protocol.validation_fraction = config.validation_fraction;
        protocol.threads = config.threads;
        auto search = grid_search(grid, series, protocol);
        for (const auto& c : search.candidates) {
            if (!c.ok) {
                err << fmt::format("skipped {}: {}\n", describe(c.spec), first_line(c.error));
            }
        }
        out << fmt::format("selected {} from {} candidates\n", describe(search.best), grid.size());
        out << fmt::format("validation mse: {:.6f}\n", search.validation_mse);
        extra["validation_mse"] = search.validation_mse;
        model = std::move(search.model);
    } else {
        model = fit_model(grid.front(), series);
        out << fmt::format("fitted {}\n", describe(model.spec));
    }
    model.target = std::string(to_string(config.target));
    for (const auto& w : model.warnings) {
        err << "warning: " << w << "\n";
    }

    const Series norm = scale(model.scaler, series);
    const auto fit = fitted_values(model, norm);
    if (!fit.values.empty()) {
        const auto actual = norm.view().subspan(fit.first_index, fit.values.size());
        out << fmt::format("train mse: {:.6f}\n", metrics::mse(actual, fit.values));
        try {
            out << fmt::format("train r2: {:.6f}\n", metrics::fit_score(actual, fit.values));
        } catch (const UndefinedMetricError&) {
            out << "train r2: n/a\n";
        }
    }

    ensure_dir(config.out);
    const auto path = model_path(config, kind, config.target);
    save_model(model, path);
    out << fmt::format("wrote {}\n", path);
    write_sidecar(path, "fit", config, clock, extra);
}

void cmd_forecast(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    const Stopwatch clock;
    if (config.model_files.empty()) {
        throw UsageError("forecast needs at least one model file");
    }
    if (config.horizon < 1) {
        throw UsageError("--horizon must be >= 1");
    }
    ensure_dir(config.out);
    for (const auto& file : config.model_files) {
        require_file(file, "model file");
        const auto model = load_model(file);
        const auto target = model.target.empty() ? std::string("series") : model.target;
        const auto name = std::string(series_name(model.kind()));
        const auto values = forecast_raw(model, config.horizon);
        std::string csv = "date,target,model,point_forecast\n";
        json floors = json::array();
        for (int k = 0; k < config.horizon; ++k) {
            const auto date = format_date(add_days(model.train_end(), k + 1));
            double v = values[static_cast<std::size_t>(k)];
            if (!std::isfinite(v)) {
                throw DivergenceError(fmt::format("{}: forecast for {} is not finite", file, date));
            }
            if (v < 0.0) {
                err << fmt::format("floored {} {} {}: {:.6f} -> 0\n", date, target, name, v);
                floors.push_back({{"date", date}, {"value", v}});
                v = 0.0;
            }
            csv += fmt::format("{},{},{},{:.6f}\n", date, target, name, v + 0.0);
        }
        const auto path = forecast_path(config.out, name, target);
        write_text(path, csv);
        out << fmt::format("wrote {} ({} rows)\n", path, config.horizon);
        write_sidecar(path, "forecast", config, clock, {{"model_file", file}, {"floored", floors}});
    }
}

std::string format_report_table(const BacktestReport& report)
{
    const std::vector<std::string> labels{"Train Score", "Test Score", "MSE Train", "MSE Test"};
    std::vector<std::vector<std::string>> columns;
    for (const auto& row : report.rows) {
        std::vector<std::string> col{row.name};
        if (row.ok) {
            col.push_back(cell(row.metrics.train_score));
            col.push_back(cell(row.metrics.test_score));
            col.push_back(cell(row.metrics.train_mse));
            col.push_back(cell(row.metrics.test_mse));
        } else {
            const auto msg = "error: " + first_line(row.error);
            col.insert(col.end(), {msg, msg, msg, msg});
        }
        columns.push_back(std::move(col));
    }
    std::size_t label_width = 0;
    for (const auto& l : labels) {
        label_width = std::max(label_width, l.size());
    }
    std::string text = fmt::format("{:<{}}", "", label_width);
    std::vector<std::size_t> widths;
    for (const auto& col : columns) {
        std::size_t w = 0;
        for (const auto& c : col) {
            w = std::max(w, c.size());
        }
        widths.push_back(w);
        text += fmt::format("  {:>{}}", col.front(), w);
    }
    text += "\n";
    for (std::size_t r = 0; r < labels.size(); ++r) {
        text += fmt::format("{:<{}}", labels[r], label_width);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            text += fmt::format("  {:>{}}", columns[c][r + 1], widths[c]);
        }
        text += "\n";
    }
    return text;
}

std::string report_json(const BacktestReport& report, Target target)
{
    json j;
    j["schema_version"] = report_schema_version;
    j["target"] = std::string(to_string(target));
    j["split"] = {{"train_start", format_date(report.train_start)},
                  {"train_length", report.train_length},
                  {"validation_length", report.validation_length},
                  {"test_start", format_date(report.test_start)},
                  {"test_end", format_date(report.test_end)},
                  {"test_length", report.test_length},
                  {"test_fraction", report.protocol.test_fraction},
                  {"validation_fraction", report.protocol.validation_fraction}};
    j["scale"] = "min-max scaling fitted on the training split; all metrics except mape_test on that scale";
    j["selection_note"] = report.selection_note;
    json models = json::array();
    for (const auto& row : report.rows) {
        json m;
        m["name"] = row.name;
        m["ok"] = row.ok;
        if (!row.ok) {
            m["error"] = row.error;
            models.push_back(m);
            continue;
        }
        m["hyperparameters"] = describe(row.spec);
        m["seed"] = row.seed;
        m["grid_size"] = row.grid_size;
        m["grid_failures"] = row.grid_failures;
        m["validation_mse"] = number_or_null(row.validation_mse);
        m["metrics"] = {{"mse_train", number_or_null(row.metrics.train_mse)},
                        {"mse_test", number_or_null(row.metrics.test_mse)},
                        {"r2_train", number_or_null(row.metrics.train_score)},
                        {"r2_test", number_or_null(row.metrics.test_score)},
                        {"rmse_test", number_or_null(row.metrics.rmse_test)},
                        {"mape_test", number_or_null(row.metrics.mape_test)},
                        {"mase_test", number_or_null(row.metrics.mase_test)}};
        models.push_back(m);
    }
    j["models"] = models;
    return j.dump(2) + "\n";
}

int cmd_backtest(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    const Stopwatch clock;
    const auto kinds = config.models.empty() ? all_models() : config.models;
    std::vector<ModelEntry> entries;
    for (auto kind : kinds) {
        entries.push_back({std::string(series_name(kind)), resolve_grid(config, kind)});
    }
    const Series series = load_target(config);
    EvalProtocol protocol;
    protocol.test_fraction = config.test_fraction;
    protocol.validation_fraction = config.validation_fraction;
    protocol.threads = config.threads;
    if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0) ||
        !(config.validation_fraction > 0.0 && config.validation_fraction < 1.0)) {
        throw UsageError("--test-fraction and --validation-fraction must lie in (0, 1)");
    }
    const auto report = compare_models(entries, series, protocol);

    const auto table = format_report_table(report);
    out << table;
    out << report.selection_note << "\n";
    json timings = json::object();
    bool any_ok = false;
    for (const auto& row : report.rows) {
        timings[row.name] = row.wall_seconds;
        any_ok = any_ok || row.ok;
        if (!row.ok) {
            err << fmt::format("{} failed: {}\n", row.name, row.error);
        }
    }
    ensure_dir(config.out);
    const auto txt = report_path(config, "txt");
    write_text(txt, table + report.selection_note + "\n");
    const auto js = report_path(config, "json");
    write_text(js, report_json(report, config.target));
    write_sidecar(js, "backtest", config, clock, {{"model_wall_seconds", timings}});
    out << fmt::format("wrote {} and {}\n", txt, js);
    return any_ok ? exit_ok : exit_model;
}

void cmd_plotdata(const RunConfig& config, std::ostream& out)
{
    std::vector<std::vector<ForecastRow>> forecasts;
    std::string target;
    for (const auto& file : config.forecast_files) {
        auto rows = read_forecast_csv(file);
        for (const auto& r : rows) {
            if (target.empty()) {
                target = r.target;
            } else if (r.target != target) {
                throw UsageError(fmt::format("forecast targets differ: '{}' and '{}' ({})", target, r.target, file));
            }
        }
        forecasts.push_back(std::move(rows));
    }
    if (target.empty()) {
        target = std::string(to_string(config.target));
    }
    RunConfig effective = config;
    effective.target = parse_target_name(target);
    const Series observed = load_target(effective);

    std::string csv = "date,series_name,value\n";
    for (std::size_t i = 0; i < observed.size(); ++i) {
        csv += fmt::format("{},observed,{}\n", format_date(add_days(observed.start_date(), static_cast<long long>(i))),
                           observed[i]);
    }
    std::size_t rows = observed.size();
    for (const auto& f : forecasts) {
        for (const auto& r : f) {
            if (!parse_forecaster_kind(r.model)) {
                throw UsageError(fmt::format("unknown model '{}' in forecast file", r.model));
            }
            csv += fmt::format("{},{},{}\n", r.date, r.model, r.value);
            ++rows;
        }
    }
    ensure_dir(config.out);
    const auto path = plot_path(config, target);
    write_text(path, csv);
    out << fmt::format("wrote {} ({} rows)\n", path, rows);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Forecasting toolkit for daily epidemic counts"};
    app.require_subcommand(1);

    struct Flags {
        std::string config, input, target, grid, out;
        std::vector<std::string> models, sets, model_files, forecast_files;
        int horizon = 0;
        double test_fraction = 0.0, validation_fraction = 0.0;
        std::uint64_t seed = 0;
        unsigned threads = 0;
        bool allow_corrections = false;
    } f;

    auto add_config = [&](CLI::App* sub) { sub->add_option("--config", f.config, "INI file with defaults; flags win"); };
    auto add_input = [&](CLI::App* sub) {
        sub->add_option("--input", f.input, "Daily cumulative CSV (Date,Confirmed,Deaths,Recovered)");
        sub->add_flag("--allow-corrections", f.allow_corrections, "Accept decreasing cumulative counts");
    };
    auto add_target = [&](CLI::App* sub) {
        sub->add_option("--target", f.target, "confirmed, deaths or recovered");
    };
    auto add_fit_flags = [&](CLI::App* sub) {
        sub->add_option("--model", f.models, "prophet, lstm, autoreg, arima or mlp")->delimiter(',');
        sub->add_option("--grid", f.grid, "Grid file, 'default' for the built-in grids, or 'none'");
        sub->add_option("--seed", f.seed, "Seed for the neural models");
        sub->add_option("--validation-fraction", f.validation_fraction, "Share of training data used to rank grid candidates");
        sub->add_option("--threads", f.threads, "Worker threads for grid search (0: all cores)");
        sub->add_option("--set", f.sets, "Hyperparameter override, key=value or model.key=value");
        sub->add_option("--out", f.out, "Output directory");
    };

    auto* validate = app.add_subcommand("validate", "Check an input CSV");
    add_config(validate);
    add_input(validate);

    auto* fit = app.add_subcommand("fit", "Fit one model on the full series and save it");
    add_config(fit);
    add_input(fit);
    add_target(fit);
    add_fit_flags(fit);

    auto* forecast = app.add_subcommand("forecast", "Write point forecasts from saved models");
    add_config(forecast);
    forecast->add_option("--model-file,model-files", f.model_files, "Model file(s) written by fit");
    forecast->add_option("--horizon", f.horizon, "Days to forecast");
    forecast->add_option("--out", f.out, "Output directory");

    auto* backtest = app.add_subcommand("backtest", "Compare models on a chronological holdout split");
    add_config(backtest);
    add_input(backtest);
    add_target(backtest);
    add_fit_flags(backtest);
    backtest->add_option("--test-fraction", f.test_fraction, "Share of the series held out for testing");

    auto* plotdata = app.add_subcommand("plotdata", "Merge observations and forecasts into one tidy CSV");
    add_config(plotdata);
    add_input(plotdata);
    add_target(plotdata);
    plotdata->add_option("--forecast,forecast-files", f.forecast_files, "Forecast CSV(s) written by forecast");
    plotdata->add_option("--out", f.out, "Output directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            for (auto* sub : app.get_subcommands()) {
                out << sub->help();
            }
            return exit_ok;
        }
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }

    CLI::App* sub = app.get_subcommands().front();
    auto given = [&](const std::string& name) {
        const auto* opt = sub->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };

    try {
        RunConfig config;
        if (sub == backtest) {
            config.grid = "default";
        }
        if (given("--config")) {
            load_config_file(f.config, config);
        }
        if (given("--input")) {
            config.input = f.input;
        }
        if (given("--allow-corrections")) {
            config.allow_corrections = f.allow_corrections;
        }
        if (given("--target")) {
            config.target = parse_target_name(f.target);
        }
        if (given("--model")) {
            config.models.clear();
            for (const auto& m : f.models) {
                config.models.push_back(parse_model_name(m));
            }
        }
        if (given("--grid")) {
            config.grid = f.grid == "none" ? "" : f.grid;
        }
        if (config.grid == "none") {
            config.grid.clear();
        }
        if (given("--seed")) {
            config.seed = f.seed;
        }
        if (given("--validation-fraction")) {
            config.validation_fraction = f.validation_fraction;
        }
        if (given("--test-fraction")) {
            config.test_fraction = f.test_fraction;
        }
        if (given("--threads")) {
            config.threads = f.threads;
        }
        if (given("--horizon")) {
            config.horizon = f.horizon;
        }
        if (given("--out")) {
            config.out = f.out;
        }
        for (const auto& s : f.sets) {
            config.overrides.push_back(parse_override(s));
        }
        config.model_files = f.model_files;
        config.forecast_files = f.forecast_files;

        if (sub == validate) {
            cmd_validate(config, out);
        } else if (sub == fit) {
            cmd_fit(config, out, err);
        } else if (sub == forecast) {
            cmd_forecast(config, out, err);
        } else if (sub == backtest) {
            return cmd_backtest(config, out, err);
        } else {
            cmd_plotdata(config, out);
        }
        return exit_ok;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

} // namespace epiforecast::cli
