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
#include "epiforecast/cli/commands.hpp"
#include "epiforecast/forecasters/additive.hpp"
#include "epiforecast/forecasters/arima.hpp"
#include "epiforecast/forecasters/autoreg.hpp"
#include "epiforecast/forecasters/lstm.hpp"
#include "epiforecast/forecasters/mlp.hpp"
#include "epiforecast/metrics.hpp"
#include "oracles.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

using namespace epiforecast;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    std::function<Verdict()> check;
};

const std::string dataset = testing::data_file("iran_covid19.csv");

Series iran(Target t) { return extract_series(load_csv(dataset), t); }

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_err(double got, double want)
{
    if (got == want) {
        return 0.0;
    }
    return std::abs(got - want) / std::max(std::abs(want), std::numeric_limits<double>::min());
}

std::string scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("epiforecast_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::vector<std::string>& args, std::string* out = nullptr)
{
    std::ostringstream o;
    std::ostringstream e;
    const int code = cli::run(args, o, e);
    if (out) {
        *out = o.str();
    }
    if (code != 0) {
        std::cerr << e.str();
    }
    return code;
}

// 1. Metric oracles, evaluated in long double.
Verdict metric_oracles()
{
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(20210312);
    double worst = 0.0;
    for (int pair = 0; pair < 1000; ++pair) {
        const auto n = 1 + rng.below(50);
        const auto y = testing::uniform_vector(rng, n, 1.0, 1000.0);
        const auto yhat = testing::uniform_vector(rng, n, 1.0, 1000.0);
        const auto train = testing::uniform_vector(rng, 2 + rng.below(30), 1.0, 1000.0);
        long double se = 0;
        long double ape = 0;
        long double ae = 0;
        long double mean = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const long double d = static_cast<long double>(y[i]) - yhat[i];
            se += d * d;
            ae += std::fabs(d);
            ape += std::fabs(d) / std::fabs(static_cast<long double>(y[i]));
            mean += y[i];
        }
        mean /= n;
        long double sst = 0;
        for (double v : y) {
            sst += (v - mean) * (v - mean);
        }
        long double naive = 0;
        for (std::size_t t = 1; t < train.size(); ++t) {
            naive += std::fabs(static_cast<long double>(train[t]) - train[t - 1]);
        }
        naive /= static_cast<long double>(train.size() - 1);
        const long double mse = se / n;
        worst = std::max(worst, rel_err(metrics::mse(y, yhat), static_cast<double>(mse)));
        worst = std::max(worst, rel_err(metrics::rmse(y, yhat), static_cast<double>(std::sqrt(mse))));
        worst = std::max(worst, rel_err(metrics::mape(y, yhat), static_cast<double>(100 * ape / n)));
        worst = std::max(worst, rel_err(metrics::mase(y, yhat, train), static_cast<double>(ae / n / naive)));
        if (n > 1) {
            worst = std::max(worst, rel_err(metrics::fit_score(y, yhat), static_cast<double>(1 - se / sst)));
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && secs < 1.0,
            fmt::format("max relative error {:.3g} over 1000 pairs (limit 1e-12), {:.3f} s (limit 1 s)", worst, secs)};
}

// 2. Gradient checks.
template <class Params, class Loss>
double probe_gradient(Params params, const Params& grad, Loss loss, Rng& rng, int probes)
{
    const double eps = 1e-5;
    auto g = grad;
    double worst = 0.0;
    for (int k = 0; k < probes; ++k) {
        const auto idx = static_cast<std::size_t>(rng.below(parameter_count(params)));
        const double saved = parameter_at(params, idx);
        parameter_at(params, idx) = saved + eps;
        const double up = loss(params);
        parameter_at(params, idx) = saved - eps;
        const double down = loss(params);
        parameter_at(params, idx) = saved;
        const double fd = (up - down) / (2 * eps);
        const double an = parameter_at(g, idx);
        worst = std::max(worst, std::abs(an - fd) / std::max(1.0, std::abs(an)));
    }
    return worst;
}

Verdict gradient_checks()
{
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(7);
    const auto z = testing::normalized_series(testing::simulate_arma(0.3, {0.6}, {}, 0.1, 60, 7));

    LstmConfig lc;
    lc.num_units = 6;
    lc.window = 7;
    auto lp = init_lstm_parameters(lc, 1, rng);
    for (std::size_t i = 0; i < parameter_count(lp); ++i) {
        parameter_at(lp, i) += rng.uniform(-0.3, 0.3);
    }
    const auto ws = make_windows(z, 7);
    auto lstm_loss = [&](const LstmParameters& p) {
        const auto c = lstm_forward_batch(ws.inputs, p);
        return (c.predictions.transpose() - ws.targets).squaredNorm();
    };
    const auto cache = lstm_forward_batch(ws.inputs, lp);
    const Eigen::RowVectorXd d_pred = 2.0 * (cache.predictions - ws.targets.transpose());
    const double lstm_worst = probe_gradient(lp, lstm_backward(cache, lp, d_pred), lstm_loss, rng, 50);

    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    mlp_features(z.view(), z.start_date(), 7, true, x, y);
    auto mp = init_mlp_parameters(static_cast<int>(x.cols()), 8, rng);
    for (std::size_t i = 0; i < parameter_count(mp); ++i) {
        parameter_at(mp, i) += rng.uniform(-0.3, 0.3);
    }
    auto mlp_loss = [&](const MlpParameters& p) { return (mlp_predict(p, x) - y).squaredNorm() / x.rows(); };
    const double mlp_worst = probe_gradient(mp, mlp_loss_gradient(mp, x, y).second, mlp_loss, rng, 50);

    const double secs = seconds_since(t0);
    return {lstm_worst < 1e-4 && mlp_worst < 1e-4 && secs < 10.0,
            fmt::format("worst relative error LSTM {:.3g}, MLP {:.3g} over 50 probes each (limit 1e-4), {:.2f} s",
                        lstm_worst, mlp_worst, secs)};
}

// 3. Parameter recovery.
Verdict parameter_recovery()
{
    const auto t0 = std::chrono::steady_clock::now();
    int ar_ok = 0;
    int arima_ok = 0;
    int ma_ok = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto ar = testing::simulate_arma(0.0, {0.6, -0.3}, {}, 0.01, 1000, 100 + seed);
        const auto fa = fit_autoreg(testing::normalized_series(ar), ArOrder{2});
        const auto& pa = std::get<ArParameters>(fa.parameters).coefficients;
        ar_ok += std::abs(pa[0] - 0.6) <= 0.05 && std::abs(pa[1] + 0.3) <= 0.05;

        const auto ari = testing::simulate_arima1(0.0, {0.7}, {}, 0.02, 500, 200 + seed);
        const auto fb = fit_arima(testing::normalized_series(ari), ArimaOrder{1, 1, 0});
        arima_ok += std::abs(std::get<ArimaParameters>(fb.parameters).ar[0] - 0.7) <= 0.07;

        const auto ma = testing::simulate_arma(0.0, {}, {0.5}, 1.0, 1000, 300 + seed);
        const auto fc = fit_arima(testing::normalized_series(ma), ArimaOrder{0, 0, 1});
        ma_ok += std::abs(std::get<ArimaParameters>(fc.parameters).ma[0] - 0.5) <= 0.08;
    }
    const double secs = seconds_since(t0);
    return {ar_ok >= 18 && arima_ok >= 18 && ma_ok >= 18 && secs < 60.0,
            fmt::format("AR(2) {}/20, ARIMA(1,1,0) {}/20, MA(1) {}/20 within tolerance (need 18/20 each), {:.2f} s",
                        ar_ok, arima_ok, ma_ok, secs)};
}

// 4. Order selection.
Verdict order_selection()
{
    const auto t0 = std::chrono::steady_clock::now();
    int d_ok = 0;
    int p_ok = 0;
    std::string picks;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto y = testing::simulate_arima1(0.0, {0.7}, {}, 0.02, 500, 400 + seed);
        const auto s = testing::normalized_series(y);
        const auto sel = grid_search_arima(s.slice(0, 400), s.slice(400, 100), 3, 3);
        d_ok += sel.order.d == 1;
        p_ok += sel.order.p == 1 || sel.order.p == 2;
        picks += fmt::format(" ({},{},{})", sel.order.p, sel.order.d, sel.order.q);
    }
    const double secs = seconds_since(t0);
    return {d_ok >= 18 && p_ok >= 16 && secs < 120.0,
            fmt::format("d = 1 in {}/20 (need 18), p in {{1,2}} in {}/20 (need 16), {:.2f} s; selected{}", d_ok, p_ok,
                        secs, picks)};
}

// 5. Model equivalences.
Verdict equivalences()
{
    double arima_vs_ar = 0.0;
    for (int p = 1; p <= 5; ++p) {
        const auto z = testing::simulate_arma(0.05, {0.5, -0.2, 0.1}, {}, 0.1, 400, 500 + static_cast<unsigned>(p));
        const auto s = testing::normalized_series(z);
        const auto& a = std::get<ArParameters>(fit_autoreg(s, ArOrder{p}).parameters);
        const auto& b = std::get<ArimaParameters>(fit_arima(s, ArimaOrder{p, 0, 0}).parameters);
        arima_vs_ar = std::max(arima_vs_ar, std::abs(a.intercept - b.intercept));
        for (std::size_t i = 0; i < a.coefficients.size(); ++i) {
            arima_vs_ar = std::max(arima_vs_ar, std::abs(a.coefficients[i] - b.ar[i]));
        }
    }

    double additive_vs_ols = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto z = testing::simulate_arma(0.0, {0.5}, {}, 0.1, 150, 600 + seed);
        std::vector<double> y;
        for (std::size_t i = 0; i < z.size(); ++i) {
            y.push_back(0.1 + 0.004 * static_cast<double>(i) + z[i]);
        }
        AdditiveConfig cfg;
        cfg.n_changepoints = 0;
        cfg.fourier_order = 0;
        const auto& beta =
            std::get<AdditiveParameters>(fit_additive(testing::normalized_series(y), cfg).parameters).coefficients;
        long double st = 0;
        long double sy = 0;
        const auto n = static_cast<long double>(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            st += i;
            sy += y[i];
        }
        const long double tbar = st / n;
        const long double ybar = sy / n;
        long double sxy = 0;
        long double sxx = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            sxy += (i - tbar) * (y[i] - ybar);
            sxx += (i - tbar) * (i - tbar);
        }
        const long double slope = sxy / sxx;
        additive_vs_ols = std::max(additive_vs_ols, static_cast<double>(std::fabs(beta(1) - slope)));
        additive_vs_ols = std::max(additive_vs_ols, static_cast<double>(std::fabs(beta(0) - (ybar - slope * tbar))));
    }

    bool css_exact = true;
    for (int p = 1; p <= 4; ++p) {
        const auto z = testing::simulate_arma(0.02, {0.4, 0.2}, {}, 0.1, 300, 700 + static_cast<unsigned>(p));
        const auto& a = std::get<ArParameters>(fit_autoreg(testing::normalized_series(z), ArOrder{p}).parameters);
        double ssr = 0.0;
        for (std::size_t t = static_cast<std::size_t>(p); t < z.size(); ++t) {
            double pred = a.intercept;
            for (std::size_t i = 0; i < a.coefficients.size(); ++i) {
                pred += a.coefficients[i] * z[t - 1 - i];
            }
            const double e = z[t] - pred;
            ssr += e * e;
        }
        css_exact = css_exact && arima_css_objective({a.intercept, a.coefficients, {}}, z) == ssr;
    }
    return {arima_vs_ar <= 1e-6 && additive_vs_ols <= 1e-10 && css_exact,
            fmt::format("ARIMA(p,0,0) vs AR(p) max diff {:.3g} (limit 1e-6); additive vs OLS {:.3g} (limit 1e-10); "
                        "CSS with q = 0 equals AR sum of squares: {}",
                        arima_vs_ar, additive_vs_ols, css_exact ? "exactly" : "NO")};
}

// 6. Round trips.
Verdict round_trips()
{
    Rng rng(66);
    double scale_worst = 0.0;
    bool diff_exact = true;
    bool cum_exact = true;
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = 3 + rng.below(120);
        const double mag = std::pow(10.0, rng.uniform(0.0, 7.0));
        const auto v = testing::uniform_vector(rng, n, 0.0, mag);
        const auto s = make_series(v);
        const auto sc = fit_scaler(s);
        const auto back = inverse_scale(sc, scale(sc, s));
        for (std::size_t i = 0; i < n; ++i) {
            scale_worst = std::max(scale_worst, std::abs(back[i] - v[i]) / std::max(std::abs(v[i]), sc.max - sc.min));
        }
        std::vector<double> ints(n);
        double level = 0.0;
        for (auto& x : ints) {
            level += static_cast<double>(rng.below(100000));
            x = level;
        }
        for (int d = 0; d <= 2; ++d) {
            const auto [diffed, state] = difference(make_series(ints), d);
            diff_exact = diff_exact && integrate(diffed, state).values() == ints;
        }
        const auto cum = make_series(ints, SeriesKind::cumulative);
        cum_exact = cum_exact && incident_to_cumulative(cumulative_to_incident(cum)).values() == ints;
    }

    const auto s = iran(Target::deaths);
    LstmConfig lstm;
    lstm.num_units = 8;
    lstm.window = 7;
    lstm.epochs = 5;
    MlpConfig mlp;
    mlp.epochs = 100;
    mlp.seasonal = true;
    const std::vector<ForecasterSpec> specs{{AdditiveConfig{}, 1}, {lstm, 2}, {ArOrder{4}, 0}, {ArimaOrder{2, 1, 2}, 0},
                                            {mlp, 3}};
    const auto dir = scratch("roundtrip");
    bool io_exact = true;
    for (const auto& spec : specs) {
        const auto m = fit_model(spec, s);
        const auto path = dir + "/model.json";
        save_model(m, path);
        const auto loaded = load_model(path);
        io_exact = io_exact && forecast_raw(loaded, 180) == forecast_raw(m, 180) &&
                   serialize_model(loaded) == serialize_model(m);
    }
    return {scale_worst <= 1e-12 && diff_exact && io_exact && cum_exact,
            fmt::format("scale/inverse max relative error {:.3g} (limit 1e-12); difference/integrate exact: {}; "
                        "save/load forecasts bit-identical for all five models: {}; cumulative/incident exact: {}",
                        scale_worst, diff_exact, io_exact, cum_exact)};
}

// 7. Directional reproduction of the model ordering.
Verdict table_ordering(unsigned threads, int seeds)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = iran(Target::confirmed);
    EvalProtocol protocol;
    protocol.threads = threads;
    const auto base = compare_models({{"arima", default_grid(ForecasterKind::arima, 0)},
                                      {"autoreg", default_grid(ForecasterKind::autoreg, 0)}},
                                     s, protocol);
    for (const auto& row : base.rows) {
        if (!row.ok) {
            return {false, fmt::format("{} failed: {}", row.name, row.error)};
        }
    }
    const double arima = base.rows[0].metrics.test_mse;
    const double autoreg = base.rows[1].metrics.test_mse;
    std::vector<double> lstm;
    std::string per_seed;
    for (int seed = 1; seed <= seeds; ++seed) {
        const auto r = compare_models({{"lstm", default_grid(ForecasterKind::lstm, static_cast<std::uint64_t>(seed))}},
                                      s, protocol);
        const auto& row = r.rows.front();
        if (!row.ok) {
            return {false, fmt::format("lstm seed {} failed: {}", seed, row.error)};
        }
        lstm.push_back(row.metrics.test_mse);
        per_seed += fmt::format(" {:.5f}", row.metrics.test_mse);
        std::cerr << fmt::format("  lstm seed {}: {} test mse {:.5f} ({:.0f} s elapsed)\n", seed, describe(row.spec),
                                 row.metrics.test_mse, seconds_since(t0));
    }
    std::sort(lstm.begin(), lstm.end());
    const auto m = lstm.size();
    const double median = m % 2 ? lstm[m / 2] : 0.5 * (lstm[m / 2 - 1] + lstm[m / 2]);
    const double secs = seconds_since(t0);
    const bool ordered = median < arima && median < autoreg;
    return {ordered && secs < 900.0,
            fmt::format("median LSTM test MSE {:.5f} over {} seeds (per seed:{}) vs ARIMA {:.5f} ({}) and AutoReg "
                        "{:.5f} ({}); ordering {}; {:.0f} s (limit 900 s)",
                        median, seeds, per_seed, arima, describe(base.rows[0].spec), autoreg,
                        describe(base.rows[1].spec), ordered ? "holds" : "does not hold", secs)};
}

// 8. Horizon contract.
Verdict horizon_contract()
{
    const auto dir = scratch("horizon");
    std::string problems;
    int checked = 0;
    for (const auto* target : {"confirmed", "deaths", "recovered"}) {
        if (run_cli({"fit", "--input", dataset, "--target", target, "--model", "arima", "--grid", "default", "--out",
                     dir}) != 0 ||
            run_cli({"forecast", dir + "/arima_" + target + ".model.json", "--horizon", "180", "--out", dir}) != 0) {
            problems += fmt::format(" {}: command failed;", target);
            continue;
        }
        std::istringstream in(slurp(dir + "/arima_" + target + ".forecast.csv"));
        std::string line;
        std::getline(in, line);
        int rows = 0;
        std::optional<Date> prev = parse_date("2021-03-12");
        bool contiguous = true;
        bool non_negative = true;
        while (std::getline(in, line)) {
            ++rows;
            const auto d = parse_date(line.substr(0, 10));
            contiguous = contiguous && d && *d == add_days(*prev, 1);
            prev = d;
            non_negative = non_negative && std::stod(line.substr(line.rfind(',') + 1)) >= 0.0;
        }
        if (rows != 180 || !contiguous || !non_negative) {
            problems += fmt::format(" {}: {} rows, contiguous {}, non-negative {};", target, rows, contiguous,
                                    non_negative);
        }
        ++checked;
    }
    return {problems.empty() && checked == 3,
            problems.empty() ? "180 contiguous non-negative daily rows for confirmed, deaths and recovered"
                             : "problems:" + problems};
}

// 9. Deaths sanity band.
Verdict deaths_band()
{
    const auto dir = scratch("band");
    std::string detail;
    bool any = false;
    for (const auto* model : {"arima", "autoreg"}) {
        if (run_cli({"fit", "--input", dataset, "--target", "deaths", "--model", model, "--grid", "default", "--out",
                     dir}) != 0 ||
            run_cli({"forecast", dir + "/" + model + "_deaths.model.json", "--horizon", "180", "--out", dir}) != 0) {
            detail += fmt::format(" {} failed;", model);
            continue;
        }
        std::istringstream in(slurp(dir + "/" + model + "_deaths.forecast.csv"));
        std::string line;
        std::string last;
        while (std::getline(in, line)) {
            last = line;
        }
        const double value = std::stod(last.substr(last.rfind(',') + 1));
        const bool inside = value >= 35500.0 && value <= 142000.0;
        any = any || inside;
        detail += fmt::format(" tuned {} gives {:.0f} on {} ({});", model, value, last.substr(0, 10),
                              inside ? "inside" : "outside");
    }
    return {any, "band [35500, 142000] cumulative deaths:" + detail};
}

// 10. Determinism of files and reports.
Verdict determinism()
{
    std::vector<std::string> dirs{scratch("det_a"), scratch("det_b")};
    const std::vector<std::string> files{"arima_deaths.model.json",   "lstm_deaths.model.json",
                                         "mlp_deaths.model.json",     "prophet_deaths.model.json",
                                         "arima_deaths.forecast.csv", "report_deaths.json",
                                         "report_deaths.txt"};
    for (const auto& dir : dirs) {
        const std::vector<std::string> common{"--input", dataset, "--target", "deaths", "--seed", "11", "--out", dir};
        auto with = [&](std::vector<std::string> args) {
            args.insert(args.end(), common.begin(), common.end());
            return args;
        };
        if (run_cli(with({"fit", "--model", "arima", "--grid", "default"})) != 0 ||
            run_cli(with({"fit", "--model", "lstm", "--set", "num_units=8", "--set", "epochs=20"})) != 0 ||
            run_cli(with({"fit", "--model", "mlp", "--grid", "default", "--set", "epochs=100"})) != 0 ||
            run_cli(with({"fit", "--model", "prophet", "--grid", "default"})) != 0 ||
            run_cli({"forecast", dir + "/arima_deaths.model.json", "--out", dir}) != 0 ||
            run_cli(with({"backtest", "--model", "prophet,autoreg,arima,mlp", "--set", "mlp.epochs=100"})) != 0) {
            return {false, "a command failed"};
        }
    }
    std::string differing;
    for (const auto& f : files) {
        const auto a = slurp(dirs[0] + "/" + f);
        if (a.empty() || a != slurp(dirs[1] + "/" + f)) {
            differing += " " + f;
        }
    }
    return {differing.empty(), differing.empty()
                                   ? fmt::format("{} model, forecast and report files byte-identical across two runs",
                                                 files.size())
                                   : "differing or missing:" + differing};
}

// 11. Leakage audit.
Verdict leakage_audit()
{
    const auto s = iran(Target::confirmed);
    const auto [train, test] = train_test_split(s, 0.2);
    std::mutex mu;
    std::map<std::string, std::size_t> calls;
    std::size_t violations = 0;
    auto observer = [&](std::string_view stage, const Series& x) {
        const auto first = days_between(s.start_date(), x.start_date());
        const auto last = days_between(s.start_date(), x.end_date());
        bool bad = first < 0 || last >= static_cast<long long>(train.size());
        for (std::size_t i = 0; !bad && i < x.size(); ++i) {
            bad = x[i] != s[static_cast<std::size_t>(first) + i];
        }
        std::lock_guard lock(mu);
        ++calls[std::string(stage)];
        violations += bad;
    };
    LstmConfig lstm;
    lstm.num_units = 8;
    lstm.epochs = 20;
    std::vector<ForecasterSpec> lstm_grid;
    for (int w : {7, 14}) {
        lstm.window = w;
        lstm_grid.push_back({lstm, 1});
    }
    auto mlp = default_grid(ForecasterKind::mlp, 1);
    for (auto& spec : mlp) {
        std::get<MlpConfig>(spec.hyperparameters).epochs = 100;
    }
    const std::vector<ModelEntry> entries{{"prophet", default_grid(ForecasterKind::additive, 0)},
                                          {"lstm", lstm_grid},
                                          {"autoreg", default_grid(ForecasterKind::autoreg, 0)},
                                          {"arima", default_grid(ForecasterKind::arima, 0)},
                                          {"mlp", mlp}};
    EvalProtocol protocol;
    const auto report = compare_models(entries, s, protocol, observer);

    // A fit that secretly read the test window would change when that window changes.
    auto poisoned = s.values();
    for (std::size_t i = train.size(); i < poisoned.size(); ++i) {
        poisoned[i] = 10.0 * poisoned[i];
    }
    const auto other = compare_models(entries, Series(poisoned, s.start_date(), s.kind()), protocol);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        changed += !(report.rows[i].spec == other.rows[i].spec) ||
                   report.rows[i].test_forecast != other.rows[i].test_forecast;
    }
    std::string stages;
    for (const auto& [stage, n] : calls) {
        stages += fmt::format(" {}={}", stage, n);
    }
    return {violations == 0 && changed == 0 && !calls.empty(),
            fmt::format("{} observed reads outside the training split (stages:{}); {} of {} rows changed when the "
                        "test window was altered",
                        violations, stages, changed, report.rows.size())};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks"};
    std::vector<int> only;
    unsigned threads = 0;
    int seeds = 10;
    app.add_option("--criterion,-c", only, "Run only these criteria (1-11)");
    app.add_option("--threads", threads, "Worker threads for criterion 7 (0: all cores)");
    app.add_option("--seeds", seeds, "LSTM seeds for criterion 7")->check(CLI::Range(1, 1000));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "metric oracles", metric_oracles},
        {2, "gradient checks", gradient_checks},
        {3, "parameter recovery", parameter_recovery},
        {4, "ARIMA order selection", order_selection},
        {5, "model equivalences", equivalences},
        {6, "round trips", round_trips},
        {7, "LSTM below ARIMA and AutoReg on the bundled data", [&] { return table_ordering(threads, seeds); }},
        {8, "180-day horizon contract", horizon_contract},
        {9, "deaths sanity band", deaths_band},
        {10, "determinism", determinism},
        {11, "no-leakage audit", leakage_audit},
    };
    int failures = 0;
    int ran = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) {
            continue;
        }
        ++ran;
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, fmt::format("threw: {}", e.what())};
        }
        failures += !v.pass;
        std::cout << fmt::format("{} criterion {:>2} ({}): {}\n", v.pass ? "PASS" : "FAIL", c.id, c.title, v.detail)
                  << std::flush;
    }
    if (ran == 0) {
        std::cerr << "no criterion selected\n";
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
