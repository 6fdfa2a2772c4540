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
#include "epiforecast/transform.hpp"

#include "epiforecast/error.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace epiforecast {

std::vector<double> MinMaxScaler::scale(std::span<const double> xs) const
{
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return scale(x); });
    return out;
}

std::vector<double> MinMaxScaler::inverse(std::span<const double> xs) const
{
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return inverse(x); });
    return out;
}

MinMaxScaler fit_scaler(const Series& s)
{
    const auto [lo, hi] = std::minmax_element(s.values().begin(), s.values().end());
    if (!(*hi > *lo)) {
        throw DegenerateScaleError(fmt::format("constant series (value {}) cannot be min-max scaled", *lo));
    }
    return {*lo, *hi};
}

Series scale(const MinMaxScaler& scaler, const Series& s)
{
    return s.with_values(scaler.scale(s.view()), ScaleState::normalized);
}

Series inverse_scale(const MinMaxScaler& scaler, const Series& s)
{
    return s.with_values(scaler.inverse(s.view()), ScaleState::raw);
}

std::vector<double> difference_values(std::span<const double> values, int d)
{
    std::vector<double> cur(values.begin(), values.end());
    for (int pass = 0; pass < d; ++pass) {
        for (std::size_t t = 0; t + 1 < cur.size(); ++t) {
            cur[t] = cur[t + 1] - cur[t];
        }
        if (!cur.empty()) {
            cur.pop_back();
        }
    }
    return cur;
}

std::pair<Series, DifferenceState> difference(const Series& s, int d)
{
    if (d < 0 || static_cast<std::size_t>(d) >= s.size()) {
        throw ContractError(fmt::format("cannot difference a series of length {} {} times", s.size(), d));
    }
    DifferenceState state{d, {}, s.kind()};
    std::vector<double> cur = s.values();
    for (int pass = 0; pass < d; ++pass) {
        state.heads.push_back(cur.front());
        cur = difference_values(cur, 1);
    }
    const auto kind = d == 0 ? s.kind() : SeriesKind::incident;
    Series out(std::move(cur), add_days(s.start_date(), d), kind, s.scale_state(), s.allows_corrections());
    return {std::move(out), std::move(state)};
}

Series integrate(const Series& diffed, const DifferenceState& state)
{
    if (state.order < 0 || state.heads.size() != static_cast<std::size_t>(state.order)) {
        throw ContractError("difference state is inconsistent with its order");
    }
    std::vector<double> cur = diffed.values();
    for (int pass = state.order - 1; pass >= 0; --pass) {
        std::vector<double> up(cur.size() + 1);
        up[0] = state.heads[static_cast<std::size_t>(pass)];
        for (std::size_t t = 0; t < cur.size(); ++t) {
            up[t + 1] = up[t] + cur[t];
        }
        cur = std::move(up);
    }
    const auto kind = state.order == 0 ? diffed.kind() : state.source_kind;
    return Series(std::move(cur), add_days(diffed.start_date(), -state.order), kind, diffed.scale_state(),
                  diffed.allows_corrections());
}

std::vector<double> integrate_forecast(std::span<const double> last_levels, int d, std::span<const double> diffs)
{
    if (d < 0 || last_levels.size() < static_cast<std::size_t>(d)) {
        throw ContractError(fmt::format("need at least {} trailing levels to integrate", d));
    }
    const auto tail = last_levels.subspan(last_levels.size() - static_cast<std::size_t>(d));
    std::vector<double> cur(diffs.begin(), diffs.end());
    for (int level = d - 1; level >= 0; --level) {
        const auto lv = difference_values(tail, level);
        double running = lv.back();
        for (auto& x : cur) {
            running += x;
            x = running;
        }
    }
    return cur;
}

WindowSet make_windows(std::span<const double> values, int w)
{
    const auto n = static_cast<long>(values.size());
    if (w < 1 || w >= n) {
        throw ContractError(fmt::format("window {} invalid for series of length {}", w, n));
    }
    WindowSet ws;
    ws.window = w;
    ws.inputs.resize(n - w, w);
    ws.targets.resize(n - w);
    for (long i = 0; i < n - w; ++i) {
        for (long j = 0; j < w; ++j) {
            ws.inputs(i, j) = values[static_cast<std::size_t>(i + j)];
        }
        ws.targets(i) = values[static_cast<std::size_t>(i + w)];
    }
    return ws;
}

} // namespace epiforecast
