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

#include "epiforecast/date.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace epiforecast {

enum class Target { confirmed, deaths, recovered };

std::string_view to_string(Target target);
std::optional<Target> parse_target(std::string_view name);

struct DailyRecord {
    Date date;
    std::int64_t confirmed = 0;
    std::int64_t deaths = 0;
    std::int64_t recovered = 0;

    std::int64_t value(Target target) const;
};

struct ParseOptions {
    /// Accept decreasing cumulative counts (reporting corrections).
    bool allow_corrections = false;
};

/**
 * Daily cumulative counts, one record per calendar day.
 *
 * Invariants checked on construction: at least one record, dates advance by
 * exactly one day, counts are non-negative, and every column is
 * non-decreasing unless corrections are allowed.
 */
class EpidemicDataset {
public:
    explicit EpidemicDataset(std::vector<DailyRecord> records, ParseOptions options = {});

    const std::vector<DailyRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    Date first_date() const { return records_.front().date; }
    Date last_date() const { return records_.back().date; }
    bool allows_corrections() const { return allow_corrections_; }

    /// Dates at which `target` decreases relative to the previous day.
    std::vector<Date> decreases(Target target) const;

private:
    std::vector<DailyRecord> records_;
    bool allow_corrections_ = false;
};

EpidemicDataset parse_csv(std::istream& in, ParseOptions options = {});
EpidemicDataset parse_csv_text(std::string_view text, ParseOptions options = {});
EpidemicDataset load_csv(const std::string& path, ParseOptions options = {});

enum class SeriesKind { cumulative, incident };
enum class ScaleState { raw, normalized };

/**
 * A univariate, evenly daily spaced sequence.
 *
 * The constructor enforces: non-empty, and non-decreasing values when the
 * series is cumulative, raw and `allow_corrections` is off.
 */
class Series {
public:
    Series(std::vector<double> values, Date start_date, SeriesKind kind = SeriesKind::incident,
           ScaleState scale_state = ScaleState::raw, bool allow_corrections = false);

    const std::vector<double>& values() const { return values_; }
    std::span<const double> view() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    Date start_date() const { return start_date_; }
    Date end_date() const { return add_days(start_date_, static_cast<long long>(values_.size()) - 1); }
    SeriesKind kind() const { return kind_; }
    ScaleState scale_state() const { return scale_state_; }
    bool allows_corrections() const { return allow_corrections_; }

    /// Contiguous sub-range; the start date moves with the offset.
    Series slice(std::size_t offset, std::size_t length) const;

    /// Same start date and kind, new values and scale state.
    Series with_values(std::vector<double> values, ScaleState state) const;

private:
    std::vector<double> values_;
    Date start_date_;
    SeriesKind kind_;
    ScaleState scale_state_;
    bool allow_corrections_;
};

/// Series starting on an arbitrary fixed date; handy for synthetic data.
Series make_series(std::vector<double> values, SeriesKind kind = SeriesKind::incident,
                   ScaleState state = ScaleState::raw);

Series extract_series(const EpidemicDataset& ds, Target target);

/// First differences with out[0] = in[0]. Negative increments are clamped to
/// zero when the series allows corrections.
Series cumulative_to_incident(const Series& s);

/// Running sum; inverse of cumulative_to_incident.
Series incident_to_cumulative(const Series& s);

/// Chronological split; test length is round(n * test_fraction), at least 1.
std::pair<Series, Series> train_test_split(const Series& s, double test_fraction = 0.2);

} // namespace epiforecast
