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
#include "epiforecast/data.hpp"

#include "epiforecast/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace epiforecast {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    while (true) {
        const auto comma = line.find(',', begin);
        out.push_back(trim(line.substr(begin, comma == std::string_view::npos ? std::string_view::npos : comma - begin)));
        if (comma == std::string_view::npos) {
            break;
        }
        begin = comma + 1;
    }
    return out;
}

std::optional<std::int64_t> parse_count(std::string_view text)
{
    std::int64_t value = 0;
    if (text.empty()) {
        return std::nullopt;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

} // namespace

std::string_view to_string(Target target)
{
    switch (target) {
    case Target::confirmed:
        return "confirmed";
    case Target::deaths:
        return "deaths";
    case Target::recovered:
        return "recovered";
    }
    return "unknown";
}

std::optional<Target> parse_target(std::string_view name)
{
    const auto n = lower(name);
    if (n == "confirmed") {
        return Target::confirmed;
    }
    if (n == "deaths") {
        return Target::deaths;
    }
    if (n == "recovered") {
        return Target::recovered;
    }
    return std::nullopt;
}

std::int64_t DailyRecord::value(Target target) const
{
    switch (target) {
    case Target::confirmed:
        return confirmed;
    case Target::deaths:
        return deaths;
    case Target::recovered:
        return recovered;
    }
    return 0;
}

EpidemicDataset::EpidemicDataset(std::vector<DailyRecord> records, ParseOptions options)
    : records_(std::move(records)), allow_corrections_(options.allow_corrections)
{
    if (records_.empty()) {
        throw StructuralError("empty dataset");
    }
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& r = records_[i];
        if (r.confirmed < 0 || r.deaths < 0 || r.recovered < 0) {
            throw ValidationError(fmt::format("negative count on {}", format_date(r.date)));
        }
        if (i == 0) {
            continue;
        }
        const auto step = days_between(records_[i - 1].date, r.date);
        if (step == 0) {
            throw StructuralError(fmt::format("duplicate date {}", format_date(r.date)));
        }
        if (step < 0) {
            throw StructuralError(fmt::format("dates out of order at {}", format_date(r.date)));
        }
        if (step > 1) {
            throw StructuralError(fmt::format("date gap: {} missing", format_date(add_days(records_[i - 1].date, 1))));
        }
    }
    if (!allow_corrections_) {
        for (auto target : {Target::confirmed, Target::deaths, Target::recovered}) {
            const auto bad = decreases(target);
            if (!bad.empty()) {
                throw ValidationError(fmt::format("{} decreases on {}", to_string(target), format_date(bad.front())));
            }
        }
    }
}

std::vector<Date> EpidemicDataset::decreases(Target target) const
{
    std::vector<Date> out;
    for (std::size_t i = 1; i < records_.size(); ++i) {
        if (records_[i].value(target) < records_[i - 1].value(target)) {
            out.push_back(records_[i].date);
        }
    }
    return out;
}

EpidemicDataset parse_csv(std::istream& in, ParseOptions options)
{
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::array<std::size_t, 4>> columns; // date, confirmed, deaths, recovered
    std::size_t arity = 0;
    std::vector<DailyRecord> records;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (!columns) {
            std::array<std::size_t, 4> idx{};
            std::array<bool, 4> seen{};
            constexpr std::array<std::string_view, 4> names{"date", "confirmed", "deaths", "recovered"};
            for (std::size_t c = 0; c < fields.size(); ++c) {
                const auto name = lower(fields[c]);
                for (std::size_t k = 0; k < names.size(); ++k) {
                    if (name == names[k]) {
                        if (seen[k]) {
                            throw ParseError(line_no, fmt::format("duplicate column '{}'", names[k]));
                        }
                        seen[k] = true;
                        idx[k] = c;
                    }
                }
            }
            for (std::size_t k = 0; k < names.size(); ++k) {
                if (!seen[k]) {
                    throw ParseError(line_no, fmt::format("header is missing column '{}'", names[k]));
                }
            }
            columns = idx;
            arity = fields.size();
            continue;
        }
        if (fields.size() != arity) {
            throw ParseError(line_no, fmt::format("expected {} fields, found {}", arity, fields.size()));
        }
        const auto& idx = *columns;
        const auto date = parse_date(fields[idx[0]]);
        if (!date) {
            throw ParseError(line_no, fmt::format("unparseable date '{}'", fields[idx[0]]));
        }
        DailyRecord rec{*date};
        std::int64_t* slots[3] = {&rec.confirmed, &rec.deaths, &rec.recovered};
        for (std::size_t k = 0; k < 3; ++k) {
            const auto value = parse_count(fields[idx[k + 1]]);
            if (!value) {
                throw ParseError(line_no, fmt::format("unparseable count '{}'", fields[idx[k + 1]]));
            }
            *slots[k] = *value;
        }
        records.push_back(rec);
    }
    if (!columns) {
        throw StructuralError("empty dataset: no header row");
    }
    return EpidemicDataset(std::move(records), options);
}

EpidemicDataset parse_csv_text(std::string_view text, ParseOptions options)
{
    std::istringstream in{std::string(text)};
    return parse_csv(in, options);
}

EpidemicDataset load_csv(const std::string& path, ParseOptions options)
{
    std::ifstream in(path);
    if (!in) {
        throw StructuralError(fmt::format("cannot open '{}'", path));
    }
    return parse_csv(in, options);
}

Series::Series(std::vector<double> values, Date start_date, SeriesKind kind, ScaleState scale_state,
               bool allow_corrections)
    : values_(std::move(values)), start_date_(start_date), kind_(kind), scale_state_(scale_state),
      allow_corrections_(allow_corrections)
{
    if (values_.empty()) {
        throw ContractError("series must be non-empty");
    }
    if (kind_ == SeriesKind::cumulative && scale_state_ == ScaleState::raw && !allow_corrections_) {
        for (std::size_t i = 1; i < values_.size(); ++i) {
            if (values_[i] < values_[i - 1]) {
                throw ValidationError(fmt::format("cumulative series decreases on {}",
                                                  format_date(add_days(start_date_, static_cast<long long>(i)))));
            }
        }
    }
}

Series Series::slice(std::size_t offset, std::size_t length) const
{
    if (length == 0 || offset + length > values_.size()) {
        throw ContractError("slice out of range");
    }
    std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(offset),
                          values_.begin() + static_cast<std::ptrdiff_t>(offset + length));
    return Series(std::move(v), add_days(start_date_, static_cast<long long>(offset)), kind_, scale_state_,
                  allow_corrections_);
}

Series Series::with_values(std::vector<double> values, ScaleState state) const
{
    return Series(std::move(values), start_date_, kind_, state, allow_corrections_);
}

Series make_series(std::vector<double> values, SeriesKind kind, ScaleState state)
{
    using namespace std::chrono;
    return Series(std::move(values), Date{year{2020} / January / 1}, kind, state);
}

Series extract_series(const EpidemicDataset& ds, Target target)
{
    std::vector<double> v;
    v.reserve(ds.size());
    for (const auto& r : ds.records()) {
        v.push_back(static_cast<double>(r.value(target)));
    }
    return Series(std::move(v), ds.first_date(), SeriesKind::cumulative, ScaleState::raw, ds.allows_corrections());
}

Series cumulative_to_incident(const Series& s)
{
    if (s.kind() != SeriesKind::cumulative) {
        throw ContractError("cumulative_to_incident needs a cumulative series");
    }
    const auto& in = s.values();
    std::vector<double> out(in.size());
    out[0] = in[0];
    for (std::size_t t = 1; t < in.size(); ++t) {
        out[t] = in[t] - in[t - 1];
        if (s.allows_corrections() && out[t] < 0.0) {
            out[t] = 0.0;
        }
    }
    return Series(std::move(out), s.start_date(), SeriesKind::incident, s.scale_state(), s.allows_corrections());
}

Series incident_to_cumulative(const Series& s)
{
    if (s.kind() != SeriesKind::incident) {
        throw ContractError("incident_to_cumulative needs an incident series");
    }
    const auto& in = s.values();
    std::vector<double> out(in.size());
    double running = 0.0;
    for (std::size_t t = 0; t < in.size(); ++t) {
        running += in[t];
        out[t] = running;
    }
    return Series(std::move(out), s.start_date(), SeriesKind::cumulative, s.scale_state(), s.allows_corrections());
}

std::pair<Series, Series> train_test_split(const Series& s, double test_fraction)
{
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ContractError(fmt::format("test fraction {} outside (0, 1)", test_fraction));
    }
    const auto n = s.size();
    const auto test_len = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * test_fraction)));
    if (test_len >= n) {
        throw ContractError(fmt::format("series of length {} too short to split", n));
    }
    return {s.slice(0, n - test_len), s.slice(n - test_len, test_len)};
}

} // namespace epiforecast
