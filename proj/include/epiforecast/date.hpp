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

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace epiforecast {

using Date = std::chrono::sys_days;

/// Parses a strict YYYY-MM-DD calendar date.
std::optional<Date> parse_date(std::string_view text);

std::string format_date(Date date);

inline Date add_days(Date date, long long days) { return date + std::chrono::days{days}; }

inline long long days_between(Date from, Date to) { return (to - from).count(); }

/// 0 = Monday ... 6 = Sunday.
int weekday_index(Date date);

} // namespace epiforecast
