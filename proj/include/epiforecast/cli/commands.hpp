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

#include "epiforecast/cli/config.hpp"

#include <exception>
#include <ostream>
#include <string>
#include <vector>

namespace epiforecast::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_data = 2;
inline constexpr int exit_model = 3;

inline constexpr int report_schema_version = 1;

/// Maps an exception from a command to its exit status.
int exit_code_for(const std::exception& e);

// Each command writes its normal output to `out` and diagnostics to `err`,
// and throws on failure.
void cmd_validate(const RunConfig& config, std::ostream& out);
void cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_forecast(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Returns exit_model when every model failed, exit_ok otherwise.
int cmd_backtest(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_plotdata(const RunConfig& config, std::ostream& out);

/// Output paths used by the commands.
std::string model_path(const RunConfig& config, ForecasterKind kind, Target target);
std::string forecast_path(const std::string& out_dir, const std::string& model, const std::string& target);
std::string report_path(const RunConfig& config, const std::string& extension);
std::string plot_path(const RunConfig& config, const std::string& target);

/// Aligned text table: rows Train Score, Test Score, MSE Train, MSE Test; one column per model.
std::string format_report_table(const BacktestReport& report);
std::string report_json(const BacktestReport& report, Target target);

/// Full command line entry point; returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace epiforecast::cli
