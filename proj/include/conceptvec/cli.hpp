// Copyright 2026 The conceptvec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace conceptvec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Summary emitted once per CLI run.
struct RunReport {
  std::string command;
  std::string status = "ok";
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> metrics;
  double wall_seconds = 0;

  void add_config(std::string key, std::string value) { config.emplace_back(std::move(key), std::move(value)); }
  void add_metric(std::string key, std::string value) { metrics.emplace_back(std::move(key), std::move(value)); }
  void add_metric(std::string key, double value);
  void add_metric(std::string key, std::size_t value) { add_metric(std::move(key), std::to_string(value)); }

  /// Aligned, human-oriented block.
  void write_human(std::ostream& out) const;

  /// One `key=value` per line: command, status, config.*, metric.*, wall_time.
  void write_machine(std::ostream& out) const;
};

/// Runs one command line (without the program name). The machine-readable
/// report goes to `out`, the human-readable one and diagnostics to `err`.
/// Returns 0 on success, 1 on usage errors, 2 on data/format errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conceptvec::cli
