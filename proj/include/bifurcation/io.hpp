// Copyright 2026 The bifurcation-lab Authors
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

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bifurcation/mc.hpp"

namespace bifurcation {

/// "%.17g": round-trip exact decimal rendering.
std::string format_double(double v);

/// Header `y,outcome,weight,p_plus,log_w`; outcome is +1 or -1.
void write_records_csv(std::ostream& os, std::span<const TransitionRecord> records);

nlohmann::json config_to_json(const SimConfig& config);
/// Inverse of config_to_json. Throws std::invalid_argument on malformed input.
SimConfig config_from_json(const nlohmann::json& j);

/// born_plus, born_ci, ks_stat or chi2_stat, mean_w, accepted_count, config_echo, ...
nlohmann::json summary_json(const SimResult& result, const SimConfig& config);

struct RunManifest {
  std::string command;
  nlohmann::json config_echo;
  std::string tool_version;
  std::string timestamp;  // ISO-8601 UTC
  std::vector<std::string> output_paths;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

std::string tool_version();
std::string utc_timestamp();

/// Writes to a sibling temporary file and renames it into place, so a failed
/// write never leaves a partial file at `path`.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace bifurcation
