// Copyright 2026 The gain-index Authors. All rights reserved.
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

#ifndef UOI_TOOLS_IO_HPP_
#define UOI_TOOLS_IO_HPP_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "uoi/index_policy.hpp"
#include "uoi/lagrange.hpp"
#include "uoi/oracle.hpp"
#include "uoi/simulator.hpp"

namespace uoi::tools {

// Observed states are written one-based; the equilibrium state is k = n = 0.
nlohmann::json table_to_json(const GainIndexTable& table,
                             const TruncatedBeliefMDP& mdp,
                             const std::string& config_hash);

// Throws ConfigError on schema violations.
GainIndexTable table_from_json(const nlohmann::json& doc,
                               const std::string& source);
GainIndexTable load_table(const std::filesystem::path& path);

nlohmann::json sim_to_json(const SimResult& result,
                           const std::string& config_hash);
// Header comment line, column names, one summary row.
std::string sim_to_csv(const SimResult& result,
                       const std::string& config_hash);

std::string trace_to_csv(const GradientTrace& trace,
                         const std::string& config_hash);

nlohmann::json sweep_to_json(const AsymptoticSweep& sweep,
                             const std::string& config_hash);
std::string sweep_to_csv(const AsymptoticSweep& sweep,
                         const std::string& config_hash);

// Shortest text that parses back to the same double.
std::string format_double(double x);

// Pretty-printed JSON with a trailing newline.
std::string dump(const nlohmann::json& doc);

// Creates parent directories and replaces the file.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace uoi::tools

#endif  // UOI_TOOLS_IO_HPP_
