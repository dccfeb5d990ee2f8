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

#ifndef UOI_TOOLS_CONFIG_HPP_
#define UOI_TOOLS_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "uoi/belief_mdp.hpp"
#include "uoi/lagrange.hpp"
#include "uoi/simulator.hpp"
#include "uoi/solvers.hpp"

namespace uoi::tools {

inline constexpr int kSchemaVersion = 1;

// Invalid or inconsistent configuration. `field` is a JSON-pointer-like path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct BanditConfig {
  std::string label;
  // Row r, column c holds P(next = r | current = c).
  std::vector<std::vector<double>> transition;
  double rho = 1.0;
  std::optional<std::vector<double>> initial_belief;

  bool operator==(const BanditConfig&) const = default;
};

struct TruncationConfig {
  enum class Mode { kFixed, kAuto };
  Mode mode = Mode::kAuto;
  int l = 0;
  double eta_target = 1e-6;
  int l_max = kDefaultMaxTruncation;

  bool operator==(const TruncationConfig&) const = default;
};

struct GradientConfig {
  std::optional<double> c;
  std::optional<double> epsilon;
  int max_iters = 5000;

  bool operator==(const GradientConfig&) const = default;
};

struct SimulationConfig {
  int runs = 50;
  int horizon = 100000;
  std::uint64_t seed = 1;
  double burn_in = kDefaultBurnInFraction;

  bool operator==(const SimulationConfig&) const = default;
};

struct SweepConfig {
  // Class proportions for the asymptotic sweep, one per bandit.
  std::vector<double> proportions;
  std::optional<double> alpha;
  std::vector<int> m_list;

  bool operator==(const SweepConfig&) const = default;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  Criterion criterion = Criterion::kDiscounted;
  double beta = 0.9;
  std::vector<BanditConfig> bandits;
  int m = 1;
  TruncationConfig truncation;
  GradientConfig gradient;
  SimulationConfig simulation;
  std::optional<SweepConfig> sweep;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

// Strict parsing: unknown keys, wrong types and out-of-range values throw
// ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& config);

// FNV-1a 64 of the canonical JSON of `config`, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::string to_string(Criterion criterion);

// Model objects built from a configuration.
struct BuiltBandit {
  TruncatedBeliefMDP mdp;
  TruncationDiagnostics diagnostics;
  int initial_state = TruncatedBeliefMDP::kEquilibriumIndex;
};

// Validates chains and truncation; errors are reported as ConfigError naming
// the bandit.
std::vector<BuiltBandit> build_bandits(const ExperimentConfig& config);

LagrangeProblem make_problem(const ExperimentConfig& config,
                             const std::vector<BuiltBandit>& bandits);

RMABInstance make_instance(const ExperimentConfig& config,
                           const std::vector<BuiltBandit>& bandits);

}  // namespace uoi::tools

#endif  // UOI_TOOLS_CONFIG_HPP_
