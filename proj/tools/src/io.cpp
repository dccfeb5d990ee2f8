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

#include "uoi_tools/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "uoi_tools/config.hpp"

namespace uoi::tools {
namespace {

using nlohmann::json;

std::string csv_header(const std::string& config_hash) {
  return "# schema_version=" + std::to_string(kSchemaVersion) +
         " config_hash=" + config_hash + "\n";
}

const json& need(const json& doc, const std::string& key,
                 const std::string& source) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ConfigError(source, "missing field '" + key + "'");
  }
  return doc.at(key);
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

json table_to_json(const GainIndexTable& table, const TruncatedBeliefMDP& mdp,
                   const std::string& config_hash) {
  json states = json::array();
  for (int s = 0; s < table.n_states(); ++s) {
    const auto [k, n] = mdp.label_of(s);
    const Eigen::VectorXd& x = mdp.states()[s].probs;
    states.push_back({{"k", k + 1},
                      {"n", n},
                      {"belief", std::vector<double>(x.data(),
                                                     x.data() + x.size())},
                      {"index", table.indices[s]},
                      {"value", table.values[s]}});
  }
  return {{"schema_version", kSchemaVersion},
          {"config_hash", config_hash},
          {"bandit_label", table.bandit_label},
          {"criterion", to_string(table.criterion)},
          {"discount", table.discount},
          {"lambda_star", table.lambda_star},
          {"truncation_L", table.truncation_l},
          {"states", std::move(states)}};
}

GainIndexTable table_from_json(const json& doc, const std::string& source) {
  try {
    const int version = need(doc, "schema_version", source).get<int>();
    if (version != kSchemaVersion) {
      throw ConfigError(source, "unsupported schema_version " +
                                    std::to_string(version));
    }
    GainIndexTable t;
    t.bandit_label = need(doc, "bandit_label", source).get<std::string>();
    const std::string crit = need(doc, "criterion", source).get<std::string>();
    if (crit != "discounted" && crit != "average") {
      throw ConfigError(source, "unknown criterion '" + crit + "'");
    }
    t.criterion =
        crit == "discounted" ? Criterion::kDiscounted : Criterion::kAverage;
    t.discount = need(doc, "discount", source).get<double>();
    t.lambda_star = need(doc, "lambda_star", source).get<double>();
    t.truncation_l = need(doc, "truncation_L", source).get<int>();
    const json& states = need(doc, "states", source);
    if (!states.is_array() || states.empty()) {
      throw ConfigError(source, "'states' must be a nonempty array");
    }
    for (const json& s : states) {
      t.indices.push_back(need(s, "index", source).get<double>());
      t.values.push_back(need(s, "value", source).get<double>());
    }
    return t;
  } catch (const json::exception& e) {
    throw ConfigError(source, std::string("malformed table: ") + e.what());
  }
}

GainIndexTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--tables", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("malformed JSON: ") + e.what());
  }
  return table_from_json(doc, path.string());
}

json sim_to_json(const SimResult& r, const std::string& config_hash) {
  json doc{{"schema_version", kSchemaVersion},
           {"config_hash", config_hash},
           {"policy", r.policy},
           {"criterion", to_string(r.criterion)},
           {"M", r.n_bandits},
           {"m", r.m},
           {"runs", r.runs},
           {"horizon", r.horizon},
           {"burn_in", r.burn_in},
           {"seed", r.seed},
           {"mean", r.mean},
           {"stderr", r.stderr_mean},
           {"per_run_average", r.per_run_average},
           {"activation_frequency", r.activation_frequency},
           {"mean_cost", r.mean_cost},
           {"or_exact_slots", r.or_exact_slots},
           {"or_exact_matches", r.or_exact_matches}};
  if (r.criterion == Criterion::kDiscounted) {
    doc["beta"] = r.beta;
    doc["per_run_discounted"] = r.per_run_discounted;
  }
  return doc;
}

std::string sim_to_csv(const SimResult& r, const std::string& config_hash) {
  std::ostringstream out;
  out << csv_header(config_hash)
      << "policy,M,m,criterion,mean,stderr,runs,horizon,seed\n"
      << r.policy << ',' << r.n_bandits << ',' << r.m << ','
      << to_string(r.criterion) << ',' << format_double(r.mean) << ','
      << format_double(r.stderr_mean) << ',' << r.runs << ',' << r.horizon
      << ',' << r.seed << '\n';
  return out.str();
}

std::string trace_to_csv(const GradientTrace& trace,
                         const std::string& config_hash) {
  std::ostringstream out;
  out << csv_header(config_hash) << "iteration,lambda,derivative\n";
  for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
    out << k << ',' << format_double(trace.iterates[k].lambda) << ','
        << format_double(trace.iterates[k].derivative) << '\n';
  }
  return out.str();
}

json sweep_to_json(const AsymptoticSweep& sweep,
                   const std::string& config_hash) {
  json points = json::array();
  for (const AsymptoticPoint& p : sweep.points) {
    points.push_back({{"M", p.n_bandits},
                      {"m", p.m},
                      {"policy_per_bandit", p.policy_per_bandit},
                      {"policy_stderr", p.policy_stderr},
                      {"bound_per_bandit", p.bound_per_bandit},
                      {"gap", p.gap}});
  }
  json doc{{"schema_version", kSchemaVersion},
           {"config_hash", config_hash},
           {"criterion", to_string(sweep.criterion)},
           {"alpha", sweep.alpha},
           {"proportions", sweep.proportions},
           {"lambda_star", sweep.lambda_star},
           {"points", std::move(points)}};
  if (sweep.criterion == Criterion::kDiscounted) doc["beta"] = sweep.beta;
  return doc;
}

std::string sweep_to_csv(const AsymptoticSweep& sweep,
                         const std::string& config_hash) {
  std::ostringstream out;
  out << csv_header(config_hash)
      << "M,m,policy_per_bandit,policy_stderr,bound_per_bandit,gap\n";
  for (const AsymptoticPoint& p : sweep.points) {
    out << p.n_bandits << ',' << p.m << ','
        << format_double(p.policy_per_bandit) << ','
        << format_double(p.policy_stderr) << ','
        << format_double(p.bound_per_bandit) << ',' << format_double(p.gap)
        << '\n';
  }
  return out.str();
}

}  // namespace uoi::tools
