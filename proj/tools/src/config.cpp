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

#include "uoi_tools/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include "uoi/error.hpp"

namespace uoi::tools {
namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be rejected.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path)
      : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    if (!obj_.contains(key)) throw ConfigError(field(key), "missing");
    seen_.insert(key);
    return obj_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) {
      throw ConfigError(field(key), "expected an integer");
    }
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError(field(key), "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(field(key), "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        throw ConfigError(field(key) + "[" + std::to_string(i) + "]",
                          "expected a number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError(field(item.key()), "unknown field");
      }
    }
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

int checked_int(std::int64_t v, const std::string& field) {
  require(v >= std::numeric_limits<int>::min() &&
              v <= std::numeric_limits<int>::max(),
          field, "out of range");
  return static_cast<int>(v);
}

bool safe_label(const std::string& s) {
  if (s.empty() || s == "." || s == "..") return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

BanditConfig parse_bandit(const json& doc, const std::string& path) {
  ObjectReader r(doc, path);
  BanditConfig b;
  b.label = r.string("label");
  require(safe_label(b.label), r.field("label"),
          "labels may only use letters, digits, '_', '-' and '.'");
  const json& t = r.raw("transition");
  require(t.is_array() && t.size() >= 2, r.field("transition"),
          "expected a square matrix with at least 2 rows");
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::string row_field =
        r.field("transition") + "[" + std::to_string(i) + "]";
    require(t[i].is_array() && t[i].size() == t.size(), row_field,
            "expected " + std::to_string(t.size()) + " entries");
    std::vector<double> row;
    for (const json& x : t[i]) {
      require(x.is_number(), row_field, "expected numbers");
      row.push_back(x.get<double>());
    }
    b.transition.push_back(std::move(row));
  }
  b.rho = r.number("rho");
  require(b.rho > 0.0 && b.rho <= 1.0, r.field("rho"), "must be in (0, 1]");
  if (r.has("initial_belief")) {
    b.initial_belief = r.numbers("initial_belief");
    require(b.initial_belief->size() == t.size(), r.field("initial_belief"),
            "length must match the number of states");
  }
  r.finish();
  return b;
}

}  // namespace

std::string to_string(Criterion criterion) {
  return criterion == Criterion::kDiscounted ? "discounted" : "average";
}

ExperimentConfig parse_config(const json& doc) {
  ObjectReader r(doc, "");
  ExperimentConfig c;
  c.schema_version = checked_int(r.integer("schema_version"), "schema_version");
  require(c.schema_version == kSchemaVersion, "schema_version",
          "unsupported version " + std::to_string(c.schema_version) +
              " (expected " + std::to_string(kSchemaVersion) + ")");

  {
    ObjectReader cr(r.raw("criterion"), "criterion");
    const std::string kind = cr.string("kind");
    if (kind == "discounted") {
      c.criterion = Criterion::kDiscounted;
      c.beta = cr.number("beta");
      require(c.beta >= 0.0 && c.beta < 1.0, "criterion.beta",
              "must be in [0, 1)");
    } else if (kind == "average") {
      c.criterion = Criterion::kAverage;
      c.beta = 1.0;
    } else {
      throw ConfigError("criterion.kind",
                        "expected 'discounted' or 'average', got '" + kind +
                            "'");
    }
    cr.finish();
  }

  const json& bandits = r.raw("bandits");
  require(bandits.is_array(), "bandits", "expected an array");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < bandits.size(); ++i) {
    c.bandits.push_back(
        parse_bandit(bandits[i], "bandits[" + std::to_string(i) + "]"));
    require(labels.insert(c.bandits.back().label).second,
            "bandits[" + std::to_string(i) + "].label",
            "duplicate label '" + c.bandits.back().label + "'");
  }
  c.m = checked_int(r.integer("m"), "m");
  require(c.m >= 1 && c.m < static_cast<int>(c.bandits.size()), "m",
          "need 1 <= m < M (m=" + std::to_string(c.m) +
              ", M=" + std::to_string(c.bandits.size()) + ")");

  if (r.has("truncation")) {
    ObjectReader tr(r.raw("truncation"), "truncation");
    const std::string mode = tr.string("mode");
    if (mode == "fixed") {
      c.truncation.mode = TruncationConfig::Mode::kFixed;
      c.truncation.l = checked_int(tr.integer("L"), "truncation.L");
      require(c.truncation.l >= 1, "truncation.L", "must be at least 1");
    } else if (mode == "auto") {
      c.truncation.mode = TruncationConfig::Mode::kAuto;
      if (tr.has("eta_target")) {
        c.truncation.eta_target = tr.number("eta_target");
      }
      require(c.truncation.eta_target > 0.0, "truncation.eta_target",
              "must be positive");
      if (tr.has("l_max")) {
        c.truncation.l_max = checked_int(tr.integer("l_max"), "truncation.l_max");
      }
      require(c.truncation.l_max >= 1, "truncation.l_max",
              "must be at least 1");
    } else {
      throw ConfigError("truncation.mode",
                        "expected 'fixed' or 'auto', got '" + mode + "'");
    }
    tr.finish();
  }

  if (r.has("gradient")) {
    ObjectReader gr(r.raw("gradient"), "gradient");
    if (gr.has("c")) {
      c.gradient.c = gr.number("c");
      require(*c.gradient.c > 0.0, "gradient.c", "must be positive");
    }
    if (gr.has("epsilon")) {
      c.gradient.epsilon = gr.number("epsilon");
      require(*c.gradient.epsilon > 0.0, "gradient.epsilon",
              "must be positive");
    }
    if (gr.has("max_iters")) {
      c.gradient.max_iters =
          checked_int(gr.integer("max_iters"), "gradient.max_iters");
    }
    require(c.gradient.max_iters >= 1, "gradient.max_iters",
            "must be at least 1");
    gr.finish();
  }

  if (r.has("simulation")) {
    ObjectReader sr(r.raw("simulation"), "simulation");
    if (sr.has("runs")) {
      c.simulation.runs = checked_int(sr.integer("runs"), "simulation.runs");
    }
    require(c.simulation.runs >= 1, "simulation.runs", "must be at least 1");
    if (sr.has("horizon")) {
      c.simulation.horizon =
          checked_int(sr.integer("horizon"), "simulation.horizon");
    }
    require(c.simulation.horizon >= 1 ||
                (c.simulation.horizon == 0 &&
                 c.criterion == Criterion::kDiscounted),
            "simulation.horizon",
            "must be at least 1 (0 selects the tail-bounded horizon for "
            "discounted runs)");
    if (sr.has("seed")) c.simulation.seed = sr.unsigned_integer("seed");
    if (sr.has("burn_in")) c.simulation.burn_in = sr.number("burn_in");
    require(c.simulation.burn_in >= 0.0 && c.simulation.burn_in < 1.0,
            "simulation.burn_in", "must be in [0, 1)");
    sr.finish();
  }

  if (r.has("sweep")) {
    ObjectReader wr(r.raw("sweep"), "sweep");
    SweepConfig s;
    if (wr.has("proportions")) {
      s.proportions = wr.numbers("proportions");
      require(s.proportions.size() == c.bandits.size(), "sweep.proportions",
              "need one proportion per bandit");
    }
    if (wr.has("alpha")) {
      s.alpha = wr.number("alpha");
      require(*s.alpha > 0.0 && *s.alpha < 1.0, "sweep.alpha",
              "must be in (0, 1)");
    }
    if (wr.has("m_list")) {
      for (double v : wr.numbers("m_list")) {
        require(v >= 2 && v == std::floor(v), "sweep.m_list",
                "entries must be integers >= 2");
        s.m_list.push_back(static_cast<int>(v));
      }
    }
    wr.finish();
    c.sweep = std::move(s);
  }

  if (r.has("outputs")) {
    ObjectReader orr(r.raw("outputs"), "outputs");
    c.output_dir = orr.string("directory");
    require(!c.output_dir.empty(), "outputs.directory", "must not be empty");
    orr.finish();
  }
  r.finish();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["schema_version"] = c.schema_version;
  doc["criterion"] = c.criterion == Criterion::kDiscounted
                         ? json{{"kind", "discounted"}, {"beta", c.beta}}
                         : json{{"kind", "average"}};
  doc["m"] = c.m;
  doc["bandits"] = json::array();
  for (const BanditConfig& b : c.bandits) {
    json jb{{"label", b.label}, {"transition", b.transition}, {"rho", b.rho}};
    if (b.initial_belief) jb["initial_belief"] = *b.initial_belief;
    doc["bandits"].push_back(std::move(jb));
  }
  if (c.truncation.mode == TruncationConfig::Mode::kFixed) {
    doc["truncation"] = {{"mode", "fixed"}, {"L", c.truncation.l}};
  } else {
    doc["truncation"] = {{"mode", "auto"},
                         {"eta_target", c.truncation.eta_target},
                         {"l_max", c.truncation.l_max}};
  }
  json g{{"max_iters", c.gradient.max_iters}};
  if (c.gradient.c) g["c"] = *c.gradient.c;
  if (c.gradient.epsilon) g["epsilon"] = *c.gradient.epsilon;
  doc["gradient"] = std::move(g);
  doc["simulation"] = {{"runs", c.simulation.runs},
                       {"horizon", c.simulation.horizon},
                       {"seed", c.simulation.seed},
                       {"burn_in", c.simulation.burn_in}};
  if (c.sweep) {
    json s = json::object();
    if (!c.sweep->proportions.empty()) s["proportions"] = c.sweep->proportions;
    if (c.sweep->alpha) s["alpha"] = *c.sweep->alpha;
    if (!c.sweep->m_list.empty()) s["m_list"] = c.sweep->m_list;
    doc["sweep"] = std::move(s);
  }
  doc["outputs"] = {{"directory", c.output_dir}};
  return doc;
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(config).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::vector<BuiltBandit> build_bandits(const ExperimentConfig& config) {
  std::vector<BuiltBandit> out;
  const double discount =
      config.criterion == Criterion::kDiscounted ? config.beta : 1.0;
  for (std::size_t i = 0; i < config.bandits.size(); ++i) {
    const BanditConfig& b = config.bandits[i];
    const std::string field = "bandits[" + std::to_string(i) + "]";
    const int n = static_cast<int>(b.transition.size());
    Eigen::MatrixXd t(n, n);
    for (int r = 0; r < n; ++r) {
      for (int col = 0; col < n; ++col) t(r, col) = b.transition[r][col];
    }
    for (int col = 0; col < n; ++col) {
      const double drift = std::abs(t.col(col).sum() - 1.0);
      if (drift > 1e-12 && drift <= kColumnSumSlack) {
        std::cerr << "warning: " << field << " ('" << b.label << "') column "
                  << col << " sums to 1 within " << drift
                  << "; renormalized\n";
      }
    }
    try {
      BanditSpec spec =
          BanditSpec::make(validate_chain(t), b.rho, b.label);
      TruncatedBeliefMDP mdp = [&] {
        if (config.truncation.mode == TruncationConfig::Mode::kFixed) {
          return build_truncated(spec, config.truncation.l, discount);
        }
        const int l = choose_truncation(spec, config.truncation.eta_target,
                                        config.truncation.l_max)
                          .first;
        return build_truncated(spec, l, discount);
      }();
      TruncationDiagnostics diag =
          truncation_diagnostics(spec.chain, mdp.truncation_L());
      int initial = TruncatedBeliefMDP::kEquilibriumIndex;
      if (b.initial_belief) {
        Eigen::VectorXd x(n);
        for (int k = 0; k < n; ++k) x(k) = (*b.initial_belief)[k];
        initial = nearest_state(mdp, BeliefState::checked(x).probs);
      }
      out.push_back({std::move(mdp), diag, initial});
    } catch (const Error& e) {
      const std::string where =
          e.kind() == ErrorKind::kTruncationTooDeep ? "truncation.eta_target"
          : e.kind() == ErrorKind::kInvalidArgument && b.initial_belief
              ? field + ".initial_belief"
              : field + ".transition";
      throw ConfigError(where, "bandit '" + b.label + "': " + e.what());
    }
  }
  return out;
}

LagrangeProblem make_problem(const ExperimentConfig& config,
                             const std::vector<BuiltBandit>& bandits) {
  std::vector<LagrangeBandit> lb;
  for (const BuiltBandit& b : bandits) lb.push_back({b.mdp, b.initial_state});
  return LagrangeProblem::make(std::move(lb), config.m, config.criterion,
                               config.gradient.c, config.gradient.epsilon,
                               config.gradient.max_iters);
}

RMABInstance make_instance(const ExperimentConfig& config,
                           const std::vector<BuiltBandit>& bandits) {
  std::vector<TruncatedBeliefMDP> models;
  std::vector<int> initial;
  for (const BuiltBandit& b : bandits) {
    models.push_back(b.mdp);
    initial.push_back(b.initial_state);
  }
  return RMABInstance::make(
      std::move(models), config.m, config.criterion,
      config.criterion == Criterion::kDiscounted ? config.beta : 0.0,
      std::move(initial), config.simulation.seed);
}

}  // namespace uoi::tools
