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

#include "uoi_tools/commands.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "uoi/error.hpp"
#include "uoi/index_policy.hpp"
#include "uoi/lagrange.hpp"
#include "uoi/oracle.hpp"
#include "uoi/simulator.hpp"
#include "uoi_tools/config.hpp"
#include "uoi_tools/io.hpp"

namespace uoi::tools {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string policy = "gain_index";
  std::vector<std::string> tables;
  std::optional<double> alpha;
  std::string m_list;
  std::string compare;
  std::optional<double> lambda;
};

struct Context {
  ExperimentConfig config;
  std::string hash;
  std::vector<BuiltBandit> bandits;
  fs::path out;
};

Context load(const Options& o) {
  Context ctx;
  ctx.config = load_config(o.config_path);
  if (o.seed) ctx.config.simulation.seed = *o.seed;
  ctx.hash = config_hash(ctx.config);
  ctx.bandits = build_bandits(ctx.config);
  ctx.out = o.out_dir.empty() ? fs::path(ctx.config.output_dir)
                              : fs::path(o.out_dir);
  write_text(ctx.out / "config.json", dump(to_json(ctx.config)));
  return ctx;
}

json stamp(const Context& ctx) {
  return {{"schema_version", kSchemaVersion}, {"config_hash", ctx.hash}};
}

// Per-bandit truncation certificate at multiplier `lambda`.
json certificates(const Context& ctx, double lambda) {
  json out = json::array();
  for (const BuiltBandit& b : ctx.bandits) {
    const BanditSpec& spec = b.mdp.bandit();
    json entry{{"label", spec.label},
               {"L", b.mdp.truncation_L()},
               {"eta_L", b.diagnostics.eta_l},
               {"sigma_L", b.diagnostics.sigma_l},
               {"lambda", lambda}};
    if (ctx.config.criterion == Criterion::kDiscounted) {
      entry["value_error_bound"] = discounted_error_bound(
          b.diagnostics, lambda, ctx.config.beta, spec.chain.n_states(),
          spec.success_prob);
    } else {
      entry["gain_error_bound"] = average_error_bound(b.diagnostics);
    }
    out.push_back(std::move(entry));
  }
  return out;
}

GradientTrace search(const Context& ctx) {
  const LagrangeProblem problem = make_problem(ctx.config, ctx.bandits);
  try {
    GradientTrace trace = gradient_search(problem);
    write_text(ctx.out / "gradient_trace.csv", trace_to_csv(trace, ctx.hash));
    return trace;
  } catch (const MaxItersExceeded& e) {
    write_text(ctx.out / "gradient_trace.csv",
               trace_to_csv(e.trace(), ctx.hash));
    throw;
  }
}

int cmd_indices(const Options& o, std::ostream& out) {
  const Context ctx = load(o);
  const GradientTrace trace = search(ctx);
  const double lambda = trace.lambda_star;
  json tables = json::array();
  for (const BuiltBandit& b : ctx.bandits) {
    const GainIndexTable table =
        ctx.config.criterion == Criterion::kDiscounted
            ? gain_indices_discounted(b.mdp, lambda)
            : gain_indices_average(b.mdp, lambda);
    const fs::path path = ctx.out / "tables" / (table.bandit_label + ".json");
    write_text(path, dump(table_to_json(table, b.mdp, ctx.hash)));
    tables.push_back(fs::relative(path, ctx.out).generic_string());
  }
  json report = stamp(ctx);
  report["criterion"] = to_string(ctx.config.criterion);
  report["lambda_star"] = lambda;
  report["iterations"] = trace.iterates.size();
  report["bracket"] = {trace.bracket_low, trace.bracket_high};
  report["tables"] = std::move(tables);
  report["truncation"] = certificates(ctx, lambda);
  write_text(ctx.out / "indices.json", dump(report));
  out << "lambda_star " << format_double(lambda) << " after "
      << trace.iterates.size() << " iterations; " << ctx.bandits.size()
      << " tables in " << (ctx.out / "tables").string() << "\n";
  return kExitOk;
}

std::vector<GainIndexTable> match_tables(const Context& ctx,
                                         const std::vector<std::string>& paths) {
  std::map<std::string, GainIndexTable> by_label;
  for (const std::string& p : paths) {
    GainIndexTable t = load_table(p);
    const std::string label = t.bandit_label;
    if (!by_label.emplace(label, std::move(t)).second) {
      throw ConfigError("--tables", "two tables for bandit '" + label + "'");
    }
  }
  std::vector<GainIndexTable> out;
  for (const BuiltBandit& b : ctx.bandits) {
    const std::string& label = b.mdp.bandit().label;
    auto it = by_label.find(label);
    if (it == by_label.end()) {
      throw ConfigError("--tables", "no table for bandit '" + label + "'");
    }
    if (it->second.criterion != ctx.config.criterion ||
        it->second.n_states() != b.mdp.n_states()) {
      throw ConfigError("--tables", "table for bandit '" + label +
                                        "' does not match the configuration");
    }
    out.push_back(std::move(it->second));
  }
  return out;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  PolicySpec spec;
  try {
    spec.kind = policy_kind_from_string(o.policy);
  } catch (const Error& e) {
    throw ConfigError("--policy", e.what());
  }
  if (needs_tables(spec.kind) && o.tables.empty()) {
    throw ConfigError("--tables", "policy '" + o.policy +
                                      "' needs index tables (run 'indices')");
  }
  const Context ctx = load(o);
  if (needs_tables(spec.kind)) spec.tables = match_tables(ctx, o.tables);
  const RMABInstance instance = make_instance(ctx.config, ctx.bandits);
  SimOptions options;
  options.horizon = ctx.config.simulation.horizon;
  options.runs = ctx.config.simulation.runs;
  options.burn_in_fraction = ctx.config.simulation.burn_in;
  const SimResult result = simulate(instance, spec, options);
  const std::string stem = "sim_" + to_string(spec.kind);
  write_text(ctx.out / (stem + ".json"), dump(sim_to_json(result, ctx.hash)));
  write_text(ctx.out / (stem + ".csv"), sim_to_csv(result, ctx.hash));
  out << to_string(spec.kind) << " mean " << format_double(result.mean)
      << " +/- " << format_double(result.stderr_mean) << " (" << result.runs
      << " runs x " << result.horizon << " slots)\n";
  return kExitOk;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const Context ctx = load(o);
  const RMABInstance instance = make_instance(ctx.config, ctx.bandits);
  const JointMDP joint = JointMDP::make(instance);
  const OracleSolution sol = ctx.config.criterion == Criterion::kDiscounted
                                 ? joint_solve_discounted(instance)
                                 : joint_solve_average(instance);
  json report = stamp(ctx);
  report["criterion"] = to_string(ctx.config.criterion);
  report["oracle"] = sol.value;
  report["joint_states"] = joint.n_states();
  report["joint_actions"] = joint.n_actions();
  report["iterations"] = sol.iterations;
  out << "oracle " << format_double(sol.value) << " over " << joint.n_states()
      << " joint states\n";
  if (!o.compare.empty()) {
    std::ifstream in(o.compare);
    if (!in) throw ConfigError("--compare", "cannot open " + o.compare);
    json sim;
    try {
      sim = json::parse(in);
      if (sim.at("criterion").get<std::string>() !=
          to_string(ctx.config.criterion)) {
        throw ConfigError("--compare", "criterion differs from the config");
      }
      const double policy = sim.at("mean").get<double>();
      report["gap"] = {{"oracle", sol.value},
                       {"policy", policy},
                       {"relative_gap", (policy - sol.value) /
                                            std::abs(sol.value)}};
      out << "relative gap " << format_double(report["gap"]["relative_gap"])
          << "\n";
    } catch (const json::exception& e) {
      throw ConfigError("--compare", std::string("malformed: ") + e.what());
    }
  }
  write_text(ctx.out / "oracle.json", dump(report));
  return kExitOk;
}

std::vector<int> parse_m_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v < 2) {
      throw ConfigError("--m-list", "expected integers >= 2, got '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--m-list", "empty list");
  return out;
}

int cmd_asymptotic(const Options& o, std::ostream& out) {
  const Context ctx = load(o);
  const ExperimentConfig& c = ctx.config;
  const int n_classes = static_cast<int>(ctx.bandits.size());
  std::vector<double> q(n_classes, 1.0 / n_classes);
  std::optional<double> alpha = o.alpha;
  std::vector<int> m_list;
  if (c.sweep) {
    if (!c.sweep->proportions.empty()) q = c.sweep->proportions;
    if (!alpha) alpha = c.sweep->alpha;
    m_list = c.sweep->m_list;
  }
  if (!alpha) alpha = static_cast<double>(c.m) / n_classes;
  if (!(*alpha > 0.0 && *alpha < 1.0)) {
    throw ConfigError("--alpha", "must be in (0, 1)");
  }
  if (!o.m_list.empty()) m_list = parse_m_list(o.m_list);
  if (m_list.empty()) {
    throw ConfigError("--m-list", "no M values (flag or sweep.m_list)");
  }
  for (int m : m_list) {
    const double active = m * *alpha;
    if (std::abs(active - std::round(active)) > 1e-9) {
      throw ConfigError("--alpha", "M alpha = " + format_double(active) +
                                       " is not an integer for M = " +
                                       std::to_string(m));
    }
    for (double qk : q) {
      const double count = m * qk;
      if (std::abs(count - std::round(count)) > 1e-9) {
        throw ConfigError("sweep.proportions",
                          "M q = " + format_double(count) +
                              " is not an integer for M = " +
                              std::to_string(m));
      }
    }
  }
  std::vector<SweepClass> classes;
  for (int k = 0; k < n_classes; ++k) {
    classes.push_back({ctx.bandits[k].mdp, q[k]});
  }
  SimOptions options;
  options.horizon = c.simulation.horizon;
  options.runs = c.simulation.runs;
  options.burn_in_fraction = c.simulation.burn_in;
  AsymptoticSweep sweep;
  try {
    sweep = asymptotic_sweep(classes, *alpha, m_list, c.criterion, options,
                             c.simulation.seed);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInvalidArgument) throw;
    throw ConfigError("sweep", e.what());
  }
  write_text(ctx.out / "asymptotic.json", dump(sweep_to_json(sweep, ctx.hash)));
  write_text(ctx.out / "asymptotic.csv", sweep_to_csv(sweep, ctx.hash));
  for (const AsymptoticPoint& p : sweep.points) {
    out << "M " << p.n_bandits << " gap " << format_double(p.gap) << " +/- "
        << format_double(p.policy_stderr) << "\n";
  }
  return kExitOk;
}

int cmd_bound(const Options& o, std::ostream& out) {
  const Context ctx = load(o);
  const double lambda = o.lambda ? *o.lambda : search(ctx).lambda_star;
  if (lambda < 0.0) throw ConfigError("--lambda", "must be nonnegative");
  json report = stamp(ctx);
  report["criterion"] = to_string(ctx.config.criterion);
  report["certificates"] = certificates(ctx, lambda);
  write_text(ctx.out / "bound.json", dump(report));
  for (const json& b : report["certificates"]) {
    out << b["label"].get<std::string>() << ": L " << b["L"].get<int>()
        << " eta_L " << format_double(b["eta_L"]) << " sigma_L "
        << format_double(b["sigma_L"]);
    if (b.contains("value_error_bound")) {
      out << " value bound " << format_double(b["value_error_bound"])
          << " at lambda " << format_double(lambda);
    } else {
      out << " gain bound " << format_double(b["gain_error_bound"]);
    }
    out << "\n";
  }
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::kStateSpaceTooLarge ? kExitResource : kExitSolver;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Gain index scheduling for entropy-cost restless bandits", "uoi"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Experiment JSON")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "Output directory (default: config)");
  };
  CLI::App* indices = app.add_subcommand("indices", "Compute gain index tables");
  common(indices);
  CLI::App* sim = app.add_subcommand("simulate", "Simulate a policy");
  common(sim);
  sim->add_option("--seed", o.seed, "Override simulation.seed");
  sim->add_option("--policy", o.policy,
                  "gain_index | myopic | round_robin | or_rounded | or_relaxed");
  sim->add_option("--tables", o.tables, "Index table files");
  CLI::App* oracle = app.add_subcommand("oracle", "Solve the joint model");
  common(oracle);
  oracle->add_option("--compare", o.compare, "Simulation JSON to compare");
  CLI::App* asym = app.add_subcommand("asymptotic", "Sweep M at fixed m/M");
  common(asym);
  asym->add_option("--seed", o.seed, "Override simulation.seed");
  asym->add_option("--alpha", o.alpha, "Activation fraction m/M");
  asym->add_option("--m-list", o.m_list, "Comma-separated M values");
  CLI::App* bound = app.add_subcommand("bound", "Truncation certificates");
  common(bound);
  bound->add_option("--lambda", o.lambda,
                    "Multiplier (default: result of the gradient search)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (indices->parsed()) return cmd_indices(o, out);
    if (sim->parsed()) return cmd_simulate(o, out);
    if (oracle->parsed()) return cmd_oracle(o, out);
    if (asym->parsed()) return cmd_asymptotic(o, out);
    return cmd_bound(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitResource;
  }
}

}  // namespace uoi::tools
