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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "uoi_tools/commands.hpp"
#include "uoi_tools/config.hpp"
#include "uoi_tools/io.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using uoi::tools::run_cli;

json sample_config() {
  return json::parse(R"({
    "schema_version": 1,
    "criterion": {"kind": "discounted", "beta": 0.9},
    "m": 1,
    "bandits": [
      {"label": "a", "transition": [[0.99, 0.3], [0.01, 0.7]], "rho": 1.0},
      {"label": "b", "transition": [[0.99, 0.3], [0.01, 0.7]], "rho": 0.8}
    ],
    "truncation": {"mode": "fixed", "L": 20},
    "simulation": {"runs": 8, "horizon": 200, "seed": 7}
  })");
}

// Fresh directory per test case under the build tree's temp area.
fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("uoi_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const json& doc) {
  const fs::path p = dir / "config.in.json";
  uoi::tools::write_text(p, doc.dump());
  return p;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("config parsing is strict and names the field") {
  json doc = sample_config();
  doc["bandits"][0]["colour"] = "red";
  try {
    uoi::tools::parse_config(doc);
    FAIL("expected ConfigError");
  } catch (const uoi::tools::ConfigError& e) {
    CHECK(e.field() == "bandits[0].colour");
  }

  doc = sample_config();
  doc["m"] = 2;
  CHECK_THROWS_AS(uoi::tools::parse_config(doc), uoi::tools::ConfigError);

  doc = sample_config();
  doc["schema_version"] = 2;
  CHECK_THROWS_AS(uoi::tools::parse_config(doc), uoi::tools::ConfigError);

  doc = sample_config();
  doc["bandits"][1]["label"] = "a";
  CHECK_THROWS_AS(uoi::tools::parse_config(doc), uoi::tools::ConfigError);
}

TEST_CASE("config echo round-trips") {
  json doc = sample_config();
  doc["gradient"] = {{"c", 0.3}, {"max_iters", 100}};
  doc["bandits"][1]["initial_belief"] = {0.5, 0.5};
  doc["sweep"] = {{"proportions", {0.5, 0.5}}, {"m_list", {4, 8}}};
  const auto c = uoi::tools::parse_config(doc);
  const auto again = uoi::tools::parse_config(
      json::parse(uoi::tools::dump(uoi::tools::to_json(c))));
  CHECK(again == c);
  CHECK(uoi::tools::config_hash(again) == uoi::tools::config_hash(c));
}

TEST_CASE("column sums within slack are renormalized") {
  json doc = sample_config();
  doc["bandits"][0]["transition"] = {{0.99 + 5e-10, 0.3}, {0.01, 0.7}};
  const auto built = uoi::tools::build_bandits(uoi::tools::parse_config(doc));
  const auto& t = built[0].mdp.bandit().chain.transition();
  CHECK(std::abs(t.col(0).sum() - 1.0) < 1e-15);

  doc["bandits"][0]["transition"] = {{0.99 + 1e-6, 0.3}, {0.01, 0.7}};
  try {
    uoi::tools::build_bandits(uoi::tools::parse_config(doc));
    FAIL("expected ConfigError");
  } catch (const uoi::tools::ConfigError& e) {
    CHECK(e.field() == "bandits[0].transition");
  }
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  json bad = sample_config();
  bad["m"] = 2;
  const fs::path bad_path = write_config(dir, bad);
  CHECK(cli({"indices", "--config", bad_path.string(), "--out",
             (dir / "o").string()})
            .code == 2);

  const fs::path good = write_config(dir, sample_config());
  CHECK(cli({"simulate", "--config", good.string(), "--out",
             (dir / "o").string(), "--policy", "gain_index"})
            .code == 2);
  CHECK(cli({"simulate", "--config", good.string(), "--out",
             (dir / "o").string(), "--policy", "gain_index", "--tables",
             (dir / "missing.json").string()})
            .code == 2);
  CHECK(cli({"simulate", "--config", good.string(), "--policy", "bogus"})
            .code == 2);
  CHECK(cli({"asymptotic", "--config", good.string(), "--out",
             (dir / "o").string(), "--alpha", "0.5", "--m-list", "3,4"})
            .code == 2);
  CHECK(cli({"nonsense"}).code == 2);

  json big = sample_config();
  big["truncation"] = {{"mode", "fixed"}, {"L", 400}};
  for (int i = 0; i < 3; ++i) {
    big["bandits"].push_back(
        {{"label", "x" + std::to_string(i)},
         {"transition", {{0.99, 0.3}, {0.01, 0.7}}},
         {"rho", 1.0}});
  }
  const Run r = cli({"oracle", "--config", write_config(dir, big).string(),
                     "--out", (dir / "o").string()});
  CHECK(r.code == 4);
  CHECK(r.err.find("state-action pairs") != std::string::npos);
}

TEST_CASE("end-to-end pipeline") {
  const fs::path dir = scratch("e2e");
  const fs::path cfg = write_config(dir, sample_config());
  const fs::path out = dir / "o";
  REQUIRE(cli({"indices", "--config", cfg.string(), "--out", out.string()})
              .code == 0);
  CHECK(fs::exists(out / "tables" / "a.json"));
  CHECK(fs::exists(out / "tables" / "b.json"));
  CHECK(fs::exists(out / "gradient_trace.csv"));

  const auto echo = uoi::tools::load_config(out / "config.json");
  CHECK(echo == uoi::tools::load_config(cfg));
  const std::string hash = uoi::tools::config_hash(echo);

  const auto table = uoi::tools::load_table(out / "tables" / "a.json");
  CHECK(table.n_states() == 1 + 2 * 20);

  REQUIRE(cli({"simulate", "--config", cfg.string(), "--out", out.string(),
               "--tables", (out / "tables" / "a.json").string(),
               (out / "tables" / "b.json").string()})
              .code == 0);
  REQUIRE(cli({"simulate", "--config", cfg.string(), "--out", out.string(),
               "--policy", "round_robin"})
              .code == 0);
  const json sim = json::parse(slurp(out / "sim_gain_index.json"));
  double sum = 0.0;
  for (double v : sim["per_run_discounted"]) sum += v;
  CHECK(std::abs(sum / sim["runs"].get<double>() - sim["mean"].get<double>()) <
        1e-12);

  REQUIRE(cli({"oracle", "--config", cfg.string(), "--out", out.string(),
               "--compare", (out / "sim_gain_index.json").string()})
              .code == 0);
  const json oracle = json::parse(slurp(out / "oracle.json"));
  CHECK(oracle["gap"].contains("relative_gap"));
  REQUIRE(cli({"bound", "--config", cfg.string(), "--out", out.string()})
              .code == 0);

  for (const auto& entry : fs::recursive_directory_iterator(out)) {
    if (!entry.is_regular_file()) continue;
    const std::string text = slurp(entry.path());
    if (entry.path().filename() == "config.json") continue;
    INFO(entry.path().string());
    CHECK(text.find(hash) != std::string::npos);
    CHECK(text.find("schema_version") != std::string::npos);
  }
}

TEST_CASE("outputs are byte-identical across reruns") {
  const fs::path dir = scratch("det");
  const fs::path cfg = write_config(dir, sample_config());
  for (const char* sub : {"a", "b"}) {
    const std::string out = (dir / sub).string();
    REQUIRE(cli({"indices", "--config", cfg.string(), "--out", out}).code == 0);
    REQUIRE(cli({"simulate", "--config", cfg.string(), "--out", out,
                 "--policy", "myopic", "--seed", "11"})
                .code == 0);
  }
  for (const char* f : {"indices.json", "tables/a.json", "sim_myopic.json"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
}
