// Copyright 2026 The srfgame Authors
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

// Command-line front end. Each subcommand reads a JSON config and writes
// report.json (plus strategy.json / curves.csv where they apply) to --out.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "srfgame/cli.h"

namespace {

struct Args {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  long reps = 0;
  double grid = 0;
  double tol = 0;
};

CLI::App* AddCommand(CLI::App& app, const std::string& name,
                     const std::string& help, Args& a, bool seeded) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", a.config, "JSON configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", a.out, "output directory");
  auto* seed = sub->add_option("--seed", a.seed, "random seed");
  if (seeded) seed->required();
  sub->add_option("--reps", a.reps, "Monte Carlo replications")
      ->check(CLI::PositiveNumber);
  sub->add_option("--grid", a.grid,
                  "grid step as a fraction of the interval (action step for "
                  "certify and simulate)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol", a.tol, "absolute root tolerance")
      ->check(CLI::PositiveNumber);
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategic resource-request games: solvers and simulators"};
  app.require_subcommand(1);
  Args a;
  const struct {
    const char* name;
    const char* help;
    bool seeded;
  } commands[] = {
      {"solve2p", "two-player equilibrium with exponential demands", false},
      {"fluid", "large-population threshold equilibrium", false},
      {"gaussian", "n-player equilibrium under the normal load model", false},
      {"simulate", "Monte Carlo success probabilities of a strategy", true},
      {"certify", "empirical best-response gap of a strategy", true},
      {"curves", "payoff and strategy curves for a solved game", false},
  };
  for (const auto& c : commands) AddCommand(app, c.name, c.help, a, c.seeded);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : srfgame::cli::kBadConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  srfgame::cli::Overrides o;
  if (sub->count("--seed")) o.seed = a.seed;
  if (sub->count("--reps")) o.reps = a.reps;
  if (sub->count("--grid")) o.grid = a.grid;
  if (sub->count("--tol")) o.tol = a.tol;
  int rc = srfgame::cli::RunFile(sub->get_name(), a.config, o, a.out,
                                 std::cerr);
  if (rc == srfgame::cli::kOk) std::cout << a.out << "/report.json\n";
  return rc;
}
