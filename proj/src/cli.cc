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

#include "srfgame/cli.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "srfgame/fluid.h"
#include "srfgame/sim.h"
#include "srfgame/strategy.h"

namespace srfgame::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::map<std::string, std::string> kCommandMode = {
    {"solve2p", "two_player"}, {"fluid", "fluid"},
    {"gaussian", "gaussian"},  {"simulate", "simulate"},
    {"certify", "certify"},    {"curves", "curves"}};

double RequireNumber(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing field '" + key + "'");
  if (!j[key].is_number()) {
    throw ConfigError("field '" + key + "' must be a number");
  }
  return j[key].get<double>();
}

json Finite(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string GameKind(const json& c) {
  if (c.contains("game")) {
    if (!c["game"].is_string()) throw ConfigError("'game' must be a string");
    std::string g = c["game"];
    if (g != "two_player" && g != "gaussian") {
      throw ConfigError("'game' must be two_player or gaussian");
    }
    return g;
  }
  if (c.contains("rates")) return "two_player";
  if (c.contains("n")) return "gaussian";
  throw ConfigError("cannot tell the game type; set 'game'");
}

}  // namespace

json ResolveConfig(const std::string& command, json c, const Overrides& o) {
  auto it = kCommandMode.find(command);
  if (it == kCommandMode.end()) {
    throw ConfigError("unknown subcommand '" + command + "'");
  }
  if (!c.is_object()) throw ConfigError("config must be a JSON object");
  const std::string mode = it->second;
  const bool sampled = mode == "simulate" || mode == "certify" || mode == "curves";
  if (c.contains("mode")) {
    if (!c["mode"].is_string()) throw ConfigError("'mode' must be a string");
    std::string m = c["mode"];
    // A solver config can drive the sampling commands: its mode names the
    // game.
    bool game_mode = m == "two_player" || m == "gaussian";
    if (m != mode && !(sampled && game_mode)) {
      throw ConfigError("config mode '" + m + "' does not match subcommand '" +
                        command + "'");
    }
    if (sampled && game_mode && !c.contains("game")) c["game"] = m;
  }

  std::string game = mode;
  if (sampled) {
    game = GameKind(c);
    c["game"] = game;
    c["mode"] = mode == "curves" ? game : mode;
  } else {
    c["mode"] = mode;
  }

  numerics::Tolerances defaults;
  json tol = c.value("tolerances", json::object());
  if (!tol.is_object()) throw ConfigError("'tolerances' must be an object");
  tol["root_abs"] = tol.value("root_abs", defaults.root_abs);
  tol["payoff_abs"] = tol.value("payoff_abs", defaults.payoff_abs);
  tol["grid_step"] = tol.value("grid_step", defaults.grid_step);
  tol["ode_step"] = tol.value("ode_step", defaults.ode_step);
  if (o.tol) tol["root_abs"] = *o.tol;
  if (o.grid && mode != "simulate" && mode != "certify") {
    tol["grid_step"] = *o.grid;
  }
  c["tolerances"] = tol;

  if (game == "two_player") {
    RequireNumber(c, "capacity");
    if (!c.contains("rates") || !c["rates"].is_array() ||
        c["rates"].size() != 2) {
      throw ConfigError("two_player needs 'rates': [rate_1, rate_2]");
    }
  } else {
    RequireNumber(c, "capacity");
    RequireNumber(c, "n");
    if (!c.contains("demand")) throw ConfigError("missing field 'demand'");
  }
  if (!c.contains("cost")) c["cost"] = {{"kind", "zero"}};

  if (mode == "simulate" || mode == "certify") {
    if (o.seed) c["seed"] = *o.seed;
    if (!c.contains("seed") || !c["seed"].is_number_unsigned()) {
      throw ConfigError(command + " needs an explicit --seed");
    }
    if (o.reps) c["replications"] = *o.reps;
    c["replications"] = c.value("replications", 10000);
    if (!c["replications"].is_number_integer() ||
        c["replications"].get<long>() < 1) {
      throw ConfigError("'replications' must be a positive integer");
    }
    c["action_step"] = o.grid ? *o.grid : c.value("action_step", 0.01);
    c["value_grid_points"] = c.value("value_grid_points", 50);
  }
  c["curve_points"] = c.value("curve_points", 400);
  return c;
}

DemandModel DemandFromJson(const json& j, double cap) {
  if (!j.is_object() || !j.contains("family")) {
    throw ConfigError("'demand' needs a 'family'");
  }
  std::string fam = j["family"];
  if (fam == "exponential") {
    return DemandModel::Exponential(RequireNumber(j, "rate"), cap);
  }
  if (fam == "lomax") {
    return DemandModel::Lomax(RequireNumber(j, "scale"),
                              RequireNumber(j, "shape"), cap);
  }
  throw ConfigError("unknown demand family '" + fam + "'");
}

CostFunction CostFromJson(const json& j, double cap) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ConfigError("'cost' needs a 'kind'");
  }
  std::string kind = j["kind"];
  if (kind == "zero") return CostFunction::Zero(cap);
  if (kind == "quadratic") {
    return CostFunction::Quadratic(RequireNumber(j, "coef"), cap);
  }
  throw ConfigError("unknown cost kind '" + kind + "'");
}

numerics::Tolerances TolerancesFromJson(const json& j) {
  numerics::Tolerances t;
  t.root_abs = RequireNumber(j, "root_abs");
  t.payoff_abs = RequireNumber(j, "payoff_abs");
  t.grid_step = RequireNumber(j, "grid_step");
  t.ode_step = RequireNumber(j, "ode_step");
  t.Validate();
  return t;
}

two_player::Game TwoPlayerFromJson(const json& c) {
  two_player::Game g;
  g.cap = RequireNumber(c, "capacity");
  g.rates = {c["rates"][0].get<double>(), c["rates"][1].get<double>()};
  g.cost = CostFromJson(c["cost"], g.cap);
  g.Validate();
  return g;
}

gaussian::Game GaussianFromJson(const json& c) {
  double n = RequireNumber(c, "n");
  if (n < 2 || n != std::floor(n)) throw ConfigError("'n' must be an integer >= 2");
  double cn = RequireNumber(c, "capacity");
  return gaussian::Game::Make(static_cast<std::size_t>(n), cn,
                              DemandFromJson(c["demand"], cn),
                              CostFromJson(c["cost"], cn));
}

namespace {

void WriteFile(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

json TwoPlayerReport(const two_player::Solution& s) {
  json players = json::array();
  for (int i = 0; i < 2; ++i) {
    players.push_back(
        {{"theta", s.theta[i]},
         {"v_star", s.v_star[i] ? json(*s.v_star[i]) : json(nullptr)},
         {"switch_points", s.strategies[i].switch_points()},
         {"record_levels", s.record_levels[i]}});
  }
  json r = {{"classification", two_player::ToString(s.profile)},
            {"players", players}};
  if (s.flat_sup) r["flat_sup"] = *s.flat_sup;
  if (s.identity_at_vstar) r["identity_at_vstar"] = *s.identity_at_vstar;
  return r;
}

json TwoPlayerStrategies(const two_player::Solution& s) {
  return {{"players",
           {ToJson(EquilibriumStrategy(s.strategies[0])),
            ToJson(EquilibriumStrategy(s.strategies[1]))}}};
}

std::vector<EquilibriumStrategy> LoadStrategies(const std::string& path,
                                                double cap) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read strategy file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  std::string text = ss.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("strategy file: ") + e.what());
  }
  std::vector<EquilibriumStrategy> out;
  if (j.is_object() && j.contains("players")) {
    for (const auto& p : j["players"]) out.push_back(StrategyFromJson(p));
  } else {
    out.push_back(StrategyFromJson(j));
  }
  for (const auto& s : out) {
    if (std::abs(s.cap() - cap) > 1e-9 * (1 + cap)) {
      std::ostringstream os;
      os << "strategy file cap " << s.cap() << " does not match config capacity "
         << cap;
      throw ConfigError(os.str());
    }
  }
  return out;
}

EquilibriumStrategy Perturb(const EquilibriumStrategy& s, double shift) {
  if (shift == 0 || s.chattering()) return s;
  std::vector<double> sp;
  for (double t : s.prefix().switch_points()) {
    sp.push_back(std::min(t + shift, s.cap()));
  }
  return EquilibriumStrategy(AifStrategy(s.cap(), sp));
}

struct Prepared {
  std::string game;
  double cap = 0;
  std::vector<EquilibriumStrategy> strategies;
  std::optional<two_player::Model> two;
  std::optional<gaussian::Game> gauss;
};

Prepared Prepare(const json& c) {
  Prepared p;
  p.game = c["game"];
  numerics::Tolerances tol = TolerancesFromJson(c["tolerances"]);
  if (p.game == "two_player") {
    p.two.emplace(TwoPlayerFromJson(c));
    p.cap = p.two->game().cap;
    if (c.contains("strategy_file")) {
      p.strategies = LoadStrategies(c["strategy_file"], p.cap);
      if (p.strategies.size() != 2) {
        throw ConfigError("two_player strategy file needs two players");
      }
    } else {
      auto sol = p.two->Solve(tol);
      p.strategies = {EquilibriumStrategy(sol.strategies[0]),
                      EquilibriumStrategy(sol.strategies[1])};
    }
  } else {
    p.gauss.emplace(GaussianFromJson(c));
    p.cap = p.gauss->cap_total;
    if (c.contains("strategy_file")) {
      p.strategies = LoadStrategies(c["strategy_file"], p.cap);
    } else {
      gaussian::SolveOptions so;
      so.tol = tol;
      p.strategies = {gaussian::Solve(*p.gauss, so).strategy};
    }
  }
  return p;
}

sim::Population PopulationFor(const Prepared& p, int probe) {
  sim::Population pop;
  pop.cap_total = p.cap;
  if (p.two) {
    int o = 1 - probe;
    pop.opponents.push_back(
        {DemandModel::Exponential(p.two->game().rates[o], p.cap),
         p.strategies[o], 1});
  } else {
    pop.opponents.push_back(
        {p.gauss->demand, p.strategies[0], p.gauss->n - 1});
  }
  return pop;
}

std::vector<int> Probes(const json& c, const Prepared& p) {
  if (!p.two) return {0};
  if (c.contains("player")) {
    int k = c["player"];
    if (k != 1 && k != 2) throw ConfigError("'player' must be 1 or 2");
    return {k - 1};
  }
  return {0, 1};
}

int Execute(const std::string& command, const json& config,
            const Overrides& o, const fs::path& out) {
  json c = ResolveConfig(command, config, o);
  fs::create_directories(out);
  json report = {{"config", c}, {"command", command}};
  numerics::Tolerances tol = TolerancesFromJson(c["tolerances"]);
  const int curve_points = c["curve_points"];

  if (command == "solve2p" ||
      (command == "curves" && c["game"] == "two_player")) {
    two_player::Model model(TwoPlayerFromJson(c));
    auto sol = model.Solve(tol);
    report["solution"] = TwoPlayerReport(sol);
    std::ostringstream curves;
    two_player::WriteCurves(curves, model, sol, curve_points);
    WriteFile(out / "curves.csv", curves.str());
    WriteFile(out / "strategy.json", TwoPlayerStrategies(sol).dump(2));
  } else if (command == "gaussian" || command == "curves") {
    gaussian::Game g = GaussianFromJson(c);
    gaussian::SolveOptions so;
    so.tol = tol;
    auto sol = gaussian::Solve(g, so);
    report["trace"] = gaussian::ToJson(sol.trace);
    report["diagnostics"] = gaussian::ToJson(
        gaussian::ZScoreDiagnostics(g, sol.strategy));
    if (sol.chatter) {
      report["chattering"] = {
          {"p_star", sol.chatter_p_star},
          {"entry_slope", sol.chatter->entry_slope},
          {"entry_ratio", sol.chatter->entry_ratio},
          {"max_residual", sol.chatter->max_residual},
          {"exit", sol.chatter->exit},
          {"exit_reason", gaussian::ToString(sol.chatter->reason)}};
    }
    std::ostringstream curves;
    gaussian::WriteCurves(curves, g, sol, curve_points);
    WriteFile(out / "curves.csv", curves.str());
    WriteFile(out / "strategy.json", ToJson(sol.strategy).dump(2));
  } else if (command == "fluid") {
    double n = RequireNumber(c, "n");
    double cn = RequireNumber(c, "capacity");
    auto fs_sol = fluid::Solve(cn / n, DemandFromJson(c["demand"], cn),
                               CostFromJson(c["cost"], cn), tol);
    report["solution"] = {{"per_capita_capacity", cn / n},
                          {"xi_cost", Finite(fs_sol.xi_cost)},
                          {"xi_hat", Finite(fs_sol.xi_hat)},
                          {"effective_cap", Finite(fs_sol.effective_cap)}};
    WriteFile(out / "strategy.json",
              ToJson(EquilibriumStrategy(fs_sol.strategy)).dump(2));
  } else if (command == "simulate") {
    Prepared p = Prepare(c);
    sim::RunOptions ro;
    ro.seed = c["seed"];
    ro.replications = c["replications"];
    ro.ties = sim::TieRule::kProbeFirst;
    std::vector<double> xs;
    if (c.contains("probes")) {
      xs = c["probes"].get<std::vector<double>>();
    } else {
      xs = sim::UniformGrid(0, p.cap, 41);
    }
    std::ostringstream csv;
    csv << "# srfgame-simulation v1\n";
    csv << "player,x,empirical,std_error,analytic\n";
    csv.precision(10);
    json rows = json::array();
    for (int probe : Probes(c, p)) {
      auto est = sim::EmpiricalSuccess(xs, PopulationFor(p, probe), ro);
      for (std::size_t k = 0; k < xs.size(); ++k) {
        double analytic =
            p.two ? p.two->SuccessProbability(probe, xs[k],
                                              p.strategies[1 - probe].prefix())
                  : gaussian::SuccessProbability(*p.gauss, p.strategies[0],
                                                 xs[k]);
        csv << probe + 1 << ',' << xs[k] << ',' << est[k].mean << ','
            << est[k].std_error << ',' << analytic << '\n';
        rows.push_back({{"player", probe + 1},
                        {"x", xs[k]},
                        {"empirical", est[k].mean},
                        {"std_error", est[k].std_error},
                        {"analytic", analytic}});
      }
    }
    report["success"] = rows;
    WriteFile(out / "curves.csv", csv.str());
  } else if (command == "certify") {
    Prepared p = Prepare(c);
    sim::RunOptions ro;
    ro.seed = c["seed"];
    ro.replications = c["replications"];
    ro.ties = sim::TieRule::kProbeFirst;
    double step = c["action_step"].get<double>() * p.cap;
    auto grid = sim::UniformGrid(p.cap / c["value_grid_points"].get<int>(),
                                 p.cap, c["value_grid_points"]);
    double shift = c.value("perturb_switch", 0.0);
    CostFunction cost = p.two ? p.two->game().cost : p.gauss->cost;
    json certs = json::array();
    std::ostringstream csv;
    bool pass = true;
    for (int probe : Probes(c, p)) {
      EquilibriumStrategy own = Perturb(p.strategies[p.two ? probe : 0], shift);
      auto cert = sim::CertifyEquilibrium(own, PopulationFor(p, probe), cost,
                                          grid, step, ro);
      json j = sim::ToJson(cert);
      j["player"] = probe + 1;
      double bound = std::max(0.02, 4 * cert.worst_gap_std_error);
      j["bound"] = bound;
      j["certified"] = cert.worst_gap <= bound;
      pass = pass && cert.worst_gap <= bound;
      certs.push_back(j);
      sim::WriteCertificateCsv(csv, cert);
    }
    report["certificates"] = certs;
    report["certified"] = pass;
    WriteFile(out / "curves.csv", csv.str());
  }
  WriteFile(out / "report.json", report.dump(2));
  return kOk;
}

}  // namespace

int Run(const std::string& command, const json& config, const Overrides& o,
        const std::string& out_dir, std::ostream& err) {
  try {
    return Execute(command, config, o, fs::path(out_dir));
  } catch (const AssumptionViolation& e) {
    err << "assumption violation: " << e.what() << '\n';
    return kBadAssumption;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const numerics::ToleranceError& e) {
    err << "config error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const numerics::NoSignChange& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const gaussian::NoProgress& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const gaussian::MarginalViolated& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const gaussian::NonIncreasing& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int RunFile(const std::string& command, const std::string& config_path,
            const Overrides& o, const std::string& out_dir, std::ostream& err) {
  json config;
  try {
    std::ifstream f(config_path);
    if (!f) {
      err << "config error: cannot read " << config_path << '\n';
      return kBadConfig;
    }
    config = json::parse(f);
  } catch (const json::parse_error& e) {
    err << "config error: " << config_path << ": " << e.what() << '\n';
    return kBadConfig;
  }
  return Run(command, config, o, out_dir, err);
}

}  // namespace srfgame::cli
