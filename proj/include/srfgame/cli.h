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

#ifndef SRFGAME_CLI_H_
#define SRFGAME_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "srfgame/gaussian.h"
#include "srfgame/model.h"
#include "srfgame/numerics.h"
#include "srfgame/two_player.h"

namespace srfgame::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kBadConfig = 2;
inline constexpr int kBadAssumption = 3;
inline constexpr int kSolverError = 4;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> reps;
  std::optional<double> grid;
  std::optional<double> tol;
};

// Fills defaults and applies command-line overrides; the result is what the
// reports embed.
nlohmann::json ResolveConfig(const std::string& command, nlohmann::json config,
                             const Overrides& o);

DemandModel DemandFromJson(const nlohmann::json& j, double cap);
CostFunction CostFromJson(const nlohmann::json& j, double cap);
numerics::Tolerances TolerancesFromJson(const nlohmann::json& j);
two_player::Game TwoPlayerFromJson(const nlohmann::json& config);
gaussian::Game GaussianFromJson(const nlohmann::json& config);

// Runs one subcommand, writing report.json and, where relevant,
// strategy.json and curves.csv into out_dir. Diagnostics go to err.
int Run(const std::string& command, const nlohmann::json& config,
        const Overrides& o, const std::string& out_dir, std::ostream& err);

int RunFile(const std::string& command, const std::string& config_path,
            const Overrides& o, const std::string& out_dir, std::ostream& err);

}  // namespace srfgame::cli

#endif  // SRFGAME_CLI_H_
