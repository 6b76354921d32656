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

#ifndef SRFGAME_TWO_PLAYER_H_
#define SRFGAME_TWO_PLAYER_H_

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "srfgame/model.h"
#include "srfgame/numerics.h"
#include "srfgame/strategy.h"

namespace srfgame::two_player {

// Two players with exponential demands sharing capacity c. Players are
// indexed 0 and 1; each payoff depends on the opponent's rate.
struct Game {
  double cap = 2;
  std::array<double, 2> rates = {1, 1};
  CostFunction cost = CostFunction::Zero(2);

  void Validate() const;
};

enum class Profile { kIdentity, kAif1Aif1, kAif1Aif3, kAif3Aif1 };
std::string ToString(Profile p);

struct Solution {
  std::array<double, 2> theta{};
  std::array<std::optional<double>, 2> v_star;
  std::array<AifStrategy, 2> strategies;
  Profile profile = Profile::kIdentity;
  // Payoff of each switch point action against the opponent's strategy.
  std::array<std::vector<double>, 2> record_levels;
  // Sup of the mover's flat payoff over [v*, c], compared with its identity
  // payoff at v* when deciding between the two asymmetric profiles.
  std::optional<double> flat_sup;
  std::optional<double> identity_at_vstar;
};

// Root of e^{-y}(1 - y) - y - psi'(y / rate) on [0, 1].
double ThetaRoot(const CostFunction& cost, double opponent_rate,
                 const numerics::Tolerances& tol = {});

class Model {
 public:
  explicit Model(Game game);

  const Game& game() const { return game_; }
  double OpponentRate(int i) const { return game_.rates[1 - i]; }

  double Theta(int i) const;
  // Interior maximiser of the identity payoff on [c/2, c], if one exists.
  std::optional<double> VStar(int i) const;

  // Payoff of player i requesting v when the opponent plays identity.
  double PIdentity(int i, double v) const;
  double PIdentityPrime(int i, double v) const;
  double PIdentitySecond(int i, double v) const;
  // Payoff when the opponent plays identity up to tau and is flat after.
  double PFlat(int i, double v, double tau) const;
  double PFlatPrime(int i, double v, double tau) const;

  // Pr(request x is granted) for player i against an opponent AIF strategy.
  double SuccessProbability(int i, double x,
                            const AifStrategy& opponent) const;
  double Payoff(int i, double x, const AifStrategy& opponent) const;

  // argmax over x in [0, v] of x r(x) - psi(x), scanning the opponent's
  // jump points explicitly.
  numerics::Extremum BestResponse(int i, double v, const AifStrategy& opponent,
                                  const numerics::Tolerances& tol = {}) const;

  Solution Solve(const numerics::Tolerances& tol = {}) const;

 private:
  double Exp(int i, double x) const;
  Game game_;
};

// Writes payoff curves and strategies on n + 1 points of [0, c].
void WriteCurves(std::ostream& os, const Model& model, const Solution& sol,
                 int n);

}  // namespace srfgame::two_player

#endif  // SRFGAME_TWO_PLAYER_H_
