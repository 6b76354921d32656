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

#include "srfgame/two_player.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace srfgame::two_player {

namespace {
constexpr double kSlack = 1e-12;

void CheckRange(double x, double lo, double hi, const char* what) {
  if (!(x >= lo - kSlack * (1 + std::abs(lo))) ||
      x > hi + kSlack * (1 + std::abs(hi))) {
    std::ostringstream os;
    os << what << " = " << x << " outside [" << lo << ", " << hi << "]";
    throw OutOfDomain(os.str());
  }
}
}  // namespace

void Game::Validate() const {
  if (!(cap > 0) || !std::isfinite(cap)) throw ConfigError("cap must be > 0");
  for (double r : rates) {
    if (!(r > 0) || !std::isfinite(r)) throw ConfigError("rates must be > 0");
  }
  // Only the cost assumptions matter here; the demand check is a formality
  // for exponentials.
  ValidationReport report =
      ValidateAssumptions(cost, DemandModel::Exponential(rates[0]), cap);
  if (!report.ok()) throw AssumptionViolation(report);
}

std::string ToString(Profile p) {
  switch (p) {
    case Profile::kIdentity: return "AIF0/AIF0";
    case Profile::kAif1Aif1: return "AIF1/AIF1";
    case Profile::kAif1Aif3: return "AIF1/AIF3";
    case Profile::kAif3Aif1: return "AIF3/AIF1";
  }
  return "?";
}

double ThetaRoot(const CostFunction& cost, double opponent_rate,
                 const numerics::Tolerances& tol) {
  // The root may sit beyond the game's cap, so evaluate psi' unrestricted.
  const CostFunction open = cost.WithCap(kInf);
  auto h = [&](double y) {
    return std::exp(-y) * (1 - y) - y - open.PsiPrime(y / opponent_rate);
  };
  // h(0) = 1 - psi'(0) > 0 and h decreases; grow the bracket until it
  // changes sign. h(1) < 0 already when psi' >= 0.
  double hi = 1;
  while (h(hi) > 0) hi *= 2;
  return numerics::FindRoot(h, 0, hi, tol);
}

Model::Model(Game game) : game_(std::move(game)) { game_.Validate(); }

double Model::Exp(int i, double x) const {
  return std::exp(-OpponentRate(i) * x);
}

double Model::Theta(int i) const {
  return ThetaRoot(game_.cost, OpponentRate(i));
}

double Model::PIdentity(int i, double v) const {
  const double c = game_.cap;
  CheckRange(v, 0, c, "identity action");
  return v * (1 + Exp(i, v) - Exp(i, c - v)) - game_.cost.Psi(v);
}

double Model::PIdentityPrime(int i, double v) const {
  const double c = game_.cap, l = OpponentRate(i);
  CheckRange(v, 0, c, "identity action");
  double a = Exp(i, v), b = Exp(i, c - v);
  return 1 + a - b - l * v * (a + b) - game_.cost.PsiPrime(v);
}

double Model::PIdentitySecond(int i, double v) const {
  const double c = game_.cap, l = OpponentRate(i);
  CheckRange(v, 0, c, "identity action");
  double a = Exp(i, v), b = Exp(i, c - v);
  return l * (l * v - 2) * a - l * (l * v + 2) * b -
         game_.cost.PsiSecond(v);
}

double Model::PFlat(int i, double v, double tau) const {
  const double c = game_.cap;
  CheckRange(tau, 0, c, "flat end");
  CheckRange(v, 0, tau, "flat action");
  double tail = tau >= c ? 0 : Exp(i, tau);
  return v * (1 + tail - Exp(i, c - v)) - game_.cost.Psi(v);
}

double Model::PFlatPrime(int i, double v, double tau) const {
  const double c = game_.cap, l = OpponentRate(i);
  CheckRange(tau, 0, c, "flat end");
  CheckRange(v, 0, tau, "flat action");
  double tail = tau >= c ? 0 : Exp(i, tau);
  return 1 + tail - (1 + l * v) * Exp(i, c - v) - game_.cost.PsiPrime(v);
}

std::optional<double> Model::VStar(int i) const {
  const double c = game_.cap;
  if (OpponentRate(i) * c <= Theta(i)) return std::nullopt;
  numerics::Tolerances tol;
  return numerics::FirstStationaryPoint(
      [&](double v) { return PIdentityPrime(i, v); }, c / 2, c, tol);
}

double Model::SuccessProbability(int i, double x,
                                 const AifStrategy& opponent) const {
  const double c = game_.cap;
  CheckRange(x, 0, c, "request");
  if (x <= c / 2) return 1;
  auto F = [&](double v) { return std::isinf(v) ? 1.0 : 1 - Exp(i, v); };
  return 1 - F(opponent.GeneralizedInverse(x)) +
         F(opponent.GeneralizedInverse(c - x));
}

double Model::Payoff(int i, double x, const AifStrategy& opponent) const {
  return x * SuccessProbability(i, x, opponent) - game_.cost.Psi(x);
}

numerics::Extremum Model::BestResponse(int i, double v,
                                       const AifStrategy& opponent,
                                       const numerics::Tolerances& tol) const {
  const double c = game_.cap;
  CheckRange(v, 0, c, "value");
  if (v <= 0) return {0, Payoff(i, 0, opponent)};
  auto f = [&](double x) { return Payoff(i, x, opponent); };
  numerics::Extremum best = numerics::MaxOnInterval(f, 0, v, tol);
  // The payoff jumps at opponent flat levels and their mirror images; the
  // grid can straddle them, so try both sides explicitly.
  std::vector<double> candidates = {v, std::min(v, c / 2)};
  for (double t : opponent.switch_points()) {
    for (double x : {t, c - t}) {
      for (double d : {0.0, -1e-12, 1e-12}) candidates.push_back(x + d);
    }
  }
  for (double x : candidates) {
    if (x < 0 || x > v) continue;
    double fx = f(x);
    if (fx > best.value + 1e-15) best = {x, fx};
  }
  return best;
}

Solution Model::Solve(const numerics::Tolerances& tol) const {
  const double c = game_.cap;
  Solution sol;
  for (int i = 0; i < 2; ++i) {
    sol.theta[i] = Theta(i);
    sol.v_star[i] = VStar(i);
  }
  if (!sol.v_star[0] && !sol.v_star[1]) {
    sol.profile = Profile::kIdentity;
    sol.strategies = {AifStrategy(c, {}), AifStrategy(c, {})};
    return sol;
  }
  // Mover: the player with the smaller interior maximiser; ties go to
  // player 0.
  int i = 0;
  if (!sol.v_star[0] ||
      (sol.v_star[1] && *sol.v_star[1] < *sol.v_star[0])) {
    i = 1;
  }
  const int j = 1 - i;
  const double vs = *sol.v_star[i];
  sol.strategies[i] = AifStrategy(c, {vs});

  const double target = PIdentity(j, vs);
  auto flat = [&](double v) { return PFlat(j, v, c); };
  numerics::Extremum sup = numerics::MaxOnInterval(flat, vs, c, tol);
  sol.flat_sup = sup.value;
  sol.identity_at_vstar = target;
  if (sup.value <= target + tol.payoff_abs) {
    sol.strategies[j] = AifStrategy(c, {vs});
    sol.profile = Profile::kAif1Aif1;
  } else {
    auto gap = [&](double v) { return flat(v) - target; };
    // Smallest root of the gap on [v*, argmax]: forward scan then bisect.
    const long steps = std::lround(1.0 / tol.grid_step);
    double lo = vs, t2 = sup.argmax;
    for (long k = 1; k <= steps; ++k) {
      double x = vs + (sup.argmax - vs) * static_cast<double>(k) /
                          static_cast<double>(steps);
      if (gap(x) > 0) {
        t2 = numerics::FindRoot(gap, lo, x, tol);
        break;
      }
      lo = x;
    }
    auto t3 = numerics::FirstStationaryPoint(
        [&](double v) { return PFlatPrime(j, v, c); }, t2, c, tol);
    sol.strategies[j] = AifStrategy(c, {vs, t2, t3.value_or(sup.argmax)});
    sol.profile = i == 1 ? Profile::kAif3Aif1 : Profile::kAif1Aif3;
  }
  for (int k = 0; k < 2; ++k) {
    for (double t : sol.strategies[k].switch_points()) {
      sol.record_levels[k].push_back(Payoff(k, t, sol.strategies[1 - k]));
    }
  }
  return sol;
}

void WriteCurves(std::ostream& os, const Model& model, const Solution& sol,
                 int n) {
  const double c = model.game().cap;
  os << "# srfgame-curves v1 two_player\n";
  os << "v,p_identity_1,p_flat_1,p_identity_2,p_flat_2,s_1,s_2\n";
  os.precision(10);
  for (int k = 0; k <= n; ++k) {
    double v = c * k / n;
    os << v << ',' << model.PIdentity(0, v) << ',' << model.PFlat(0, v, c)
       << ',' << model.PIdentity(1, v) << ',' << model.PFlat(1, v, c) << ','
       << sol.strategies[0](v) << ',' << sol.strategies[1](v) << '\n';
  }
}

}  // namespace srfgame::two_player
