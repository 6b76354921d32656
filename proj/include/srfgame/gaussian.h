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

#ifndef SRFGAME_GAUSSIAN_H_
#define SRFGAME_GAUSSIAN_H_

#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "srfgame/model.h"
#include "srfgame/numerics.h"
#include "srfgame/strategy.h"

namespace srfgame::gaussian {

// n symmetric players, total capacity c_n. The opponents' granted load is
// approximated by a normal law with matching mean and variance.
struct Game {
  std::size_t n = 2;
  double cap_total = 1;
  DemandModel demand = DemandModel::Exponential(1);
  CostFunction cost = CostFunction::Zero(1);

  // Censors demand at c_n, gives the cost the domain [0, c_n] and checks the
  // standing assumptions.
  static Game Make(std::size_t n, double cap_total, const DemandModel& demand,
                   const CostFunction& cost);
  double per_capita() const { return cap_total / static_cast<double>(n); }
  void Validate() const;
};

// Integrals of the strategy over the frozen part [0, end]: m1 = E[s 1{V<=end}],
// m2 = E[s^2 1{V<=end}].
struct Prefix {
  double end = 0;
  double m1 = 0;
  double m2 = 0;
};

enum class Mode { kIdentity, kFlat, kChatter };
std::string ToString(Mode m);

// Local description of a strategy branch at v: the player's own action and
// the per-opponent moments, with derivatives in v.
struct Branch {
  double action = 0, d_action = 0;
  double mu = 0, d_mu = 0;
  double m2 = 0, d_m2 = 0;
};

Branch IdentityBranch(const Game& g, const Prefix& p, double v);
// Flat at level p.end from p.end onwards, with the contingent half weight.
Branch FlatBranch(const Game& g, const Prefix& p, double v);

struct Point {
  double mu = 0, sigma = 0;
  double w = 0, phi_w = 0, cdf_w = 0;
  double p = 0, dp = 0, dw = 0;
};

// z-score and payoff of a branch; sigma = 0 takes the a.s. limit and w is
// clamped to [-37, 37].
Point Evaluate(const Game& g, const Branch& b);

double PIdentity(const Game& g, const Prefix& p, double v);
double PIdentityPrime(const Game& g, const Prefix& p, double v);
double PFlat(const Game& g, const Prefix& p, double v);
double PFlatPrime(const Game& g, const Prefix& p, double v);

// Prefix after closing an identity piece [p.end, v] or a flat piece at level
// p.end on [p.end, v] (the latter with the full, non-contingent weight).
Prefix CloseIdentity(const Game& g, const Prefix& p, double v);
Prefix CloseFlat(const Game& g, const Prefix& p, double v);

enum class Side { kEndOfIdentity, kEndOfFlat };

struct Transition {
  Side side = Side::kEndOfIdentity;
  double at = 0;
  double d_identity = 0;  // one-sided derivatives at at+
  double d_flat = 0;
  double probe_identity = 0;  // derivatives at at + probe_step
  double probe_flat = 0;
  Mode next = Mode::kFlat;
};

// Next mode from the one-sided derivatives at a switch point.
Mode DetectConflict(Side side, double d_identity, double d_flat);

struct Segment {
  Mode mode;
  double start, end;
};

struct RegimeTrace {
  std::vector<Segment> segments;
  std::vector<double> switch_points;
  std::vector<double> record_highs;
  std::vector<double> flat_suprema;
  std::vector<Transition> transitions;
  std::optional<double> chatter_entry;
  std::optional<double> chatter_exit;
  std::string chatter_exit_reason;
};

nlohmann::json ToJson(const RegimeTrace& t);

class MarginalViolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NonIncreasing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NoProgress : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChatterState {
  double v = 0, eta = 0, mu = 0, sigma = 0;
};

struct ChatterOptions {
  // Absolute step; 0 means ode_step * (end - entry).
  double step = 0;
  double eps_marginal = 1e-6;
  // Use v instead of eta in the variance equation.
  bool literal_sigma = false;
  // Right end of the integration; 0 means c_n.
  double end = 0;
  // Lowest admissible eta when re-solving the sustaining equation.
  double floor = 0;
  numerics::Tolerances tol;
};

enum class ExitReason { kSlope, kMarginal, kCapacity, kTangency };
std::string ToString(ExitReason r);

struct ChatterResult {
  ChatteringStrategy strategy;
  std::vector<double> mu, sigma;
  double exit = 0;
  ExitReason reason = ExitReason::kCapacity;
  // Slope from the sustaining equation at entry and its conflict-ratio form.
  double entry_slope = 0;
  double entry_ratio = 0;
  double max_residual = 0;
};

// Coefficients of the differentiated sustaining equation a eta' + b = 0:
// a is the own-action derivative, b the part driven by the moments.
struct ChatterSlope {
  double a = 0, b = 0, margin = 0, w = 0;
  double slope() const { return -b / a; }
  // Local identity and flat derivatives whose ratio gives the slope.
  double d_identity() const { return a + b; }
  double d_flat() const { return b; }
};

ChatterSlope ChatterSlopeAt(const Game& g, const ChatterState& s,
                            bool literal_sigma = false);

// Sustaining residual eta Phi(w) - psi(eta) - p_star.
double SustainingResidual(const Game& g, const ChatterState& s, double p_star);

ChatterResult ChatteringOde(const Game& g, double p_star,
                            const ChatterState& entry,
                            const ChatterOptions& opt = {});

// Forward-Euler cells of width (end - entry) / m, each a flat piece of
// width (1 - rho_j) delta followed by a unit-slope piece.
ChatteringStrategy ChatteringConstructive(const Game& g,
                                          const ChatterState& entry,
                                          double end, int m,
                                          bool literal_sigma = false);

// Entry state at v = eta = prefix.end.
ChatterState EntryState(const Prefix& p);

struct GaussianSolution {
  EquilibriumStrategy strategy;
  RegimeTrace trace;
  // Frozen prefix at the start of each trace segment.
  std::vector<Prefix> segment_prefix;
  std::optional<ChatterResult> chatter;
  double chatter_p_star = 0;
};

struct SolveOptions {
  numerics::Tolerances tol;
  double probe_step = 1e-3;
  double eps_marginal = 1e-6;
  int max_iterations = 1000;
};

GaussianSolution Solve(const Game& g, const SolveOptions& opt = {});

struct ZScoreReport {
  std::optional<double> v_tilde;
  bool w_monotone = true;
  bool phi_monotone = true;
  std::optional<double> first_w_violation;
  std::optional<double> first_phi_violation;
  double sup_strategy = 0;
  double capacity_margin = 0;
  double mu_inf = 0;
  // c - mu(inf) > 0, the condition for the numerator to have a root.
  bool slack_positive = true;
};

ZScoreReport ZScoreDiagnostics(const Game& g, const EquilibriumStrategy& s,
                               int grid = 10000);

nlohmann::json ToJson(const ZScoreReport& r);

// Actual (non-contingent) moments of a strategy over [0, v] for every v on
// the grid, integrated piecewise.
struct MomentPath {
  std::vector<double> v, m1, m2;
};
MomentPath StrategyMoments(const Game& g, const EquilibriumStrategy& s,
                           int grid);

// Gaussian success probability Phi(w) of a request x when every opponent
// plays s; opponents with requests strictly below x count as served first.
double SuccessProbability(const Game& g, const EquilibriumStrategy& s,
                          double x);

// v, s(v), w(v), Phi(w), p_I, p_F, p_eta on n + 1 points; inapplicable
// columns are left empty.
void WriteCurves(std::ostream& os, const Game& g, const GaussianSolution& sol,
                 int n);

}  // namespace srfgame::gaussian

#endif  // SRFGAME_GAUSSIAN_H_
