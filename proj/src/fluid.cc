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

#include "srfgame/fluid.h"

#include <algorithm>
#include <cmath>

namespace srfgame::fluid {

double Load(const DemandModel& demand, double xi) {
  if (xi >= demand.cap()) return demand.Mean();
  return demand.PartialMoment1(xi) + xi * (1 - demand.Cdf(xi));
}

Solution Solve(double c, const DemandModel& demand, const CostFunction& cost,
               const numerics::Tolerances& tol) {
  if (!(c > 0) || !std::isfinite(c)) {
    throw ConfigError("per-capita capacity must be positive");
  }
  const double span = std::isfinite(demand.cap()) ? demand.cap() : cost.cap();
  if (std::isfinite(span)) {
    ValidationReport report = ValidateAssumptions(cost, demand, span, c / 2);
    if (!report.ok()) throw AssumptionViolation(report);
  }
  Solution sol;
  sol.xi_cost = cost.XiCost();
  const double upper = std::min(sol.xi_cost, demand.cap());
  if (Load(demand, upper) < c) {
    sol.xi_hat = kInf;
  } else {
    // Unbounded support: double until the load reaches c.
    double hi = upper;
    if (!std::isfinite(hi)) {
      hi = std::max(c, 1e-12);
      while (Load(demand, hi) < c) hi *= 2;
    }
    sol.xi_hat = numerics::FindRoot(
        [&](double xi) { return Load(demand, xi) - c; }, 0, hi, tol);
  }
  sol.effective_cap = std::min(sol.xi_cost, sol.xi_hat);
  const double strategy_cap = std::isfinite(demand.cap()) ? demand.cap()
                                                     : cost.cap();
  if (std::isfinite(sol.effective_cap) && sol.effective_cap < strategy_cap) {
    sol.strategy = AifStrategy(strategy_cap, {sol.effective_cap});
  } else {
    sol.strategy = AifStrategy(strategy_cap, {});
  }
  return sol;
}

}  // namespace srfgame::fluid
