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

#ifndef SRFGAME_FLUID_H_
#define SRFGAME_FLUID_H_

#include "srfgame/model.h"
#include "srfgame/numerics.h"
#include "srfgame/strategy.h"

namespace srfgame::fluid {

// Deterministic large-population limit. Requests below the congestion
// threshold are always granted, so each player caps its request at the
// smaller of the cost cap and the threshold.
struct Solution {
  double xi_cost = kInf;
  double xi_hat = kInf;
  double effective_cap = kInf;
  AifStrategy strategy;
};

// Expected granted load per player when everyone plays min{v, xi}.
double Load(const DemandModel& demand, double xi);

// c is the per-capita capacity.
Solution Solve(double c, const DemandModel& demand, const CostFunction& cost,
               const numerics::Tolerances& tol = {});

}  // namespace srfgame::fluid

#endif  // SRFGAME_FLUID_H_
