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

#ifndef SRFGAME_SIM_H_
#define SRFGAME_SIM_H_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "json.hpp"
#include "srfgame/model.h"
#include "srfgame/strategy.h"

namespace srfgame::sim {

// SplitMix64 stream keyed by (seed, stream index), so each replication has
// its own generator independent of scheduling.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t Next();
  // Uniform on [0, 1).
  double Uniform();
  // Uniform on {0, ..., n - 1}.
  std::size_t Below(std::size_t n);

 private:
  std::uint64_t state_;
};

struct AllocationOutcome {
  std::vector<bool> granted;
  std::vector<double> granted_amounts;
  double leftover = 0;
};

// Smallest request first, all or nothing. Ties are broken by a uniformly
// random permutation applied before a stable sort.
AllocationOutcome Allocate(std::span<const double> requests, double cap_total,
                           Rng& rng);

// How a probe request that equals some opponents' requests is ordered.
// kRandom follows the mechanism; kProbeFirst matches the left-limit
// convention of the analytic success probabilities.
enum class TieRule { kRandom, kProbeFirst };

struct OpponentGroup {
  DemandModel demand;
  EquilibriumStrategy strategy;
  std::size_t count = 1;
};

struct Population {
  double cap_total = 0;
  std::vector<OpponentGroup> opponents;
};

struct Estimate {
  double mean = 0;
  double std_error = 0;
};

struct RunOptions {
  std::size_t replications = 10000;
  std::uint64_t seed = 0;
  TieRule ties = TieRule::kRandom;
  // 0 picks the hardware concurrency.
  unsigned threads = 0;
};

// Success frequency of each probe request in xs against one shared set of
// opponent samples per replication.
std::vector<Estimate> EmpiricalSuccess(std::span<const double> xs,
                                       const Population& pop,
                                       const RunOptions& opt);
Estimate EmpiricalSuccess(double x, const Population& pop,
                          const RunOptions& opt);

// Action grid {0, h, 2h, ...} up to cap; v itself is always a candidate.
std::vector<double> ActionGrid(double cap, double step);

struct OracleResult {
  double argmax = 0;
  double payoff = 0;
  double std_error = 0;
};

OracleResult BestResponseOracle(double v, const Population& pop,
                                const CostFunction& cost, double action_step,
                                const RunOptions& opt);

struct GapCertificate {
  std::vector<double> value_grid;
  std::vector<double> strategy_action;
  std::vector<double> strategy_payoff;
  std::vector<double> oracle_payoff;
  std::vector<double> oracle_argmax;
  std::vector<double> std_error;
  double worst_gap = 0;
  double worst_gap_std_error = 0;
  double worst_gap_at = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
};

// Gap between the best grid deviation and the probe strategy's action at
// every value in value_grid. Standard errors are paired: the success
// indicators are monotone in the request, so the joint success of two
// requests is the success of the larger one.
GapCertificate CertifyEquilibrium(const EquilibriumStrategy& probe,
                                  const Population& pop,
                                  const CostFunction& cost,
                                  std::span<const double> value_grid,
                                  double action_step, const RunOptions& opt);

std::vector<double> UniformGrid(double lo, double hi, int points);

nlohmann::json ToJson(const GapCertificate& c);
void WriteCertificateCsv(std::ostream& os, const GapCertificate& c);

// sup over v_grid of |(1/m) sum_j s(V_j) 1{V_j <= v} - mu(v)| for m sampled
// opponents, with mu from quadrature.
double EmpiricalLoadGap(const EquilibriumStrategy& s, const DemandModel& d,
                        std::size_t m, std::span<const double> v_grid,
                        std::uint64_t seed);

}  // namespace srfgame::sim

#endif  // SRFGAME_SIM_H_
