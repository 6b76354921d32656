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

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "srfgame/gaussian.h"
#include "srfgame/sim.h"
#include "srfgame/two_player.h"

using namespace srfgame;
using namespace srfgame::sim;

namespace {

Population TwoPlayer(double rate, const AifStrategy& s, double cap = 2) {
  return {cap, {{DemandModel::Exponential(rate, cap), EquilibriumStrategy(s), 1}}};
}

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(1, 5), b(1, 5), c(1, 6);
  std::uint64_t x = a.Next();
  CHECK(x == b.Next());
  CHECK(x != c.Next());
  Rng d(9, 0);
  for (int k = 0; k < 1000; ++k) {
    double u = d.Uniform();
    CHECK(u >= 0);
    CHECK(u < 1);
    CHECK(d.Below(7) < 7);
  }
}

TEST_CASE("allocation examples") {
  Rng rng(3, 0);
  std::vector<double> r1 = {1.0, 1.0};
  auto o1 = Allocate(r1, 2, rng);
  CHECK(o1.granted[0]);
  CHECK(o1.granted[1]);
  std::vector<double> r2 = {1.5, 1.2};
  auto o2 = Allocate(r2, 2, rng);
  CHECK_FALSE(o2.granted[0]);
  CHECK(o2.granted[1]);
  CHECK(o2.leftover == doctest::Approx(0.8));
  CHECK(o2.granted_amounts[1] == 1.2);
  std::vector<double> bad = {2.5};
  CHECK_THROWS_AS(Allocate(bad, 2, rng), OutOfDomain);
  std::vector<double> neg = {-0.1};
  CHECK_THROWS_AS(Allocate(neg, 2, rng), OutOfDomain);
}

TEST_CASE("ties are broken uniformly") {
  std::vector<double> r = {1, 1, 1};
  std::array<long, 3> wins{};
  const long n = 100000;
  for (long k = 0; k < n; ++k) {
    Rng rng(77, static_cast<std::uint64_t>(k));
    auto o = Allocate(r, 2, rng);
    int granted = 0;
    for (int i = 0; i < 3; ++i) {
      granted += o.granted[i];
      wins[i] += o.granted[i];
    }
    CHECK(granted == 2);
  }
  for (long w : wins) CHECK(std::abs(static_cast<double>(w) / n - 2.0 / 3) < 0.01);
}

TEST_CASE("no over-grant and monotone in own request") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 100000; ++k) {
    std::size_t n = 2 + gen() % 8;
    double cap = 1 + 4 * u(gen);
    std::vector<double> r(n);
    for (auto& x : r) x = cap * u(gen) * (u(gen) < 0.2 ? 0.5 : 1);
    if (u(gen) < 0.2) r[1 % n] = r[0];
    Rng a(k, 0);
    auto o = Allocate(r, cap, a);
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (o.granted[i]) {
        sum += r[i];
        CHECK(o.granted_amounts[i] == r[i]);
      }
    }
    CHECK(sum <= cap + 1e-12);
    if (o.granted[0]) {
      auto lower = r;
      lower[0] *= u(gen);
      Rng b(k, 0);
      CHECK(Allocate(lower, cap, b).granted[0]);
    }
  }
}

TEST_CASE("empirical success against closed forms") {
  RunOptions opt;
  opt.replications = 1000000;
  opt.seed = 12;
  auto pop = TwoPlayer(1, AifStrategy(2, {}));
  CHECK(EmpiricalSuccess(0.9, pop, opt).mean == 1.0);
  auto e = EmpiricalSuccess(1.5, pop, opt);
  double exact = std::exp(-1.5) + 1 - std::exp(-0.5);
  CHECK(std::abs(e.mean - exact) < 3 * e.std_error);
  CHECK(std::abs(e.mean - 0.61663) < 3 * e.std_error);
}

TEST_CASE("empirical success in the normal-load game") {
  auto g = gaussian::Game::Make(100, 120, DemandModel::Exponential(1),
                                CostFunction::Zero(120));
  auto sol = gaussian::Solve(g);
  Population pop{120, {{g.demand, sol.strategy, 99}}};
  RunOptions opt;
  opt.replications = 100000;
  opt.seed = 4;
  opt.ties = TieRule::kProbeFirst;
  auto e = EmpiricalSuccess(10, pop, opt);
  double phi = gaussian::SuccessProbability(g, sol.strategy, 10);
  CHECK(std::abs(e.mean - phi) < 3 * e.std_error);
}

TEST_CASE("empirical success is non-increasing") {
  auto pop = TwoPlayer(1, AifStrategy(2, {1.17, 1.23, 1.44}));
  RunOptions opt;
  opt.replications = 20000;
  opt.seed = 99;
  auto xs = UniformGrid(0, 2, 201);
  auto e = EmpiricalSuccess(xs, pop, opt);
  for (std::size_t k = 1; k < e.size(); ++k) {
    CHECK(e[k].mean <= e[k - 1].mean + 3 * e[k].std_error + 1e-15);
  }
}

TEST_CASE("results do not depend on the thread count") {
  auto pop = TwoPlayer(2, AifStrategy(2, {1.17}));
  RunOptions a;
  a.replications = 5000;
  a.seed = 21;
  a.threads = 1;
  RunOptions b = a;
  b.threads = 7;
  auto xs = UniformGrid(0, 2, 41);
  auto ea = EmpiricalSuccess(xs, pop, a), eb = EmpiricalSuccess(xs, pop, b);
  for (std::size_t k = 0; k < xs.size(); ++k) CHECK(ea[k].mean == eb[k].mean);
}

TEST_CASE("best-response oracle") {
  two_player::Game g;
  g.cap = 2;
  g.rates = {1, 2};
  auto sol = two_player::Model(g).Solve();
  auto pop = TwoPlayer(2, sol.strategies[1]);
  RunOptions opt;
  opt.replications = 100000;
  opt.seed = 5;
  auto cost = CostFunction::Zero(2);
  auto r = BestResponseOracle(1.8, pop, cost, 0.01, opt);
  CHECK(std::abs(r.argmax - 1.17062) <= 0.01 + 1e-9);
  auto low = BestResponseOracle(0.8, pop, cost, 0.01, opt);
  CHECK(std::abs(low.argmax - 0.8) <= 0.01);
}

TEST_CASE("certificates are reproducible and serialise") {
  two_player::Game g;
  g.cap = 2;
  g.rates = {1, 2};
  auto sol = two_player::Model(g).Solve();
  auto pop = TwoPlayer(2, sol.strategies[1]);
  RunOptions opt;
  opt.replications = 20000;
  opt.seed = 8;
  auto grid = UniformGrid(0.04, 2, 50);
  EquilibriumStrategy own(sol.strategies[0]);
  auto c1 = CertifyEquilibrium(own, pop, CostFunction::Zero(2), grid, 0.02, opt);
  auto c2 = CertifyEquilibrium(own, pop, CostFunction::Zero(2), grid, 0.02, opt);
  CHECK(ToJson(c1) == ToJson(c2));
  CHECK(c1.value_grid.size() == 50);
  double worst = -1;
  for (std::size_t k = 0; k < 50; ++k) {
    worst = std::max(worst, c1.oracle_payoff[k] - c1.strategy_payoff[k]);
  }
  CHECK(worst == c1.worst_gap);
  std::ostringstream os;
  WriteCertificateCsv(os, c1);
  CHECK(os.str().rfind("# srfgame-certificate v1\n", 0) == 0);
}

TEST_CASE("empirical load approaches the mean load") {
  EquilibriumStrategy s(AifStrategy(50, {1.5}));
  auto d = DemandModel::Exponential(1, 50);
  auto grid = UniformGrid(0, 10, 101);
  double g2 = EmpiricalLoadGap(s, d, 100, grid, 3);
  double g4 = EmpiricalLoadGap(s, d, 10000, grid, 3);
  CHECK(g4 < g2);
  CHECK(g4 < 0.05);
}
