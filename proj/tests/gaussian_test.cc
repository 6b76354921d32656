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

#include "cr_fixtures.h"
#include "doctest.h"
#include "srfgame/gaussian.h"

using namespace srfgame;
using namespace srfgame::gaussian;

namespace {

Game ExpCase(double cn) {
  return Game::Make(100, cn, DemandModel::Exponential(1), CostFunction::Zero(cn));
}

Game LomaxCase(double cn) {
  return Game::Make(1000, cn, DemandModel::Lomax(5, 3),
                    CostFunction::Quadratic(0.001, cn));
}

double FirstSwitch(const Game& g) {
  auto sol = Solve(g);
  REQUIRE_FALSE(sol.trace.switch_points.empty());
  return sol.trace.switch_points.front();
}

}  // namespace

TEST_CASE("game construction") {
  Game g = ExpCase(120);
  CHECK(g.demand.cap() == 120);
  CHECK(g.cost.cap() == 120);
  CHECK(g.per_capita() == doctest::Approx(1.2));
  CHECK_THROWS(Game::Make(1, 10, DemandModel::Exponential(1), CostFunction::Zero(10)));
  CHECK_THROWS_AS(Game::Make(10, 10, DemandModel::Exponential(1),
                             CostFunction::Quadratic(2, 10)),
                  AssumptionViolation);
}

TEST_CASE("moments on identity and flat branches") {
  Game g = ExpCase(120);
  Branch b0 = IdentityBranch(g, Prefix{}, 0);
  CHECK(b0.mu == 0);
  CHECK(Evaluate(g, b0).sigma == 0);
  Branch b = IdentityBranch(g, Prefix{}, 2);
  CHECK(b.mu == doctest::Approx(1 - 3 * std::exp(-2.0)));
  CHECK(b.mu == doctest::Approx(0.59399).epsilon(1e-5));
  for (int k = 0; k <= 1000; ++k) {
    Branch x = IdentityBranch(g, Prefix{}, 20.0 * k / 1000);
    CHECK(x.m2 - x.mu * x.mu >= -1e-15);
  }
  Prefix p = CloseIdentity(g, Prefix{}, 1);
  Branch f = FlatBranch(g, p, 3);
  double mass = std::exp(-1.0) - std::exp(-3.0);
  CHECK(f.mu == doctest::Approx(p.m1 + mass / 2));
  CHECK(f.action == 1);
  CHECK(CloseFlat(g, p, 3).m1 == doctest::Approx(p.m1 + mass));
  CHECK_THROWS_AS(FlatBranch(g, p, 0.5), OutOfDomain);
}

TEST_CASE("degenerate variance takes the almost-sure limit") {
  Game g = ExpCase(120);
  Point pt = Evaluate(g, IdentityBranch(g, Prefix{}, 0));
  CHECK(pt.cdf_w == 1);
  CHECK(pt.p == 0);
  Branch b{2, 1, 0, 0, 0, 0};
  Point q = Evaluate(g, b);
  CHECK(q.cdf_w == 1);
  CHECK(q.p == doctest::Approx(2));
  Branch neg{200, 1, 0, 0, 0, 0};
  Point r = Evaluate(Game::Make(100, 300, DemandModel::Exponential(1),
                                CostFunction::Zero(300)),
                     {200, 1, 1.5, 0, 2.25, 0});
  CHECK(r.cdf_w == 0);
  (void)neg;
}

TEST_CASE("z-score clamp") {
  Game g = ExpCase(120);
  Point pt = Evaluate(g, IdentityBranch(g, Prefix{}, 0.01));
  CHECK(pt.w <= 37);
  CHECK(pt.cdf_w == 1);
}

TEST_CASE("analytic payoff derivatives match finite differences") {
  for (double cn : {100.0, 120.0}) {
    Game g = ExpCase(cn);
    for (double v : {0.5, 2.0, 3.0, 5.0, 12.0}) {
      auto f = [&](double x) { return PIdentity(g, Prefix{}, x); };
      CHECK(PIdentityPrime(g, Prefix{}, v) ==
            doctest::Approx(numerics::CentralDifference(f, v, 1e-6)).epsilon(1e-6));
    }
    Prefix p = CloseIdentity(g, Prefix{}, 3);
    for (double v : {3.5, 5.0, 9.0}) {
      auto f = [&](double x) { return PFlat(g, p, x); };
      CHECK(PFlatPrime(g, p, v) ==
            doctest::Approx(numerics::CentralDifference(f, v, 1e-6)).epsilon(1e-6));
    }
  }
  Game l = LomaxCase(2500);
  for (double v : {10.0, 35.0, 60.0}) {
    auto f = [&](double x) { return PIdentity(l, Prefix{}, x); };
    CHECK(PIdentityPrime(l, Prefix{}, v) ==
          doctest::Approx(numerics::CentralDifference(f, v, 1e-5)).epsilon(1e-6));
  }
}

TEST_CASE("first switch points of the published instances") {
  CHECK(std::abs(FirstSwitch(ExpCase(120)) - 17.2763) < 1e-3);
  CHECK(std::abs(FirstSwitch(ExpCase(100)) - 3.52562) < 1e-3);
  CHECK(std::abs(FirstSwitch(LomaxCase(2500)) - 35.28) < 0.05);
  CHECK(std::abs(FirstSwitch(LomaxCase(4000)) - 500) < 0.5);
}

TEST_CASE("abundant case is AIF-1") {
  Game g = ExpCase(120);
  auto sol = Solve(g);
  REQUIRE(sol.trace.segments.size() == 2);
  CHECK(sol.trace.segments[0].mode == Mode::kIdentity);
  CHECK(sol.trace.segments[1].mode == Mode::kFlat);
  CHECK(sol.strategy.prefix().order() == 1);
  CHECK(std::abs(PIdentityPrime(g, Prefix{}, sol.trace.switch_points[0])) < 1e-8);
  CHECK(sol.trace.flat_suprema[0] <= sol.trace.record_highs[0] + 1e-8);
}

TEST_CASE("conflict detection") {
  CHECK(DetectConflict(Side::kEndOfIdentity, 0, -0.1) == Mode::kFlat);
  CHECK(DetectConflict(Side::kEndOfIdentity, 0, 0.84) == Mode::kChatter);
  CHECK(DetectConflict(Side::kEndOfFlat, -1.0, 0.3) == Mode::kChatter);
  CHECK(DetectConflict(Side::kEndOfFlat, 0.2, 0.04) == Mode::kIdentity);
}

TEST_CASE("transition probes sit one thousandth past the switch") {
  Game g = ExpCase(100);
  auto sol = Solve(g);
  REQUIRE_FALSE(sol.trace.transitions.empty());
  const auto& t = sol.trace.transitions[0];
  Prefix closed = CloseIdentity(g, Prefix{}, t.at);
  CHECK(t.probe_flat == doctest::Approx(PFlatPrime(g, closed, t.at + 1e-3)));
  CHECK(t.d_identity == doctest::Approx(0).epsilon(1e-9));
}

TEST_CASE("z-score diagnostics on solved strategies") {
  for (double cn : {100.0, 120.0}) {
    Game g = ExpCase(cn);
    auto sol = Solve(g);
    auto r = ZScoreDiagnostics(g, sol.strategy);
    CHECK(r.w_monotone);
    CHECK(r.phi_monotone);
    CHECK(r.sup_strategy < cn);
    CHECK(r.capacity_margin > 0);
  }
  // Numerator at v = 0 is c_n: no opponent load and no own request.
  Game g = ExpCase(120);
  auto path = StrategyMoments(g, EquilibriumStrategy(AifStrategy(120, {})), 100);
  CHECK(path.m1[0] == 0);
  CHECK(g.cap_total - 0 - 99 * path.m1[0] == 120);
}

TEST_CASE("success probability matches the z-score of the identity branch") {
  Game g = ExpCase(120);
  auto sol = Solve(g);
  double x = 10;
  Point pt = Evaluate(g, IdentityBranch(g, Prefix{}, x));
  CHECK(SuccessProbability(g, sol.strategy, x) ==
        doctest::Approx(pt.cdf_w).epsilon(1e-9));
}

TEST_CASE("curves csv header") {
  Game g = ExpCase(120);
  std::ostringstream os;
  WriteCurves(os, g, Solve(g), 20);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "# srfgame-curves v1 gaussian");
  std::getline(is, line);
  CHECK(line == "v,s,w,Phi_w,p_identity,p_flat,p_eta");
}

TEST_CASE("tempered regime: sustained payoff and unit entry slope") {
  auto f = testing::Tempered();
  ChatterOptions co;
  co.floor = f.floor;
  auto r = ChatteringOde(f.game, f.p_star, f.entry, co);
  CHECK(r.entry_slope == doctest::Approx(1).epsilon(1e-9));
  CHECK(r.entry_ratio == doctest::Approx(1).epsilon(1e-6));
  CHECK(r.max_residual <= 1e-6);
  const auto& v = r.strategy.grid();
  const auto& eta = r.strategy.values();
  CHECK(eta.front() == f.entry.v);
  for (std::size_t k = 1; k < v.size(); ++k) {
    CHECK(eta[k] >= eta[k - 1]);
    CHECK(eta[k] <= v[k] + 1e-12);
    CHECK(eta[k] >= f.entry.v);
  }
  // Measure the slope on a fine grid near the entry.
  co.end = f.entry.v + 0.05;
  co.step = 1e-4;
  auto fine = ChatteringOde(f.game, f.p_star, f.entry, co);
  const auto& fv = fine.strategy.grid();
  const auto& fe = fine.strategy.values();
  double measured = (fe[1] - fe[0]) / (fv[1] - fv[0]);
  CHECK(std::abs(measured - 1) < 1e-3);
}

TEST_CASE("resurgent regime: entry slope is the conflict ratio") {
  auto f = testing::Resurgent();
  ChatterOptions co;
  co.floor = f.floor;
  auto r = ChatteringOde(f.game, f.p_star, f.entry, co);
  CHECK(r.entry_slope > 0);
  CHECK(r.entry_slope < 1);
  CHECK(r.entry_ratio == doctest::Approx(r.entry_slope).epsilon(1e-9));
  CHECK(r.max_residual <= 1e-6);
  CHECK(r.reason == ExitReason::kSlope);
  const auto& v = r.strategy.grid();
  const auto& eta = r.strategy.values();
  double measured = (eta[1] - eta[0]) / (v[1] - v[0]);
  CHECK(std::abs(measured - r.entry_ratio) < 1e-3);
}

TEST_CASE("literal variance equation differs away from the diagonal") {
  auto f = testing::Tempered();
  ChatterState s = f.entry;
  s.v += 0.5;
  auto a = ChatterSlopeAt(f.game, s, false);
  auto b = ChatterSlopeAt(f.game, s, true);
  CHECK(a.b != b.b);
  CHECK(a.a == b.a);
}

TEST_CASE("entry guards") {
  auto f = testing::Resurgent();
  // Start where the own-action coefficient is positive: no branch.
  auto g = testing::ExpGame(45);
  auto p = CloseFlat(g, CloseIdentity(g, Prefix{}, 0.5), 3);
  ChatterOptions co;
  co.floor = 0.5;
  auto st = EntryState(p);
  CHECK_THROWS_AS(ChatteringOde(g, 3, st, co), NonIncreasing);
  auto g30 = testing::ExpGame(30);
  auto p30 = CloseFlat(g30, CloseIdentity(g30, Prefix{}, 0.5), 3);
  auto st30 = EntryState(p30);
  double ps = 3 * numerics::NormalCdf(ChatterSlopeAt(g30, st30).w);
  CHECK_THROWS_AS(ChatteringOde(g30, ps, st30, co), MarginalViolated);
  (void)f;
}

TEST_CASE("constructive sequence") {
  auto f = testing::Tempered();
  ChatterOptions co;
  co.floor = f.floor;
  auto r = ChatteringOde(f.game, f.p_star, f.entry, co);
  for (int m : {10, 50}) {
    auto c = ChatteringConstructive(f.game, f.entry, r.exit, m);
    CHECK(c(f.entry.v) == f.entry.v);
    const auto& v = c.grid();
    const auto& eta = c.values();
    for (std::size_t k = 1; k < v.size(); ++k) {
      double slope = (eta[k] - eta[k - 1]) / (v[k] - v[k - 1]);
      CHECK((std::abs(slope) < 1e-9 || std::abs(slope - 1) < 1e-9));
    }
  }
}

TEST_CASE("constructive error halves as the cell count doubles") {
  auto f = testing::Tempered();
  ChatterOptions co;
  co.floor = f.floor;
  auto r = ChatteringOde(f.game, f.p_star, f.entry, co);
  double prev = 0;
  for (int m : {100, 200, 400}) {
    auto c = ChatteringConstructive(f.game, f.entry, r.exit, m);
    double gap = 0;
    for (int k = 0; k <= 100000; ++k) {
      double v = f.entry.v + (r.exit - f.entry.v) * k / 100000.0;
      gap = std::max(gap, std::abs(c(v) - r.strategy(v)));
    }
    if (prev > 0) {
      CHECK(gap / prev > 0.4);
      CHECK(gap / prev < 0.6);
    }
    prev = gap;
  }
}

TEST_CASE("solver invariants on random games") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 50 + static_cast<std::size_t>(950 * u(rng));
    DemandModel d = trial % 2 ? DemandModel::Exponential(0.5 + 2 * u(rng))
                              : DemandModel::Lomax(2 + 8 * u(rng), 2.5 + 2 * u(rng));
    double cn = static_cast<double>(n) * d.Mean() * (0.5 + 1.0 * u(rng));
    Game g = Game::Make(n, cn, d, CostFunction::Zero(cn));
    auto sol = Solve(g);
    const auto& tr = sol.trace;
    for (std::size_t k = 1; k < tr.segments.size(); ++k) {
      CHECK(tr.segments[k].start == tr.segments[k - 1].end);
      if (tr.segments[k].mode != Mode::kChatter &&
          tr.segments[k - 1].mode != Mode::kChatter) {
        CHECK(tr.segments[k].mode != tr.segments[k - 1].mode);
      }
    }
    for (std::size_t k = 1; k < tr.record_highs.size(); ++k) {
      CHECK(tr.record_highs[k] > tr.record_highs[k - 1]);
    }
    CHECK(sol.strategy(cn) < cn);
  }
}
