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

#include "doctest.h"
#include "srfgame/fluid.h"

using namespace srfgame;

TEST_CASE("threshold for exponential demand") {
  auto d = DemandModel::Exponential(1);
  auto s = fluid::Solve(0.5, d, CostFunction::Zero(kInf));
  CHECK(std::isinf(s.xi_cost));
  CHECK(s.xi_hat == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  CHECK(s.effective_cap == s.xi_hat);
  CHECK(s.strategy(0.3) == 0.3);
  CHECK(s.strategy(5) == doctest::Approx(std::log(2.0)));
  // Quadrature oracle for the load at the threshold.
  double q = numerics::Integrate([&](double t) { return std::min(t, s.xi_hat) * d.Pdf(t); },
                                 0, 60, 1e-14);
  CHECK(q == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("abundant capacity gives identity") {
  auto s = fluid::Solve(1.2, DemandModel::Exponential(1), CostFunction::Zero(kInf));
  CHECK(std::isinf(s.xi_hat));
  CHECK(std::isinf(s.effective_cap));
  CHECK(s.strategy.order() == 0);
}

TEST_CASE("cost cap binds") {
  auto s = fluid::Solve(4, DemandModel::Lomax(5, 3), CostFunction::Quadratic(0.001, 4000));
  CHECK(s.xi_cost == doctest::Approx(500));
  CHECK(std::isinf(s.xi_hat));
  CHECK(s.effective_cap == doctest::Approx(500));
  CHECK(s.strategy(800) == doctest::Approx(500));
}

TEST_CASE("load is non-decreasing and balances capacity") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    DemandModel d = trial % 2 ? DemandModel::Exponential(0.2 + 3 * u(rng))
                              : DemandModel::Lomax(1 + 9 * u(rng), 2.2 + 3 * u(rng));
    double mean = d.Mean();
    double c = mean * (0.05 + 0.9 * u(rng));
    double prev = 0;
    for (int k = 0; k <= 1000; ++k) {
      double l = fluid::Load(d, 20 * mean * k / 1000);
      CHECK(l >= prev - 1e-15);
      prev = l;
    }
    auto s = fluid::Solve(c, d, CostFunction::Zero(kInf));
    REQUIRE(std::isfinite(s.xi_hat));
    CHECK(std::abs(fluid::Load(d, s.xi_hat) - c) <= 1e-8);
  }
}
