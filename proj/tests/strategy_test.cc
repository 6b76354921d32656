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
#include "srfgame/model.h"
#include "srfgame/strategy.h"

using namespace srfgame;

namespace {

// inf{v : s(v) >= x} by scanning a dense grid; the comparison target for
// the closed-form inverse.
double DenseInverse(const AifStrategy& s, double x, int n = 2000000) {
  for (int k = 0; k <= n; ++k) {
    double v = s.cap() * k / n;
    if (s(v) >= x) return v;
  }
  return kInf;
}

}  // namespace

TEST_CASE("evaluating AIF strategies") {
  AifStrategy a1(2, {1.17062});
  CHECK(a1(0.5) == 0.5);
  CHECK(a1(1.8) == doctest::Approx(1.17062));
  AifStrategy id(2, {});
  CHECK(id(0.3) == 0.3);
  CHECK(id.order() == 0);
  AifStrategy a3(2, {1.17062, 1.23076, 1.44239});
  CHECK(a3(1.2) == doctest::Approx(1.17062));
  CHECK(a3(1.3) == doctest::Approx(1.3));
  CHECK(a3(1.9) == doctest::Approx(1.44239));
  CHECK_THROWS_AS(a3(2.5), OutOfDomain);
  CHECK_THROWS(AifStrategy(2, {1.5, 1.2}));
  CHECK_THROWS(AifStrategy(2, {0.0}));
}

TEST_CASE("generalized inverse") {
  AifStrategy a1(2, {1});
  CHECK(a1.GeneralizedInverse(0.7) == doctest::Approx(0.7));
  CHECK(std::isinf(a1.GeneralizedInverse(1.2)));
  AifStrategy a3(2, {1.17062, 1.23076, 1.44239});
  double gi = a3.GeneralizedInverse(1.2);
  CHECK(gi == doctest::Approx(1.23076));
  CHECK(gi == doctest::Approx(DenseInverse(a3, 1.2)).epsilon(1e-6));
  for (double x : {0.3, 1.0, 1.17062, 1.18, 1.3, 1.44, 1.5}) {
    double dense = DenseInverse(a3, x);
    double closed = a3.GeneralizedInverse(x);
    if (std::isinf(dense)) {
      CHECK(std::isinf(closed));
    } else {
      CHECK(std::abs(dense - closed) < 2e-6);
    }
  }
}

TEST_CASE("monotone, below the diagonal, inverse round trip") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 1.99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> sp;
    int m = 1 + trial % 5;
    for (int k = 0; k < m; ++k) sp.push_back(u(rng));
    std::sort(sp.begin(), sp.end());
    sp.erase(std::unique(sp.begin(), sp.end()), sp.end());
    AifStrategy s(2, sp);
    double prev = 0, prev_gi = 0;
    for (int k = 0; k <= 10000; ++k) {
      double v = 2.0 * k / 10000;
      double x = s(v);
      CHECK(x <= v + 1e-15);
      CHECK(x >= prev);
      prev = x;
      double gi = s.GeneralizedInverse(v);
      CHECK(gi >= prev_gi);
      prev_gi = gi;
      if (!s.FlatLevelAt(v) && std::abs(x - v) == 0) {
        CHECK(std::abs(s.GeneralizedInverse(x) - v) <= 1e-10);
      }
    }
  }
}

TEST_CASE("composite strategy") {
  ChatteringStrategy c({3, 3.5, 4}, {3, 3.2, 3.3});
  EquilibriumStrategy s(AifStrategy(10, {1, 3}), c, 3.3);
  CHECK(s(0.5) == 0.5);
  CHECK(s(2) == 1);
  CHECK(s(3.25) == doctest::Approx(3.1));
  CHECK(s(8) == doctest::Approx(3.3));
  CHECK_NOTHROW(s.Validate());
  auto b = s.Breakpoints();
  CHECK(std::find(b.begin(), b.end(), 4.0) != b.end());
  CHECK_THROWS_AS(
      [] {
        EquilibriumStrategy bad(AifStrategy(10, {1, 3}),
                                ChatteringStrategy({3, 3.5}, {3, 2.9}), 2.9);
        bad.Validate();
      }(),
      ParseError);
}

TEST_CASE("serialization round trips") {
  AifStrategy a3(2, {1.17062, 1.23076, 1.44239});
  auto back = StrategyFromJson(ToJson(EquilibriumStrategy(a3)));
  CHECK(back.prefix().switch_points() == a3.switch_points());
  CHECK(back.cap() == 2);

  std::vector<double> v, eta;
  for (int k = 0; k < 1000; ++k) {
    v.push_back(3 + k * 1e-3);
    eta.push_back(3 + 0.5 * k * 1e-3);
  }
  EquilibriumStrategy s(AifStrategy(10, {1, 3}), ChatteringStrategy(v, eta),
                        eta.back());
  auto text = ToJson(s).dump(2);
  auto r = ParseStrategy(text);
  REQUIRE(r.chattering());
  CHECK(r.chattering()->grid() == v);
  CHECK(r.chattering()->values() == eta);
  CHECK(r.terminal_flat() == s.terminal_flat());
  for (int k = 0; k <= 1000; ++k) CHECK(r(10.0 * k / 1000) == s(10.0 * k / 1000));
}

TEST_CASE("malformed strategy files") {
  CHECK_THROWS_AS(ParseStrategy("{\n\"cap\": 2,\n\"switch_points\": [1,\n"),
                  ParseError);
  try {
    ParseStrategy("{\n\"cap\": 2,\n  oops\n}");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(ParseStrategy(R"({"switch_points": []})"), ParseError);
  CHECK_THROWS_AS(ParseStrategy(R"({"cap": 2, "switch_points": [1.5, 1.0]})"),
                  ParseError);
  CHECK_THROWS_AS(ParseStrategy(R"({"cap": "x", "switch_points": []})"),
                  ParseError);
}
