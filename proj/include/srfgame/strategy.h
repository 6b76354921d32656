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

#ifndef SRFGAME_STRATEGY_H_
#define SRFGAME_STRATEGY_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace srfgame {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Alternating identity-and-flat strategy on [0, cap]. Identity on
// [0, t1), flat at t1 on [t1, t2), identity on [t2, t3), and so on; an odd
// number of switch points leaves a terminal flat running to cap.
class AifStrategy {
 public:
  AifStrategy() = default;
  AifStrategy(double cap, std::vector<double> switch_points);

  double cap() const { return cap_; }
  const std::vector<double>& switch_points() const { return switch_points_; }
  int order() const { return static_cast<int>(switch_points_.size()); }

  double operator()(double v) const;

  // inf{v : s(v) >= x}. Returns the right end of a flat interval when x
  // falls in its value gap and +inf when x exceeds every attained value.
  double GeneralizedInverse(double x) const;

  // Flat level at value v, if v lies in a flat interval.
  std::optional<double> FlatLevelAt(double v) const;

 private:
  double cap_ = 0;
  std::vector<double> switch_points_;
};

// Non-decreasing strategy on [entry, exit] given on a grid and linearly
// interpolated.
class ChatteringStrategy {
 public:
  ChatteringStrategy() = default;
  ChatteringStrategy(std::vector<double> v, std::vector<double> eta);

  double entry() const { return v_.front(); }
  double exit() const { return v_.back(); }
  const std::vector<double>& grid() const { return v_; }
  const std::vector<double>& values() const { return eta_; }

  double operator()(double v) const;

 private:
  std::vector<double> v_, eta_;
};

// AIF prefix, optionally followed by a chattering regime on
// [entry, exit] and a flat tail on (exit, cap].
class EquilibriumStrategy {
 public:
  EquilibriumStrategy() = default;
  explicit EquilibriumStrategy(AifStrategy prefix);
  EquilibriumStrategy(AifStrategy prefix, ChatteringStrategy chattering,
                      std::optional<double> terminal_flat);

  double cap() const { return prefix_.cap(); }
  const AifStrategy& prefix() const { return prefix_; }
  const std::optional<ChatteringStrategy>& chattering() const {
    return chattering_;
  }
  const std::optional<double>& terminal_flat() const { return terminal_flat_; }

  double operator()(double v) const;

  // Points where the strategy changes form, for piecewise integration.
  std::vector<double> Breakpoints() const;

  // Checks the structural invariants: s(v) <= v, non-decreasing, values in
  // [0, cap]. Throws ParseError with the offending field.
  void Validate() const;

 private:
  AifStrategy prefix_;
  std::optional<ChatteringStrategy> chattering_;
  std::optional<double> terminal_flat_;
};

nlohmann::json ToJson(const EquilibriumStrategy& s);
EquilibriumStrategy StrategyFromJson(const nlohmann::json& j);
EquilibriumStrategy ParseStrategy(const std::string& text);

}  // namespace srfgame

#endif  // SRFGAME_STRATEGY_H_
