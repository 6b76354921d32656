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

#include "srfgame/strategy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "srfgame/model.h"

namespace srfgame {

namespace {
constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kSlack = 1e-9;

[[noreturn]] void Fail(const std::string& field, const std::string& what) {
  throw ParseError("strategy field '" + field + "': " + what);
}
}  // namespace

AifStrategy::AifStrategy(double cap, std::vector<double> switch_points)
    : cap_(cap), switch_points_(std::move(switch_points)) {
  // An infinite cap is allowed for unbounded demand.
  if (!(cap_ > 0)) Fail("cap", "must be positive");
  for (std::size_t j = 0; j < switch_points_.size(); ++j) {
    double t = switch_points_[j];
    if (!(t > 0) || t > cap_) {
      Fail("switch_points[" + std::to_string(j) + "]", "outside (0, cap]");
    }
    if (j > 0 && !(t > switch_points_[j - 1])) {
      Fail("switch_points[" + std::to_string(j) + "]", "not increasing");
    }
  }
}

double AifStrategy::operator()(double v) const {
  if (v > cap_ && v <= cap_ + kSlack * (1 + cap_)) v = cap_;
  if (!(v >= 0 && v <= cap_)) {
    std::ostringstream os;
    os << "strategy evaluated at " << v << " outside [0, " << cap_ << "]";
    throw OutOfDomain(os.str());
  }
  auto it = std::upper_bound(switch_points_.begin(), switch_points_.end(), v);
  auto count = it - switch_points_.begin();
  if (count % 2 == 0) return std::min(v, cap_);
  return switch_points_[count - 1];
}

std::optional<double> AifStrategy::FlatLevelAt(double v) const {
  auto it = std::upper_bound(switch_points_.begin(), switch_points_.end(), v);
  auto count = it - switch_points_.begin();
  if (count % 2 == 0) return std::nullopt;
  return switch_points_[count - 1];
}

double AifStrategy::GeneralizedInverse(double x) const {
  if (x <= 0) return 0;
  // Identity pieces are [0, t1], [t2, t3], ...; the last one ends at cap
  // when the number of switch points is even.
  double start = 0;
  for (std::size_t j = 0; j <= switch_points_.size(); j += 2) {
    double end = j < switch_points_.size() ? switch_points_[j] : cap_;
    if (x <= start) return start;
    if (x <= end) return x;
    if (j + 1 >= switch_points_.size()) break;
    start = switch_points_[j + 1];
  }
  return kInfinity;
}

ChatteringStrategy::ChatteringStrategy(std::vector<double> v,
                                       std::vector<double> eta)
    : v_(std::move(v)), eta_(std::move(eta)) {
  if (v_.size() < 2 || v_.size() != eta_.size()) {
    Fail("chattering.grid", "needs at least two (v, eta) pairs");
  }
  for (std::size_t j = 1; j < v_.size(); ++j) {
    if (!(v_[j] > v_[j - 1])) {
      Fail("chattering.grid[" + std::to_string(j) + "]", "v not increasing");
    }
  }
}

double ChatteringStrategy::operator()(double v) const {
  if (v <= v_.front()) return eta_.front();
  if (v >= v_.back()) return eta_.back();
  auto it = std::upper_bound(v_.begin(), v_.end(), v);
  std::size_t j = static_cast<std::size_t>(it - v_.begin());
  double w = (v - v_[j - 1]) / (v_[j] - v_[j - 1]);
  return eta_[j - 1] + w * (eta_[j] - eta_[j - 1]);
}

EquilibriumStrategy::EquilibriumStrategy(AifStrategy prefix)
    : prefix_(std::move(prefix)) {}

EquilibriumStrategy::EquilibriumStrategy(AifStrategy prefix,
                                         ChatteringStrategy chattering,
                                         std::optional<double> terminal_flat)
    : prefix_(std::move(prefix)),
      chattering_(std::move(chattering)),
      terminal_flat_(terminal_flat) {}

double EquilibriumStrategy::operator()(double v) const {
  if (chattering_ && v >= chattering_->entry()) {
    if (v <= chattering_->exit()) return (*chattering_)(v);
    return terminal_flat_.value_or(chattering_->values().back());
  }
  return prefix_(v);
}

std::vector<double> EquilibriumStrategy::Breakpoints() const {
  std::vector<double> out;
  for (double t : prefix_.switch_points()) {
    if (!chattering_ || t < chattering_->entry()) out.push_back(t);
  }
  if (chattering_) {
    out.insert(out.end(), chattering_->grid().begin(),
               chattering_->grid().end());
  }
  return out;
}

void EquilibriumStrategy::Validate() const {
  const double cap = prefix_.cap();
  if (!chattering_) {
    if (terminal_flat_) Fail("terminal_flat", "requires a chattering regime");
    return;
  }
  const auto& v = chattering_->grid();
  const auto& eta = chattering_->values();
  if (v.front() < 0 || v.back() > cap * (1 + kSlack)) {
    Fail("chattering.grid", "outside [0, cap]");
  }
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (eta[j] > v[j] + kSlack * (1 + v[j]) || eta[j] < 0) {
      Fail("chattering.grid[" + std::to_string(j) + "]",
           "eta must lie in [0, v]");
    }
    if (j > 0 && eta[j] < eta[j - 1] - kSlack * (1 + eta[j])) {
      Fail("chattering.grid[" + std::to_string(j) + "]",
           "eta must be non-decreasing");
    }
  }
  if (prefix_(v.front()) > eta.front() + kSlack * (1 + eta.front())) {
    Fail("chattering.entry", "strategy would decrease at entry");
  }
  if (terminal_flat_) {
    if (*terminal_flat_ < eta.back() - kSlack * (1 + eta.back()) ||
        *terminal_flat_ > v.back() + kSlack * (1 + v.back())) {
      Fail("terminal_flat", "must lie in [eta(exit), exit]");
    }
  }
}

nlohmann::json ToJson(const EquilibriumStrategy& s) {
  nlohmann::json j;
  if (std::isfinite(s.cap())) {
    j["cap"] = s.cap();
  } else {
    j["cap"] = nullptr;
  }
  j["switch_points"] = s.prefix().switch_points();
  if (s.chattering()) {
    const auto& c = *s.chattering();
    nlohmann::json grid = nlohmann::json::array();
    for (std::size_t k = 0; k < c.grid().size(); ++k) {
      grid.push_back({c.grid()[k], c.values()[k]});
    }
    j["chattering"] = {{"entry", c.entry()}, {"exit", c.exit()},
                       {"grid", std::move(grid)}};
  } else {
    j["chattering"] = nullptr;
  }
  if (s.terminal_flat()) {
    j["terminal_flat"] = *s.terminal_flat();
  } else {
    j["terminal_flat"] = nullptr;
  }
  return j;
}

namespace {
double Number(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number()) Fail(field, "expected a number");
  return j.get<double>();
}
}  // namespace

EquilibriumStrategy StrategyFromJson(const nlohmann::json& j) {
  if (!j.is_object()) Fail("<root>", "expected an object");
  if (!j.contains("cap")) Fail("cap", "missing");
  double cap = j["cap"].is_null() ? kInf : Number(j["cap"], "cap");
  std::vector<double> sp;
  if (j.contains("switch_points")) {
    const auto& a = j["switch_points"];
    if (!a.is_array()) Fail("switch_points", "expected an array");
    for (std::size_t k = 0; k < a.size(); ++k) {
      sp.push_back(Number(a[k], "switch_points[" + std::to_string(k) + "]"));
    }
  }
  AifStrategy prefix(cap, std::move(sp));
  std::optional<double> terminal;
  if (j.contains("terminal_flat") && !j["terminal_flat"].is_null()) {
    terminal = Number(j["terminal_flat"], "terminal_flat");
  }
  if (!j.contains("chattering") || j["chattering"].is_null()) {
    EquilibriumStrategy out(std::move(prefix));
    if (terminal) Fail("terminal_flat", "requires a chattering regime");
    return out;
  }
  const auto& c = j["chattering"];
  if (!c.is_object()) Fail("chattering", "expected an object or null");
  if (!c.contains("grid") || !c["grid"].is_array()) {
    Fail("chattering.grid", "expected an array of [v, eta] pairs");
  }
  std::vector<double> v, eta;
  for (std::size_t k = 0; k < c["grid"].size(); ++k) {
    const auto& p = c["grid"][k];
    std::string field = "chattering.grid[" + std::to_string(k) + "]";
    if (!p.is_array() || p.size() != 2) Fail(field, "expected [v, eta]");
    v.push_back(Number(p[0], field));
    eta.push_back(Number(p[1], field));
  }
  ChatteringStrategy chat(std::move(v), std::move(eta));
  if (c.contains("entry") &&
      std::abs(Number(c["entry"], "chattering.entry") - chat.entry()) >
          kSlack * (1 + chat.entry())) {
    Fail("chattering.entry", "does not match the first grid point");
  }
  if (c.contains("exit") &&
      std::abs(Number(c["exit"], "chattering.exit") - chat.exit()) >
          kSlack * (1 + chat.exit())) {
    Fail("chattering.exit", "does not match the last grid point");
  }
  EquilibriumStrategy out(std::move(prefix), std::move(chat), terminal);
  out.Validate();
  return out;
}

EquilibriumStrategy ParseStrategy(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t k = 0; k < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') ++line;
    }
    std::ostringstream os;
    os << "strategy file line " << line << ": " << e.what();
    throw ParseError(os.str());
  }
  return StrategyFromJson(j);
}

}  // namespace srfgame
