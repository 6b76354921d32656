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

#ifndef SRFGAME_MODEL_H_
#define SRFGAME_MODEL_H_

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace srfgame {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class OutOfDomain : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cost of requesting x units, defined on [0, cap].
class CostFunction {
 public:
  enum class Kind { kZero, kQuadratic, kCustom };

  static CostFunction Zero(double cap);
  static CostFunction Quadratic(double coef, double cap);
  static CostFunction Custom(std::function<double(double)> psi,
                             std::function<double(double)> psi_prime,
                             std::function<double(double)> psi_second,
                             double cap);

  Kind kind() const { return kind_; }
  double cap() const { return cap_; }
  double coef() const { return coef_; }

  double Psi(double x) const;
  double PsiPrime(double x) const;
  double PsiSecond(double x) const;

  // Point where the marginal cost reaches 1, or +inf when it never does on
  // [0, cap].
  double XiCost() const;

  CostFunction WithCap(double cap) const;

 private:
  CostFunction() = default;
  void CheckDomain(double x) const;

  Kind kind_ = Kind::kZero;
  double coef_ = 0;
  double cap_ = kInf;
  std::function<double(double)> psi_, psi_prime_, psi_second_;
};

// Demand distribution, right-censored at cap (cap may be +inf). All
// functions describe the continuous part on [0, cap); the censored mass sits
// in an atom at cap.
class DemandModel {
 public:
  enum class Family { kExponential, kLomax, kCustom };

  static DemandModel Exponential(double rate, double cap = kInf);
  static DemandModel Lomax(double scale, double shape, double cap = kInf);
  // pdf and cdf of the uncensored law on [0, inf).
  static DemandModel Custom(std::function<double(double)> pdf,
                            std::function<double(double)> cdf,
                            double cap = kInf);

  Family family() const { return family_; }
  double cap() const { return cap_; }
  double rate() const { return a_; }
  double scale() const { return a_; }
  double shape() const { return b_; }
  DemandModel WithCap(double cap) const;

  // Uncensored law.
  double RawPdf(double v) const;
  double RawCdf(double v) const;

  double Pdf(double v) const;
  double Cdf(double v) const;
  double AtomAtCap() const;

  // Integral over [0, v] of t f(t) and t^2 f(t), continuous part only.
  double PartialMoment1(double v) const;
  double PartialMoment2(double v) const;
  // Mean of the censored law, atom included.
  double Mean() const;

  // Inverse-cdf sample from a uniform u in [0, 1).
  double Sample(double u) const;

 private:
  DemandModel() = default;
  void CheckDomain(double v) const;

  Family family_ = Family::kExponential;
  double a_ = 1, b_ = 0;
  double cap_ = kInf;
  std::function<double(double)> pdf_, cdf_;
};

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  std::optional<double> first_violation;
  std::string detail;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;
  bool ok() const;
  std::string Summary() const;
};

class AssumptionViolation : public std::runtime_error {
 public:
  explicit AssumptionViolation(ValidationReport report);
  ValidationReport report;
};

// Numerical checks of the standing assumptions on a 10^4 point grid over
// [0, span]: cost convex, non-decreasing, zero at zero with marginal cost
// below 1 at half the per-player capacity (span/2 unless given); demand
// density finite and non-increasing with a vanishing cubic tail.
ValidationReport ValidateAssumptions(
    const CostFunction& cost, const DemandModel& demand, double span,
    std::optional<double> marginal_point = std::nullopt);

}  // namespace srfgame

#endif  // SRFGAME_MODEL_H_
