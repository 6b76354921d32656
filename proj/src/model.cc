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

#include "srfgame/model.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "srfgame/numerics.h"

namespace srfgame {

namespace {
constexpr double kDomainSlack = 1e-9;
constexpr int kValidationGrid = 10000;
}  // namespace

CostFunction CostFunction::Zero(double cap) {
  CostFunction c;
  c.kind_ = Kind::kZero;
  c.cap_ = cap;
  return c;
}

CostFunction CostFunction::Quadratic(double coef, double cap) {
  if (!(coef >= 0) || !std::isfinite(coef)) {
    throw ConfigError("quadratic cost coefficient must be finite and >= 0");
  }
  CostFunction c;
  c.kind_ = Kind::kQuadratic;
  c.coef_ = coef;
  c.cap_ = cap;
  return c;
}

CostFunction CostFunction::Custom(std::function<double(double)> psi,
                                  std::function<double(double)> psi_prime,
                                  std::function<double(double)> psi_second,
                                  double cap) {
  CostFunction c;
  c.kind_ = Kind::kCustom;
  c.psi_ = std::move(psi);
  c.psi_prime_ = std::move(psi_prime);
  c.psi_second_ = std::move(psi_second);
  c.cap_ = cap;
  return c;
}

CostFunction CostFunction::WithCap(double cap) const {
  CostFunction c = *this;
  c.cap_ = cap;
  return c;
}

void CostFunction::CheckDomain(double x) const {
  if (!(x >= -kDomainSlack) || x > cap_ + kDomainSlack * (1 + cap_)) {
    std::ostringstream os;
    os << "cost evaluated at " << x << " outside [0, " << cap_ << "]";
    throw OutOfDomain(os.str());
  }
}

double CostFunction::Psi(double x) const {
  CheckDomain(x);
  switch (kind_) {
    case Kind::kZero: return 0;
    case Kind::kQuadratic: return coef_ * x * x;
    case Kind::kCustom: return psi_(x);
  }
  return 0;
}

double CostFunction::PsiPrime(double x) const {
  CheckDomain(x);
  switch (kind_) {
    case Kind::kZero: return 0;
    case Kind::kQuadratic: return 2 * coef_ * x;
    case Kind::kCustom: return psi_prime_(x);
  }
  return 0;
}

double CostFunction::PsiSecond(double x) const {
  CheckDomain(x);
  switch (kind_) {
    case Kind::kZero: return 0;
    case Kind::kQuadratic: return 2 * coef_;
    case Kind::kCustom: return psi_second_(x);
  }
  return 0;
}

double CostFunction::XiCost() const {
  switch (kind_) {
    case Kind::kZero: return kInf;
    case Kind::kQuadratic: return coef_ > 0 ? 1 / (2 * coef_) : kInf;
    case Kind::kCustom: break;
  }
  if (!std::isfinite(cap_)) {
    throw ConfigError("custom cost needs a finite cap to locate psi' = 1");
  }
  auto g = [this](double x) { return PsiPrime(x) - 1; };
  if (g(0) >= 0) return 0;
  const int n = kValidationGrid;
  double prev = 0;
  for (int k = 1; k <= n; ++k) {
    double x = cap_ * k / n;
    if (g(x) >= 0) return numerics::FindRoot(g, prev, x);
    prev = x;
  }
  return kInf;
}

DemandModel DemandModel::Exponential(double rate, double cap) {
  if (!(rate > 0) || !std::isfinite(rate)) {
    throw ConfigError("exponential rate must be positive");
  }
  if (!(cap > 0)) throw ConfigError("demand cap must be positive");
  DemandModel d;
  d.family_ = Family::kExponential;
  d.a_ = rate;
  d.cap_ = cap;
  return d;
}

DemandModel DemandModel::Lomax(double scale, double shape, double cap) {
  if (!(scale > 0) || !(shape > 0) || !std::isfinite(scale) ||
      !std::isfinite(shape)) {
    throw ConfigError("lomax scale and shape must be positive");
  }
  if (!(cap > 0)) throw ConfigError("demand cap must be positive");
  DemandModel d;
  d.family_ = Family::kLomax;
  d.a_ = scale;
  d.b_ = shape;
  d.cap_ = cap;
  return d;
}

DemandModel DemandModel::Custom(std::function<double(double)> pdf,
                                std::function<double(double)> cdf,
                                double cap) {
  if (!(cap > 0)) throw ConfigError("demand cap must be positive");
  DemandModel d;
  d.family_ = Family::kCustom;
  d.pdf_ = std::move(pdf);
  d.cdf_ = std::move(cdf);
  d.cap_ = cap;
  return d;
}

DemandModel DemandModel::WithCap(double cap) const {
  if (!(cap > 0)) throw ConfigError("demand cap must be positive");
  DemandModel d = *this;
  d.cap_ = cap;
  return d;
}

void DemandModel::CheckDomain(double v) const {
  if (!(v >= -kDomainSlack)) {
    std::ostringstream os;
    os << "demand evaluated at negative value " << v;
    throw OutOfDomain(os.str());
  }
}

double DemandModel::RawPdf(double v) const {
  if (v < 0) return 0;
  switch (family_) {
    case Family::kExponential: return a_ * std::exp(-a_ * v);
    case Family::kLomax: return b_ / a_ * std::pow(1 + v / a_, -b_ - 1);
    case Family::kCustom: return pdf_(v);
  }
  return 0;
}

double DemandModel::RawCdf(double v) const {
  if (v <= 0) return 0;
  if (std::isinf(v)) return 1;
  switch (family_) {
    case Family::kExponential: return -std::expm1(-a_ * v);
    case Family::kLomax: return -std::expm1(-b_ * std::log1p(v / a_));
    case Family::kCustom: return cdf_(v);
  }
  return 0;
}

double DemandModel::Pdf(double v) const {
  CheckDomain(v);
  return v < cap_ ? RawPdf(v) : 0;
}

double DemandModel::Cdf(double v) const {
  CheckDomain(v);
  return v < cap_ ? RawCdf(v) : 1;
}

double DemandModel::AtomAtCap() const {
  return std::isfinite(cap_) ? 1 - RawCdf(cap_) : 0;
}

namespace {
// Integral over [1, u] of t^(k-1).
double PowerIntegral(double u, double k) {
  if (std::abs(k) < 1e-12) return std::log(u);
  if (std::isinf(u)) return k < 0 ? -1 / k : kInf;
  return std::expm1(k * std::log(u)) / k;
}
}  // namespace

double DemandModel::PartialMoment1(double v) const {
  CheckDomain(v);
  v = std::clamp(v, 0.0, cap_);
  switch (family_) {
    case Family::kExponential: {
      if (std::isinf(v)) return 1 / a_;
      double x = a_ * v;
      return (-std::expm1(-x) - x * std::exp(-x)) / a_;
    }
    case Family::kLomax: {
      double u = 1 + v / a_;
      return a_ * b_ * (PowerIntegral(u, 1 - b_) - PowerIntegral(u, -b_));
    }
    case Family::kCustom: {
      if (std::isinf(v)) {
        throw OutOfDomain("custom demand moments need a finite bound");
      }
      return numerics::Integrate([this](double t) { return t * pdf_(t); }, 0,
                                 v, 1e-12);
    }
  }
  return 0;
}

double DemandModel::PartialMoment2(double v) const {
  CheckDomain(v);
  v = std::clamp(v, 0.0, cap_);
  switch (family_) {
    case Family::kExponential: {
      if (std::isinf(v)) return 2 / (a_ * a_);
      double x = a_ * v;
      return (2 * -std::expm1(-x) - (x * x + 2 * x) * std::exp(-x)) /
             (a_ * a_);
    }
    case Family::kLomax: {
      double u = 1 + v / a_;
      return a_ * a_ * b_ *
             (PowerIntegral(u, 2 - b_) - 2 * PowerIntegral(u, 1 - b_) +
              PowerIntegral(u, -b_));
    }
    case Family::kCustom: {
      if (std::isinf(v)) {
        throw OutOfDomain("custom demand moments need a finite bound");
      }
      return numerics::Integrate([this](double t) { return t * t * pdf_(t); },
                                 0, v, 1e-12);
    }
  }
  return 0;
}

double DemandModel::Mean() const {
  double m = PartialMoment1(cap_);
  if (std::isfinite(cap_)) m += cap_ * AtomAtCap();
  return m;
}

double DemandModel::Sample(double u) const {
  if (std::isfinite(cap_) && u >= RawCdf(cap_)) return cap_;
  double v = 0;
  switch (family_) {
    case Family::kExponential:
      v = -std::log1p(-u) / a_;
      break;
    case Family::kLomax:
      v = a_ * std::expm1(-std::log1p(-u) / b_);
      break;
    case Family::kCustom: {
      double hi = 1;
      while (cdf_(hi) < u && hi < 1e300) hi *= 2;
      auto g = [&](double x) { return cdf_(x) - u; };
      v = g(0) >= 0 ? 0 : numerics::FindRoot(g, 0, hi, {1e-13, 1e-8, 1e-4, 1e-3});
      break;
    }
  }
  return std::min(v, cap_);
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AssumptionCheck& c) { return c.passed; });
}

std::string ValidationReport::Summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    if (c.passed) continue;
    os << c.name << " failed";
    if (c.first_violation) os << " at " << *c.first_violation;
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << "; ";
  }
  return os.str();
}

AssumptionViolation::AssumptionViolation(ValidationReport r)
    : std::runtime_error("assumption violated: " + r.Summary()),
      report(std::move(r)) {}

ValidationReport ValidateAssumptions(const CostFunction& cost,
                                     const DemandModel& demand, double span,
                                     std::optional<double> marginal_point) {
  ValidationReport report;
  if (!(span > 0) || !std::isfinite(span)) {
    throw ConfigError("validation span must be positive and finite");
  }
  const double cost_span = std::min(span, cost.cap());
  const int n = kValidationGrid;
  auto grid = [n](double hi, int k) { return hi * k / n; };

  auto add = [&](std::string name, std::optional<double> at,
                 std::string detail) {
    report.checks.push_back(
        {std::move(name), !at.has_value(), at, std::move(detail)});
  };

  {
    double z = cost.Psi(0);
    add("cost.zero_at_origin",
        std::abs(z) <= 1e-12 ? std::nullopt : std::optional<double>(0.0),
        "psi(0) = " + std::to_string(z));
  }
  std::optional<double> bad_mono, bad_convex, bad_finite;
  for (int k = 0; k <= n; ++k) {
    double x = grid(cost_span, k);
    double p = cost.Psi(x), d = cost.PsiPrime(x), dd = cost.PsiSecond(x);
    if (!bad_finite && (!std::isfinite(p) || !std::isfinite(d) ||
                        !std::isfinite(dd))) {
      bad_finite = x;
    }
    if (!bad_mono && d < -1e-12) bad_mono = x;
    if (!bad_convex && dd < -1e-12) bad_convex = x;
  }
  add("cost.non_decreasing", bad_mono, "");
  add("cost.convex", bad_convex, "");
  {
    double half = std::min(marginal_point.value_or(span / 2), cost.cap());
    double d = cost.PsiPrime(half);
    add("cost.marginal_below_one_at_half_cap",
        d < 1 ? std::nullopt : std::optional<double>(half),
        "psi'(" + std::to_string(half) + ") = " + std::to_string(d));
  }
  std::optional<double> bad_density, bad_pdf_finite;
  const double demand_span = std::min(span, demand.cap());
  double prev = demand.RawPdf(0);
  for (int k = 0; k <= n; ++k) {
    double v = grid(demand_span, k);
    double f = demand.RawPdf(v);
    double F = demand.RawCdf(v);
    if (!bad_pdf_finite && (!std::isfinite(f) || !std::isfinite(F) || f < 0)) {
      bad_pdf_finite = v;
    }
    if (!bad_density && f > prev * (1 + 1e-10) + 1e-300) bad_density = v;
    prev = f;
  }
  add("regularity.finite_on_grid",
      bad_finite ? bad_finite : bad_pdf_finite, "");
  add("demand.non_increasing_density", bad_density, "");
  {
    double m = demand.family() == DemandModel::Family::kExponential
                   ? 1 / demand.rate()
                   : demand.family() == DemandModel::Family::kLomax
                         ? demand.scale()
                         : std::max(1.0, demand_span / 10);
    double near = 10 * m, far = 100 * m;
    double t_near = near * near * near * demand.RawPdf(near);
    double t_far = far * far * far * demand.RawPdf(far);
    add("demand.cubic_tail_vanishes",
        t_far < t_near ? std::nullopt : std::optional<double>(far),
        "v^3 f(v) at " + std::to_string(near) + " and " + std::to_string(far) +
            ": " + std::to_string(t_near) + ", " + std::to_string(t_far));
  }
  return report;
}

}  // namespace srfgame
