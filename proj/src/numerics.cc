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

#include "srfgame/numerics.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace srfgame::numerics {

void Tolerances::Validate() const {
  auto check = [](double x, const char* name) {
    if (!(x > 0) || !std::isfinite(x)) {
      throw ToleranceError(std::string("tolerance ") + name +
                           " must be positive and finite");
    }
  };
  check(root_abs, "root_abs");
  check(payoff_abs, "payoff_abs");
  check(grid_step, "grid_step");
  check(ode_step, "ode_step");
  if (grid_step >= 1 || ode_step >= 1) {
    throw ToleranceError("grid_step and ode_step are fractions below 1");
  }
}

namespace {
std::string BracketMessage(double lo, double hi, double f_lo, double f_hi) {
  std::ostringstream os;
  os.precision(12);
  os << "no sign change on [" << lo << ", " << hi << "]: f(lo)=" << f_lo
     << " f(hi)=" << f_hi;
  return os.str();
}
}  // namespace

NoSignChange::NoSignChange(double lo, double hi, double f_lo, double f_hi)
    : std::runtime_error(BracketMessage(lo, hi, f_lo, f_hi)),
      lo(lo), hi(hi), f_lo(f_lo), f_hi(f_hi) {}

double FindRoot(const ScalarFn& f, double lo, double hi,
                const Tolerances& tol) {
  if (lo > hi) std::swap(lo, hi);
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0) return lo;
  if (f_hi == 0) return hi;
  if (std::isnan(f_lo) || std::isnan(f_hi) || (f_lo > 0) == (f_hi > 0)) {
    throw NoSignChange(lo, hi, f_lo, f_hi);
  }
  bool secant = true;
  for (int it = 0; it < 400 && hi - lo > tol.root_abs; ++it) {
    double x = 0.5 * (lo + hi);
    if (secant) {
      double s = lo - f_lo * (hi - lo) / (f_hi - f_lo);
      double margin = 1e-3 * (hi - lo);
      if (std::isfinite(s) && s > lo + margin && s < hi - margin) x = s;
    }
    secant = !secant;
    double fx = f(x);
    if (fx == 0) return x;
    if ((fx > 0) == (f_lo > 0)) {
      lo = x;
      f_lo = fx;
    } else {
      hi = x;
      f_hi = fx;
    }
    // Doubles have run out between the endpoints.
    if (std::nextafter(lo, hi) >= hi) break;
  }
  return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
}

std::optional<double> FirstStationaryPoint(const ScalarFn& df, double a,
                                           double b, const Tolerances& tol) {
  if (!(b > a)) return std::nullopt;
  double prev = df(a);
  if (prev <= 0) return a;
  const long steps = std::max(1L, std::lround(1.0 / tol.grid_step));
  const double h = (b - a) / static_cast<double>(steps);
  double x_prev = a;
  for (long k = 1; k <= steps; ++k) {
    double x = k == steps ? b : a + h * static_cast<double>(k);
    double d = df(x);
    if (d <= 0) {
      if (d == 0) return x;
      return FindRoot(df, x_prev, x, tol);
    }
    x_prev = x;
    prev = d;
  }
  return std::nullopt;
}

double CentralDifference(const ScalarFn& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

std::optional<double> FirstStationaryPointOf(const ScalarFn& f, double a,
                                             double b, const Tolerances& tol) {
  const double h = std::max(1e-7, 1e-6 * (b - a));
  ScalarFn df = [&](double x) {
    double lo = std::max(a, x - h);
    double hi = std::min(b, x + h);
    return (f(hi) - f(lo)) / (hi - lo);
  };
  return FirstStationaryPoint(df, a, b, tol);
}

Extremum MaxOnInterval(const ScalarFn& f, double a, double b,
                       const Tolerances& tol) {
  if (!(b > a)) return {a, f(a)};
  const long steps = std::max(2L, std::lround(1.0 / tol.grid_step));
  const double h = (b - a) / static_cast<double>(steps);
  Extremum best{a, f(a)};
  long best_k = 0;
  for (long k = 1; k <= steps; ++k) {
    double x = k == steps ? b : a + h * static_cast<double>(k);
    double fx = f(x);
    if (fx > best.value) {
      best = {x, fx};
      best_k = k;
    }
  }
  // Golden section on the two neighbouring cells.
  double lo = a + h * static_cast<double>(std::max(0L, best_k - 1));
  double hi = std::min(b, a + h * static_cast<double>(best_k + 1));
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > tol.root_abs; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  double x = 0.5 * (lo + hi);
  double fx = f(x);
  if (fx > best.value) best = {x, fx};
  return best;
}

namespace {

constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void Kronrod(const ScalarFn& f, double a, double b, double* result,
             double* error) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  double fc = f(c);
  double k = fc * kWk[7];
  double g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    double x = r * kXk[j];
    double s = f(c - x) + f(c + x);
    k += kWk[j] * s;
    if (j % 2 == 1) g += kWg[j / 2] * s;
  }
  *result = k * r;
  *error = std::abs((k - g) * r);
}

double Adaptive(const ScalarFn& f, double a, double b, double tol, int depth) {
  double res, err;
  Kronrod(f, a, b, &res, &err);
  if (err <= tol || depth >= 40 || b - a < 1e-14 * (1 + std::abs(a))) {
    return res;
  }
  double m = 0.5 * (a + b);
  return Adaptive(f, a, m, 0.5 * tol, depth + 1) +
         Adaptive(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace

double Integrate(const ScalarFn& f, double a, double b, double abs_tol) {
  if (a == b) return 0;
  if (a > b) return -Integrate(f, b, a, abs_tol);
  return Adaptive(f, a, b, abs_tol, 0);
}

double NormalCdf(double w) { return 0.5 * std::erfc(-w / std::sqrt(2.0)); }

double NormalPdf(double w) {
  static const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * M_PI);
  return kInvSqrt2Pi * std::exp(-0.5 * w * w);
}

}  // namespace srfgame::numerics
