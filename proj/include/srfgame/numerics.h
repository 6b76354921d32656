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

#ifndef SRFGAME_NUMERICS_H_
#define SRFGAME_NUMERICS_H_

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace srfgame::numerics {

using ScalarFn = std::function<double(double)>;

// Tolerances shared by every solver. grid_step and ode_step are fractions of
// the interval being scanned; the others are absolute.
struct Tolerances {
  double root_abs = 1e-10;
  double payoff_abs = 1e-8;
  double grid_step = 1e-4;
  double ode_step = 1e-3;

  void Validate() const;
};

class NoSignChange : public std::runtime_error {
 public:
  NoSignChange(double lo, double hi, double f_lo, double f_hi);
  double lo, hi, f_lo, f_hi;
};

class ToleranceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Root of f on [lo, hi]. Requires f(lo) and f(hi) of opposite sign (or one
// of them zero). Bisection interleaved with secant steps, never leaving the
// bracket; stops once the bracket is narrower than tol.root_abs.
double FindRoot(const ScalarFn& f, double lo, double hi,
                const Tolerances& tol = {});

// Smallest v in [a, b] where df crosses zero from above. The interval is
// scanned with spacing tol.grid_step * (b - a) and the crossing is refined by
// bisection on df. Returns a when df(a) <= 0 and nullopt when df stays
// positive on the whole grid.
std::optional<double> FirstStationaryPoint(const ScalarFn& df, double a,
                                           double b,
                                           const Tolerances& tol = {});

// Same, with df taken by central differences of f.
std::optional<double> FirstStationaryPointOf(const ScalarFn& f, double a,
                                             double b,
                                             const Tolerances& tol = {});

struct Extremum {
  double argmax;
  double value;
};

// Global maximum over [a, b] by grid scan (endpoints included) followed by
// golden-section refinement around the best grid point.
Extremum MaxOnInterval(const ScalarFn& f, double a, double b,
                       const Tolerances& tol = {});

// Adaptive Gauss-Kronrod (7/15) quadrature over [a, b].
double Integrate(const ScalarFn& f, double a, double b, double abs_tol = 1e-11);

double CentralDifference(const ScalarFn& f, double x, double h);

double NormalCdf(double w);
double NormalPdf(double w);

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
using OdeRhs = std::function<Vec<N>(double, const Vec<N>&)>;

template <std::size_t N>
Vec<N> EulerStep(const OdeRhs<N>& rhs, double t, const Vec<N>& y, double h) {
  Vec<N> k = rhs(t, y);
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
  return out;
}

template <std::size_t N>
Vec<N> Rk4Step(const OdeRhs<N>& rhs, double t, const Vec<N>& y, double h) {
  auto axpy = [](const Vec<N>& a, double s, const Vec<N>& b) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  Vec<N> k1 = rhs(t, y);
  Vec<N> k2 = rhs(t + h / 2, axpy(y, h / 2, k1));
  Vec<N> k3 = rhs(t + h / 2, axpy(y, h / 2, k2));
  Vec<N> k4 = rhs(t + h, axpy(y, h, k3));
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return out;
}

}  // namespace srfgame::numerics

#endif  // SRFGAME_NUMERICS_H_
