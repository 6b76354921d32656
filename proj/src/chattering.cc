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

// Chattering regime: the strategy eta(v) holds the payoff at the last record
// high, eta Phi(w_eta) - psi(eta) = P*. Moments evolve as mu' = eta f and
// sigma' = (eta - 2 mu) mu' / (2 sigma); eta itself is re-solved from the
// sustaining equation at every stage, so the only integrated state is
// (mu, sigma).

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "srfgame/gaussian.h"

namespace srfgame::gaussian {

namespace {

constexpr double kWClamp = 37;

struct ZScore {
  double w, cdf, pdf, d;
};

ZScore ZAt(const Game& g, double eta, double mu, double sigma) {
  const double n1 = static_cast<double>(g.n - 1);
  double d = std::sqrt(n1) * sigma;
  double num = g.cap_total - eta - n1 * mu;
  if (!(d > 0)) {
    return {num > 0 ? kWClamp : -kWClamp, num > 0 ? 1.0 : 0.0, 0, 0};
  }
  double w = num / d;
  double wc = std::clamp(w, -kWClamp, kWClamp);
  return {w, numerics::NormalCdf(wc),
          std::abs(w) >= kWClamp ? 0 : numerics::NormalPdf(w), d};
}

std::string Where(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

double SustainingResidual(const Game& g, const ChatterState& s,
                          double p_star) {
  ZScore z = ZAt(g, s.eta, s.mu, s.sigma);
  return s.eta * z.cdf - g.cost.Psi(s.eta) - p_star;
}

ChatterSlope ChatterSlopeAt(const Game& g, const ChatterState& s,
                            bool literal_sigma) {
  const double n1 = static_cast<double>(g.n - 1);
  ZScore z = ZAt(g, s.eta, s.mu, s.sigma);
  ChatterSlope out;
  out.w = z.w;
  out.margin = z.cdf - g.cost.PsiPrime(s.eta);
  if (!(z.d > 0)) {
    out.a = out.margin;
    out.b = 0;
    return out;
  }
  double dmu = s.eta * g.demand.Pdf(s.v);
  double x = literal_sigma ? s.v : s.eta;
  double dsigma = (x - 2 * s.mu) * dmu / (2 * s.sigma);
  out.a = out.margin - s.eta * z.pdf / z.d;
  out.b = s.eta * z.pdf * (-n1 * dmu / z.d - z.w * dsigma / s.sigma);
  return out;
}

namespace {

class Integrator {
 public:
  Integrator(const Game& g, double p_star, const ChatterOptions& opt)
      : g_(g), p_star_(p_star), opt_(opt) {}

  double Residual(double eta, double mu, double sigma) const {
    return SustainingResidual(g_, {0, eta, mu, sigma}, p_star_);
  }

  // Root of the sustaining equation on its decreasing branch, at most v.
  std::optional<double> SolveEta(double v, double mu, double sigma,
                                 double guess, double scale) const {
    auto G = [&](double eta) { return Residual(eta, mu, sigma); };
    double hi = v;
    if (G(hi) >= 0) return hi;
    double lo = std::min(guess, hi);
    double step = std::max(scale, 1e-12 * (1 + v));
    double floor = std::max(opt_.floor, 0.0);
    while (G(lo) <= 0) {
      if (lo <= floor) return std::nullopt;
      hi = lo;
      lo = std::max(floor, lo - step);
      step *= 2;
    }
    numerics::Tolerances t = opt_.tol;
    t.root_abs = std::min(t.root_abs, 1e-12 * (1 + v));
    return numerics::FindRoot(G, lo, hi, t);
  }

  numerics::Vec<2> Rhs(double v, const numerics::Vec<2>& y, double guess,
                       double scale) const {
    double eta = SolveEta(v, y[0], y[1], guess, scale).value_or(guess);
    double dmu = eta * g_.demand.Pdf(v);
    double x = opt_.literal_sigma ? v : eta;
    double dsigma = y[1] > 0 ? (x - 2 * y[0]) * dmu / (2 * y[1]) : 0;
    return {dmu, dsigma};
  }

 private:
  const Game& g_;
  double p_star_;
  const ChatterOptions& opt_;
};

}  // namespace

ChatterResult ChatteringOde(const Game& g, double p_star,
                            const ChatterState& entry,
                            const ChatterOptions& opt) {
  const double end = opt.end > 0 ? std::min(opt.end, g.cap_total)
                                 : g.cap_total;
  if (!(end > entry.v)) {
    throw OutOfDomain("chattering entry at or beyond the end of the domain");
  }
  const double h = opt.step > 0 ? opt.step : opt.tol.ode_step * (end - entry.v);
  Integrator integ(g, p_star, opt);

  ChatterState s = entry;
  if (std::abs(SustainingResidual(g, s, p_star)) > 1e-9 * (1 + std::abs(p_star))) {
    auto eta = integ.SolveEta(s.v, s.mu, s.sigma, s.eta, h);
    if (!eta) {
      throw NonIncreasing("no sustaining solution at entry " + Where(s.v));
    }
    s.eta = *eta;
  }
  ChatterSlope slope = ChatterSlopeAt(g, s, opt.literal_sigma);
  if (slope.margin <= opt.eps_marginal) {
    throw MarginalViolated("marginal profitability fails at entry " +
                           Where(s.v));
  }
  if (!(slope.a < 0) || !(slope.slope() > 0)) {
    throw NonIncreasing("no increasing chattering branch at entry " +
                        Where(s.v));
  }

  ChatterResult out;
  out.entry_slope = slope.slope();
  {
    // Conflict ratio from the two branch derivatives evaluated directly.
    Branch bi{s.eta, 1, s.mu, s.eta * g.demand.Pdf(s.v),
              s.sigma * s.sigma + s.mu * s.mu,
              s.eta * s.eta * g.demand.Pdf(s.v)};
    Branch bf = bi;
    bf.d_action = 0;
    double di = Evaluate(g, bi).dp, df = Evaluate(g, bf).dp;
    out.entry_ratio = df / (df - di);
  }

  std::vector<double> vs = {s.v}, etas = {s.eta};
  out.mu = {s.mu};
  out.sigma = {s.sigma};
  out.max_residual = std::abs(SustainingResidual(g, s, p_star));
  double rho_prev = slope.slope();
  out.reason = ExitReason::kCapacity;

  auto advance = [&](const ChatterState& from, double step) {
    numerics::OdeRhs<2> rhs = [&](double v, const numerics::Vec<2>& y) {
      return integ.Rhs(v, y, from.eta, step);
    };
    numerics::Vec<2> y =
        numerics::Rk4Step<2>(rhs, from.v, {from.mu, from.sigma}, step);
    ChatterState next{from.v + step, from.eta, y[0], y[1]};
    auto eta = integ.SolveEta(next.v, next.mu, next.sigma, from.eta, step);
    if (eta) next.eta = *eta;
    return std::make_pair(next, eta.has_value());
  };

  while (s.v < end - 1e-12 * (1 + end)) {
    double step = std::min(h, end - s.v);
    auto [next, ok] = advance(s, step);
    if (!ok) {
      out.reason = ExitReason::kTangency;
      break;
    }
    ChatterSlope sl = ChatterSlopeAt(g, next, opt.literal_sigma);
    double rho = sl.a < 0 ? sl.slope() : -1;
    if (sl.a >= 0 && sl.margin > opt.eps_marginal) {
      out.reason = ExitReason::kTangency;
      break;
    }
    if (rho <= 0 || sl.margin <= opt.eps_marginal) {
      // Land on the crossing by a shortened step.
      double frac = 1;
      if (sl.margin <= opt.eps_marginal) {
        double m0 = ChatterSlopeAt(g, s, opt.literal_sigma).margin;
        frac = (m0 - opt.eps_marginal) / (m0 - sl.margin);
        out.reason = ExitReason::kMarginal;
      } else {
        frac = rho_prev / (rho_prev - rho);
        out.reason = ExitReason::kSlope;
      }
      frac = std::clamp(frac, 0.0, 1.0);
      if (frac * step > 1e-12 * (1 + s.v)) {
        auto [last, ok2] = advance(s, frac * step);
        if (ok2) {
          s = last;
          vs.push_back(s.v);
          etas.push_back(std::max(s.eta, etas.back()));
          out.mu.push_back(s.mu);
          out.sigma.push_back(s.sigma);
          out.max_residual = std::max(
              out.max_residual, std::abs(SustainingResidual(g, s, p_star)));
        }
      }
      break;
    }
    if (next.eta < s.eta - 1e-9 * (1 + s.eta)) {
      throw NonIncreasing("eta decreased mid-regime at " + Where(next.v));
    }
    s = next;
    rho_prev = rho;
    vs.push_back(s.v);
    etas.push_back(std::max(s.eta, etas.back()));
    out.mu.push_back(s.mu);
    out.sigma.push_back(s.sigma);
    out.max_residual =
        std::max(out.max_residual, std::abs(SustainingResidual(g, s, p_star)));
  }
  if (vs.size() < 2) {
    // Degenerate regime: keep a valid two-point grid.
    vs.push_back(s.v + 1e-9 * (1 + s.v));
    etas.push_back(etas.back());
    out.mu.push_back(s.mu);
    out.sigma.push_back(s.sigma);
  }
  out.exit = vs.back();
  out.strategy = ChatteringStrategy(vs, etas);
  // The default step is a fraction of the room left; a regime much shorter
  // than that is redone with the step scaled to its own length.
  const auto min_points = static_cast<std::size_t>(0.1 / opt.tol.ode_step);
  if (opt.step <= 0 && vs.size() < min_points) {
    ChatterOptions fine = opt;
    fine.step =
        opt.tol.ode_step * std::max(out.exit - entry.v, 1e-9 * (1 + end));
    for (int pass = 0; pass < 4; ++pass) {
      ChatterResult r = ChatteringOde(g, p_star, entry, fine);
      double len = r.exit - entry.v;
      out = std::move(r);
      if (out.strategy.grid().size() >= min_points || len <= 0) break;
      fine.step = opt.tol.ode_step * len;
    }
  }
  return out;
}

ChatteringStrategy ChatteringConstructive(const Game& g,
                                          const ChatterState& entry,
                                          double end, int m,
                                          bool literal_sigma) {
  if (m < 1) throw OutOfDomain("segment count must be positive");
  if (!(end > entry.v)) throw OutOfDomain("empty chattering interval");
  const DemandModel& d = g.demand;
  const double delta = (end - entry.v) / m;
  double v = entry.v, eta = entry.eta;
  double m1 = entry.mu;
  double m2 = entry.sigma * entry.sigma + entry.mu * entry.mu;
  std::vector<double> vs = {v}, etas = {eta};
  for (int j = 0; j < m; ++j) {
    double var = m2 - m1 * m1;
    ChatterState st{v, eta, m1, var > 0 ? std::sqrt(var) : 0};
    ChatterSlope sl = ChatterSlopeAt(g, st, literal_sigma);
    double rho = sl.a < 0 ? std::clamp(sl.slope(), 0.0, 1.0) : 0.0;
    if (!std::isfinite(rho)) rho = 0;
    double v_next = j + 1 == m ? end : entry.v + delta * (j + 1);
    double kink = v + (1 - rho) * (v_next - v);
    double mass = d.Cdf(kink) - d.Cdf(v);
    m1 += eta * mass;
    m2 += eta * eta * mass;
    const double base = eta - kink;
    m1 += numerics::Integrate(
        [&](double t) { return (base + t) * d.Pdf(t); }, kink, v_next, 1e-14);
    m2 += numerics::Integrate(
        [&](double t) {
          double x = base + t;
          return x * x * d.Pdf(t);
        },
        kink, v_next, 1e-13);
    double tiny = 1e-12 * (1 + v);
    if (kink > v + tiny && kink < v_next - tiny) {
      vs.push_back(kink);
      etas.push_back(eta);
    }
    eta += v_next - kink;
    v = v_next;
    vs.push_back(v);
    etas.push_back(eta);
  }
  return ChatteringStrategy(vs, etas);
}

}  // namespace srfgame::gaussian
