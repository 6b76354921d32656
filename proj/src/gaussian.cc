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

#include "srfgame/gaussian.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace srfgame::gaussian {

namespace {
constexpr double kWClamp = 37;

double NMinus1(const Game& g) { return static_cast<double>(g.n - 1); }
}  // namespace

Game Game::Make(std::size_t n, double cap_total, const DemandModel& demand,
                const CostFunction& cost) {
  if (!(cap_total > 0) || !std::isfinite(cap_total)) {
    throw ConfigError("total capacity must be positive and finite");
  }
  Game g;
  g.n = n;
  g.cap_total = cap_total;
  g.demand = demand.WithCap(cap_total);
  g.cost = cost.WithCap(cap_total);
  g.Validate();
  return g;
}

void Game::Validate() const {
  if (n < 2) throw ConfigError("the gaussian game needs n >= 2");
  if (!(cap_total > 0)) throw ConfigError("total capacity must be positive");
  // Marginal cost is checked at half the per-player share, the capacity a
  // single player faces in the limit.
  ValidationReport report =
      ValidateAssumptions(cost, demand, cap_total, per_capita() / 2);
  if (!report.ok()) throw AssumptionViolation(report);
}

std::string ToString(Mode m) {
  switch (m) {
    case Mode::kIdentity: return "I";
    case Mode::kFlat: return "F";
    case Mode::kChatter: return "C";
  }
  return "?";
}

std::string ToString(ExitReason r) {
  switch (r) {
    case ExitReason::kSlope: return "slope";
    case ExitReason::kMarginal: return "marginal";
    case ExitReason::kCapacity: return "capacity";
    case ExitReason::kTangency: return "tangency";
  }
  return "?";
}

Branch IdentityBranch(const Game& g, const Prefix& p, double v) {
  if (v < p.end - 1e-12 * (1 + p.end) || v > g.cap_total * (1 + 1e-12)) {
    throw OutOfDomain("identity branch evaluated outside [prefix end, c_n]");
  }
  const DemandModel& d = g.demand;
  double f = d.Pdf(v);
  Branch b;
  b.action = v;
  b.d_action = 1;
  b.mu = p.m1 + d.PartialMoment1(v) - d.PartialMoment1(p.end);
  b.m2 = p.m2 + d.PartialMoment2(v) - d.PartialMoment2(p.end);
  b.d_mu = v * f;
  b.d_m2 = v * v * f;
  return b;
}

Branch FlatBranch(const Game& g, const Prefix& p, double v) {
  if (v < p.end - 1e-12 * (1 + p.end) || v > g.cap_total * (1 + 1e-12)) {
    throw OutOfDomain("flat branch evaluated outside [flat start, c_n]");
  }
  const DemandModel& d = g.demand;
  const double level = p.end;
  double mass = d.Cdf(v) - d.Cdf(level);
  double f = d.Pdf(v);
  Branch b;
  b.action = level;
  b.d_action = 0;
  b.mu = p.m1 + level * mass / 2;
  b.m2 = p.m2 + level * level * mass / 2;
  b.d_mu = level * f / 2;
  b.d_m2 = level * level * f / 2;
  return b;
}

Point Evaluate(const Game& g, const Branch& b) {
  const double n1 = NMinus1(g);
  Point pt;
  pt.mu = b.mu;
  double var = b.m2 - b.mu * b.mu;
  pt.sigma = var > 0 ? std::sqrt(var) : 0;
  const double num = g.cap_total - b.action - n1 * b.mu;
  const double psi = g.cost.Psi(b.action);
  const double dpsi = g.cost.PsiPrime(b.action);
  // A vanishing variance (only the region next to the origin) sends w to
  // +-inf; take the almost-sure limit.
  if (pt.sigma <= 1e-150 || var <= 1e-14 * b.m2) {
    pt.cdf_w = num > 0 ? 1 : (num < 0 ? 0 : 0.5);
    pt.w = num > 0 ? kWClamp : (num < 0 ? -kWClamp : 0);
    pt.phi_w = 0;
    pt.dw = 0;
  } else {
    const double d = std::sqrt(n1) * pt.sigma;
    const double dsigma = (b.d_m2 - 2 * b.mu * b.d_mu) / (2 * pt.sigma);
    const double dnum = -b.d_action - n1 * b.d_mu;
    const double w = num / d;
    pt.w = std::clamp(w, -kWClamp, kWClamp);
    pt.dw = (dnum - w * std::sqrt(n1) * dsigma) / d;
    pt.cdf_w = numerics::NormalCdf(pt.w);
    pt.phi_w = std::abs(w) >= kWClamp ? 0 : numerics::NormalPdf(w);
  }
  pt.p = b.action * pt.cdf_w - psi;
  pt.dp = b.d_action * pt.cdf_w + b.action * pt.phi_w * pt.dw -
          dpsi * b.d_action;
  return pt;
}

double PIdentity(const Game& g, const Prefix& p, double v) {
  return Evaluate(g, IdentityBranch(g, p, v)).p;
}
double PIdentityPrime(const Game& g, const Prefix& p, double v) {
  return Evaluate(g, IdentityBranch(g, p, v)).dp;
}
double PFlat(const Game& g, const Prefix& p, double v) {
  return Evaluate(g, FlatBranch(g, p, v)).p;
}
double PFlatPrime(const Game& g, const Prefix& p, double v) {
  return Evaluate(g, FlatBranch(g, p, v)).dp;
}

Prefix CloseIdentity(const Game& g, const Prefix& p, double v) {
  const DemandModel& d = g.demand;
  return {v, p.m1 + d.PartialMoment1(v) - d.PartialMoment1(p.end),
          p.m2 + d.PartialMoment2(v) - d.PartialMoment2(p.end)};
}

Prefix CloseFlat(const Game& g, const Prefix& p, double v) {
  const double level = p.end;
  double mass = g.demand.Cdf(v) - g.demand.Cdf(level);
  return {v, p.m1 + level * mass, p.m2 + level * level * mass};
}

Mode DetectConflict(Side side, double d_identity, double d_flat) {
  if (side == Side::kEndOfIdentity) {
    return d_flat < 0 ? Mode::kFlat : Mode::kChatter;
  }
  return d_identity > 0 ? Mode::kIdentity : Mode::kChatter;
}

ChatterState EntryState(const Prefix& p) {
  double var = p.m2 - p.m1 * p.m1;
  return {p.end, p.end, p.m1, var > 0 ? std::sqrt(var) : 0};
}

nlohmann::json ToJson(const RegimeTrace& t) {
  nlohmann::json j;
  j["segments"] = nlohmann::json::array();
  for (const auto& s : t.segments) {
    j["segments"].push_back(
        {{"mode", ToString(s.mode)}, {"start", s.start}, {"end", s.end}});
  }
  j["switch_points"] = t.switch_points;
  j["record_highs"] = t.record_highs;
  j["flat_suprema"] = t.flat_suprema;
  j["transitions"] = nlohmann::json::array();
  for (const auto& tr : t.transitions) {
    j["transitions"].push_back(
        {{"side", tr.side == Side::kEndOfIdentity ? "end_of_identity"
                                                  : "end_of_flat"},
         {"at", tr.at},
         {"d_identity", tr.d_identity},
         {"d_flat", tr.d_flat},
         {"probe_identity", tr.probe_identity},
         {"probe_flat", tr.probe_flat},
         {"conflict", tr.next == Mode::kChatter},
         {"next", ToString(tr.next)}});
  }
  j["chatter_entry"] = t.chatter_entry ? nlohmann::json(*t.chatter_entry)
                                       : nlohmann::json(nullptr);
  j["chatter_exit"] = t.chatter_exit ? nlohmann::json(*t.chatter_exit)
                                     : nlohmann::json(nullptr);
  j["chatter_exit_reason"] = t.chatter_exit_reason;
  return j;
}

GaussianSolution Solve(const Game& g, const SolveOptions& opt) {
  const auto& tol = opt.tol;
  const double cn = g.cap_total;
  GaussianSolution sol;
  RegimeTrace& tr = sol.trace;
  Prefix pre;
  Mode mode = Mode::kIdentity;
  double start = 0;
  double record = 0;
  bool chatter = false;

  auto push_segment = [&](Mode m, double a, double b, const Prefix& p) {
    tr.segments.push_back({m, a, b});
    sol.segment_prefix.push_back(p);
  };

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    const double resolution = tol.grid_step * (cn - start);
    if (mode == Mode::kIdentity) {
      auto tau = numerics::FirstStationaryPoint(
          [&](double v) { return PIdentityPrime(g, pre, v); }, start, cn, tol);
      if (!tau || *tau >= cn) {
        push_segment(Mode::kIdentity, start, cn, pre);
        break;
      }
      if (*tau - start < resolution && it > 0) {
        throw NoProgress("identity interval shorter than the scan grid at " +
                         std::to_string(start));
      }
      record = PIdentity(g, pre, *tau);
      tr.record_highs.push_back(record);
      tr.switch_points.push_back(*tau);
      push_segment(Mode::kIdentity, start, *tau, pre);
      Prefix closed = CloseIdentity(g, pre, *tau);
      Transition t;
      t.side = Side::kEndOfIdentity;
      t.at = *tau;
      t.d_identity = PIdentityPrime(g, pre, *tau);
      t.d_flat = PFlatPrime(g, closed, *tau);
      double probe = std::min(cn, *tau + opt.probe_step);
      t.probe_identity = PIdentityPrime(g, pre, probe);
      t.probe_flat = PFlatPrime(g, closed, probe);
      t.next = DetectConflict(t.side, t.d_identity, t.d_flat);
      tr.transitions.push_back(t);
      pre = closed;
      start = *tau;
      if (t.next == Mode::kChatter) {
        chatter = true;
        break;
      }
      mode = Mode::kFlat;
    } else {
      auto flat = [&](double v) { return PFlat(g, pre, v); };
      numerics::Extremum sup = numerics::MaxOnInterval(flat, start, cn, tol);
      tr.flat_suprema.push_back(sup.value);
      if (sup.value <= record + tol.payoff_abs) {
        push_segment(Mode::kFlat, start, cn, pre);
        break;
      }
      // Smallest crossing of the record high from below: forward scan.
      const long steps = std::lround(1.0 / tol.grid_step);
      const double h = (cn - start) / static_cast<double>(steps);
      auto gap = [&](double v) { return flat(v) - record; };
      double lo = start, hi = sup.argmax;
      for (long k = 1; k <= steps; ++k) {
        double x = start + h * static_cast<double>(k);
        if (x >= sup.argmax) break;
        if (gap(x) > 0) {
          hi = x;
          break;
        }
        lo = x;
      }
      double end = numerics::FindRoot(gap, lo, hi, tol);
      if (end - start < resolution) {
        throw NoProgress("flat interval shorter than the scan grid at " +
                         std::to_string(start));
      }
      tr.switch_points.push_back(end);
      push_segment(Mode::kFlat, start, end, pre);
      Prefix closed = CloseFlat(g, pre, end);
      Transition t;
      t.side = Side::kEndOfFlat;
      t.at = end;
      t.d_flat = PFlatPrime(g, pre, end);
      t.d_identity = PIdentityPrime(g, closed, end);
      double probe = std::min(cn, end + opt.probe_step);
      t.probe_flat = PFlatPrime(g, pre, probe);
      t.probe_identity = PIdentityPrime(g, closed, probe);
      t.next = DetectConflict(t.side, t.d_identity, t.d_flat);
      tr.transitions.push_back(t);
      pre = closed;
      start = end;
      if (t.next == Mode::kChatter) {
        chatter = true;
        break;
      }
      mode = Mode::kIdentity;
    }
  }
  if (it >= opt.max_iterations) {
    throw NoProgress("iteration limit reached");
  }

  std::vector<double> prefix_points;
  for (double t : tr.switch_points) {
    if (t < start || !chatter) prefix_points.push_back(t);
  }
  AifStrategy prefix(cn, prefix_points);
  if (!chatter) {
    sol.strategy = EquilibriumStrategy(prefix);
    return sol;
  }

  ChatterOptions co;
  co.eps_marginal = opt.eps_marginal;
  co.tol = tol;
  // The strategy never drops below the level it had just before entry.
  co.floor = prefix(std::nextafter(start, 0.0));
  ChatterResult cr = ChatteringOde(g, record, EntryState(pre), co);
  tr.chatter_entry = start;
  tr.chatter_exit = cr.exit;
  tr.chatter_exit_reason = ToString(cr.reason);
  push_segment(Mode::kChatter, start, cr.exit, pre);
  std::optional<double> tail;
  if (cr.exit < cn) {
    tail = cr.strategy.values().back();
    push_segment(Mode::kFlat, cr.exit, cn, pre);
  }
  sol.strategy = EquilibriumStrategy(prefix, cr.strategy, tail);
  sol.chatter = std::move(cr);
  sol.chatter_p_star = record;
  return sol;
}

MomentPath StrategyMoments(const Game& g, const EquilibriumStrategy& s,
                           int grid) {
  const double cn = g.cap_total;
  std::vector<double> breaks = s.Breakpoints();
  MomentPath out;
  out.v.resize(grid + 1);
  out.m1.assign(grid + 1, 0);
  out.m2.assign(grid + 1, 0);
  auto f1 = [&](double t) { return s(t) * g.demand.Pdf(t); };
  auto f2 = [&](double t) {
    double x = s(t);
    return x * x * g.demand.Pdf(t);
  };
  std::size_t bi = 0;
  for (int k = 0; k <= grid; ++k) out.v[k] = cn * k / grid;
  for (int k = 1; k <= grid; ++k) {
    double a = out.v[k - 1], b = out.v[k];
    double m1 = 0, m2 = 0;
    double lo = a;
    while (bi < breaks.size() && breaks[bi] <= a) ++bi;
    std::size_t bj = bi;
    while (true) {
      double hi = (bj < breaks.size() && breaks[bj] < b) ? breaks[bj] : b;
      // Nudge inside so jumps at the ends evaluate on the right piece.
      double eps = 1e-13 * (1 + hi);
      m1 += numerics::Integrate(f1, lo, hi - (hi < b ? eps : 0), 1e-14);
      m2 += numerics::Integrate(f2, lo, hi - (hi < b ? eps : 0), 1e-12);
      if (hi >= b) break;
      lo = hi;
      ++bj;
    }
    out.m1[k] = out.m1[k - 1] + m1;
    out.m2[k] = out.m2[k - 1] + m2;
  }
  return out;
}

ZScoreReport ZScoreDiagnostics(const Game& g, const EquilibriumStrategy& s,
                               int grid) {
  const double cn = g.cap_total;
  const double n1 = NMinus1(g);
  MomentPath path = StrategyMoments(g, s, grid);
  ZScoreReport r;
  double prev_num = cn;
  double prev_w = kInf, prev_cdf = 1;
  for (int k = 0; k <= grid; ++k) {
    double v = path.v[k];
    double sv = s(v);
    r.sup_strategy = std::max(r.sup_strategy, sv);
    double num = cn - sv - n1 * path.m1[k];
    if (!r.v_tilde && num <= 0 && k > 0) {
      double v0 = path.v[k - 1];
      r.v_tilde = v0 + (v - v0) * prev_num / (prev_num - num);
    }
    prev_num = num;
    double var = path.m2[k] - path.m1[k] * path.m1[k];
    if (var <= 1e-14 * path.m2[k] || var <= 0) continue;
    double w = num / (std::sqrt(n1) * std::sqrt(var));
    double cdf = numerics::NormalCdf(std::clamp(w, -kWClamp, kWClamp));
    if (r.w_monotone && w > prev_w + 1e-9 * (1 + std::abs(prev_w))) {
      r.w_monotone = false;
      r.first_w_violation = v;
    }
    if (r.phi_monotone && cdf > prev_cdf + 1e-12) {
      r.phi_monotone = false;
      r.first_phi_violation = v;
    }
    prev_w = w;
    prev_cdf = cdf;
  }
  r.capacity_margin = cn - r.sup_strategy;
  r.mu_inf = path.m1.back() + s(cn) * g.demand.AtomAtCap();
  r.slack_positive = g.per_capita() - r.mu_inf > 0;
  return r;
}

nlohmann::json ToJson(const ZScoreReport& r) {
  auto opt = [](const std::optional<double>& x) {
    return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
  };
  return {{"v_tilde", opt(r.v_tilde)},
          {"w_monotone", r.w_monotone},
          {"phi_monotone", r.phi_monotone},
          {"first_w_violation", opt(r.first_w_violation)},
          {"first_phi_violation", opt(r.first_phi_violation)},
          {"sup_strategy", r.sup_strategy},
          {"capacity_margin", r.capacity_margin},
          {"mu_inf", r.mu_inf},
          {"slack_positive", r.slack_positive}};
}

double SuccessProbability(const Game& g, const EquilibriumStrategy& s,
                          double x) {
  const double cn = g.cap_total;
  const double n1 = NMinus1(g);
  // Opponents below x are those with v < inf{v : s(v) >= x}.
  double lo = 0, hi = cn;
  if (s(cn) < x) {
    lo = hi;
  } else {
    for (int k = 0; k < 200 && hi - lo > 1e-13 * (1 + hi); ++k) {
      double mid = 0.5 * (lo + hi);
      (s(mid) >= x ? hi : lo) = mid;
    }
  }
  const double edge = lo;
  std::vector<double> cuts = {0};
  for (double b : s.Breakpoints()) {
    if (b > 0 && b < edge) cuts.push_back(b);
  }
  cuts.push_back(edge);
  double m1 = 0, m2 = 0;
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    m1 += numerics::Integrate(
        [&](double t) { return s(t) * g.demand.Pdf(t); }, cuts[k - 1], cuts[k],
        1e-14);
    m2 += numerics::Integrate(
        [&](double t) {
          double a = s(t);
          return a * a * g.demand.Pdf(t);
        },
        cuts[k - 1], cuts[k], 1e-12);
  }
  if (edge >= cn) {
    double a = s(cn);
    m1 += a * g.demand.AtomAtCap();
    m2 += a * a * g.demand.AtomAtCap();
  }
  double var = m2 - m1 * m1;
  double num = cn - x - n1 * m1;
  if (var <= 1e-14 * m2 || var <= 0) return num > 0 ? 1 : (num < 0 ? 0 : 0.5);
  double w = num / (std::sqrt(n1) * std::sqrt(var));
  return numerics::NormalCdf(std::clamp(w, -kWClamp, kWClamp));
}

namespace {
std::size_t SegmentAt(const RegimeTrace& t, double v) {
  for (std::size_t k = 0; k < t.segments.size(); ++k) {
    if (v < t.segments[k].end) return k;
  }
  return t.segments.size() - 1;
}

double Interp(const std::vector<double>& xs, const std::vector<double>& ys,
              double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t j = static_cast<std::size_t>(it - xs.begin());
  double u = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + u * (ys[j] - ys[j - 1]);
}
}  // namespace

void WriteCurves(std::ostream& os, const Game& g, const GaussianSolution& sol,
                 int n) {
  const double n1 = NMinus1(g);
  MomentPath path = StrategyMoments(g, sol.strategy, n);
  os << "# srfgame-curves v1 gaussian\n";
  os << "v,s,w,Phi_w,p_identity,p_flat,p_eta\n";
  os.precision(10);
  for (int k = 0; k <= n; ++k) {
    double v = path.v[k];
    double sv = sol.strategy(v);
    double var = path.m2[k] - path.m1[k] * path.m1[k];
    double num = g.cap_total - sv - n1 * path.m1[k];
    double w = var > 1e-14 * path.m2[k] && var > 0
                   ? num / (std::sqrt(n1) * std::sqrt(var))
                   : (num > 0 ? kWClamp : -kWClamp);
    w = std::clamp(w, -kWClamp, kWClamp);
    os << v << ',' << sv << ',' << w << ',' << numerics::NormalCdf(w) << ',';
    std::size_t seg = SegmentAt(sol.trace, v);
    const Segment& s = sol.trace.segments[seg];
    const Prefix& p = sol.segment_prefix[seg];
    if (s.mode == Mode::kIdentity) {
      os << PIdentity(g, p, v) << ",,";
    } else if (s.mode == Mode::kFlat && s.start == p.end) {
      os << ',' << PFlat(g, p, v) << ',';
    } else if (s.mode == Mode::kChatter && sol.chatter) {
      const auto& c = *sol.chatter;
      ChatterState st{v, c.strategy(v), Interp(c.strategy.grid(), c.mu, v),
                      Interp(c.strategy.grid(), c.sigma, v)};
      os << ",," << SustainingResidual(g, st, 0);
    } else {
      os << ",,";
    }
    os << '\n';
  }
}

}  // namespace srfgame::gaussian
