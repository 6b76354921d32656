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

#include "srfgame/sim.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "srfgame/numerics.h"

namespace srfgame::sim {

namespace {

std::uint64_t SplitMix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t a = SplitMix(s);
  std::uint64_t t = stream ^ 0x632be59bd9b4e019ULL;
  std::uint64_t b = SplitMix(t);
  state_ = a ^ (b * 0xd6e8feb86659fd93ULL);
}

std::uint64_t Rng::Next() { return SplitMix(state_); }

double Rng::Uniform() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

std::size_t Rng::Below(std::size_t n) {
  return static_cast<std::size_t>(Uniform() * static_cast<double>(n));
}

AllocationOutcome Allocate(std::span<const double> requests, double cap_total,
                           Rng& rng) {
  const std::size_t n = requests.size();
  for (double r : requests) {
    if (!(r >= 0) || r > cap_total) {
      std::ostringstream os;
      os << "request " << r << " outside [0, " << cap_total << "]";
      throw OutOfDomain(os.str());
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.Below(i)]);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return requests[a] < requests[b];
  });
  AllocationOutcome out;
  out.granted.assign(n, false);
  out.granted_amounts.assign(n, 0);
  double remaining = cap_total;
  for (std::size_t i : order) {
    // Everything after the first refusal is at least as large.
    if (requests[i] > remaining) break;
    out.granted[i] = true;
    out.granted_amounts[i] = requests[i];
    remaining -= requests[i];
  }
  out.leftover = remaining;
  return out;
}

namespace {

std::size_t OpponentCount(const Population& pop) {
  std::size_t n = 0;
  for (const auto& g : pop.opponents) n += g.count;
  return n;
}

// Success counts for each probe request over all replications.
std::vector<std::uint64_t> CountSuccesses(std::span<const double> xs,
                                          const Population& pop,
                                          const RunOptions& opt) {
  const std::size_t reps = opt.replications;
  unsigned threads = opt.threads ? opt.threads
                                 : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(1, reps / 256)));
  const std::size_t m = OpponentCount(pop);
  std::vector<std::vector<std::uint64_t>> partial(
      threads, std::vector<std::uint64_t>(xs.size(), 0));

  auto work = [&](unsigned t) {
    std::vector<double> req(m), prefix(m + 1);
    auto& counts = partial[t];
    std::size_t lo = reps * t / threads, hi = reps * (t + 1) / threads;
    for (std::size_t r = lo; r < hi; ++r) {
      Rng rng(opt.seed, r);
      std::size_t k = 0;
      for (const auto& g : pop.opponents) {
        for (std::size_t j = 0; j < g.count; ++j) {
          req[k++] = g.strategy(g.demand.Sample(rng.Uniform()));
        }
      }
      double tie_u = rng.Uniform();
      std::sort(req.begin(), req.end());
      prefix[0] = 0;
      for (std::size_t j = 0; j < m; ++j) prefix[j + 1] = prefix[j] + req[j];
      for (std::size_t a = 0; a < xs.size(); ++a) {
        double x = xs[a];
        auto below = std::lower_bound(req.begin(), req.end(), x);
        std::size_t nb = static_cast<std::size_t>(below - req.begin());
        double load = prefix[nb];
        if (opt.ties == TieRule::kRandom) {
          auto upto = std::upper_bound(below, req.end(), x);
          std::size_t ties = static_cast<std::size_t>(upto - below);
          std::size_t ahead = std::min(
              ties, static_cast<std::size_t>(tie_u * static_cast<double>(ties + 1)));
          load += static_cast<double>(ahead) * x;
        }
        if (load + x <= pop.cap_total) ++counts[a];
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();
  std::vector<std::uint64_t> total(xs.size(), 0);
  for (const auto& p : partial) {
    for (std::size_t a = 0; a < xs.size(); ++a) total[a] += p[a];
  }
  return total;
}

Estimate FromCount(std::uint64_t count, std::size_t reps) {
  double p = static_cast<double>(count) / static_cast<double>(reps);
  return {p, std::sqrt(std::max(0.0, p * (1 - p)) / static_cast<double>(reps))};
}

// Standard error of x I_x - a I_a using P(I_x I_a = 1) = p_max(x, a).
double PairedStdError(double x, double px, double a, double pa,
                      std::size_t reps) {
  double joint = x >= a ? px : pa;
  double mean = x * px - a * pa;
  double second = x * x * px + a * a * pa - 2 * x * a * joint;
  double var = std::max(0.0, second - mean * mean);
  return std::sqrt(var / static_cast<double>(reps));
}

}  // namespace

std::vector<Estimate> EmpiricalSuccess(std::span<const double> xs,
                                       const Population& pop,
                                       const RunOptions& opt) {
  if (opt.replications < 1) throw ConfigError("replications must be >= 1");
  auto counts = CountSuccesses(xs, pop, opt);
  std::vector<Estimate> out;
  out.reserve(xs.size());
  for (auto c : counts) out.push_back(FromCount(c, opt.replications));
  return out;
}

Estimate EmpiricalSuccess(double x, const Population& pop,
                          const RunOptions& opt) {
  double xs[1] = {x};
  return EmpiricalSuccess(std::span<const double>(xs, 1), pop, opt).front();
}

std::vector<double> ActionGrid(double cap, double step) {
  if (!(step > 0)) throw ConfigError("action grid step must be positive");
  std::vector<double> out;
  for (long k = 0;; ++k) {
    double x = step * static_cast<double>(k);
    if (x > cap * (1 + 1e-12)) break;
    out.push_back(std::min(x, cap));
  }
  if (out.back() < cap) out.push_back(cap);
  return out;
}

std::vector<double> UniformGrid(double lo, double hi, int points) {
  std::vector<double> out(points);
  for (int k = 0; k < points; ++k) {
    out[k] = points == 1 ? hi : lo + (hi - lo) * k / (points - 1);
  }
  return out;
}

OracleResult BestResponseOracle(double v, const Population& pop,
                                const CostFunction& cost, double action_step,
                                const RunOptions& opt) {
  std::vector<double> xs;
  for (double x : ActionGrid(v, action_step)) xs.push_back(x);
  auto est = EmpiricalSuccess(xs, pop, opt);
  OracleResult best{0, -kInf, 0};
  for (std::size_t a = 0; a < xs.size(); ++a) {
    double pay = xs[a] * est[a].mean - cost.Psi(xs[a]);
    if (pay > best.payoff) best = {xs[a], pay, xs[a] * est[a].std_error};
  }
  return best;
}

GapCertificate CertifyEquilibrium(const EquilibriumStrategy& probe,
                                  const Population& pop,
                                  const CostFunction& cost,
                                  std::span<const double> value_grid,
                                  double action_step, const RunOptions& opt) {
  std::vector<double> xs = ActionGrid(pop.cap_total, action_step);
  for (double v : value_grid) {
    xs.push_back(v);
    xs.push_back(probe(v));
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  auto est = EmpiricalSuccess(xs, pop, opt);
  auto index = [&](double x) {
    return static_cast<std::size_t>(
        std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
  };

  GapCertificate cert;
  cert.replications = opt.replications;
  cert.seed = opt.seed;
  cert.worst_gap = -kInf;
  for (double v : value_grid) {
    double a = probe(v);
    std::size_t ia = index(a);
    double pa = est[ia].mean;
    double own = a * pa - cost.Psi(a);
    double best = -kInf;
    std::size_t ib = 0;
    for (std::size_t k = 0; k < xs.size() && xs[k] <= v * (1 + 1e-12); ++k) {
      double pay = xs[k] * est[k].mean - cost.Psi(xs[k]);
      if (pay > best) {
        best = pay;
        ib = k;
      }
    }
    double se = PairedStdError(xs[ib], est[ib].mean, a, pa, opt.replications);
    cert.value_grid.push_back(v);
    cert.strategy_action.push_back(a);
    cert.strategy_payoff.push_back(own);
    cert.oracle_payoff.push_back(best);
    cert.oracle_argmax.push_back(xs[ib]);
    cert.std_error.push_back(se);
    if (best - own > cert.worst_gap) {
      cert.worst_gap = best - own;
      cert.worst_gap_std_error = se;
      cert.worst_gap_at = v;
    }
  }
  return cert;
}

nlohmann::json ToJson(const GapCertificate& c) {
  return {{"value_grid", c.value_grid},
          {"strategy_action", c.strategy_action},
          {"strategy_payoff", c.strategy_payoff},
          {"oracle_payoff", c.oracle_payoff},
          {"oracle_argmax", c.oracle_argmax},
          {"std_error", c.std_error},
          {"worst_gap", c.worst_gap},
          {"worst_gap_std_error", c.worst_gap_std_error},
          {"worst_gap_at", c.worst_gap_at},
          {"replications", c.replications},
          {"seed", c.seed}};
}

void WriteCertificateCsv(std::ostream& os, const GapCertificate& c) {
  os << "# srfgame-certificate v1\n";
  os << "v,strategy_payoff,oracle_payoff,oracle_argmax,std_error\n";
  os.precision(10);
  for (std::size_t k = 0; k < c.value_grid.size(); ++k) {
    os << c.value_grid[k] << ',' << c.strategy_payoff[k] << ','
       << c.oracle_payoff[k] << ',' << c.oracle_argmax[k] << ','
       << c.std_error[k] << '\n';
  }
}

double EmpiricalLoadGap(const EquilibriumStrategy& s, const DemandModel& d,
                        std::size_t m, std::span<const double> v_grid,
                        std::uint64_t seed) {
  std::vector<std::pair<double, double>> draws(m);
  Rng rng(seed, 0);
  for (auto& p : draws) {
    double v = d.Sample(rng.Uniform());
    p = {v, s(v)};
  }
  std::sort(draws.begin(), draws.end());
  std::vector<double> prefix(m + 1, 0);
  for (std::size_t j = 0; j < m; ++j) prefix[j + 1] = prefix[j] + draws[j].second;

  std::vector<double> breaks = s.Breakpoints();
  auto integrand = [&](double t) { return s(t) * d.Pdf(t); };
  double gap = 0, mu = 0, last = 0;
  std::vector<double> grid(v_grid.begin(), v_grid.end());
  std::sort(grid.begin(), grid.end());
  for (double v : grid) {
    double hi = std::min(v, d.cap());
    double lo = last;
    for (double b : breaks) {
      if (b > lo && b < hi) {
        mu += numerics::Integrate(integrand, lo, b, 1e-13);
        lo = b;
      }
    }
    if (hi > lo) mu += numerics::Integrate(integrand, lo, hi, 1e-13);
    last = std::max(last, hi);
    double total = mu + (v >= d.cap() ? s(d.cap()) * d.AtomAtCap() : 0);
    auto it = std::upper_bound(
        draws.begin(), draws.end(), v,
        [](double x, const std::pair<double, double>& p) { return x < p.first; });
    double emp = prefix[static_cast<std::size_t>(it - draws.begin())] /
                 static_cast<double>(m);
    gap = std::max(gap, std::abs(emp - total));
  }
  return gap;
}

}  // namespace srfgame::sim
