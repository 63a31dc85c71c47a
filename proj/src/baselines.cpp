// Copyright 2026 The fdmc-alloc Authors
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

#include "fdmc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fdmc/error.hpp"
#include "fdmc/reform.hpp"

namespace fdmc {

void PowerGrid::validate() const {
  if (levels_per_variable < 2) throw ParameterError("power grid needs at least two levels");
  if (spacing == Spacing::Logarithmic && !(dynamic_range_db > 0.0)) {
    throw ParameterError("logarithmic grid needs a positive dynamic range");
  }
}

std::vector<double> PowerGrid::values(double budget) const {
  validate();
  std::vector<double> out;
  if (includes_zero) out.push_back(0.0);
  const int n = levels_per_variable;
  for (int k = 0; k < n; ++k) {
    double v = 0.0;
    if (spacing == Spacing::Linear) {
      // Linear levels start one step above zero so that zero is not repeated.
      v = budget * static_cast<double>(k + 1) / n;
    } else {
      const double exponent_db = -dynamic_range_db * static_cast<double>(n - 1 - k) / (n - 1);
      v = budget * std::pow(10.0, exponent_db / 10.0);
    }
    out.push_back(k == n - 1 ? budget : v);
  }
  return out;
}

PowerGrid PowerGrid::refined() const {
  PowerGrid out = *this;
  out.levels_per_variable = 2 * levels_per_variable - (spacing == Spacing::Logarithmic ? 1 : 0);
  return out;
}

double oracle_enumeration_budget(const ProblemInstance& inst, const PowerGrid& grid) {
  const double levels = static_cast<double>(grid.levels_per_variable + (grid.includes_zero ? 1 : 0));
  const double per_subcarrier =
      1.0 + static_cast<double>(inst.n_dl() * inst.n_ul()) * levels * levels;
  return std::pow(per_subcarrier, static_cast<double>(inst.n_subcarriers()));
}

namespace {

struct Option {
  double utility = 0.0;
  double p = 0.0;
  double q = 0.0;
  std::size_t m = 0;
  std::size_t r = 0;
  bool idle = false;
};

// Options on one subcarrier that are not dominated by another option using no
// more of any budget. Powers of zero make the corresponding user irrelevant;
// the lowest user index stands in for all of them.
std::vector<Option> subcarrier_options(const ProblemInstance& inst, std::size_t i,
                                       const std::vector<double>& p_levels,
                                       const std::vector<std::vector<double>>& q_levels) {
  std::vector<Option> all;
  all.push_back(Option{0.0, 0.0, 0.0, 0, 0, true});
  for (std::size_t r = 0; r < inst.n_ul(); ++r) {
    for (double q : q_levels[r]) {
      if (q == 0.0 && r != 0) continue;
      for (double p : p_levels) {
        if (p == 0.0 && q == 0.0) continue;
        Option best;
        best.utility = -1.0;
        for (std::size_t m = 0; m < inst.n_dl(); ++m) {
          if (p == 0.0 && m != 0) continue;
          const double u = subcarrier_utility(inst, i, m, r, p, q);
          if (u > best.utility) best = Option{u, p, q, m, r, false};
        }
        all.push_back(best);
      }
    }
  }
  // An option is dropped when some other option uses no more DL power, no
  // more power of the same UL user (or none at all) and earns at least as
  // much; exact duplicates keep the earlier entry.
  std::vector<Option> kept;
  for (std::size_t a = 0; a < all.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < all.size() && !dominated; ++b) {
      if (a == b) continue;
      const Option& x = all[a];
      const Option& y = all[b];
      const bool q_ok = y.q == 0.0 || (y.r == x.r && y.q <= x.q);
      if (!(y.p <= x.p && q_ok && y.utility >= x.utility)) continue;
      const bool equal = y.p == x.p && y.q == x.q && y.utility == x.utility;
      dominated = !equal || b < a;
    }
    if (!dominated) kept.push_back(all[a]);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const Option& x, const Option& y) { return x.utility > y.utility; });
  return kept;
}

struct Multipliers {
  double lambda = 0.0;
  std::vector<double> nu;
};

double option_score(const Option& o, const Multipliers& c) {
  return o.utility - c.lambda * o.p - (o.idle ? 0.0 : c.nu[o.r] * o.q);
}

double best_score(const std::vector<Option>& options, const Multipliers& c) {
  double best = 0.0;  // the idle option
  for (const Option& o : options) best = std::max(best, option_score(o, c));
  return best;
}

double dual_value(const std::vector<std::vector<Option>>& options, const Multipliers& c,
                  const ProblemInstance& inst) {
  double v = c.lambda * inst.p_max_dl;
  for (std::size_t r = 0; r < c.nu.size(); ++r) v += c.nu[r] * inst.p_max_ul[r];
  for (const auto& opts : options) v += best_score(opts, c);
  return v;
}

// Coordinate-wise golden-section search on the log of each multiplier. Any
// multiplier vector gives a valid bound; this only makes it tight.
Multipliers root_multipliers(const std::vector<std::vector<Option>>& options,
                             const ProblemInstance& inst) {
  Multipliers c;
  c.nu.assign(inst.n_ul(), 0.0);
  const std::size_t n_coords = 1 + inst.n_ul();
  auto coord = [&](std::size_t k) -> double& { return k == 0 ? c.lambda : c.nu[k - 1]; };
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (std::size_t k = 0; k < n_coords; ++k) {
      const auto eval = [&](double log_v) {
        coord(k) = std::pow(10.0, log_v);
        return dual_value(options, c, inst);
      };
      double lo = -8.0, hi = 14.0;
      const double g = (std::sqrt(5.0) - 1.0) / 2.0;
      double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      double f1 = eval(x1), f2 = eval(x2);
      for (int it = 0; it < 60; ++it) {
        if (f1 <= f2) {
          hi = x2; x2 = x1; f2 = f1; x1 = hi - g * (hi - lo); f1 = eval(x1);
        } else {
          lo = x1; x1 = x2; f1 = f2; x2 = lo + g * (hi - lo); f2 = eval(x2);
        }
      }
      const double best_log = 0.5 * (lo + hi);
      const double f_best = eval(best_log);
      coord(k) = 0.0;
      if (dual_value(options, c, inst) > f_best) coord(k) = std::pow(10.0, best_log);
    }
  }
  return c;
}

class Search {
 public:
  Search(const ProblemInstance& inst, std::vector<std::vector<Option>> options)
      : inst_(inst), options_(std::move(options)) {
    const std::size_t nf = options_.size();
    const Multipliers root = root_multipliers(options_, inst_);
    // Scaled copies of the root multipliers, one scale per budget, plus zero.
    const double scales[] = {1.0 / 16, 0.25, 0.5, 1.0, 2.0, 4.0, 16.0};
    const std::size_t n_scales = std::size(scales);
    const std::size_t n_budgets = 1 + inst_.n_ul();
    std::size_t combos = 1;
    for (std::size_t b = 0; b < n_budgets; ++b) combos *= n_scales;
    bounds_.push_back(Multipliers{0.0, std::vector<double>(inst_.n_ul(), 0.0)});
    for (std::size_t code = 0; code < combos; ++code) {
      Multipliers c;
      std::size_t rest = code;
      c.lambda = root.lambda * scales[rest % n_scales];
      rest /= n_scales;
      for (std::size_t r = 0; r < inst_.n_ul(); ++r) {
        c.nu.push_back(root.nu[r] * scales[rest % n_scales]);
        rest /= n_scales;
      }
      bounds_.push_back(std::move(c));
    }
    suffix_.assign(bounds_.size(), std::vector<double>(nf + 1, 0.0));
    for (std::size_t b = 0; b < bounds_.size(); ++b) {
      for (std::size_t i = nf; i-- > 0;) suffix_[b][i] = suffix_[b][i + 1] + best_score(options_[i], bounds_[b]);
    }
    choice_.assign(nf, 0);
    best_choice_.assign(nf, 0);
    q_left_ = inst_.p_max_ul;
  }

  void run() {
    p_left_ = inst_.p_max_dl;
    dfs(0, 0.0);
  }

  double best_value() const { return best_value_; }
  const std::vector<std::size_t>& best_choice() const { return best_choice_; }
  const std::vector<std::vector<Option>>& options() const { return options_; }
  std::size_t nodes() const { return nodes_; }

 private:
  static constexpr double kSlack = 1e-12;

  bool fits(const Option& o) const {
    if (o.idle) return true;
    return o.p <= p_left_ * (1.0 + kSlack) && o.q <= q_left_[o.r] * (1.0 + kSlack);
  }

  double bound(std::size_t i) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < bounds_.size(); ++b) {
      double v = suffix_[b][i] + bounds_[b].lambda * p_left_;
      for (std::size_t r = 0; r < q_left_.size(); ++r) v += bounds_[b].nu[r] * q_left_[r];
      best = std::min(best, v);
    }
    return best;
  }

  void dfs(std::size_t i, double value) {
    ++nodes_;
    const std::size_t nf = options_.size();
    if (i == nf) {
      if (value > best_value_) {
        best_value_ = value;
        best_choice_ = choice_;
      }
      return;
    }
    if (value + bound(i) <= best_value_ * (1.0 + 1e-12)) return;
    const auto& opts = options_[i];
    if (i + 1 == nf) {
      // Options are sorted by utility, so the first one that fits is best.
      for (std::size_t k = 0; k < opts.size(); ++k) {
        if (!fits(opts[k])) continue;
        choice_[i] = k;
        ++nodes_;
        if (value + opts[k].utility > best_value_) {
          best_value_ = value + opts[k].utility;
          best_choice_ = choice_;
        }
        return;
      }
      return;
    }
    for (std::size_t k = 0; k < opts.size(); ++k) {
      const Option& o = opts[k];
      if (!fits(o)) continue;
      if (value + o.utility + bound_rest(i + 1, o) <= best_value_ * (1.0 + 1e-12)) continue;
      choice_[i] = k;
      const double p_save = p_left_;
      const double q_save = o.idle ? 0.0 : q_left_[o.r];
      if (!o.idle) {
        p_left_ = std::max(0.0, p_left_ - o.p);
        q_left_[o.r] = std::max(0.0, q_left_[o.r] - o.q);
      }
      dfs(i + 1, value + o.utility);
      p_left_ = p_save;
      if (!o.idle) q_left_[o.r] = q_save;
    }
  }

  // Bound for subcarriers i.. after spending option o.
  double bound_rest(std::size_t i, const Option& o) {
    if (o.idle) return bound(i);
    const double p_save = p_left_, q_save = q_left_[o.r];
    p_left_ = std::max(0.0, p_left_ - o.p);
    q_left_[o.r] = std::max(0.0, q_left_[o.r] - o.q);
    const double b = bound(i);
    p_left_ = p_save;
    q_left_[o.r] = q_save;
    return b;
  }

  const ProblemInstance& inst_;
  std::vector<std::vector<Option>> options_;
  std::vector<Multipliers> bounds_;
  std::vector<std::vector<double>> suffix_;
  std::vector<std::size_t> choice_, best_choice_;
  double p_left_ = 0.0;
  std::vector<double> q_left_;
  double best_value_ = -1.0;
  std::size_t nodes_ = 0;
};

}  // namespace

OracleResult brute_force_oracle(const ProblemInstance& inst, const PowerGrid& grid,
                                double enumeration_cap) {
  inst.validate();
  grid.validate();
  OracleResult out;
  out.enumeration_budget = oracle_enumeration_budget(inst, grid);
  if (out.enumeration_budget > enumeration_cap) {
    std::ostringstream msg;
    msg << "oracle search space " << out.enumeration_budget << " exceeds the cap " << enumeration_cap;
    throw SizeCapError(msg.str(), out.enumeration_budget);
  }
  const std::vector<double> p_levels = grid.values(inst.p_max_dl);
  std::vector<std::vector<double>> q_levels;
  for (double budget : inst.p_max_ul) q_levels.push_back(grid.values(budget));

  std::vector<std::vector<Option>> options;
  for (std::size_t i = 0; i < inst.n_subcarriers(); ++i) {
    options.push_back(subcarrier_options(inst, i, p_levels, q_levels));
  }
  Search search(inst, std::move(options));
  search.run();

  out.allocation = Allocation(inst.n_subcarriers(), inst.n_dl(), inst.n_ul());
  for (std::size_t i = 0; i < inst.n_subcarriers(); ++i) {
    const Option& o = search.options()[i][search.best_choice()[i]];
    if (o.idle) continue;
    out.allocation.s(i, o.m, o.r) = 1.0;
    out.allocation.p(i, o.m) = o.p;
    out.allocation.q(i, o.r) = o.q;
  }
  out.objective = system_objective(inst, out.allocation);
  out.nodes = search.nodes();
  return out;
}

namespace {

BaselineResult finish(const ProblemInstance& inst, Allocation alloc, int iterations) {
  BaselineResult out;
  out.allocation = std::move(alloc);
  out.weighted_throughput = system_objective(inst, out.allocation);
  out.iterations = iterations;
  out.feasibility = check_feasibility(inst, out.allocation, 1e-6);
  return out;
}

}  // namespace

BaselineResult hd_baseline(const ProblemInstance& inst, const SolverConfig& config) {
  const SolveReport rep = solve(LiftedModel(inst, SlotFamily::HalfDuplex), config);
  return finish(inst, rep.final_allocation, rep.iterations_used);
}

BaselineResult decoupled_baseline(const ProblemInstance& inst, const SolverConfig& config) {
  const SolveReport dl = solve(LiftedModel(inst, SlotFamily::DownlinkOnly), config);
  const Allocation& a = dl.final_allocation;
  const std::size_t nf = inst.n_subcarriers();

  // DL power and user per subcarrier from stage one.
  std::vector<double> p_dl(nf, 0.0);
  std::vector<std::size_t> m_dl(nf, kNoUser);
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t m = 0; m < inst.n_dl() && m_dl[i] == kNoUser; ++m) {
      for (std::size_t r = 0; r < inst.n_ul(); ++r) {
        if (a.s(i, m, r) > 0.5) {
          m_dl[i] = m;
          p_dl[i] = a.p(i, m);
          break;
        }
      }
    }
  }

  // Stage two sees the residual self-interference as extra receiver noise.
  ProblemInstance ul_inst = inst;
  for (std::size_t i = 0; i < nf; ++i) {
    const double noise = 1.0 + inst.rho * inst.gains.L_SI(i) * p_dl[i];
    for (std::size_t r = 0; r < inst.n_ul(); ++r) ul_inst.gains.G(i, r) /= noise;
  }
  const SolveReport ul = solve(LiftedModel(ul_inst, SlotFamily::UplinkOnly), config);
  const Allocation& b = ul.final_allocation;

  Allocation joint(nf, inst.n_dl(), inst.n_ul());
  for (std::size_t i = 0; i < nf; ++i) {
    std::size_t r_ul = kNoUser;
    for (std::size_t m = 0; m < inst.n_dl() && r_ul == kNoUser; ++m) {
      for (std::size_t r = 0; r < inst.n_ul(); ++r) {
        if (b.s(i, m, r) > 0.5) {
          r_ul = r;
          break;
        }
      }
    }
    if (m_dl[i] == kNoUser && r_ul == kNoUser) continue;
    const std::size_t m = m_dl[i] == kNoUser ? 0 : m_dl[i];
    const std::size_t r = r_ul == kNoUser ? 0 : r_ul;
    joint.s(i, m, r) = 1.0;
    joint.p(i, m) = m_dl[i] == kNoUser ? 0.0 : p_dl[i];
    joint.q(i, r) = r_ul == kNoUser ? 0.0 : b.q(i, r_ul);
  }
  return finish(inst, std::move(joint), dl.iterations_used + ul.iterations_used);
}

}  // namespace fdmc
