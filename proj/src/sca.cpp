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

#include "fdmc/sca.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "fdmc/channel.hpp"
#include "fdmc/error.hpp"
#include "fdmc/rng.hpp"

namespace fdmc {

void SolverConfig::validate() const {
  if (eta && !(*eta > 0.0)) throw ConfigError("eta must be positive");
  if (max_outer_iterations < 1) throw ConfigError("max_outer_iterations must be >= 1");
  if (!(outer_tol > 0.0) || !(inner.tol > 0.0) || !(binary_tol > 0.0)) {
    throw ConfigError("tolerances must be positive");
  }
}

double SolverConfig::eta_for(const ProblemInstance& inst) const {
  if (eta) return *eta;
  return default_penalty_weight(inst.p_max_dl, LargeScaleParams{}.noise_dl_watt());
}

SolverConfig SolverConfig::preset(const std::string& name) {
  SolverConfig config;
  if (name == "converged") return config;
  if (name == "paper-faithful") {
    config.max_outer_iterations = 5;
    return config;
  }
  throw ConfigError("unknown solver preset '" + name + "'");
}

namespace {

// Initial power scale of the idle link in a one-way greedy start.
constexpr double kQuietFraction = 1e-3;

// Initial barrier weight of every surrogate solve after the first.
constexpr double kWarmBarrierWeight = 1e4;

double slot_rate(const LiftedModel::SlotCoeffs& c, double a, double b) {
  return c.w * std::log2(1.0 + c.h * a / (c.f * b + 1.0)) +
         c.mu * std::log2(1.0 + c.g * b / (c.l * a + 1.0));
}

}  // namespace

LiftedPoint initial_point(const LiftedModel& model, const SolverConfig& config) {
  const Layout& lay = model.layout();
  if (lay.is_frozen()) throw ParameterError("initial_point expects a relaxed layout");
  const ProblemInstance& inst = model.instance();
  const std::size_t nf = lay.n_subcarriers();
  const auto& slots = lay.slots();
  std::vector<double> s(slots.size()), p_raw(nf * lay.n_dl()), q_raw(nf * lay.n_ul());
  RandomStream rng(config.init_seed);

  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t m = 0; m < lay.n_dl(); ++m) p_raw[i * lay.n_dl() + m] = inst.p_max_dl / (2.0 * nf);
    for (std::size_t r = 0; r < lay.n_ul(); ++r) q_raw[i * lay.n_ul() + r] = inst.p_max_ul[r] / (2.0 * nf);
  }

  // Links already claimed by the greedy start. Each estimate shares the
  // budget with them, so ties spread over users and directions.
  std::size_t dl_load = 0;
  std::vector<std::size_t> ul_load(lay.n_ul(), 0);
  for (std::size_t i = 0; i < nf; ++i) {
    const std::size_t b = lay.slot_begin(i), e = lay.slot_begin(i + 1);
    const double n = static_cast<double>(e - b);
    switch (config.init) {
      case InitStrategy::Uniform:
        for (std::size_t k = b; k < e; ++k) s[k] = 1.0 / (n + 1.0);
        break;
      case InitStrategy::Random: {
        double total = 0.0;
        for (std::size_t k = b; k < e; ++k) total += (s[k] = rng.uniform(0.05, 1.0));
        for (std::size_t k = b; k < e; ++k) s[k] *= 0.9 / total;
        break;
      }
      case InitStrategy::Greedy: {
        std::size_t best = b;
        double best_rate = -1.0;
        int best_mode = 0;
        for (std::size_t k = b; k < e; ++k) {
          const Slot& sl = slots[k];
          const double a = sl.has_dl() ? inst.p_max_dl / double(dl_load + 1) : 0.0;
          const double q = sl.has_ul() ? inst.p_max_ul[sl.r] / double(ul_load[sl.r] + 1) : 0.0;
          const auto& c = model.coeffs(k);
          // Duplex modes: both links, DL alone, UL alone.
          const double rates[3] = {slot_rate(c, a, q), slot_rate(c, a, 0.0), slot_rate(c, 0.0, q)};
          for (int mode = 0; mode < 3; ++mode) {
            if (rates[mode] > best_rate) {
              best_rate = rates[mode];
              best = k;
              best_mode = mode;
            }
          }
        }
        for (std::size_t k = b; k < e; ++k) s[k] = (k == best) ? 0.9 : 0.05 / n;
        // Start the silent link of a one-way slot near zero so the descent
        // does not have to climb out of the interference it causes.
        const Slot& sl = slots[best];
        if (best_mode == 1 && sl.has_ul()) q_raw[i * lay.n_ul() + sl.r] *= kQuietFraction;
        if (best_mode == 2 && sl.has_dl()) p_raw[i * lay.n_dl() + sl.m] *= kQuietFraction;
        if (sl.has_dl() && best_mode != 2) ++dl_load;
        if (sl.has_ul() && best_mode != 1) ++ul_load[sl.r];
        break;
      }
    }
  }
  if (config.init == InitStrategy::Random) {
    for (double& v : p_raw) v *= 2.0 * rng.uniform(0.1, 0.9);
    for (double& v : q_raw) v *= 2.0 * rng.uniform(0.1, 0.9);
  }

  LiftedPoint pt;
  pt.x.assign(lay.dimension(), 0.0);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const Slot& sl = slots[k];
    pt.x[lay.s(k)] = s[k];
    if (sl.has_dl()) pt.x[lay.p_tilde(k)] = s[k] * p_raw[sl.i * lay.n_dl() + sl.m];
    if (sl.has_ul()) pt.x[lay.q_tilde(k)] = s[k] * q_raw[sl.i * lay.n_ul() + sl.r];
  }
  for (std::size_t i = 0; i < nf; ++i) {
    if (lay.has_raw_p()) {
      for (std::size_t m = 0; m < lay.n_dl(); ++m) pt.x[lay.p_raw(i, m)] = p_raw[i * lay.n_dl() + m];
    }
    if (lay.has_raw_q()) {
      for (std::size_t r = 0; r < lay.n_ul(); ++r) pt.x[lay.q_raw(i, r)] = q_raw[i * lay.n_ul() + r];
    }
  }
  return pt;
}

LiftedPoint run_sca(const LiftedModel& model, const ConstraintSystem& constraints,
                    const LiftedPoint& start, double eta, const SolverConfig& config,
                    SolveReport& report) {
  std::vector<double> x = start.x;
  double obj = model.penalized_objective(x, eta);
  report.lifted_trajectory_objectives.push_back(obj);
  report.converged = false;
  report.stalled = false;
  report.iterations_used = 0;
  for (int k = 1; k <= config.max_outer_iterations; ++k) {
    const SurrogateObjective surrogate(model, x, eta);
    InnerSolution sol;
    try {
      // Later anchors are already well centered for the surrogate, so the
      // first barrier stages only cost Newton steps.
      BarrierOptions inner = config.inner;
      if (k > 1) inner.t0 = std::max(inner.t0, kWarmBarrierWeight);
      sol = minimize(surrogate, constraints, x, inner);
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "outer iteration " << k << ": " << e.what();
      throw NumericalError(msg.str());
    }
    report.iterations_used = k;
    const double next = model.penalized_objective(sol.point, eta);
    TraceRow row{k, next, model.max_binary_deviation(sol.point), sol.newton_iterations};
    if (!(next <= obj)) {
      // The surrogate step is only solved to the barrier tolerance; a step
      // that raises the true objective means the anchor is already a fixed
      // point at this precision. Keep the anchor.
      row.penalized_objective = obj;
      row.max_binary_deviation = model.max_binary_deviation(x);
      report.trace.push_back(row);
      report.stalled = true;
      report.converged = true;
      break;
    }
    report.trace.push_back(row);
    report.lifted_trajectory_objectives.push_back(next);
    const double change = obj - next;
    x = std::move(sol.point);
    obj = next;
    if (change <= config.outer_tol * (1.0 + std::abs(obj))) {
      report.converged = true;
      break;
    }
  }
  return LiftedPoint{std::move(x)};
}

namespace {

std::vector<std::size_t> rounded_slots(const LiftedModel& model, std::span<const double> x) {
  const Layout& lay = model.layout();
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < lay.n_subcarriers(); ++i) {
    std::size_t best = kNoUser;
    double best_s = 0.5;
    for (std::size_t k = lay.slot_begin(i); k < lay.slot_begin(i + 1); ++k) {
      const double s = x[lay.s(k)];
      if (s > best_s || (best == kNoUser && s >= best_s)) {
        best = k;
        best_s = s;
      }
    }
    if (best != kNoUser) chosen.push_back(best);
  }
  return chosen;
}

Allocation allocation_from_slots(const LiftedModel& model, const std::vector<std::size_t>& chosen,
                                 std::span<const double> x) {
  const Layout& lay = model.layout();
  const ProblemInstance& inst = model.instance();
  Allocation alloc(inst.n_subcarriers(), inst.n_dl(), inst.n_ul());
  for (std::size_t k : chosen) {
    const Slot& sl = lay.slots()[k];
    const std::size_t m = sl.has_dl() ? sl.m : 0;
    const std::size_t r = sl.has_ul() ? sl.r : 0;
    alloc.s(sl.i, m, r) = 1.0;
    alloc.p(sl.i, m) = sl.has_dl() ? std::max(0.0, x[lay.p_tilde(k)]) : 0.0;
    alloc.q(sl.i, r) = sl.has_ul() ? std::max(0.0, x[lay.q_tilde(k)]) : 0.0;
  }
  return alloc;
}

}  // namespace

Allocation naive_rounding(const LiftedModel& model, const LiftedPoint& relaxed) {
  if (model.layout().is_frozen()) throw ParameterError("naive_rounding expects a relaxed layout");
  return allocation_from_slots(model, rounded_slots(model, relaxed.x), relaxed.x);
}

Allocation round_and_refine(const LiftedModel& model, const LiftedPoint& relaxed,
                            const SolverConfig& config) {
  const Layout& lay = model.layout();
  if (lay.is_frozen()) throw ParameterError("round_and_refine expects a relaxed layout");
  const ProblemInstance& inst = model.instance();
  const std::vector<std::size_t> chosen = rounded_slots(model, relaxed.x);
  Allocation naive = allocation_from_slots(model, chosen, relaxed.x);
  if (chosen.empty()) return naive;

  std::vector<Slot> active;
  for (std::size_t k : chosen) active.push_back(lay.slots()[k]);
  LiftedModel frozen(inst, Layout::frozen(lay.n_subcarriers(), lay.n_dl(), lay.n_ul(), active));
  const Layout& fl = frozen.layout();

  // Blend the relaxed powers with an interior point (half of every budget
  // spread evenly) so the start has a safe margin on every row.
  std::size_t n_dl_slots = 0;
  std::vector<std::size_t> n_ul_slots(inst.n_ul(), 0);
  for (const Slot& sl : fl.slots()) {
    if (sl.has_dl()) ++n_dl_slots;
    if (sl.has_ul()) ++n_ul_slots[sl.r];
  }
  constexpr double theta = 1e-3;
  LiftedPoint start{std::vector<double>(fl.dimension(), 0.0)};
  const Layout& rl = lay;
  for (std::size_t f = 0; f < fl.slots().size(); ++f) {
    const Slot& sl = fl.slots()[f];
    const std::size_t k = *std::find_if(chosen.begin(), chosen.end(),
                                        [&](std::size_t c) { return rl.slots()[c] == sl; });
    if (sl.has_dl()) {
      const double centre = inst.p_max_dl / (2.0 * n_dl_slots);
      start.x[fl.p_tilde(f)] = (1.0 - theta) * std::max(0.0, relaxed.x[rl.p_tilde(k)]) + theta * centre;
    }
    if (sl.has_ul()) {
      const double centre = inst.p_max_ul[sl.r] / (2.0 * n_ul_slots[sl.r]);
      start.x[fl.q_tilde(f)] = (1.0 - theta) * std::max(0.0, relaxed.x[rl.q_tilde(k)]) + theta * centre;
    }
  }

  SolveReport scratch;
  const ConstraintSystem cons = frozen.build_constraints();
  const LiftedPoint refined_pt = run_sca(frozen, cons, start, 0.0, config, scratch);
  Allocation refined = frozen.unlift(refined_pt.x, config.binary_tol);
  return system_objective(inst, refined) >= system_objective(inst, naive) ? refined : naive;
}

SolveReport solve(const LiftedModel& model, const SolverConfig& config) {
  config.validate();
  SolveReport report;
  report.eta = config.eta_for(model.instance());
  const ConstraintSystem cons = model.build_constraints();
  const LiftedPoint start = initial_point(model, config);
  report.relaxed_point = run_sca(model, cons, start, report.eta, config, report);
  report.max_binary_deviation = model.max_binary_deviation(report.relaxed_point.x);
  report.binary_ok = report.max_binary_deviation <= config.binary_tol;
  report.final_allocation = round_and_refine(model, report.relaxed_point, config);
  report.weighted_throughput = system_objective(model.instance(), report.final_allocation);
  report.feasibility = check_feasibility(model.instance(), report.final_allocation, 1e-6);
  return report;
}

SolveReport solve(const ProblemInstance& inst, const SolverConfig& config) {
  return solve(LiftedModel(inst, SlotFamily::FullDuplex), config);
}

void write_trace(std::ostream& out, const SolveReport& report) {
  out << "iteration\tpenalized_objective\tmax_binary_deviation\tnewton_steps\n";
  for (const TraceRow& row : report.trace) {
    out << row.iteration << '\t' << row.penalized_objective << '\t' << row.max_binary_deviation
        << '\t' << row.inner_iterations << '\n';
  }
}

}  // namespace fdmc
