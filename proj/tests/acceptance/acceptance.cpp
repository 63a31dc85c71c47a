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


// Acceptance suite. Each check prints one PASS or FAIL line with the measured
// quantities next to their thresholds; the exit code is nonzero if any
// selected check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdmc/bench.hpp"
#include "fdmc/convex.hpp"
#include "fdmc/reform.hpp"
#include "fdmc/rng.hpp"
#include "fdmc/sca.hpp"
#include "support/qp_oracle.hpp"

namespace fdmc {
namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

ExperimentConfig desk_config(std::size_t nf, std::size_t users) {
  ExperimentConfig c;
  c.n_subcarriers = nf;
  c.n_dl = c.n_ul = users;
  c.trials = 50;
  return c;
}

// Uniform random lifted point inside the power and assignment boxes of a
// physical instance.
std::vector<double> random_point(const LiftedModel& model, RandomStream& rng) {
  const Layout& lay = model.layout();
  const ProblemInstance& inst = model.instance();
  const double nf = static_cast<double>(lay.n_subcarriers());
  std::vector<double> x(lay.dimension(), 0.0);
  for (std::size_t i = 0; i < lay.n_subcarriers(); ++i) {
    for (std::size_t m = 0; m < lay.n_dl(); ++m) x[lay.p_raw(i, m)] = rng.uniform(0.01, 1.0) * inst.p_max_dl / nf;
    for (std::size_t r = 0; r < lay.n_ul(); ++r) x[lay.q_raw(i, r)] = rng.uniform(0.01, 1.0) * inst.p_max_ul[r] / nf;
  }
  for (std::size_t k = 0; k < lay.slots().size(); ++k) {
    const Slot& sl = lay.slots()[k];
    const double s = rng.uniform(0.05, 0.95);
    x[lay.s(k)] = s;
    if (sl.has_dl()) x[lay.p_tilde(k)] = s * rng.uniform(0.5, 1.0) * x[lay.p_raw(sl.i, sl.m)];
    if (sl.has_ul()) x[lay.q_tilde(k)] = s * rng.uniform(0.5, 1.0) * x[lay.q_raw(sl.i, sl.r)];
  }
  return x;
}

using Gradient = std::function<void(std::span<const double>, std::span<double>)>;
using Difference = std::function<double(std::span<const double>, std::span<const double>)>;

// Worst per-coordinate relative error of an analytic gradient against central
// differences with relative step 1e-5. The difference f(x + h) - f(x - h) is
// taken in a form free of cancellation, since f sums many slot terms that are
// large next to one coordinate's share. Derivatives below 1e-9 of the largest
// one are compared against that floor.
double gradient_error(std::vector<double> x, const Gradient& grad, const Difference& diff) {
  std::vector<double> analytic(x.size());
  grad(x, analytic);
  double top = 0.0;
  for (double g : analytic) top = std::max(top, std::abs(g));
  std::vector<double> up = x;
  double worst = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double x0 = x[c];
    const double h = 1e-5 * std::max(std::abs(x0), 1e-12);
    x[c] = x0 - h;
    up[c] = x0 + h;
    const double numeric = diff(x, up) / (2.0 * h);
    x[c] = up[c] = x0;
    const double scale = std::max({std::abs(analytic[c]), std::abs(numeric), 1e-9 * top, 1e-300});
    worst = std::max(worst, std::abs(analytic[c] - numeric) / scale);
  }
  return worst;
}

Verdict gradients() {
  const ExperimentConfig config = desk_config(4, 2);
  RandomStream rng(101);
  double worst_f = 0.0, worst_g = 0.0, worst_m = 0.0;
  for (std::size_t t = 0; t < 100; ++t) {
    const LiftedModel model(make_instance(config, t, 0, config.p_max_dl_dbm));
    const std::vector<double> x = random_point(model, rng);
    worst_f = std::max(worst_f, gradient_error(x, [&](auto a, auto b) { model.grad_F(a, b); },
                                               [&](auto a, auto b) { return model.F_difference(a, b); }));
    worst_g = std::max(worst_g, gradient_error(x, [&](auto a, auto b) { model.grad_G(a, b); },
                                               [&](auto a, auto b) { return model.G_difference(a, b); }));
    // M is a plain sum of squares; its values carry no cancellation worth
    // avoiding.
    worst_m = std::max(worst_m, gradient_error(x, [&](auto a, auto b) { model.grad_M(a, b); }, [&](auto a, auto b) {
                         return model.eval_dc_parts(b).M - model.eval_dc_parts(a).M;
                       }));
  }
  const double worst = std::max({worst_f, worst_g, worst_m});
  return {worst <= 1e-6, "100 points, max relative error F " + fmt("%.2e", worst_f) + " G " +
                             fmt("%.2e", worst_g) + " M " + fmt("%.2e", worst_m) + " (limit 1e-6)"};
}

Verdict underestimator() {
  const ExperimentConfig config = desk_config(4, 2);
  RandomStream rng(202);
  double gap_g = INFINITY, gap_m = INFINITY, gap_s = INFINITY, anchor_err = 0.0;
  for (std::size_t t = 0; t < 1000; ++t) {
    const LiftedModel model(make_instance(config, t % 100, 0, config.p_max_dl_dbm));
    const double eta = config.solver_config(config.p_max_dl_dbm).eta_for(model.instance());
    const std::vector<double> anchor = random_point(model, rng);
    const std::vector<double> x = random_point(model, rng);
    std::vector<double> gg(x.size()), gm(x.size()), scratch(x.size());
    model.grad_G(anchor, gg);
    model.grad_M(anchor, gm);
    const DcParts pa = model.eval_dc_parts(anchor), px = model.eval_dc_parts(x);
    double lin_g = pa.G, lin_m = pa.M;
    for (std::size_t c = 0; c < x.size(); ++c) {
      lin_g += gg[c] * (x[c] - anchor[c]);
      lin_m += gm[c] * (x[c] - anchor[c]);
    }
    gap_g = std::min(gap_g, px.G - lin_g);
    gap_m = std::min(gap_m, px.M - lin_m);
    const SurrogateObjective sur(model, anchor, eta);
    gap_s = std::min(gap_s, sur.evaluate(x, scratch) - model.penalized_objective(x, eta));
    anchor_err = std::max(anchor_err, std::abs(sur.evaluate(anchor, scratch) - model.penalized_objective(anchor, eta)));
  }
  const bool pass = gap_g >= -1e-9 && gap_m >= -1e-9 && gap_s >= -1e-9 && anchor_err <= 1e-9;
  return {pass, "1000 pairs, min G - lin_G " + fmt("%.3e", gap_g) + ", min M - lin_M " + fmt("%.3e", gap_m) +
                    ", min surrogate - objective " + fmt("%.3e", gap_s) + " (limit -1e-9), anchor mismatch " +
                    fmt("%.2e", anchor_err) + " (limit 1e-9)"};
}

Verdict monotone_descent() {
  const ExperimentConfig config = desk_config(8, 2);
  double worst_rise = 0.0, worst_violation = 0.0;
  std::size_t infeasible = 0, rejected = 0;
  for (std::size_t t = 0; t < 100; ++t) {
    const ProblemInstance inst = make_instance(config, t, 0, config.p_max_dl_dbm);
    const LiftedModel model(inst);
    const SolveReport rep = solve(model, config.solver_config(config.p_max_dl_dbm));
    const auto& traj = rep.lifted_trajectory_objectives;
    for (std::size_t k = 1; k < traj.size(); ++k) worst_rise = std::max(worst_rise, traj[k] - traj[k - 1]);
    rejected += rep.stalled ? 1 : 0;
    worst_violation = std::max(worst_violation, model.build_constraints().max_violation(rep.relaxed_point.x));
    infeasible += check_feasibility(inst, rep.final_allocation, 1e-6).feasible() ? 0 : 1;
  }
  const bool pass = worst_rise <= 1e-9 && worst_violation <= 1e-6 && infeasible == 0;
  return {pass, "100 instances, max objective rise " + fmt("%.2e", worst_rise) + " (limit 1e-9), relaxed violation " +
                    fmt("%.2e", worst_violation) + " (limit 1e-6), infeasible allocations " +
                    std::to_string(infeasible) + ", runs with a rejected step " + std::to_string(rejected)};
}

Verdict binary_convergence() {
  const ExperimentConfig config = desk_config(8, 2);
  std::size_t good = 0;
  std::vector<double> deviations;
  for (std::size_t t = 0; t < 100; ++t) {
    const SolveReport rep = solve(make_instance(config, t, 0, config.p_max_dl_dbm),
                                  config.solver_config(config.p_max_dl_dbm));
    deviations.push_back(rep.max_binary_deviation);
    good += rep.max_binary_deviation <= 1e-3 ? 1 : 0;
  }
  std::sort(deviations.begin(), deviations.end());
  return {good >= 95, std::to_string(good) + "/100 instances within 1e-3 of binary (need 95), median deviation " +
                          fmt("%.2e", deviations[50]) + ", worst " + fmt("%.2e", deviations.back())};
}

Verdict oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::size_t good = 0, total = 0;
  std::string sizes;
  for (std::size_t nf : {2, 3, 4}) {
    for (std::size_t users : {1, 2}) {
      ExperimentConfig config = desk_config(nf, users);
      const OracleCheck check = run_oracle_check(config);
      std::size_t here = 0;
      for (const OracleRow& r : check.rows) here += r.ratio >= 0.95 ? 1 : 0;
      good += here;
      total += check.rows.size();
      sizes += " " + std::to_string(nf) + "x" + std::to_string(users) + ":" + std::to_string(here) + "/" +
               std::to_string(check.rows.size());
    }
  }
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  const double fraction = static_cast<double>(good) / static_cast<double>(total);
  return {fraction >= 0.90 && minutes <= 10.0,
          "ratio >= 0.95 on " + fmt("%.3f", fraction) + " of " + std::to_string(total) +
              " seeds (need 0.90), by N_F x K:" + sizes + ", runtime " + fmt("%.1f", minutes) + " min (limit 10)"};
}

using Table = std::map<std::string, std::vector<double>>;

Table by_scheme(const std::vector<ResultRow>& rows, std::size_t& failures) {
  Table t;
  failures = 0;
  for (const ResultRow& r : rows) {
    t[r.scheme].push_back(r.mean_throughput);
    failures += r.feasibility_failures;
  }
  return t;
}

std::string series(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt("%.2f", x);
  return s;
}

Verdict power_sweep() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig config = desk_config(16, 4);
  config.sweep = SweepAxis::Power;
  config.sweep_values = {10, 16, 22, 28, 34, 40, 46};
  std::size_t failures = 0;
  const Table t = by_scheme(run_power_sweep(config).rows, failures);
  const auto& fd = t.at("proposed");
  const auto& b1 = t.at("baseline1");
  const auto& b2 = t.at("baseline2");
  bool increasing = true, ordered = true;
  for (const auto* s : {&fd, &b1, &b2}) {
    for (std::size_t k = 1; k < s->size(); ++k) increasing = increasing && (*s)[k] > (*s)[k - 1];
  }
  for (std::size_t k = 0; k < fd.size(); ++k) ordered = ordered && fd[k] >= b1[k] && b1[k] >= b2[k];
  const double r2 = fd.back() / b2.back(), r1 = fd.back() / b1.back();
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  const bool pass = increasing && ordered && r2 >= 1.30 && r1 >= 1.10 && minutes <= 30.0 && failures == 0;
  return {pass, std::string("increasing ") + (increasing ? "yes" : "no") + ", ordering " + (ordered ? "yes" : "no") +
                    ", at 46 dBm proposed/baseline2 " + fmt("%.3f", r2) + " (need 1.30) proposed/baseline1 " +
                    fmt("%.3f", r1) + " (need 1.10), solver failures " + std::to_string(failures) + ", runtime " +
                    fmt("%.1f", minutes) + " min (limit 30); means over 10..46 dBm: proposed [" + series(fd) +
                    "] baseline1 [" + series(b1) + "] baseline2 [" + series(b2) + "]"};
}

Verdict user_sweep() {
  ExperimentConfig config = desk_config(16, 1);
  config.sweep = SweepAxis::Users;
  config.sweep_values = {1, 2, 4, 8};
  std::size_t failures = 0;
  const Table t = by_scheme(run_user_sweep(config).rows, failures);
  bool monotone = true;
  for (const auto& [scheme, s] : t) {
    for (std::size_t k = 1; k < s.size(); ++k) monotone = monotone && s[k] >= s[k - 1];
  }
  const auto& fd = t.at("proposed");
  const auto& b1 = t.at("baseline1");
  const double gap2 = fd[1] - b1[1], gap8 = fd[3] - b1[3];
  const bool pass = monotone && gap8 > gap2 && failures == 0;
  return {pass, std::string("non-decreasing ") + (monotone ? "yes" : "no") + ", gap to baseline1 at K=J=2 " +
                    fmt("%.3f", gap2) + " at K=J=8 " + fmt("%.3f", gap8) + ", solver failures " +
                    std::to_string(failures) + "; means over K=J 1,2,4,8: proposed [" + series(fd) + "] baseline1 [" +
                    series(b1) + "] baseline2 [" + series(t.at("baseline2")) + "]"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "fdmc_acceptance_determinism";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string base = "n_subcarriers = 3\nusers = 2\ntrials = 3\n";
  const std::vector<std::pair<std::string, std::string>> runs{
      {"solve", base},
      {"sweep-power", base + "sweep_values = 20, 30\n"},
      {"sweep-users", base + "sweep_values = 1, 2\n"},
      {"oracle-check", "n_subcarriers = 2\nusers = 1\ntrials = 3\n"},
      {"dump-channels", base},
  };
  std::string bad;
  for (const auto& [name, text] : runs) {
    const std::filesystem::path cfg = dir / (name + ".cfg");
    std::ofstream(cfg) << text;
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const std::filesystem::path out = dir / (name + std::to_string(rep) + ".csv");
      const std::string cmd = "\"" + cli + "\" --config \"" + cfg.string() + "\" --seed 17 --out \"" + out.string() +
                              "\" " + name + " > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      outputs[rep] = rc == 0 ? slurp(out) : std::string();
      if (rc != 0) bad += " " + name + "(exit " + std::to_string(rc) + ")";
    }
    if (outputs[0].empty() || outputs[0] != outputs[1]) bad += " " + name;
  }
  std::filesystem::remove_all(dir);
  return {bad.empty(), bad.empty() ? "5 subcommands rerun, outputs byte-identical" : "mismatch or error in:" + bad};
}

Verdict inner_solver() {
  RandomStream rng(909);
  double worst_gap = 0.0, worst_violation = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform(0.0, 19.0));
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform(0.0, 2.0 * static_cast<double>(n)));
    const testing::RandomQp qp = testing::make_random_qp(n, m, rng);
    const ConstraintSystem cons = qp.constraints();
    const std::vector<double> start(qp.interior.data(), qp.interior.data() + qp.interior.size());
    const InnerSolution sol = minimize(testing::QuadraticObjective(qp), cons, start);
    const testing::DualPgResult ref = testing::dual_projected_gradient(qp);
    worst_gap = std::max(worst_gap, std::abs(sol.objective_value - ref.objective));
    worst_violation = std::max(worst_violation, cons.max_violation(sol.point));
  }
  return {worst_gap <= 1e-5 && worst_violation <= 1e-9,
          "100 quadratics (dim 2..20), max objective gap " + fmt("%.2e", worst_gap) + " (limit 1e-5), max violation " +
              fmt("%.2e", worst_violation) + " (limit 1e-9)"};
}

}  // namespace
}  // namespace fdmc

int main(int argc, char** argv) {
  CLI::App app{"fdmc-alloc acceptance checks"};
  std::vector<int> selected;
  std::string cli;
  app.add_option("checks", selected, "Checks to run (1-9); all when omitted")->check(CLI::Range(1, 9));
  app.add_option("--cli", cli, "Path of the fdmc command-line tool");
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  using fdmc::Verdict;
  const std::map<int, std::pair<const char*, std::function<Verdict()>>> checks{
      {1, {"gradient correctness", fdmc::gradients}},
      {2, {"global underestimator", fdmc::underestimator}},
      {3, {"monotone descent and feasibility", fdmc::monotone_descent}},
      {4, {"binary convergence", fdmc::binary_convergence}},
      {5, {"oracle near-optimality", fdmc::oracle}},
      {6, {"power sweep trend and gains", fdmc::power_sweep}},
      {7, {"user sweep trend and gap", fdmc::user_sweep}},
      {8, {"CLI determinism", [&] { return fdmc::determinism(cli); }}},
      {9, {"inner solver certification", fdmc::inner_solver}},
  };
  int failed = 0;
  for (int id : selected) {
    const auto& [name, run] = checks.at(id);
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::printf("[%s] %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
