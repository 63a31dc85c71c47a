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

#include "fdmc/convex.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "fdmc/error.hpp"

namespace fdmc {

std::size_t ConstraintSystem::add(std::span<const Term> terms, double bound, int tag) {
  std::map<std::size_t, double> merged;
  for (const Term& t : terms) {
    if (t.index >= dimension_) throw ParameterError("constraint term index out of range");
    merged[t.index] += t.coeff;
  }
  for (const auto& [index, coeff] : merged) {
    if (coeff != 0.0) terms_.push_back({index, coeff});
  }
  row_start_.push_back(terms_.size());
  bounds_.push_back(bound);
  tags_.push_back(tag);
  return bounds_.size() - 1;
}

std::size_t ConstraintSystem::count_tag(int tag) const {
  return static_cast<std::size_t>(std::count(tags_.begin(), tags_.end(), tag));
}

double ConstraintSystem::activity(std::span<const double> x, std::size_t k) const {
  double sum = 0.0;
  for (const Term& t : row(k)) sum += t.coeff * x[t.index];
  return sum;
}

double ConstraintSystem::min_slack(std::span<const double> x) const {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < size(); ++k) lo = std::min(lo, slack(x, k));
  return lo;
}

double ConstraintSystem::max_violation(std::span<const double> x) const {
  double hi = 0.0;
  for (std::size_t k = 0; k < size(); ++k) hi = std::max(hi, -slack(x, k));
  return hi;
}

double SmoothObjective::value(std::span<const double> x) const {
  std::vector<double> scratch(dimension());
  return evaluate(x, scratch);
}

double SmoothObjective::difference(std::span<const double> x, std::span<const double> y) const {
  return value(y) - value(x);
}

double LinearObjective::evaluate(std::span<const double> x, std::span<double> grad) const {
  double v = 0.0;
  for (std::size_t k = 0; k < c_.size(); ++k) {
    v += c_[k] * x[k];
    grad[k] = c_[k];
  }
  return v;
}

namespace {

// Rows with more terms than this, or than twice the square root of the
// dimension, go through the low-rank correction instead of the sparse
// factorization. Per-subcarrier rows stay sparse; their fill-in is local,
// and a wide low-rank block loses accuracy.
constexpr std::size_t kDenseRowTerms = 16;

// Largest system the dense fallback will factor.
constexpr std::size_t kDenseFallbackLimit = 4000;

// Half squared Newton decrement below which a stalled centering stage is
// accepted. The objective error this leaves is about kNoiseDecrement / t.
constexpr double kNoiseDecrement = 0.05;

// Relative residual above which a solve is redone densely. Smaller residuals
// only make the Newton step inexact, which the line search absorbs.
constexpr double kSolveTolerance = 1e-3;
// A solve that leaves half of the right-hand side unexplained has hit a null
// direction. The damping is relative to the unit Jacobi-scaled diagonal.
constexpr double kSingularResidual = 0.5;
constexpr double kDamping = 1e-8;

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vec = Eigen::VectorXd;

// Newton system  (t * hess f + A_s^T D_s A_s) + V V^T,  V = A_d^T D_d^{1/2}.
// The sparse part is factored with a fixed symbolic analysis; dense rows are
// folded in with the Woodbury identity.
class NewtonSystem {
 public:
  NewtonSystem(const SmoothObjective& objective, const ConstraintSystem& cons)
      : n_(cons.dimension()), cons_(cons) {
    const std::size_t dense_cut =
        std::max(kDenseRowTerms, static_cast<std::size_t>(2.0 * std::sqrt(static_cast<double>(n_))));
    for (std::size_t k = 0; k < cons.size(); ++k) {
      (cons.row(k).size() > dense_cut ? dense_rows_ : sparse_rows_).push_back(k);
    }
    const auto obj_pattern = objective.hessian_pattern();
    std::vector<Eigen::Triplet<double, int>> trip;
    for (std::size_t c = 0; c < n_; ++c) trip.emplace_back(int(c), int(c), 0.0);
    for (const auto& [r, c] : obj_pattern) trip.emplace_back(int(std::max(r, c)), int(std::min(r, c)), 0.0);
    for (std::size_t k : sparse_rows_) {
      const auto row = cons.row(k);
      for (std::size_t a = 0; a < row.size(); ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
          const std::size_t r = std::max(row[a].index, row[b].index);
          const std::size_t c = std::min(row[a].index, row[b].index);
          trip.emplace_back(int(r), int(c), 0.0);
        }
      }
    }
    matrix_.resize(int(n_), int(n_));
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();
    scale_ = Vec::Ones(Eigen::Index(n_));

    diag_pos_.resize(n_);
    for (std::size_t c = 0; c < n_; ++c) diag_pos_[c] = position(c, c);
    obj_pos_.reserve(obj_pattern.size());
    for (const auto& [r, c] : obj_pattern) obj_pos_.push_back(position(std::max(r, c), std::min(r, c)));
    pair_offset_.push_back(0);
    for (std::size_t k : sparse_rows_) {
      const auto row = cons.row(k);
      for (std::size_t a = 0; a < row.size(); ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
          pair_pos_.push_back(position(std::max(row[a].index, row[b].index),
                                       std::min(row[a].index, row[b].index)));
        }
      }
      pair_offset_.push_back(pair_pos_.size());
    }
    obj_values_.resize(obj_pattern.size());
    solver_.analyzePattern(matrix_);
    if (solver_.info() != Eigen::Success) throw NumericalError("symbolic factorization failed");
  }

  // Assembles and factors the system at slacks `slack` and barrier weight t.
  void factor(const SmoothObjective& objective, std::span<const double> x,
              std::span<const double> slack, double t) {
    double* val = matrix_.valuePtr();
    std::fill(val, val + matrix_.nonZeros(), 0.0);
    if (!obj_values_.empty()) {
      objective.hessian_values(x, obj_values_);
      for (std::size_t e = 0; e < obj_values_.size(); ++e) val[obj_pos_[e]] += t * obj_values_[e];
    }
    for (std::size_t s = 0; s < sparse_rows_.size(); ++s) {
      const std::size_t k = sparse_rows_[s];
      const double d = 1.0 / (slack[k] * slack[k]);
      const auto row = cons_.row(k);
      std::size_t p = pair_offset_[s];
      for (std::size_t a = 0; a < row.size(); ++a) {
        for (std::size_t b = 0; b <= a; ++b) val[pair_pos_[p++]] += d * row[a].coeff * row[b].coeff;
      }
    }
    // Symmetric Jacobi scaling, including the dense-row contribution to the
    // diagonal. Powers and assignment variables live on very different
    // scales, and the factorization would otherwise see a condition number
    // far beyond double precision.
    const std::size_t nd = dense_rows_.size();
    std::vector<double> diag(n_);
    for (std::size_t c = 0; c < n_; ++c) diag[c] = val[diag_pos_[c]];
    for (std::size_t k : dense_rows_) {
      for (const Term& term : cons_.row(k)) diag[term.index] += term.coeff * term.coeff / (slack[k] * slack[k]);
    }
    for (std::size_t c = 0; c < n_; ++c) scale_[Eigen::Index(c)] = diag[c] > 0.0 ? 1.0 / std::sqrt(diag[c]) : 1.0;
    const int* outer = matrix_.outerIndexPtr();
    const int* inner = matrix_.innerIndexPtr();
    for (std::size_t c = 0; c < n_; ++c) {
      for (int p = outer[c]; p < outer[c + 1]; ++p) val[p] *= scale_[inner[p]] * scale_[Eigen::Index(c)];
    }
    factor_with_regularization();
    dense_ready_ = false;
    damped_ready_ = false;

    if (nd == 0) return;
    v_.setZero(Eigen::Index(n_), Eigen::Index(nd));
    for (std::size_t c = 0; c < nd; ++c) {
      const std::size_t k = dense_rows_[c];
      for (const Term& term : cons_.row(k)) {
        v_(Eigen::Index(term.index), Eigen::Index(c)) = scale_[Eigen::Index(term.index)] * term.coeff / slack[k];
      }
    }
    w_ = solver_.solve(v_);
    Eigen::MatrixXd cap = Eigen::MatrixXd::Identity(Eigen::Index(nd), Eigen::Index(nd));
    cap.noalias() += v_.transpose() * w_;
    capacitance_.compute(cap);
    if (capacitance_.info() != Eigen::Success) throw NumericalError("capacitance factorization failed");
  }

  Vec solve(const Vec& unscaled_rhs) const {
    const Vec rhs = scale_.cwiseProduct(unscaled_rhs);
    Vec dx = apply_inverse(rhs);
    // Iterative refinement against the unregularized operator. It also tames
    // the cancellation in the low-rank correction when dense-row slacks are
    // tiny. Stops as soon as a round fails to halve the residual.
    Vec residual = rhs - multiply(dx);
    double norm = residual.lpNorm<Eigen::Infinity>();
    const double floor = 1e-15 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
    for (int round = 0; round < 6 && norm > floor; ++round) {
      Vec trial = dx + apply_inverse(residual);
      Vec trial_residual = rhs - multiply(trial);
      const double trial_norm = trial_residual.lpNorm<Eigen::Infinity>();
      if (!(trial_norm < norm)) break;
      const bool slow = trial_norm > 0.5 * norm;
      dx.swap(trial);
      residual.swap(trial_residual);
      norm = trial_norm;
      if (slow) break;
    }
    // A near-singular system defeats the unpivoted sparse factorization, and
    // tiny dense-row slacks can cost the low-rank correction every digit.
    // Fall back to a pivoted dense factorization of the full operator.
    if (n_ <= kDenseFallbackLimit && norm > kSolveTolerance * rhs.lpNorm<Eigen::Infinity>()) {
      if (!dense_ready_) {
        const SpMat lower = matrix_;
        SpMat sym = lower.selfadjointView<Eigen::Lower>();
        Eigen::MatrixXd full = Eigen::MatrixXd(sym);
        full.diagonal().array() -= reg_;
        if (!dense_rows_.empty()) full.noalias() += v_ * v_.transpose();
        dense_.compute(full);
        dense_ready_ = true;
      }
      Vec trial = dense_.solve(rhs);
      const Vec trial_residual = rhs - multiply(trial);
      trial += dense_.solve(trial_residual);
      const double trial_norm = (rhs - multiply(trial)).lpNorm<Eigen::Infinity>();
      if (trial_norm < norm) {
        dx.swap(trial);
        norm = trial_norm;
      }
      // The operator is singular to working precision along a direction the
      // gradient still sees. No Newton step exists; take the damped one.
      if (norm > kSingularResidual * rhs.lpNorm<Eigen::Infinity>()) {
        if (!damped_ready_) {
          const SpMat lower = matrix_;
          SpMat sym = lower.selfadjointView<Eigen::Lower>();
          Eigen::MatrixXd full = Eigen::MatrixXd(sym);
          full.diagonal().array() += kDamping - reg_;
          if (!dense_rows_.empty()) full.noalias() += v_ * v_.transpose();
          damped_.compute(full);
          damped_ready_ = true;
        }
        dx = damped_.solve(rhs);
      }
    }
    return scale_.cwiseProduct(dx);
  }

 private:
  std::ptrdiff_t position(std::size_t r, std::size_t c) const {
    const int* outer = matrix_.outerIndexPtr();
    const int* inner = matrix_.innerIndexPtr();
    const int* begin = inner + outer[c];
    const int* end = inner + outer[c + 1];
    const int* it = std::lower_bound(begin, end, int(r));
    return it - inner;
  }

  void factor_with_regularization() {
    reg_ = 0.0;
    solver_.factorize(matrix_);
    if (healthy()) return;
    double max_diag = 0.0;
    for (std::ptrdiff_t p : diag_pos_) max_diag = std::max(max_diag, std::abs(matrix_.valuePtr()[p]));
    const double reg = 1e-10 * (1.0 + max_diag);
    for (std::ptrdiff_t p : diag_pos_) matrix_.valuePtr()[p] += reg;
    reg_ = reg;
    solver_.factorize(matrix_);
    if (!healthy()) throw NumericalError("Newton system is not positive definite after regularization");
  }

  bool healthy() const {
    if (solver_.info() != Eigen::Success) return false;
    const Vec& d = solver_.vectorD();
    const double hi = d.maxCoeff();
    return d.minCoeff() > 1e-14 * hi && std::isfinite(hi);
  }

  Vec apply_inverse(const Vec& rhs) const {
    Vec y = solver_.solve(rhs);
    if (dense_rows_.empty()) return y;
    const Vec z = capacitance_.solve(v_.transpose() * y);
    y.noalias() -= w_ * z;
    return y;
  }

  Vec multiply(const Vec& x) const {
    // The unregularized operator, so refinement recovers the true Newton step.
    Vec out = matrix_.selfadjointView<Eigen::Lower>() * x - reg_ * x;
    if (!dense_rows_.empty()) out.noalias() += v_ * (v_.transpose() * x);
    return out;
  }

  std::size_t n_;
  const ConstraintSystem& cons_;
  std::vector<std::size_t> sparse_rows_;
  std::vector<std::size_t> dense_rows_;
  SpMat matrix_;
  std::vector<std::ptrdiff_t> diag_pos_;
  std::vector<std::ptrdiff_t> obj_pos_;
  std::vector<std::ptrdiff_t> pair_pos_;
  std::vector<std::size_t> pair_offset_;
  std::vector<double> obj_values_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> solver_;
  Vec scale_;
  double reg_ = 0.0;
  mutable Eigen::LDLT<Eigen::MatrixXd> dense_;
  mutable bool dense_ready_ = false;
  mutable Eigen::LLT<Eigen::MatrixXd> damped_;
  mutable bool damped_ready_ = false;
  Eigen::MatrixXd v_;
  Eigen::MatrixXd w_;
  Eigen::LLT<Eigen::MatrixXd> capacitance_;
};

void compute_slacks(const ConstraintSystem& cons, std::span<const double> x, std::vector<double>& slack) {
  slack.resize(cons.size());
  for (std::size_t k = 0; k < cons.size(); ++k) slack[k] = cons.slack(x, k);
}

}  // namespace

InnerSolution minimize(const SmoothObjective& objective, const ConstraintSystem& cons,
                       std::span<const double> start, const BarrierOptions& options) {
  const std::size_t n = cons.dimension();
  if (objective.dimension() != n || start.size() != n) {
    throw ParameterError("objective, constraints and start point disagree on dimension");
  }
  if (!(options.tol > 0.0) || !(options.t0 > 0.0) || !(options.t_growth > 1.0)) {
    throw ParameterError("barrier options out of range");
  }
  std::vector<double> x(start.begin(), start.end());
  std::vector<double> slack;
  compute_slacks(cons, x, slack);
  for (std::size_t k = 0; k < slack.size(); ++k) {
    if (!(slack[k] > 0.0)) {
      std::ostringstream msg;
      msg << "start point is not strictly feasible: row " << k << " (tag " << cons.tag(k)
          << ") has slack " << slack[k];
      throw InfeasibleStartError(msg.str());
    }
  }

  const double m = static_cast<double>(cons.size());
  NewtonSystem system(objective, cons);
  std::vector<double> grad_f(n), grad_trial(n), x_trial(n), slack_trial;
  Vec g(static_cast<Eigen::Index>(n));
  std::vector<double> a_dx(cons.size());

  InnerSolution out;
  double t = options.t0;
  double f = objective.evaluate(x, grad_f);

  while (true) {
    ++out.barrier_iterations;
    double previous_decrement = std::numeric_limits<double>::infinity();
    for (int it = 0;; ++it) {
      if (it >= options.max_newton_per_stage) {
        if (previous_decrement / 2.0 <= kNoiseDecrement) break;
        std::ostringstream msg;
        msg << "Newton centering did not converge within " << options.max_newton_per_stage
            << " steps (t=" << t << ", stage " << out.barrier_iterations << ")";
        throw NumericalError(msg.str());
      }
      for (std::size_t c = 0; c < n; ++c) g[Eigen::Index(c)] = t * grad_f[c];
      for (std::size_t k = 0; k < cons.size(); ++k) {
        const double inv = 1.0 / slack[k];
        for (const Term& term : cons.row(k)) g[Eigen::Index(term.index)] += term.coeff * inv;
      }
      system.factor(objective, x, slack, t);
      const Vec dx = system.solve(-g);
      const double decrement_sq = -g.dot(dx);
      if (!std::isfinite(decrement_sq)) throw NumericalError("non-finite Newton decrement");
      if (decrement_sq / 2.0 <= options.centering_tol) break;
      // Once Newton stops converging quadratically at a tiny decrement, the
      // remaining decrement is gradient cancellation noise of order t * eps.
      if (decrement_sq / 2.0 <= kNoiseDecrement && decrement_sq >= 0.25 * previous_decrement) break;
      previous_decrement = decrement_sq;

      double step = 1.0;
      for (std::size_t k = 0; k < cons.size(); ++k) {
        double ad = 0.0;
        for (const Term& term : cons.row(k)) ad += term.coeff * dx[Eigen::Index(term.index)];
        a_dx[k] = ad;
        if (ad > 0.0) step = std::min(step, 0.99 * slack[k] / ad);
      }

      bool accepted = false;
      while (step > 1e-16) {
        for (std::size_t c = 0; c < n; ++c) x_trial[c] = x[c] + step * dx[Eigen::Index(c)];
        // Slacks are carried along the step rather than recomputed as
        // b - <a, x>, which cancels catastrophically once they are many
        // orders of magnitude below the bound.
        slack_trial.resize(cons.size());
        for (std::size_t k = 0; k < cons.size(); ++k) slack_trial[k] = slack[k] - step * a_dx[k];
        bool interior = true;
        double log_ratio = 0.0;
        for (std::size_t k = 0; k < cons.size(); ++k) {
          if (!(slack_trial[k] > 0.0)) {
            interior = false;
            break;
          }
          log_ratio += std::log1p(-step * a_dx[k] / slack[k]);
        }
        if (interior) {
          const double change = t * objective.difference(x, x_trial) - log_ratio;
          if (std::isfinite(change) && change <= -options.armijo * step * decrement_sq) {
            f = objective.evaluate(x_trial, grad_trial);
            x.swap(x_trial);
            slack.swap(slack_trial);
            grad_f.swap(grad_trial);
            accepted = true;
            break;
          }
        }
        step *= options.backtrack;
      }
      ++out.newton_iterations;
      // Near the center a full Newton step is accepted in exact arithmetic. A
      // backtrack there means rounding noise in t * f swamps the predicted
      // decrease, and the iterate is centered as well as doubles allow.
      const bool noisy = !accepted || step < 1.0;
      if (noisy && decrement_sq / 2.0 <= kNoiseDecrement) break;
      if (!accepted) {
        std::ostringstream msg;
        msg << "line search failed (decrement^2=" << decrement_sq << ", t=" << t << ")";
        throw NumericalError(msg.str());
      }
    }
    if (m / t <= options.tol || m == 0.0) break;
    t *= options.t_growth;
  }

  // Dual estimate lambda_k = 1 / (t * slack_k).
  std::vector<double> stationarity(grad_f);
  for (std::size_t k = 0; k < cons.size(); ++k) {
    const double lambda = 1.0 / (t * slack[k]);
    for (const Term& term : cons.row(k)) stationarity[term.index] += lambda * term.coeff;
  }
  out.kkt_residual = 0.0;
  // Carried slacks drift from b - <a, x> by rounding. Pull the point a hair
  // toward the strictly feasible start until every recomputed slack is
  // positive again, so the result can seed another solve.
  std::vector<double> recomputed;
  compute_slacks(cons, x, recomputed);
  if (!recomputed.empty() && !(*std::min_element(recomputed.begin(), recomputed.end()) > 0.0)) {
    std::vector<double> blended(n);
    for (double theta = 1e-14; theta < 1.0; theta *= 4.0) {
      for (std::size_t c = 0; c < n; ++c) blended[c] = x[c] + theta * (start[c] - x[c]);
      if (cons.min_slack(blended) > 0.0) break;
    }
    x = blended;
    f = objective.evaluate(x, grad_f);
  }
  for (double v : stationarity) out.kkt_residual = std::max(out.kkt_residual, std::abs(v));
  out.duality_gap = m / t;
  out.objective_value = f;
  out.point = std::move(x);
  return out;
}

std::vector<double> find_interior_point(const ConstraintSystem& cons) {
  const std::size_t n = cons.dimension();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> lo(n, -inf), hi(n, inf);
  for (std::size_t k = 0; k < cons.size(); ++k) {
    const auto row = cons.row(k);
    if (row.size() != 1) continue;
    const double limit = cons.bound(k) / row[0].coeff;
    if (row[0].coeff > 0.0) {
      hi[row[0].index] = std::min(hi[row[0].index], limit);
    } else {
      lo[row[0].index] = std::max(lo[row[0].index], limit);
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    if (std::isfinite(lo[c]) && std::isfinite(hi[c])) {
      x[c] = 0.5 * (lo[c] + hi[c]);
    } else if (std::isfinite(lo[c])) {
      x[c] = lo[c] + 1.0;
    } else if (std::isfinite(hi[c])) {
      x[c] = hi[c] - 1.0;
    }
  }
  if (cons.size() == 0 || cons.min_slack(x) > 0.0) return x;

  // Phase I over (x, sigma): minimize sigma s.t. <a, x> - sigma <= b.
  double scale = 1.0;
  for (std::size_t k = 0; k < cons.size(); ++k) scale = std::max(scale, std::abs(cons.bound(k)));
  ConstraintSystem phase1(n + 1);
  std::vector<Term> buf;
  for (std::size_t k = 0; k < cons.size(); ++k) {
    buf.assign(cons.row(k).begin(), cons.row(k).end());
    buf.push_back({n, -1.0});
    phase1.add(buf, cons.bound(k), cons.tag(k));
  }
  phase1.add_lower_bound(n, -scale);
  std::vector<double> start(x);
  start.push_back(std::max(cons.max_violation(x), 0.0) + 1.0);
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  BarrierOptions opts;
  opts.tol = 1e-9 * scale;
  const InnerSolution sol = minimize(LinearObjective(std::move(c)), phase1, start, opts);
  if (!(sol.point[n] < 0.0)) {
    throw InfeasibleStartError("constraint system has an empty interior (max-min slack " +
                               std::to_string(-sol.point[n]) + ")");
  }
  x.assign(sol.point.begin(), sol.point.begin() + std::ptrdiff_t(n));
  if (!(cons.min_slack(x) > 0.0)) throw InfeasibleStartError("phase I returned a boundary point");
  return x;
}

}  // namespace fdmc
