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

#ifndef FDMC_CONVEX_HPP
#define FDMC_CONVEX_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace fdmc {

struct Term {
  std::size_t index = 0;
  double coeff = 0.0;
};

// Linear inequalities <a, x> <= b in compressed sparse row form. Box bounds
// are stored as one-term rows. Each row carries an integer tag naming its
// constraint family so that callers can count and report rows by family.
class ConstraintSystem {
 public:
  explicit ConstraintSystem(std::size_t dimension = 0) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return bounds_.size(); }

  // Duplicate indices within one row are merged; zero coefficients dropped.
  std::size_t add(std::span<const Term> terms, double bound, int tag = 0);
  std::size_t add(std::initializer_list<Term> terms, double bound, int tag = 0) {
    return add(std::span<const Term>(terms.begin(), terms.size()), bound, tag);
  }
  std::size_t add_upper_bound(std::size_t index, double upper, int tag = 0) {
    return add({Term{index, 1.0}}, upper, tag);
  }
  std::size_t add_lower_bound(std::size_t index, double lower, int tag = 0) {
    return add({Term{index, -1.0}}, -lower, tag);
  }

  std::span<const Term> row(std::size_t k) const {
    return {terms_.data() + row_start_[k], row_start_[k + 1] - row_start_[k]};
  }
  double bound(std::size_t k) const { return bounds_[k]; }
  int tag(std::size_t k) const { return tags_[k]; }
  std::size_t count_tag(int tag) const;

  double activity(std::span<const double> x, std::size_t k) const;
  double slack(std::span<const double> x, std::size_t k) const { return bounds_[k] - activity(x, k); }
  double min_slack(std::span<const double> x) const;
  // Largest positive constraint residual (0 when feasible).
  double max_violation(std::span<const double> x) const;

 private:
  std::size_t dimension_;
  std::vector<std::size_t> row_start_{0};
  std::vector<Term> terms_;
  std::vector<double> bounds_;
  std::vector<int> tags_;
};

// Smooth convex objective with an explicit sparse Hessian. Convexity and
// smoothness on the interior of the feasible set are the caller's promise.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;

  virtual std::size_t dimension() const = 0;

  // Returns f(x) and writes the gradient.
  virtual double evaluate(std::span<const double> x, std::span<double> grad) const = 0;

  virtual double value(std::span<const double> x) const;

  // f(y) - f(x). Overriding this with a cancellation-free formula lets the
  // line search resolve decreases far below the rounding noise of f itself.
  virtual double difference(std::span<const double> x, std::span<const double> y) const;

  // Lower-triangle (row >= col) Hessian sparsity pattern. Must not change
  // between calls.
  virtual std::vector<std::pair<std::size_t, std::size_t>> hessian_pattern() const = 0;

  // Hessian entries in the order of hessian_pattern().
  virtual void hessian_values(std::span<const double> x, std::span<double> values) const = 0;
};

// c^T x.
class LinearObjective final : public SmoothObjective {
 public:
  explicit LinearObjective(std::vector<double> c) : c_(std::move(c)) {}
  std::size_t dimension() const override { return c_.size(); }
  double evaluate(std::span<const double> x, std::span<double> grad) const override;
  std::vector<std::pair<std::size_t, std::size_t>> hessian_pattern() const override { return {}; }
  void hessian_values(std::span<const double>, std::span<double>) const override {}

 private:
  std::vector<double> c_;
};

struct BarrierOptions {
  double tol = 1e-7;            // target duality gap m/t, absolute objective units
  double t0 = 1.0;              // initial barrier weight
  double t_growth = 10.0;       // barrier weight multiplier per stage
  double armijo = 0.01;         // sufficient-decrease parameter
  double backtrack = 0.5;       // step shrink factor
  double centering_tol = 1e-9;  // half squared Newton decrement that ends a stage
  int max_newton_per_stage = 200;
};

struct InnerSolution {
  std::vector<double> point;
  double objective_value = 0.0;
  double kkt_residual = 0.0;     // inf-norm of grad f + A^T lambda at the final point
  double duality_gap = 0.0;      // m / t at exit
  int barrier_iterations = 0;    // centering stages
  int newton_iterations = 0;     // total Newton steps
};

// Primal log-barrier interior point method. Throws InfeasibleStartError if
// some slack at `start` is not strictly positive, NumericalError if a
// centering stage does not converge.
InnerSolution minimize(const SmoothObjective& objective, const ConstraintSystem& constraints,
                       std::span<const double> start, const BarrierOptions& options = {});

// Strictly feasible point. Returns the box midpoint when that is already
// interior, otherwise runs a phase-I barrier solve maximizing the smallest
// slack. Throws InfeasibleStartError when the interior is empty.
std::vector<double> find_interior_point(const ConstraintSystem& constraints);

}  // namespace fdmc

#endif  // FDMC_CONVEX_HPP
