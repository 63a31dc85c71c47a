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

#ifndef FDMC_REFORM_HPP
#define FDMC_REFORM_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fdmc/convex.hpp"
#include "fdmc/model.hpp"

namespace fdmc {

// Tags attached to each row of a lifted constraint system.
enum ConstraintTag : int {
  kC1 = 1, kC2, kC3, kC4, kC5b, kC6, kC7, kC8, kC9, kC10, kC11, kC12, kC13, kC14,
};

inline constexpr std::size_t kNoUser = static_cast<std::size_t>(-1);

// A schedulable unit on one subcarrier: a DL user, a UL user, or a pair.
struct Slot {
  std::size_t i = 0;
  std::size_t m = kNoUser;
  std::size_t r = kNoUser;

  bool has_dl() const { return m != kNoUser; }
  bool has_ul() const { return r != kNoUser; }
  bool operator==(const Slot&) const = default;
};

enum class SlotFamily {
  FullDuplex,    // every (m, r) pair on every subcarrier
  HalfDuplex,    // one DL user or one UL user per subcarrier
  DownlinkOnly,  // DL users only
  UplinkOnly,    // UL users only
};

// Which coordinates exist and where they live in the flat vector. Blocks are
// laid out as [p~ | q~ | s | p | q]; within a block slots follow subcarrier,
// then DL user, then UL user. A frozen layout keeps only the p~ and q~ blocks
// of a fixed set of active slots.
class Layout {
 public:
  static Layout make(std::size_t n_subcarriers, std::size_t n_dl, std::size_t n_ul,
                     SlotFamily family);
  static Layout frozen(std::size_t n_subcarriers, std::size_t n_dl, std::size_t n_ul,
                       std::vector<Slot> active);

  std::size_t n_subcarriers() const { return n_subcarriers_; }
  std::size_t n_dl() const { return n_dl_; }
  std::size_t n_ul() const { return n_ul_; }
  bool is_frozen() const { return frozen_; }
  std::size_t dimension() const { return dimension_; }

  const std::vector<Slot>& slots() const { return slots_; }
  // Slots of subcarrier i occupy [slot_begin(i), slot_begin(i + 1)).
  std::size_t slot_begin(std::size_t i) const { return slot_start_[i]; }

  // Flat index of a coordinate, or kNoUser if the slot has no such coordinate.
  std::size_t p_tilde(std::size_t slot) const { return pt_[slot]; }
  std::size_t q_tilde(std::size_t slot) const { return qt_[slot]; }
  std::size_t s(std::size_t slot) const { return frozen_ ? kNoUser : s_offset_ + slot; }
  std::size_t p_raw(std::size_t i, std::size_t m) const;
  std::size_t q_raw(std::size_t i, std::size_t r) const;
  bool has_raw_p() const { return !frozen_ && has_raw_p_; }
  bool has_raw_q() const { return !frozen_ && has_raw_q_; }

 private:
  Layout() = default;
  void finish();

  std::size_t n_subcarriers_ = 0, n_dl_ = 0, n_ul_ = 0;
  bool frozen_ = false;
  bool has_raw_p_ = false, has_raw_q_ = false;
  std::vector<Slot> slots_;
  std::vector<std::size_t> slot_start_;
  std::vector<std::size_t> pt_, qt_;
  std::size_t s_offset_ = 0, p_raw_offset_ = 0, q_raw_offset_ = 0;
  std::size_t dimension_ = 0;
};

// A point of the lifted problem: the flat coordinate vector of some layout.
struct LiftedPoint {
  std::vector<double> x;
};

struct DcParts {
  double F = 0.0;
  double G = 0.0;
  double H = 0.0;
  double M = 0.0;

  double utility() const { return G - F; }
  double penalized(double eta) const { return F - G + eta * (H - M); }
};

// The big-M lifted, penalized problem over one layout. Holds a copy of the
// instance, so it outlives its argument.
class LiftedModel {
 public:
  LiftedModel(ProblemInstance inst, Layout layout);
  LiftedModel(ProblemInstance inst, SlotFamily family = SlotFamily::FullDuplex);

  const ProblemInstance& instance() const { return inst_; }
  const Layout& layout() const { return layout_; }
  std::size_t dimension() const { return layout_.dimension(); }

  ConstraintSystem build_constraints() const;

  DcParts eval_dc_parts(std::span<const double> x) const;
  double penalized_objective(std::span<const double> x, double eta) const {
    return eval_dc_parts(x).penalized(eta);
  }

  // F(y) - F(x) and G(y) - G(x) without cancellation.
  double F_difference(std::span<const double> x, std::span<const double> y) const;
  double G_difference(std::span<const double> x, std::span<const double> y) const;

  // Gradients are written into full-length vectors; coordinates a function
  // does not depend on are set to zero.
  void grad_F(std::span<const double> x, std::span<double> out) const;
  void grad_G(std::span<const double> x, std::span<double> out) const;
  void grad_M(std::span<const double> x, std::span<double> out) const;

  // p~ = s p, q~ = s q on every slot. A frozen layout takes p~, q~ from the
  // active slots.
  LiftedPoint lift(const Allocation& alloc) const;

  // Rounds s to {0, 1} and reads powers off the active slots. Throws
  // RoundingError if some s is further than rounding_tol from {0, 1}.
  Allocation unlift(std::span<const double> x, double rounding_tol) const;

  // Largest distance of an s coordinate from {0, 1}.
  double max_binary_deviation(std::span<const double> x) const;

  // Per-slot gains in the order H, F_cci, G, rho*L_SI and weights w, mu. Absent
  // directions have zero weight.
  struct SlotCoeffs {
    double h = 0.0, f = 0.0, g = 0.0, l = 0.0, w = 0.0, mu = 0.0;
  };
  const SlotCoeffs& coeffs(std::size_t slot) const { return coeffs_[slot]; }

 private:
  ProblemInstance inst_;
  Layout layout_;
  std::vector<SlotCoeffs> coeffs_;
};

// Convex upper bound of the penalized objective, tight at the anchor:
// F(x) - [G(a) + <grad G(a), x - a>] + eta [H(s) - M(s_a) - <grad M(a), s - s_a>].
class SurrogateObjective final : public SmoothObjective {
 public:
  SurrogateObjective(const LiftedModel& model, std::span<const double> anchor, double eta);

  std::size_t dimension() const override { return model_.dimension(); }
  double evaluate(std::span<const double> x, std::span<double> grad) const override;
  double difference(std::span<const double> x, std::span<const double> y) const override;
  std::vector<std::pair<std::size_t, std::size_t>> hessian_pattern() const override;
  void hessian_values(std::span<const double> x, std::span<double> values) const override;

 private:
  const LiftedModel& model_;
  std::vector<double> anchor_;
  std::vector<double> lin_grad_;  // grad of the subtracted part at the anchor, minus eta grad H
  double constant_ = 0.0;
  double eta_;
};

// 10 log2(1 + P_max^DL / sigma^2) with both powers in watts.
double default_penalty_weight(double p_max_dl_watt, double noise_dl_watt);

}  // namespace fdmc

#endif  // FDMC_REFORM_HPP
