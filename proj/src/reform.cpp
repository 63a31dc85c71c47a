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

#include "fdmc/reform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "fdmc/error.hpp"

namespace fdmc {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

}  // namespace

Layout Layout::make(std::size_t n_subcarriers, std::size_t n_dl, std::size_t n_ul,
                    SlotFamily family) {
  if (n_subcarriers == 0 || n_dl == 0 || n_ul == 0) throw ParameterError("layout dimensions must be >= 1");
  Layout out;
  out.n_subcarriers_ = n_subcarriers;
  out.n_dl_ = n_dl;
  out.n_ul_ = n_ul;
  for (std::size_t i = 0; i < n_subcarriers; ++i) {
    out.slot_start_.push_back(out.slots_.size());
    switch (family) {
      case SlotFamily::FullDuplex:
        for (std::size_t m = 0; m < n_dl; ++m) {
          for (std::size_t r = 0; r < n_ul; ++r) out.slots_.push_back({i, m, r});
        }
        break;
      case SlotFamily::HalfDuplex:
        for (std::size_t m = 0; m < n_dl; ++m) out.slots_.push_back({i, m, kNoUser});
        for (std::size_t r = 0; r < n_ul; ++r) out.slots_.push_back({i, kNoUser, r});
        break;
      case SlotFamily::DownlinkOnly:
        for (std::size_t m = 0; m < n_dl; ++m) out.slots_.push_back({i, m, kNoUser});
        break;
      case SlotFamily::UplinkOnly:
        for (std::size_t r = 0; r < n_ul; ++r) out.slots_.push_back({i, kNoUser, r});
        break;
    }
  }
  out.slot_start_.push_back(out.slots_.size());
  out.finish();
  return out;
}

Layout Layout::frozen(std::size_t n_subcarriers, std::size_t n_dl, std::size_t n_ul,
                      std::vector<Slot> active) {
  Layout out;
  out.n_subcarriers_ = n_subcarriers;
  out.n_dl_ = n_dl;
  out.n_ul_ = n_ul;
  out.frozen_ = true;
  const auto key = [](const Slot& a) { return std::tuple(a.i, a.m, a.r); };
  std::sort(active.begin(), active.end(), [&](const Slot& a, const Slot& b) { return key(a) < key(b); });
  for (const Slot& s : active) {
    if (s.i >= n_subcarriers || (s.has_dl() && s.m >= n_dl) || (s.has_ul() && s.r >= n_ul) ||
        (!s.has_dl() && !s.has_ul())) {
      throw ParameterError("frozen slot out of range");
    }
  }
  out.slots_ = std::move(active);
  std::size_t k = 0;
  for (std::size_t i = 0; i <= n_subcarriers; ++i) {
    while (k < out.slots_.size() && out.slots_[k].i < i) ++k;
    out.slot_start_.push_back(k);
  }
  out.finish();
  return out;
}

void Layout::finish() {
  std::size_t next = 0;
  pt_.assign(slots_.size(), kNoUser);
  qt_.assign(slots_.size(), kNoUser);
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    if (slots_[k].has_dl()) pt_[k] = next++;
  }
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    if (slots_[k].has_ul()) qt_[k] = next++;
  }
  has_raw_p_ = std::any_of(slots_.begin(), slots_.end(), [](const Slot& s) { return s.has_dl(); });
  has_raw_q_ = std::any_of(slots_.begin(), slots_.end(), [](const Slot& s) { return s.has_ul(); });
  if (!frozen_) {
    s_offset_ = next;
    next += slots_.size();
    p_raw_offset_ = next;
    if (has_raw_p_) next += n_subcarriers_ * n_dl_;
    q_raw_offset_ = next;
    if (has_raw_q_) next += n_subcarriers_ * n_ul_;
  }
  dimension_ = next;
}

std::size_t Layout::p_raw(std::size_t i, std::size_t m) const {
  return has_raw_p() ? p_raw_offset_ + i * n_dl_ + m : kNoUser;
}

std::size_t Layout::q_raw(std::size_t i, std::size_t r) const {
  return has_raw_q() ? q_raw_offset_ + i * n_ul_ + r : kNoUser;
}

LiftedModel::LiftedModel(ProblemInstance inst, Layout layout)
    : inst_(std::move(inst)), layout_(std::move(layout)) {
  inst_.validate();
  if (layout_.n_subcarriers() != inst_.n_subcarriers() || layout_.n_dl() != inst_.n_dl() ||
      layout_.n_ul() != inst_.n_ul()) {
    throw ParameterError("layout does not match the instance dimensions");
  }
  const ChannelGains& g = inst_.gains;
  coeffs_.reserve(layout_.slots().size());
  for (const Slot& slot : layout_.slots()) {
    SlotCoeffs c;
    if (slot.has_dl()) {
      c.h = g.H(slot.i, slot.m);
      c.w = inst_.w[slot.m];
    }
    if (slot.has_ul()) {
      c.g = g.G(slot.i, slot.r);
      c.mu = inst_.mu[slot.r];
    }
    if (slot.has_dl() && slot.has_ul()) {
      c.f = g.F(slot.i, slot.r, slot.m);
      c.l = inst_.rho * g.L_SI(slot.i);
    }
    coeffs_.push_back(c);
  }
}

LiftedModel::LiftedModel(ProblemInstance inst, SlotFamily family)
    : LiftedModel(inst, Layout::make(inst.n_subcarriers(), inst.n_dl(), inst.n_ul(), family)) {}

ConstraintSystem LiftedModel::build_constraints() const {
  const Layout& lay = layout_;
  const auto& slots = lay.slots();
  ConstraintSystem cons(lay.dimension());
  std::vector<Term> row;

  row.clear();
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (slots[k].has_dl()) row.push_back({lay.p_tilde(k), 1.0});
  }
  if (!row.empty()) cons.add(row, inst_.p_max_dl, kC1);

  if (lay.has_raw_p()) {
    for (std::size_t i = 0; i < lay.n_subcarriers(); ++i) {
      for (std::size_t m = 0; m < lay.n_dl(); ++m) cons.add_lower_bound(lay.p_raw(i, m), 0.0, kC2);
    }
  }

  for (std::size_t r = 0; r < lay.n_ul(); ++r) {
    row.clear();
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (slots[k].r == r) row.push_back({lay.q_tilde(k), 1.0});
    }
    if (!row.empty()) cons.add(row, inst_.p_max_ul[r], kC3);
  }

  if (lay.has_raw_q()) {
    for (std::size_t i = 0; i < lay.n_subcarriers(); ++i) {
      for (std::size_t r = 0; r < lay.n_ul(); ++r) cons.add_lower_bound(lay.q_raw(i, r), 0.0, kC4);
    }
  }

  if (!lay.is_frozen()) {
    for (std::size_t k = 0; k < slots.size(); ++k) {
      cons.add_lower_bound(lay.s(k), 0.0, kC5b);
      cons.add_upper_bound(lay.s(k), 1.0, kC5b);
    }
    for (std::size_t i = 0; i < lay.n_subcarriers(); ++i) {
      row.clear();
      for (std::size_t k = lay.slot_begin(i); k < lay.slot_begin(i + 1); ++k) row.push_back({lay.s(k), 1.0});
      cons.add(row, 1.0, kC6);
    }
  }

  for (std::size_t k = 0; k < slots.size(); ++k) {
    const Slot& sl = slots[k];
    if (sl.has_dl()) {
      const std::size_t pt = lay.p_tilde(k);
      const double big = inst_.p_max_dl;
      if (lay.is_frozen()) {
        cons.add_lower_bound(pt, 0.0, kC10);
      } else {
        const std::size_t s = lay.s(k);
        const std::size_t p = lay.p_raw(sl.i, sl.m);
        cons.add({{pt, 1.0}, {s, -big}}, 0.0, kC7);
        cons.add({{pt, 1.0}, {p, -1.0}}, 0.0, kC8);
        cons.add({{pt, -1.0}, {p, 1.0}, {s, big}}, big, kC9);
        cons.add_lower_bound(pt, 0.0, kC10);
      }
    }
    if (sl.has_ul()) {
      const std::size_t qt = lay.q_tilde(k);
      const double big = inst_.p_max_ul[sl.r];
      if (lay.is_frozen()) {
        cons.add_lower_bound(qt, 0.0, kC13);
      } else {
        const std::size_t s = lay.s(k);
        const std::size_t q = lay.q_raw(sl.i, sl.r);
        cons.add({{qt, 1.0}, {s, -big}}, 0.0, kC11);
        cons.add({{qt, 1.0}, {q, -1.0}}, 0.0, kC12);
        cons.add_lower_bound(qt, 0.0, kC13);
        cons.add({{qt, -1.0}, {q, 1.0}, {s, big}}, big, kC14);
      }
    }
  }
  return cons;
}

namespace {

struct SlotPowers {
  double a = 0.0;  // p~
  double b = 0.0;  // q~
};

SlotPowers slot_powers(const Layout& lay, std::span<const double> x, std::size_t k) {
  SlotPowers out;
  if (lay.p_tilde(k) != kNoUser) out.a = x[lay.p_tilde(k)];
  if (lay.q_tilde(k) != kNoUser) out.b = x[lay.q_tilde(k)];
  return out;
}

}  // namespace

DcParts LiftedModel::eval_dc_parts(std::span<const double> x) const {
  if (x.size() != dimension()) throw ParameterError("lifted point has the wrong dimension");
  DcParts out;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    const SlotCoeffs& c = coeffs_[k];
    const auto [a, b] = slot_powers(layout_, x, k);
    out.F -= c.w * std::log1p(c.h * a + c.f * b) + c.mu * std::log1p(c.g * b + c.l * a);
    out.G -= c.w * std::log1p(c.f * b) + c.mu * std::log1p(c.l * a);
    if (!layout_.is_frozen()) {
      const double s = x[layout_.s(k)];
      out.H += s;
      out.M += s * s;
    }
  }
  out.F *= kInvLn2;
  out.G *= kInvLn2;
  return out;
}

double LiftedModel::F_difference(std::span<const double> x, std::span<const double> y) const {
  // ln(1 + u.y) - ln(1 + u.x) = log1p(u.(y - x) / (1 + u.x))
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    const SlotCoeffs& c = coeffs_[k];
    const auto [a, b] = slot_powers(layout_, x, k);
    const auto [a2, b2] = slot_powers(layout_, y, k);
    const double da = a2 - a, db = b2 - b;
    sum -= c.w * std::log1p((c.h * da + c.f * db) / (1.0 + c.h * a + c.f * b));
    sum -= c.mu * std::log1p((c.g * db + c.l * da) / (1.0 + c.g * b + c.l * a));
  }
  return sum * kInvLn2;
}

double LiftedModel::G_difference(std::span<const double> x, std::span<const double> y) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    const SlotCoeffs& c = coeffs_[k];
    const auto [a, b] = slot_powers(layout_, x, k);
    const auto [a2, b2] = slot_powers(layout_, y, k);
    sum -= c.w * std::log1p(c.f * (b2 - b) / (1.0 + c.f * b));
    sum -= c.mu * std::log1p(c.l * (a2 - a) / (1.0 + c.l * a));
  }
  return sum * kInvLn2;
}

void LiftedModel::grad_F(std::span<const double> x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    const SlotCoeffs& c = coeffs_[k];
    const auto [a, b] = slot_powers(layout_, x, k);
    const double dl = c.w / (1.0 + c.h * a + c.f * b);
    const double ul = c.mu / (1.0 + c.g * b + c.l * a);
    if (layout_.p_tilde(k) != kNoUser) out[layout_.p_tilde(k)] = -(dl * c.h + ul * c.l) * kInvLn2;
    if (layout_.q_tilde(k) != kNoUser) out[layout_.q_tilde(k)] = -(dl * c.f + ul * c.g) * kInvLn2;
  }
}

void LiftedModel::grad_G(std::span<const double> x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    const SlotCoeffs& c = coeffs_[k];
    const auto [a, b] = slot_powers(layout_, x, k);
    if (layout_.p_tilde(k) != kNoUser) out[layout_.p_tilde(k)] = -c.mu * c.l / (1.0 + c.l * a) * kInvLn2;
    if (layout_.q_tilde(k) != kNoUser) out[layout_.q_tilde(k)] = -c.w * c.f / (1.0 + c.f * b) * kInvLn2;
  }
}

void LiftedModel::grad_M(std::span<const double> x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (layout_.is_frozen()) return;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) out[layout_.s(k)] = 2.0 * x[layout_.s(k)];
}

namespace {

// Share of the pair (m, r) of subcarrier i that a slot represents.
double slot_indicator(const Allocation& alloc, const Slot& slot) {
  double sum = 0.0;
  for (std::size_t m = 0; m < alloc.n_dl(); ++m) {
    if (slot.has_dl() && m != slot.m) continue;
    for (std::size_t r = 0; r < alloc.n_ul(); ++r) {
      if (slot.has_ul() && r != slot.r) continue;
      sum += alloc.s(slot.i, m, r);
    }
  }
  return sum;
}

}  // namespace

LiftedPoint LiftedModel::lift(const Allocation& alloc) const {
  if (alloc.n_subcarriers() != inst_.n_subcarriers() || alloc.n_dl() != inst_.n_dl() ||
      alloc.n_ul() != inst_.n_ul()) {
    throw ParameterError("allocation does not match the instance dimensions");
  }
  const auto& slots = layout_.slots();
  const bool pairs_only = std::all_of(slots.begin(), slots.end(),
                                      [](const Slot& s) { return s.has_dl() && s.has_ul(); });
  if (!layout_.is_frozen() && !pairs_only) {
    throw ParameterError("lift is defined for full-duplex and frozen layouts only");
  }
  LiftedPoint pt;
  pt.x.assign(dimension(), 0.0);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const Slot& sl = slots[k];
    const double ind = slot_indicator(alloc, sl);
    if (sl.has_dl()) pt.x[layout_.p_tilde(k)] = ind * alloc.p(sl.i, sl.m);
    if (sl.has_ul()) pt.x[layout_.q_tilde(k)] = ind * alloc.q(sl.i, sl.r);
    if (!layout_.is_frozen()) pt.x[layout_.s(k)] = ind;
  }
  if (layout_.has_raw_p()) {
    for (std::size_t i = 0; i < inst_.n_subcarriers(); ++i) {
      for (std::size_t m = 0; m < inst_.n_dl(); ++m) pt.x[layout_.p_raw(i, m)] = alloc.p(i, m);
    }
  }
  if (layout_.has_raw_q()) {
    for (std::size_t i = 0; i < inst_.n_subcarriers(); ++i) {
      for (std::size_t r = 0; r < inst_.n_ul(); ++r) pt.x[layout_.q_raw(i, r)] = alloc.q(i, r);
    }
  }
  return pt;
}

double LiftedModel::max_binary_deviation(std::span<const double> x) const {
  double worst = 0.0;
  if (layout_.is_frozen()) return worst;
  for (std::size_t k = 0; k < layout_.slots().size(); ++k) {
    const double s = x[layout_.s(k)];
    worst = std::max(worst, std::min(std::abs(s), std::abs(1.0 - s)));
  }
  return worst;
}

Allocation LiftedModel::unlift(std::span<const double> x, double rounding_tol) const {
  if (x.size() != dimension()) throw ParameterError("lifted point has the wrong dimension");
  const double dev = max_binary_deviation(x);
  if (dev > rounding_tol) {
    throw RoundingError("relaxed assignment is not within rounding tolerance of binary", dev);
  }
  Allocation alloc(inst_.n_subcarriers(), inst_.n_dl(), inst_.n_ul());
  for (std::size_t i = 0; i < layout_.n_subcarriers(); ++i) {
    for (std::size_t k = layout_.slot_begin(i); k < layout_.slot_begin(i + 1); ++k) {
      if (!layout_.is_frozen() && x[layout_.s(k)] < 0.5) continue;
      const Slot& sl = layout_.slots()[k];
      const std::size_t m = sl.has_dl() ? sl.m : 0;
      const std::size_t r = sl.has_ul() ? sl.r : 0;
      alloc.s(i, m, r) = 1.0;
      alloc.p(i, m) = sl.has_dl() ? std::max(0.0, x[layout_.p_tilde(k)]) : 0.0;
      alloc.q(i, r) = sl.has_ul() ? std::max(0.0, x[layout_.q_tilde(k)]) : 0.0;
      break;
    }
  }
  return alloc;
}

SurrogateObjective::SurrogateObjective(const LiftedModel& model, std::span<const double> anchor,
                                       double eta)
    : model_(model), anchor_(anchor.begin(), anchor.end()), eta_(eta) {
  const std::size_t n = model.dimension();
  if (anchor.size() != n) throw ParameterError("anchor has the wrong dimension");
  std::vector<double> gg(n), gm(n);
  model.grad_G(anchor, gg);
  model.grad_M(anchor, gm);
  const DcParts parts = model.eval_dc_parts(anchor);
  lin_grad_.assign(n, 0.0);
  constant_ = -parts.G - eta * parts.M;
  for (std::size_t c = 0; c < n; ++c) {
    lin_grad_[c] = -gg[c] - eta * gm[c];
    constant_ += (gg[c] + eta * gm[c]) * anchor_[c];
  }
  const Layout& lay = model.layout();
  if (!lay.is_frozen()) {
    for (std::size_t k = 0; k < lay.slots().size(); ++k) lin_grad_[lay.s(k)] += eta;
  }
}

double SurrogateObjective::evaluate(std::span<const double> x, std::span<double> grad) const {
  model_.grad_F(x, grad);
  double value = model_.eval_dc_parts(x).F + constant_;
  for (std::size_t c = 0; c < lin_grad_.size(); ++c) {
    value += lin_grad_[c] * x[c];
    grad[c] += lin_grad_[c];
  }
  return value;
}

double SurrogateObjective::difference(std::span<const double> x, std::span<const double> y) const {
  double d = model_.F_difference(x, y);
  for (std::size_t c = 0; c < lin_grad_.size(); ++c) d += lin_grad_[c] * (y[c] - x[c]);
  return d;
}

std::vector<std::pair<std::size_t, std::size_t>> SurrogateObjective::hessian_pattern() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const Layout& lay = model_.layout();
  for (std::size_t k = 0; k < lay.slots().size(); ++k) {
    const std::size_t a = lay.p_tilde(k), b = lay.q_tilde(k);
    if (a != kNoUser) out.emplace_back(a, a);
    if (a != kNoUser && b != kNoUser) out.emplace_back(std::max(a, b), std::min(a, b));
    if (b != kNoUser) out.emplace_back(b, b);
  }
  return out;
}

void SurrogateObjective::hessian_values(std::span<const double> x, std::span<double> values) const {
  const Layout& lay = model_.layout();
  std::size_t e = 0;
  for (std::size_t k = 0; k < lay.slots().size(); ++k) {
    const auto& c = model_.coeffs(k);
    const std::size_t ia = lay.p_tilde(k), ib = lay.q_tilde(k);
    const auto [a, b] = slot_powers(lay, x, k);
    const double d1 = 1.0 + c.h * a + c.f * b;
    const double d2 = 1.0 + c.g * b + c.l * a;
    const double k1 = c.w / (d1 * d1) * kInvLn2;
    const double k2 = c.mu / (d2 * d2) * kInvLn2;
    if (ia != kNoUser) values[e++] = k1 * c.h * c.h + k2 * c.l * c.l;
    if (ia != kNoUser && ib != kNoUser) values[e++] = k1 * c.h * c.f + k2 * c.l * c.g;
    if (ib != kNoUser) values[e++] = k1 * c.f * c.f + k2 * c.g * c.g;
  }
}

double default_penalty_weight(double p_max_dl_watt, double noise_dl_watt) {
  if (!(p_max_dl_watt > 0.0) || !(noise_dl_watt > 0.0)) {
    throw ParameterError("penalty weight needs positive power and noise");
  }
  return 10.0 * std::log2(1.0 + p_max_dl_watt / noise_dl_watt);
}

}  // namespace fdmc
