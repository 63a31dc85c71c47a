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

#include "fdmc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <complex>
#include <numbers>
#include <ostream>
#include <string>

#include "fdmc/error.hpp"

namespace fdmc {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

void write_value(std::ostream& out, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  out << buf;
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void CellGeometry::validate() const {
  if (!(inner_radius_m > 0.0) || !(outer_radius_m > inner_radius_m) ||
      !std::isfinite(outer_radius_m)) {
    throw ParameterError("cell geometry requires 0 < inner radius < outer radius, got inner=" +
                         std::to_string(inner_radius_m) +
                         " outer=" + std::to_string(outer_radius_m));
  }
}

void LargeScaleParams::validate() const {
  if (!(carrier_hz > 0.0)) throw ParameterError("carrier frequency must be positive");
  if (!(pathloss_exponent > 2.0)) throw ParameterError("path-loss exponent must exceed 2");
  if (!(reference_distance_m > 0.0)) throw ParameterError("reference distance must be positive");
  if (!std::isfinite(noise_dl_dbm) || !std::isfinite(noise_bs_dbm)) {
    throw ParameterError("noise powers must be finite");
  }
  if (!std::isfinite(rician_k_db)) throw ParameterError("Rician K-factor must be finite");
  const double r = rho();
  if (!(r >= 0.0 && r <= 1.0)) {
    throw ParameterError("SI cancellation constant must satisfy 0 <= rho <= 1 (rho <= 0 dB)");
  }
}

double Position::norm() const { return std::hypot(x, y); }

double Position::distance_to(const Position& other) const {
  return std::hypot(x - other.x, y - other.y);
}

UserPositions sample_user_positions(const CellGeometry& geometry, std::size_t n_dl,
                                    std::size_t n_ul, RandomStream& rng) {
  geometry.validate();
  if (n_dl == 0 || n_ul == 0) throw ParameterError("user counts must be at least 1");
  const double r0 = geometry.inner_radius_m * geometry.inner_radius_m;
  const double r1 = geometry.outer_radius_m * geometry.outer_radius_m;
  auto draw = [&] {
    const double radius =
        std::clamp(std::sqrt(rng.uniform(r0, r1)), geometry.inner_radius_m,
                   geometry.outer_radius_m);
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return Position{radius * std::cos(angle), radius * std::sin(angle)};
  };
  UserPositions out;
  out.downlink.reserve(n_dl);
  out.uplink.reserve(n_ul);
  for (std::size_t m = 0; m < n_dl; ++m) out.downlink.push_back(draw());
  for (std::size_t r = 0; r < n_ul; ++r) out.uplink.push_back(draw());
  return out;
}

PathGain path_gain(double distance_m, const LargeScaleParams& params, LinkKind kind) {
  PathGain out;
  double d = distance_m;
  if (!(d >= params.reference_distance_m)) {
    d = params.reference_distance_m;
    out.clamped = true;
  }
  const double d0 = params.reference_distance_m;
  const double fspl_db =
      20.0 * std::log10(4.0 * std::numbers::pi * d0 * params.carrier_hz / kSpeedOfLight);
  double loss_db = fspl_db + 10.0 * params.pathloss_exponent * std::log10(d / d0);
  if (kind != LinkKind::CoChannel) loss_db -= params.bs_antenna_gain_db;
  out.gain = db_to_linear(-loss_db);
  return out;
}

ChannelGains::ChannelGains(std::size_t n_subcarriers, std::size_t n_dl, std::size_t n_ul)
    : n_subcarriers_(n_subcarriers),
      n_dl_(n_dl),
      n_ul_(n_ul),
      h_(n_subcarriers * n_dl, 0.0),
      g_(n_subcarriers * n_ul, 0.0),
      f_(n_subcarriers * n_ul * n_dl, 0.0),
      l_(n_subcarriers, 0.0) {}

void ChannelGains::validate() const {
  if (n_subcarriers_ == 0 || n_dl_ == 0 || n_ul_ == 0) {
    throw ParameterError("channel gains need at least one subcarrier, DL user and UL user");
  }
  auto check = [](const std::vector<double>& v, const char* name) {
    for (double x : v) {
      if (!std::isfinite(x) || x < 0.0) {
        throw ParameterError(std::string("channel gain ") + name +
                             " has a negative or non-finite entry");
      }
    }
  };
  check(h_, "H");
  check(g_, "G");
  check(f_, "F");
  check(l_, "L_SI");
}

std::complex<double> rician_sample(double k_factor_linear, RandomStream& rng) {
  const double los = std::sqrt(k_factor_linear / (k_factor_linear + 1.0));
  const double scatter = std::sqrt(1.0 / (k_factor_linear + 1.0));
  return std::complex<double>(los, 0.0) + scatter * rng.complex_normal();
}

Drop sample_drop(const CellGeometry& geometry, const LargeScaleParams& params,
                 std::size_t n_subcarriers, std::size_t n_dl, std::size_t n_ul,
                 RandomStream& rng) {
  params.validate();
  if (n_subcarriers == 0) throw ParameterError("need at least one subcarrier");
  Drop drop;
  drop.positions = sample_user_positions(geometry, n_dl, n_ul, rng);
  const auto& dl = drop.positions.downlink;
  const auto& ul = drop.positions.uplink;

  auto take = [&drop](PathGain pg) {
    if (pg.clamped) ++drop.clamped_links;
    return pg.gain;
  };
  std::vector<double> dl_gain(n_dl), ul_gain(n_ul), cci_gain(n_ul * n_dl);
  for (std::size_t m = 0; m < n_dl; ++m) {
    dl_gain[m] = take(path_gain(dl[m].norm(), params, LinkKind::Downlink));
  }
  for (std::size_t r = 0; r < n_ul; ++r) {
    ul_gain[r] = take(path_gain(ul[r].norm(), params, LinkKind::Uplink));
    for (std::size_t m = 0; m < n_dl; ++m) {
      cci_gain[r * n_dl + m] =
          take(path_gain(ul[r].distance_to(dl[m]), params, LinkKind::CoChannel));
    }
  }

  const double noise_dl = params.noise_dl_watt();
  const double noise_bs = params.noise_bs_watt();
  const double k_si = db_to_linear(params.rician_k_db);

  ChannelGains& gains = drop.gains;
  gains = ChannelGains(n_subcarriers, n_dl, n_ul);
  for (std::size_t i = 0; i < n_subcarriers; ++i) {
    for (std::size_t m = 0; m < n_dl; ++m) {
      gains.H(i, m) = dl_gain[m] * std::norm(rng.complex_normal()) / noise_dl;
    }
    for (std::size_t r = 0; r < n_ul; ++r) {
      gains.G(i, r) = ul_gain[r] * std::norm(rng.complex_normal()) / noise_bs;
    }
    for (std::size_t r = 0; r < n_ul; ++r) {
      for (std::size_t m = 0; m < n_dl; ++m) {
        gains.F(i, r, m) = cci_gain[r * n_dl + m] * std::norm(rng.complex_normal()) / noise_dl;
      }
    }
    gains.L_SI(i) = std::norm(rician_sample(k_si, rng)) / noise_bs;
  }
  return drop;
}

ChannelGains sample_channel_realization(const CellGeometry& geometry,
                                        const LargeScaleParams& params,
                                        std::size_t n_subcarriers, std::size_t n_dl,
                                        std::size_t n_ul, RandomStream& rng) {
  return sample_drop(geometry, params, n_subcarriers, n_dl, n_ul, rng).gains;
}

void write_channels_csv(std::ostream& out, const ChannelGains& gains) {
  out << "i,kind,m,r,value\n";
  auto row = [&](std::size_t i, const char* kind, long m, long r, double v) {
    out << i << ',' << kind << ',' << m << ',' << r << ',';
    write_value(out, v);
    out << '\n';
  };
  for (std::size_t i = 0; i < gains.n_subcarriers(); ++i) {
    for (std::size_t m = 0; m < gains.n_dl(); ++m) row(i, "H", static_cast<long>(m), -1, gains.H(i, m));
    for (std::size_t r = 0; r < gains.n_ul(); ++r) row(i, "G", -1, static_cast<long>(r), gains.G(i, r));
    for (std::size_t r = 0; r < gains.n_ul(); ++r) {
      for (std::size_t m = 0; m < gains.n_dl(); ++m) {
        row(i, "F", static_cast<long>(m), static_cast<long>(r), gains.F(i, r, m));
      }
    }
    row(i, "LSI", -1, -1, gains.L_SI(i));
  }
}

}  // namespace fdmc
