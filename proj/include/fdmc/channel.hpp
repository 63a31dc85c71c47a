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

#ifndef FDMC_CHANNEL_HPP
#define FDMC_CHANNEL_HPP

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "fdmc/rng.hpp"

namespace fdmc {

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watt(double dbm);

// Annular cell around a base station at the origin.
struct CellGeometry {
  double inner_radius_m = 30.0;
  double outer_radius_m = 600.0;

  void validate() const;
};

enum class LinkKind { Downlink, Uplink, CoChannel };

// Large-scale propagation and receiver parameters. Defaults follow the
// simulation table of the reference system (2.5 GHz, exponent 3.6, -125 dBm
// noise at both ends, 10 dBi BS antenna, -90 dB residual self-interference).
struct LargeScaleParams {
  double carrier_hz = 2.5e9;
  double pathloss_exponent = 3.6;
  double reference_distance_m = 1.0;
  double bs_antenna_gain_db = 10.0;
  double noise_dl_dbm = -125.0;
  double noise_bs_dbm = -125.0;
  double rician_k_db = 5.0;
  double si_cancellation_db = -90.0;

  void validate() const;

  double rho() const { return db_to_linear(si_cancellation_db); }
  double noise_dl_watt() const { return dbm_to_watt(noise_dl_dbm); }
  double noise_bs_watt() const { return dbm_to_watt(noise_bs_dbm); }
};

struct Position {
  double x = 0.0;
  double y = 0.0;

  double norm() const;
  double distance_to(const Position& other) const;
};

struct UserPositions {
  std::vector<Position> downlink;
  std::vector<Position> uplink;
};

// Uniform over the annulus area (radius drawn as sqrt of a uniform in r^2).
UserPositions sample_user_positions(const CellGeometry& geometry, std::size_t n_dl,
                                    std::size_t n_ul, RandomStream& rng);

struct PathGain {
  double gain = 0.0;     // linear power gain
  bool clamped = false;  // distance was below the reference distance
};

// Log-distance path gain anchored at the free-space loss at the reference
// distance. The BS antenna gain applies to links that terminate at the BS.
PathGain path_gain(double distance_m, const LargeScaleParams& params, LinkKind kind);

// Noise-normalized channel gains for one network realization.
//
// Storage is flat and row-major in the order the accessors name their
// indices: H(i, m), G(i, r), F(i, r, m), L_SI(i).
class ChannelGains {
 public:
  ChannelGains() = default;
  ChannelGains(std::size_t n_subcarriers, std::size_t n_dl, std::size_t n_ul);

  std::size_t n_subcarriers() const { return n_subcarriers_; }
  std::size_t n_dl() const { return n_dl_; }
  std::size_t n_ul() const { return n_ul_; }

  double& H(std::size_t i, std::size_t m) { return h_[i * n_dl_ + m]; }
  double H(std::size_t i, std::size_t m) const { return h_[i * n_dl_ + m]; }
  double& G(std::size_t i, std::size_t r) { return g_[i * n_ul_ + r]; }
  double G(std::size_t i, std::size_t r) const { return g_[i * n_ul_ + r]; }
  double& F(std::size_t i, std::size_t r, std::size_t m) { return f_[(i * n_ul_ + r) * n_dl_ + m]; }
  double F(std::size_t i, std::size_t r, std::size_t m) const {
    return f_[(i * n_ul_ + r) * n_dl_ + m];
  }
  double& L_SI(std::size_t i) { return l_[i]; }
  double L_SI(std::size_t i) const { return l_[i]; }

  const std::vector<double>& h_data() const { return h_; }
  const std::vector<double>& g_data() const { return g_; }
  const std::vector<double>& f_data() const { return f_; }
  const std::vector<double>& l_data() const { return l_; }

  // Throws ParameterError on a non-finite or negative entry.
  void validate() const;

  bool operator==(const ChannelGains&) const = default;

 private:
  std::size_t n_subcarriers_ = 0;
  std::size_t n_dl_ = 0;
  std::size_t n_ul_ = 0;
  std::vector<double> h_;
  std::vector<double> g_;
  std::vector<double> f_;
  std::vector<double> l_;
};

// One Monte Carlo drop: user placement plus the resulting gains.
struct Drop {
  UserPositions positions;
  ChannelGains gains;
  std::size_t clamped_links = 0;
};

// Draws positions, then per-subcarrier fading in a fixed order (h, g, f, l_SI).
Drop sample_drop(const CellGeometry& geometry, const LargeScaleParams& params,
                 std::size_t n_subcarriers, std::size_t n_dl, std::size_t n_ul,
                 RandomStream& rng);

ChannelGains sample_channel_realization(const CellGeometry& geometry,
                                        const LargeScaleParams& params,
                                        std::size_t n_subcarriers, std::size_t n_dl,
                                        std::size_t n_ul, RandomStream& rng);

// Rician sample with unit mean power: LOS amplitude sqrt(K/(K+1)), scatter
// variance 1/(K+1).
std::complex<double> rician_sample(double k_factor_linear, RandomStream& rng);

// CSV dump: columns i,kind,m,r,value; -1 marks index slots a kind does not use.
void write_channels_csv(std::ostream& out, const ChannelGains& gains);

}  // namespace fdmc

#endif  // FDMC_CHANNEL_HPP
