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

#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "fdmc/channel.hpp"
#include "fdmc/error.hpp"
#include "fdmc/rng.hpp"

namespace fdmc {
namespace {

TEST(RandomStream, SubstreamsAreReproducibleAndDistinct) {
  RandomStream a = RandomStream::substream(7, 3);
  RandomStream b = RandomStream::substream(7, 3);
  RandomStream c = RandomStream::substream(7, 4);
  RandomStream d = RandomStream::substream(8, 3);
  const std::uint64_t va = a.next_u64();
  EXPECT_EQ(va, b.next_u64());
  EXPECT_NE(va, c.next_u64());
  EXPECT_NE(va, d.next_u64());
}

TEST(RandomStream, ComplexNormalHasUnitPower) {
  RandomStream rng(11);
  double sum = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) sum += std::norm(rng.complex_normal());
  EXPECT_NEAR(sum / n, 1.0, 0.02);
}

TEST(Geometry, RadiiStayInsideAnnulus) {
  RandomStream rng(1);
  const CellGeometry geo{30.0, 600.0};
  const UserPositions pos = sample_user_positions(geo, 200, 200, rng);
  for (const auto* group : {&pos.downlink, &pos.uplink}) {
    for (const Position& p : *group) {
      EXPECT_GE(p.norm(), 30.0 - 1e-9);
      EXPECT_LE(p.norm(), 600.0 + 1e-9);
    }
  }
}

TEST(Geometry, DegenerateAnnulus) {
  RandomStream rng(2);
  const CellGeometry geo{600.0 - 1e-3, 600.0};
  const UserPositions pos = sample_user_positions(geo, 50, 50, rng);
  for (const Position& p : pos.downlink) {
    EXPECT_GE(p.norm(), 600.0 - 1e-3 - 1e-9);
    EXPECT_LE(p.norm(), 600.0 + 1e-9);
  }
}

TEST(Geometry, AreaUniformSecondMoment) {
  RandomStream rng(3);
  const CellGeometry geo{30.0, 600.0};
  const UserPositions pos = sample_user_positions(geo, 50000, 50000, rng);
  double sum = 0.0;
  for (const Position& p : pos.downlink) sum += p.norm() * p.norm();
  for (const Position& p : pos.uplink) sum += p.norm() * p.norm();
  const double expected = (30.0 * 30.0 + 600.0 * 600.0) / 2.0;
  EXPECT_NEAR(sum / 100000.0 / expected, 1.0, 0.01);
}

TEST(Geometry, RejectsInvertedRadii) {
  RandomStream rng(4);
  EXPECT_THROW(sample_user_positions(CellGeometry{600.0, 30.0}, 1, 1, rng), ParameterError);
}

TEST(PathGain, ReferenceDistanceIsFreeSpace) {
  const LargeScaleParams params;
  const double lambda = 299792458.0 / params.carrier_hz;
  const double free_space = std::pow(lambda / (4.0 * std::numbers::pi * 1.0), 2.0);
  EXPECT_NEAR(path_gain(1.0, params, LinkKind::CoChannel).gain / free_space, 1.0, 1e-9);
  EXPECT_NEAR(10.0 * std::log10(free_space), -40.4, 0.05);
}

TEST(PathGain, DecadeCostsTenAlphaDb) {
  const LargeScaleParams params;
  const double g1 = path_gain(1.0, params, LinkKind::Downlink).gain;
  const double g10 = path_gain(10.0, params, LinkKind::Downlink).gain;
  EXPECT_NEAR(10.0 * std::log10(g1 / g10), 36.0, 1e-9);
}

TEST(PathGain, AntennaGainOnBsLinksOnly) {
  const LargeScaleParams params;
  const double dl = path_gain(120.0, params, LinkKind::Downlink).gain;
  const double ul = path_gain(120.0, params, LinkKind::Uplink).gain;
  const double cci = path_gain(120.0, params, LinkKind::CoChannel).gain;
  EXPECT_NEAR(10.0 * std::log10(dl / cci), 10.0, 1e-9);
  EXPECT_DOUBLE_EQ(dl, ul);
}

TEST(PathGain, ClampsBelowReference) {
  const LargeScaleParams params;
  const PathGain near = path_gain(0.2, params, LinkKind::CoChannel);
  EXPECT_TRUE(near.clamped);
  EXPECT_DOUBLE_EQ(near.gain, path_gain(1.0, params, LinkKind::CoChannel).gain);
}

TEST(PathGain, MonotoneInDistance) {
  const LargeScaleParams params;
  double last = INFINITY;
  for (double d = 1.0; d < 1000.0; d *= 1.7) {
    const double g = path_gain(d, params, LinkKind::Uplink).gain;
    EXPECT_LT(g, last);
    last = g;
  }
}

TEST(Fading, RicianMomentsMatchKFactor) {
  RandomStream rng(5);
  const double k = db_to_linear(5.0);
  const int n = 100000;
  std::complex<double> mean = 0.0;
  double power = 0.0;
  for (int j = 0; j < n; ++j) {
    const std::complex<double> x = rician_sample(k, rng);
    mean += x;
    power += std::norm(x);
  }
  mean /= static_cast<double>(n);
  power /= n;
  EXPECT_NEAR(power, 1.0, 0.02);
  const double los = std::norm(mean);
  EXPECT_NEAR(los / (power - los), std::pow(10.0, 0.5), 0.1);
}

TEST(ChannelGains, SameSeedIsBitIdentical) {
  const CellGeometry geo;
  const LargeScaleParams params;
  RandomStream a = RandomStream::substream(9, 0);
  RandomStream b = RandomStream::substream(9, 0);
  RandomStream c = RandomStream::substream(9, 1);
  const ChannelGains ga = sample_channel_realization(geo, params, 8, 3, 2, a);
  const ChannelGains gb = sample_channel_realization(geo, params, 8, 3, 2, b);
  const ChannelGains gc = sample_channel_realization(geo, params, 8, 3, 2, c);
  EXPECT_EQ(ga, gb);
  EXPECT_FALSE(ga == gc);
}

TEST(ChannelGains, NoiseNormalizedAndFinite) {
  const CellGeometry geo;
  const LargeScaleParams params;
  RandomStream rng(12);
  const Drop drop = sample_drop(geo, params, 16, 4, 4, rng);
  EXPECT_NO_THROW(drop.gains.validate());
  // Averaged over subcarriers, H follows the DL path gain over the noise.
  for (std::size_t m = 0; m < 4; ++m) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 16; ++i) mean += drop.gains.H(i, m) / 16.0;
    const double expected =
        path_gain(drop.positions.downlink[m].norm(), params, LinkKind::Downlink).gain /
        params.noise_dl_watt();
    EXPECT_GT(mean / expected, 0.2);
    EXPECT_LT(mean / expected, 5.0);
  }
}

TEST(ChannelGains, ValidateRejectsNegative) {
  ChannelGains g(1, 1, 1);
  g.H(0, 0) = -1.0;
  EXPECT_THROW(g.validate(), ParameterError);
  g.H(0, 0) = NAN;
  EXPECT_THROW(g.validate(), ParameterError);
}

TEST(ChannelGains, CsvUsesMinusOneForUnusedIndices) {
  ChannelGains g(1, 1, 1);
  g.H(0, 0) = 2.0;
  g.G(0, 0) = 3.0;
  g.F(0, 0, 0) = 4.0;
  g.L_SI(0) = 5.0;
  std::ostringstream out;
  write_channels_csv(out, g);
  const std::string csv = out.str();
  EXPECT_NE(csv.find("0,H,0,-1,2"), std::string::npos);
  EXPECT_NE(csv.find("0,G,-1,0,3"), std::string::npos);
  EXPECT_NE(csv.find("0,F,0,0,4"), std::string::npos);
  EXPECT_NE(csv.find("0,LSI,-1,-1,5"), std::string::npos);
}

TEST(Units, DbConversions) {
  EXPECT_DOUBLE_EQ(db_to_linear(30.0), 1000.0);
  EXPECT_NEAR(dbm_to_watt(30.0), 1.0, 1e-12);
  EXPECT_NEAR(linear_to_db(0.001), -30.0, 1e-12);
}

}  // namespace
}  // namespace fdmc
