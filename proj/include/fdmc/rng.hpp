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

#ifndef FDMC_RNG_HPP
#define FDMC_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace fdmc {

// SplitMix64 finalizer. Used to derive independent seeds for Monte Carlo
// trials from (master seed, trial index).
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream);

// Seeded random stream. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the variate transforms below are implemented
// here rather than taken from <random> so that draws do not depend on the
// standard library vendor.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for trial `index` of an experiment seeded by `master`.
  static RandomStream substream(std::uint64_t master, std::uint64_t index) {
    return RandomStream(mix_seed(master, index));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via the Box-Muller transform.
  double normal();

  // Circularly symmetric complex Gaussian CN(0, 1): E|z|^2 = 1.
  std::complex<double> complex_normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fdmc

#endif  // FDMC_RNG_HPP
