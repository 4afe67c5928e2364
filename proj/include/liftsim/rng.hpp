// Copyright 2026 The liftsim Authors.
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

#ifndef LIFTSIM_RNG_HPP_
#define LIFTSIM_RNG_HPP_

#include <cstdint>
#include <random>

namespace liftsim {

// Seeded generator with portable variate transforms. std::mt19937_64 output
// is fully specified by the standard, but the std:: distributions are not, so
// every transform used by the simulator lives here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer on [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via the Marsaglia polar method.
  double normal();

  // Poisson(mean) by multiplication of uniforms, split into chunks so the
  // exp(-mean) threshold never underflows.
  std::uint64_t poisson(double mean);

  // Independent child stream derived from this generator's next output.
  Rng split() { return Rng(next_u64() ^ 0x9E3779B97F4A7C15ULL); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace liftsim

#endif  // LIFTSIM_RNG_HPP_
