// Copyright 2026 The privconsensus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRIVCONSENSUS_RNG_H_
#define PRIVCONSENSUS_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace privconsensus {

// Derives the seed of a named randomness stream from a run's root seed.
// Streams with different names (or indices) are statistically independent,
// so switching one consumer on or off never shifts the draws of another.
uint64_t StreamSeed(uint64_t root_seed, std::string_view name,
                    uint64_t index = 0);

// 64-bit FNV-1a; used for stream names, key fingerprints and config hashes.
uint64_t Fnv1a64(std::string_view bytes);

// Seeded pseudo-random source. All conversions from raw bits to reals are
// done here (not via <random> distributions) so that draws are identical
// across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  Rng(uint64_t root_seed, std::string_view stream, uint64_t index = 0)
      : engine_(StreamSeed(root_seed, stream, index)) {}

  uint64_t Bits64() { return engine_(); }

  // Uniform on [0, 1).
  double Uniform01();
  // Uniform on (0, 1).
  double OpenUniform01();
  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

  // Zero-mean Laplace with the given scale b (density exp(-|x|/b) / 2b).
  // Scale 0 returns exactly 0 but still consumes one draw.
  double Laplace(double scale);

  // Zero-mean Gaussian with the given standard deviation (Box-Muller; two
  // draws per call).
  double Gaussian(double stddev);

 private:
  std::mt19937_64 engine_;
};

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_RNG_H_
