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

#include "privconsensus/rng.h"

#include <cmath>
#include <numbers>

namespace privconsensus {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t StreamSeed(uint64_t root_seed, std::string_view name,
                    uint64_t index) {
  uint64_t s = SplitMix64(root_seed);
  s = SplitMix64(s ^ Fnv1a64(name));
  return SplitMix64(s ^ SplitMix64(index + 0x632be59bd9b4e019ULL));
}

double Rng::Uniform01() {
  return static_cast<double>(engine_() >> 11) * kTwoPow53Inv;
}

double Rng::OpenUniform01() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * kTwoPow53Inv;
}

double Rng::Laplace(double scale) {
  const double u = OpenUniform01() - 0.5;
  if (scale == 0.0) return 0.0;
  const double magnitude = -scale * std::log1p(-2.0 * std::fabs(u));
  return u < 0 ? -magnitude : magnitude;
}

double Rng::Gaussian(double stddev) {
  const double u1 = OpenUniform01();
  const double u2 = Uniform01();
  if (stddev == 0.0) return 0.0;
  return stddev * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace privconsensus
