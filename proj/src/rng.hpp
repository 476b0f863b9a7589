// Copyright 2026 The Slid Authors.
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

#ifndef SLID_RNG_HPP_
#define SLID_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace slid {

// Deterministic generator (splitmix64) used for every seeded behavior:
// weight init, augmentation masks, synthetic data. std:: distributions are
// implementation-defined, so we roll the few draws we need by hand to keep
// seeds portable across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t NextU64() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double NextDouble() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * NextDouble(); }

  // Uniform integer in [0, n). Modulo bias is negligible for our ranges.
  uint64_t NextBelow(uint64_t n) { return n == 0 ? 0 : NextU64() % n; }

  // Standard normal via Box-Muller.
  double NextGaussian() {
    double u1 = NextDouble();
    double u2 = NextDouble();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  uint64_t state_;
};

// Stateless hash used when a decision must be a pure function of
// (seed, id) pairs, e.g. per-utterance augmentation choice.
inline uint64_t HashCombine(uint64_t seed, uint64_t value) {
  Rng r(seed ^ (value * 0xff51afd7ed558ccdull) ^ 0x2545f4914f6cdd1dull);
  return r.NextU64();
}

}  // namespace slid

#endif  // SLID_RNG_HPP_
