// Copyright 2026 The Shapeprog Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace shapeprog {

/// Seed used by check_sat unless overridden.
inline constexpr std::uint64_t kDefaultSatSeed = 0x5a7c0ffee;

/**
 * Portable uniform sampler. std::uniform_real_distribution is
 * implementation-defined, so doubles are formed directly from the top 53 bits
 * of mt19937_64 output; identical seeds give identical samples everywhere.
 */
class UniformSampler {
 public:
  explicit UniformSampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double next() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace shapeprog
