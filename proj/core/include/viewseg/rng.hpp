// Copyright 2026 The viewseg Authors.
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

namespace viewseg {

// Portable random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; every conversion to doubles, bounded
// integers and Gaussians is done here rather than by the implementation-defined
// <random> distributions, so a seed reproduces the same stream on every
// platform.
//
//   uniform()        top 53 bits of one draw, scaled to [0, 1)
//   uniform_index(n) rejection sampling on the largest multiple of n
//   normal()         Marsaglia polar method, second variate cached
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  // Uniform in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// SplitMix64 finalizer over (seed, stream); used to give independent
// subsystems (view sampling, action sampling, shifts) their own streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace viewseg
