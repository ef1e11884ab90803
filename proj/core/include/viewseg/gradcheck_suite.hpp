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
#include <string>
#include <vector>

namespace viewseg {

struct GradcheckResult {
  std::string name;
  std::size_t trials = 0;
  double max_error = 0.0;
};

// Finite-difference checks of every autodiff primitive, the model forward
// passes and every loss on random tiny instances (T <= 8, D <= 6, C <= 4),
// `trials` seeded trials per case. Objectives with stop-gradient or
// gradient-reversal boundaries are compared against the function reverse
// mode differentiates: stopped values frozen, reversed paths negated.
std::vector<GradcheckResult> run_gradcheck_suite(std::size_t trials, std::uint64_t seed);

}  // namespace viewseg
