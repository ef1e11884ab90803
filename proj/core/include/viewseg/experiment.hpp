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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "viewseg/data.hpp"
#include "viewseg/evaluate.hpp"
#include "viewseg/model.hpp"
#include "viewseg/trainer.hpp"

namespace viewseg {

// Method grid run on generated data. For every entry s of `seeds` one
// dataset is generated with generator seed `generator.seed + s` and each
// method is trained on it with train seed `train.seed + s`.
struct BenchConfig {
  GeneratorConfig generator;
  EncoderConfig model;
  // Shared settings; `method` is replaced per cell.
  TrainConfig train;
  std::vector<Method> methods = {Method::kBaseline, Method::kOursNoAction, Method::kOursNoSeq,
                                 Method::kOurs,     Method::kAdvLoss,      Method::kContrastive};
  std::vector<std::uint64_t> seeds = {0, 1, 2};

  void validate() const;
};

struct BenchCell {
  Method method = Method::kBaseline;
  std::uint64_t seed = 0;
  TrainConfig train;
  TrainResult result;
};

struct BenchResult {
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds;
  // reports[m][s]: final report of methods[m] trained with seeds[s].
  std::vector<std::vector<EvalReport>> reports;

  // Seed-averaged report of one method.
  EvalReport mean(std::size_t method_index) const;
};

// Runs every (method, seed) cell, up to `threads` at a time. `on_cell` is
// called once per finished cell, never concurrently with itself.
BenchResult run_bench(const BenchConfig& config, std::size_t threads = 1,
                      const std::function<void(const BenchCell&)>& on_cell = {});

// Group-wise mean of metrics over reports; counts are summed. Groups missing
// from any report are dropped.
EvalReport average_reports(std::span<const EvalReport> reports);

// method,group,f1_10,f1_25,f1_50,edit,acc,count with seed-averaged values,
// one row per method per group.
std::string bench_to_csv(const BenchResult& result);

}  // namespace viewseg
