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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "viewseg/adam.hpp"
#include "viewseg/data.hpp"
#include "viewseg/evaluate.hpp"
#include "viewseg/losses.hpp"
#include "viewseg/model.hpp"

namespace viewseg {

enum class Method {
  kBaseline,      // TAS loss only
  kOurs,          // TAS + sequence + action
  kOursNoSeq,     // TAS + action
  kOursNoAction,  // TAS + sequence
  kAdvLoss,       // TAS + adversarial view classifier
  kContrastive,   // TAS + in-batch InfoNCE across views
};

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);
bool uses_sequence_loss(Method method);
bool uses_action_loss(Method method);

struct TrainConfig {
  Method method = Method::kOurs;
  LossWeights weights;
  std::size_t epochs = 20;
  std::size_t steps_per_epoch = 60;
  AdamOptions adam;
  std::uint64_t seed = 0;
  bool stop_grad = true;
  SimilarityKind similarity = SimilarityKind::kCosine;
  std::optional<std::size_t> seq_pool_len;
  std::optional<std::size_t> action_pool_len;
  // Upper bound of the random feature shift applied to the r view of each
  // training pair; 0 keeps views synchronized.
  std::size_t sync_shift = 0;
  // Also pair action segments recorded from the same view.
  bool allow_same_view = false;
  std::size_t action_pairs_per_step = 1;
  // Weight of the AdvLoss / Contrastive term.
  double aux_weight = 0.1;
  double temperature = 0.07;
  std::size_t contrastive_batch = 8;
  // Evaluate every n epochs (0: only after the last epoch).
  std::size_t eval_every = 0;

  void validate() const;
  // Loss weights actually applied: methods without a term get weight 0.
  LossWeights effective_weights() const;
};

struct EpochLog {
  std::size_t epoch = 0;
  double tas = 0.0;
  double seq = 0.0;
  double action = 0.0;
  double aux = 0.0;
  std::optional<EvalReport> eval;
  double wall_seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  std::size_t skipped_action_terms = 0;
  std::size_t skipped_updates = 0;
  std::vector<std::string> warnings;
};

// epoch,tas,seq,action,aux followed by <group>_<metric> columns for each
// evaluated group; epochs without an evaluation leave those cells empty.
// Wall-clock times are not written so logs of identical runs are identical.
std::string train_log_to_csv(const TrainLog& log);

struct TrainResult {
  ModelState state;
  TrainLog log;
  EvalReport final_report;
};

// One optimizer step per training step; see README for the step recipe.
// Deterministic in config.seed. Throws std::runtime_error if a loss
// component becomes non-finite.
TrainResult train(const TrainConfig& config, const EncoderConfig& architecture,
                  const Dataset& dataset, std::size_t eval_threads = 1);

}  // namespace viewseg
