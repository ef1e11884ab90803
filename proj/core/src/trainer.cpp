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

#include "viewseg/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <stdexcept>

#include "viewseg/errors.hpp"
#include "viewseg/ops.hpp"
#include "viewseg/rng.hpp"
#include "viewseg/sampling.hpp"

namespace viewseg {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kBaseline: return "baseline";
    case Method::kOurs: return "ours";
    case Method::kOursNoSeq: return "ours_no_seq";
    case Method::kOursNoAction: return "ours_no_action";
    case Method::kAdvLoss: return "advloss";
    case Method::kContrastive: return "contrastive";
  }
  return "ours";
}

Method method_from_string(std::string_view name) {
  for (const Method m : {Method::kBaseline, Method::kOurs, Method::kOursNoSeq, Method::kOursNoAction,
                         Method::kAdvLoss, Method::kContrastive}) {
    if (to_string(m) == name) return m;
  }
  throw ArgumentError("unknown method '" + std::string(name) + "'");
}

bool uses_sequence_loss(Method method) {
  return method == Method::kOurs || method == Method::kOursNoAction;
}

bool uses_action_loss(Method method) {
  return method == Method::kOurs || method == Method::kOursNoSeq;
}

void TrainConfig::validate() const {
  weights.validate();
  if (epochs == 0 || steps_per_epoch == 0) throw ArgumentError("train: epochs and steps must be positive");
  if (!(adam.learning_rate > 0.0)) throw ArgumentError("train: learning_rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw ArgumentError("train: adam betas must lie in [0, 1)");
  }
  if (!(adam.eps > 0.0)) throw ArgumentError("train: adam eps must be positive");
  if (action_pairs_per_step == 0) throw ArgumentError("train: action_pairs_per_step must be >= 1");
  if (!(temperature > 0.0)) throw ArgumentError("train: temperature must be positive");
  if (contrastive_batch < 2) throw ArgumentError("train: contrastive_batch must be >= 2");
  if (!std::isfinite(aux_weight) || aux_weight < 0.0) throw ArgumentError("train: aux_weight must be >= 0");
  if (seq_pool_len && *seq_pool_len == 0) throw ArgumentError("train: seq_pool_len must be positive");
  if (action_pool_len && *action_pool_len == 0) throw ArgumentError("train: action_pool_len must be positive");
}

LossWeights TrainConfig::effective_weights() const {
  LossWeights w = weights;
  if (!uses_sequence_loss(method)) w.lambda = 0.0;
  if (!uses_action_loss(method)) w.beta = 0.0;
  return w;
}

std::string train_log_to_csv(const TrainLog& log) {
  std::vector<std::string> groups;
  for (const auto& e : log.epochs) {
    if (!e.eval) continue;
    for (const auto& g : e.eval->groups) {
      if (std::find(groups.begin(), groups.end(), g.name) == groups.end()) groups.push_back(g.name);
    }
  }
  std::string out = "epoch,tas,seq,action,aux";
  for (const auto& g : groups) {
    for (const char* m : {"f1_10", "f1_25", "f1_50", "edit", "acc"}) out += "," + g + "_" + m;
  }
  out += "\n";
  char buf[128];
  for (const auto& e : log.epochs) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g,%.9g", e.epoch, e.tas, e.seq, e.action, e.aux);
    out += buf;
    for (const auto& name : groups) {
      const GroupMetrics* g = e.eval ? e.eval->find(name) : nullptr;
      if (!g) {
        out += ",,,,,";
        continue;
      }
      std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.4f,%.4f,%.4f", g->f1_10, g->f1_25, g->f1_50, g->edit,
                    g->acc);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

namespace {

enum Stream : std::uint64_t { kInit = 10, kSequences = 11, kActions = 12, kShift = 13 };

void require_finite(double value, const char* what, std::size_t epoch, std::size_t step) {
  if (!std::isfinite(value)) {
    throw std::runtime_error(std::string("training diverged: ") + what + " loss is " +
                             std::to_string(value) + " at epoch " + std::to_string(epoch) + " step " +
                             std::to_string(step));
  }
}

ad::Tensor segment_rows(const ad::Tensor& z, const Segment& segment) {
  std::vector<std::size_t> rows(segment.length());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = segment.start + i;
  return ad::gather_rows(z, rows);
}

class Trainer {
 public:
  Trainer(const TrainConfig& config, const EncoderConfig& architecture, const Dataset& dataset)
      : config_(config),
        weights_(config.effective_weights()),
        dataset_(dataset),
        index_(dataset),
        sequence_rng_(derive_seed(config.seed, kSequences)),
        action_rng_(derive_seed(config.seed, kActions)),
        shift_rng_(derive_seed(config.seed, kShift)) {
    config.validate();
    dataset.validate();
    EncoderConfig arch = architecture;
    arch.input_dim = dataset.feature_dim;
    arch.num_classes = dataset.num_classes;
    const std::size_t view_classes =
        config.method == Method::kAdvLoss ? dataset.split.seen_views.size() : 0;
    state_ = ModelState::initialize(arch, derive_seed(config.seed, kInit), view_classes);
    params_ = state_.parameters();
    if (index_.multi_view_sequences().empty()) {
      throw ArgumentError("train: no training sequence has two seen views");
    }
    for (std::size_t i = 0; i < dataset.split.seen_views.size(); ++i) {
      view_index_[dataset.split.seen_views[i]] = i;
    }
  }

  TrainResult run(std::size_t eval_threads) {
    TrainResult result;
    for (std::size_t epoch = 1; epoch <= config_.epochs; ++epoch) {
      const auto start = std::chrono::steady_clock::now();
      EpochLog entry;
      entry.epoch = epoch;
      for (std::size_t step = 0; step < config_.steps_per_epoch; ++step) {
        const StepLosses losses = config_.method == Method::kContrastive ? contrastive_step() : pair_step(result.log);
        require_finite(losses.tas, "tas", epoch, step);
        require_finite(losses.seq, "sequence", epoch, step);
        require_finite(losses.action, "action", epoch, step);
        require_finite(losses.aux, "aux", epoch, step);
        entry.tas += losses.tas;
        entry.seq += losses.seq;
        entry.action += losses.action;
        entry.aux += losses.aux;
        if (!adam_step(params_, adam_, config_.adam)) {
          ++result.log.skipped_updates;
          const std::string message = "non-finite gradient at epoch " + std::to_string(epoch) + " step " +
                                      std::to_string(step) + "; update skipped";
          std::clog << "warning: " << message << "\n";
          result.log.warnings.push_back(message);
        }
      }
      const double steps = static_cast<double>(config_.steps_per_epoch);
      entry.tas /= steps;
      entry.seq /= steps;
      entry.action /= steps;
      entry.aux /= steps;
      const bool last = epoch == config_.epochs;
      if (last || (config_.eval_every > 0 && epoch % config_.eval_every == 0)) {
        entry.eval = evaluate_all(state_, dataset_, {}, eval_threads);
      }
      entry.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      result.log.epochs.push_back(std::move(entry));
    }
    result.final_report = *result.log.epochs.back().eval;
    result.state = state_;
    return result;
  }

 private:
  struct StepLosses {
    double tas = 0.0;
    double seq = 0.0;
    double action = 0.0;
    double aux = 0.0;
  };

  SimilarityOptions similarity(std::optional<std::size_t> pool) const {
    return {config_.similarity, config_.stop_grad, pool};
  }

  void zero_grads() {
    for (auto& p : params_) p.zero_grad();
  }

  int draw_sequence() {
    const auto& seqs = index_.multi_view_sequences();
    return seqs[sequence_rng_.uniform_index(seqs.size())];
  }

  StepLosses pair_step(TrainLog& log) {
    const int sequence = draw_sequence();
    const auto [q, r] = sample_view_pair(index_, sequence, sequence_rng_);
    const Recording& rec_q = dataset_.recordings[q];
    const Recording& rec_r = dataset_.recordings[r];
    const bool shifted = config_.sync_shift > 0;
    const EncodeOutput enc_q = encode(rec_q.features, state_);
    const EncodeOutput enc_r =
        shifted ? encode(apply_sync_shift(rec_r, std::min(config_.sync_shift, rec_r.frames() - 1), shift_rng_).features,
                         state_)
                : encode(rec_r.features, state_);

    const ad::Tensor tas = ad::add(tas_loss(enc_q.logits_per_stage, rec_q.labels, weights_),
                                   tas_loss(enc_r.logits_per_stage, rec_r.labels, weights_));
    StepLosses out;
    out.tas = tas.item();

    ad::Tensor seq;
    if (uses_sequence_loss(config_.method)) {
      seq = sequence_loss(enc_q, enc_r, state_, similarity(config_.seq_pool_len));
      out.seq = seq.item();
    }

    ad::Tensor action;
    if (uses_action_loss(config_.method)) {
      std::vector<ad::Tensor> terms;
      for (std::size_t k = 0; k < config_.action_pairs_per_step; ++k) {
        try {
          const auto [a, b] = sample_action_pair(index_, action_rng_, config_.allow_same_view);
          auto embed = [&](const SegmentOccurrence& occ) {
            const ad::Tensor* z = nullptr;
            EncodeOutput fresh;
            if (occ.recording == q) {
              z = &enc_q.z;
            } else if (occ.recording == r && !shifted) {
              z = &enc_r.z;
            } else {
              fresh = encode(dataset_.recordings[occ.recording].features, state_);
              z = &fresh.z;
            }
            return SegmentEmbedding{segment_rows(*z, occ.segment), occ.segment.label};
          };
          const SegmentEmbedding ea = embed(a);
          const SegmentEmbedding eb = embed(b);
          terms.push_back(action_loss(ea, eb, state_, similarity(config_.action_pool_len)));
        } catch (const ArgumentError& e) {
          ++log.skipped_action_terms;
          if (log.skipped_action_terms == 1) {
            std::clog << "warning: action term skipped: " << e.what() << "\n";
            log.warnings.push_back(std::string("action term skipped: ") + e.what());
          }
        }
      }
      if (!terms.empty()) {
        action = terms.size() == 1 ? terms[0] : ad::mean(ad::concat(terms_as_rows(terms), 0));
        out.action = action.item();
      }
    }

    ad::Tensor loss = total_loss(tas, seq, action, weights_);
    if (config_.method == Method::kAdvLoss) {
      const ad::Tensor aux = ad::add(adversarial_view_loss(enc_q.z, view_index_.at(rec_q.view_id), *state_.view_head),
                                     adversarial_view_loss(enc_r.z, view_index_.at(rec_r.view_id), *state_.view_head));
      out.aux = aux.item();
      loss = ad::add(loss, ad::scale(aux, config_.aux_weight));
    }
    zero_grads();
    ad::backward(loss);
    return out;
  }

  static std::vector<ad::Tensor> terms_as_rows(const std::vector<ad::Tensor>& terms) {
    std::vector<ad::Tensor> rows;
    for (const auto& t : terms) rows.push_back(ad::reshape(t, {1}));
    return rows;
  }

  StepLosses contrastive_step() {
    std::vector<ContrastiveEntry> batch;
    std::vector<ad::Tensor> tas_terms;
    for (std::size_t b = 0; b < config_.contrastive_batch; ++b) {
      const int sequence = draw_sequence();
      const auto [q, r] = sample_view_pair(index_, sequence, sequence_rng_);
      for (const std::size_t idx : {q, r}) {
        const Recording& rec = dataset_.recordings[idx];
        EncodeOutput enc = encode(rec.features, state_);
        tas_terms.push_back(ad::reshape(tas_loss(enc.logits_per_stage, rec.labels, weights_), {1}));
        batch.push_back({rec.sequence_id, rec.view_id, enc.z});
      }
    }
    // Average over sequence pairs so the TAS scale matches a pair step.
    const ad::Tensor tas = ad::scale(ad::sum(ad::concat(tas_terms, 0)), 1.0 / static_cast<double>(config_.contrastive_batch));
    const ad::Tensor aux = contrastive_loss(batch, config_.temperature);
    StepLosses out;
    out.tas = tas.item();
    out.aux = aux.item();
    zero_grads();
    ad::backward(ad::add(tas, ad::scale(aux, config_.aux_weight)));
    return out;
  }

  const TrainConfig& config_;
  LossWeights weights_;
  const Dataset& dataset_;
  TrainingIndex index_;
  Rng sequence_rng_;
  Rng action_rng_;
  Rng shift_rng_;
  ModelState state_;
  std::vector<ad::Tensor> params_;
  AdamState adam_;
  std::map<int, std::size_t> view_index_;
};

}  // namespace

TrainResult train(const TrainConfig& config, const EncoderConfig& architecture, const Dataset& dataset,
                  std::size_t eval_threads) {
  Trainer trainer(config, architecture, dataset);
  return trainer.run(eval_threads);
}

}  // namespace viewseg
