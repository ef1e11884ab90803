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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle {

std::vector<Run> runs(const std::vector<int>& labels) {
  std::vector<Run> out;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (out.empty() || out.back().label != labels[t]) {
      out.push_back({labels[t], t, t + 1});
    } else {
      out.back().end = t + 1;
    }
  }
  return out;
}

double edit_score(const std::vector<int>& pred, const std::vector<int>& gt) {
  const auto p = runs(pred);
  const auto g = runs(gt);
  if (p.empty() && g.empty()) return 100.0;
  std::vector<std::vector<std::size_t>> d(p.size() + 1, std::vector<std::size_t>(g.size() + 1));
  for (std::size_t i = 0; i <= p.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= g.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= p.size(); ++i) {
    for (std::size_t j = 1; j <= g.size(); ++j) {
      const std::size_t sub = d[i - 1][j - 1] + (p[i - 1].label == g[j - 1].label ? 0 : 1);
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
    }
  }
  const double longest = static_cast<double>(std::max(p.size(), g.size()));
  return 100.0 * (1.0 - static_cast<double>(d[p.size()][g.size()]) / longest);
}

std::size_t max_matching(const std::vector<int>& pred, const std::vector<int>& gt, double tau) {
  const auto p = runs(pred);
  const auto g = runs(gt);
  std::vector<std::vector<std::size_t>> edges(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (p[i].label != g[j].label) continue;
      const std::size_t lo = std::max(p[i].start, g[j].start);
      const std::size_t hi = std::min(p[i].end, g[j].end);
      const double inter = hi > lo ? static_cast<double>(hi - lo) : 0.0;
      const double uni = static_cast<double>(std::max(p[i].end, g[j].end) - std::min(p[i].start, g[j].start));
      if (inter / uni >= tau) edges[i].push_back(j);
    }
  }
  // Augmenting paths (Kuhn).
  std::vector<long> owner(g.size(), -1);
  std::size_t matched = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::vector<bool> visited(g.size(), false);
    std::function<bool(std::size_t)> augment = [&](std::size_t u) {
      for (const std::size_t v : edges[u]) {
        if (visited[v]) continue;
        visited[v] = true;
        if (owner[v] < 0 || augment(static_cast<std::size_t>(owner[v]))) {
          owner[v] = static_cast<long>(u);
          return true;
        }
      }
      return false;
    };
    if (augment(i)) ++matched;
  }
  return matched;
}

double f1_from_matches(std::size_t tp, std::size_t pred_runs, std::size_t gt_runs) {
  if (pred_runs + gt_runs == 0) return 100.0;
  return 200.0 * static_cast<double>(tp) / static_cast<double>(pred_runs + gt_runs);
}

std::vector<int> random_labels(viewseg::Rng& rng, std::size_t frames, int classes, std::size_t max_run) {
  std::vector<int> out;
  while (out.size() < frames) {
    const int label = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(classes)));
    const std::size_t length = 1 + rng.uniform_index(max_run);
    for (std::size_t k = 0; k < length && out.size() < frames; ++k) out.push_back(label);
  }
  return out;
}

std::vector<int> perturb(const std::vector<int>& gt, viewseg::Rng& rng, int classes,
                         std::size_t jitter, double flip) {
  auto r = runs(gt);
  // Move each inner boundary, keeping every run at least one frame long.
  for (std::size_t k = 1; k < r.size(); ++k) {
    const auto shift = static_cast<long>(rng.uniform_index(2 * jitter + 1)) - static_cast<long>(jitter);
    const long lo = static_cast<long>(r[k - 1].start) + 1;
    const long hi = static_cast<long>(r[k].end) - 1;
    const long b = std::clamp(static_cast<long>(r[k].start) + shift, lo, hi);
    r[k - 1].end = static_cast<std::size_t>(b);
    r[k].start = static_cast<std::size_t>(b);
  }
  std::vector<int> out(gt.size());
  for (const auto& run : r) {
    int label = run.label;
    if (rng.uniform() < flip) label = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(classes)));
    for (std::size_t t = run.start; t < run.end; ++t) out[t] = label;
  }
  return out;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::max(std::sqrt(na), 1e-8) * std::max(std::sqrt(nb), 1e-8));
}

double info_nce(const std::vector<Entry>& batch, double temperature) {
  double total = 0.0;
  std::size_t anchors = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    double positives = 0.0, all = 0.0;
    bool has_positive = false;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      if (j == i) continue;
      const double e = std::exp(cosine(batch[i].vector, batch[j].vector) / temperature);
      all += e;
      if (batch[j].sequence_id == batch[i].sequence_id && batch[j].view_id != batch[i].view_id) {
        positives += e;
        has_positive = true;
      }
    }
    if (!has_positive) continue;
    total += -std::log(positives / all);
    ++anchors;
  }
  return total / static_cast<double>(anchors);
}

void make_identity_predictor(viewseg::ModelState& state) {
  const std::size_t d = state.config.embed_dim;
  auto set = [d](viewseg::Affine& layer, double shift) {
    auto w = layer.weight.mutable_values();
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) w[r * d + c] = r == c ? 1.0 : 0.0;
    }
    for (auto& b : layer.bias.mutable_values()) b = shift;
  };
  set(state.predictor.first, 50.0);
  set(state.predictor.second, 0.0);
  set(state.predictor.third, -50.0);
}

}  // namespace oracle
