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

#include "viewseg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "viewseg/errors.hpp"
#include "viewseg/generator.hpp"

namespace viewseg {

void BenchConfig::validate() const {
  generator.validate();
  model.validate();
  train.validate();
  if (methods.empty()) throw ArgumentError("bench: methods must not be empty");
  if (seeds.empty()) throw ArgumentError("bench: seeds must not be empty");
}

EvalReport BenchResult::mean(std::size_t method_index) const {
  return average_reports(reports.at(method_index));
}

EvalReport average_reports(std::span<const EvalReport> reports) {
  EvalReport out;
  if (reports.empty()) return out;
  for (const auto& first : reports.front().groups) {
    GroupMetrics g;
    g.name = first.name;
    bool complete = true;
    for (const auto& r : reports) {
      const GroupMetrics* m = r.find(first.name);
      if (!m) {
        complete = false;
        break;
      }
      g.f1_10 += m->f1_10;
      g.f1_25 += m->f1_25;
      g.f1_50 += m->f1_50;
      g.edit += m->edit;
      g.acc += m->acc;
      g.count += m->count;
    }
    if (!complete) {
      out.warnings.push_back("group '" + first.name + "' missing from some reports; dropped");
      continue;
    }
    const double n = static_cast<double>(reports.size());
    g.f1_10 /= n;
    g.f1_25 /= n;
    g.f1_50 /= n;
    g.edit /= n;
    g.acc /= n;
    out.groups.push_back(g);
  }
  return out;
}

BenchResult run_bench(const BenchConfig& config, std::size_t threads,
                      const std::function<void(const BenchCell&)>& on_cell) {
  config.validate();
  BenchResult result;
  result.methods = config.methods;
  result.seeds = config.seeds;
  result.reports.assign(config.methods.size(), std::vector<EvalReport>(config.seeds.size()));

  std::vector<Dataset> datasets;
  datasets.reserve(config.seeds.size());
  for (const auto seed : config.seeds) {
    GeneratorConfig g = config.generator;
    g.seed = config.generator.seed + seed;
    datasets.push_back(generate_synthetic(g));
  }

  const std::size_t total = config.methods.size() * config.seeds.size();
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t cell = next.fetch_add(1);
      if (cell >= total) return;
      {
        std::lock_guard lock(mutex);
        if (failure) return;
      }
      const std::size_t m = cell / config.seeds.size();
      const std::size_t s = cell % config.seeds.size();
      try {
        BenchCell out;
        out.method = config.methods[m];
        out.seed = config.seeds[s];
        out.train = config.train;
        out.train.method = out.method;
        out.train.seed = config.train.seed + out.seed;
        out.result = train(out.train, config.model, datasets[s]);
        std::lock_guard lock(mutex);
        result.reports[m][s] = out.result.final_report;
        if (on_cell) on_cell(out);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_threads = std::clamp<std::size_t>(threads, 1, total);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

std::string bench_to_csv(const BenchResult& result) {
  std::string out = "method,group,f1_10,f1_25,f1_50,edit,acc,count\n";
  char buf[256];
  for (std::size_t m = 0; m < result.methods.size(); ++m) {
    const EvalReport mean = result.mean(m);
    const std::string method(to_string(result.methods[m]));
    for (const auto& g : mean.groups) {
      std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.4f,%.4f,%.4f,%zu\n", g.f1_10, g.f1_25, g.f1_50,
                    g.edit, g.acc, g.count);
      out += method + "," + g.name + buf;
    }
  }
  return out;
}

}  // namespace viewseg
