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

#include "viewseg/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "viewseg/byte_io.hpp"
#include "viewseg/checkpoint.hpp"
#include "viewseg/config_json.hpp"
#include "viewseg/errors.hpp"
#include "viewseg/evaluate.hpp"
#include "viewseg/experiment.hpp"
#include "viewseg/generator.hpp"
#include "viewseg/gradcheck_suite.hpp"
#include "viewseg/hashing.hpp"
#include "viewseg/recording_io.hpp"
#include "viewseg/trainer.hpp"

#ifndef VIEWSEG_VERSION
#define VIEWSEG_VERSION "0.0.0"
#endif

namespace viewseg::cli {
namespace {

namespace fs = std::filesystem;
using Json = json_config::Json;

constexpr double kGradTolerance = 1e-4;
constexpr const char* kManifest = "manifest.json";

struct CommandOptions {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool force = false;
};

Json load_config(const CommandOptions& opts) {
  if (opts.config.empty()) return Json::object();
  Json j = json_config::parse(bytes::read_file(opts.config), opts.config);
  if (!j.is_object()) throw ArgumentError(opts.config + ": expected a JSON object");
  return j;
}

void allow_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& command) {
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!names.count(key)) throw ArgumentError(command + " config: unknown field '" + key + "'");
  }
}

Json section(const Json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? Json::object() : *it;
}

std::string string_field(const Json& j, const char* key, const std::string& command) {
  const auto it = j.find(key);
  if (it == j.end()) throw ArgumentError(command + " config: missing '" + key + "'");
  if (!it->is_string()) throw ArgumentError(command + " config: '" + key + "' must be a string");
  return it->get<std::string>();
}

std::size_t thread_cap() {
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VIEWSEG_THREADS")) {
    char* end = nullptr;
    const long long value = std::strtoll(env, &end, 10);
    if (end == env || *end != '\0' || value < 1) {
      throw ArgumentError(std::string("VIEWSEG_THREADS must be a positive integer, got '") + env + "'");
    }
    threads = std::min<std::size_t>(threads, static_cast<std::size_t>(value));
  }
  return threads;
}

// Creates the output directory; existing artifacts are an error unless
// forced, in which case they are removed first.
void prepare_output(const fs::path& out, std::vector<std::string> artifacts, bool force) {
  artifacts.push_back(kManifest);
  for (const auto& a : artifacts) {
    if (!fs::exists(out / a)) continue;
    if (!force) {
      throw ArgumentError((out / a).string() + " already exists; pass --force to overwrite");
    }
    fs::remove_all(out / a);
  }
  fs::create_directories(out);
}

// Relative path -> SHA-256 for every regular file under `root`.
std::map<std::string, std::string> hash_files(const fs::path& base, const fs::path& root) {
  std::map<std::string, std::string> out;
  if (fs::is_regular_file(root)) {
    out[fs::relative(root, base).generic_string()] = sha256_file(root);
    return out;
  }
  if (!fs::is_directory(root)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) out[fs::relative(entry.path(), base).generic_string()] = sha256_file(entry.path());
  }
  return out;
}

// Digest of a file, or of a directory as the hash of its sorted file list.
std::string input_digest(const fs::path& path) {
  if (fs::is_regular_file(path)) return sha256_file(path);
  if (!fs::is_directory(path)) throw ArgumentError(path.string() + ": no such file or directory");
  std::string listing;
  for (const auto& [name, hash] : hash_files(path, path)) listing += name + " " + hash + "\n";
  return sha256_hex(listing);
}

void write_text(const fs::path& path, const std::string& text) { bytes::write_file(path, text); }

void write_manifest(const fs::path& out, const std::string& command, const Json& seed,
                    const Json& config, const Json& inputs, const std::vector<std::string>& artifacts) {
  Json hashes = Json::object();
  std::map<std::string, std::string> all;
  for (const auto& a : artifacts) all.merge(hash_files(out, out / a));
  for (const auto& [name, hash] : all) hashes[name] = hash;
  Json m;
  m["tool"] = "viewseg";
  m["version"] = VIEWSEG_VERSION;
  m["command"] = command;
  m["seed"] = seed;
  m["config"] = config;
  m["inputs"] = inputs;
  m["artifacts"] = hashes;
  write_text(out / kManifest, m.dump(2) + "\n");
}

// Dataset named by "dataset" (a directory written by `gen`), or generated
// in memory from the "generator" section.
Dataset obtain_dataset(const Json& cfg, Json& resolved, Json& inputs) {
  if (cfg.contains("dataset")) {
    if (cfg.contains("generator")) throw ArgumentError("config: give either 'dataset' or 'generator', not both");
    const std::string path = string_field(cfg, "dataset", "config");
    resolved["dataset"] = path;
    inputs["dataset"] = input_digest(path);
    return load_dataset(path);
  }
  const GeneratorConfig gen = json_config::generator_from_json(section(cfg, "generator"));
  resolved["generator"] = json_config::to_json(gen);
  return generate_synthetic(gen);
}

MetricOptions metric_options(const Json& cfg, Json& resolved) {
  MetricOptions options;
  if (const auto it = cfg.find("ignore_labels"); it != cfg.end()) {
    try {
      const auto labels = it->get<std::vector<int>>();
      options.ignore_labels.insert(labels.begin(), labels.end());
    } catch (const nlohmann::json::exception& e) {
      throw ArgumentError(std::string("ignore_labels: ") + e.what());
    }
  }
  resolved["ignore_labels"] = std::vector<int>(options.ignore_labels.begin(), options.ignore_labels.end());
  return options;
}

int cmd_gen(const CommandOptions& opts, std::ostream& out) {
  const Json cfg = load_config(opts);
  allow_keys(cfg, {"generator"}, "gen");
  GeneratorConfig gen = json_config::generator_from_json(section(cfg, "generator"));
  if (opts.seed_given) gen.seed = opts.seed;
  const std::vector<std::string> artifacts = {"dataset.json", "split.json", "classes.txt", "features", "labels"};
  prepare_output(opts.out, artifacts, opts.force);
  const Dataset dataset = generate_synthetic(gen);
  save_dataset(opts.out, dataset);
  Json resolved;
  resolved["generator"] = json_config::to_json(gen);
  write_manifest(opts.out, "gen", gen.seed, resolved, Json::object(), artifacts);
  out << "wrote " << dataset.recordings.size() << " recordings to " << opts.out << "\n";
  return kExitOk;
}

int cmd_train(const CommandOptions& opts, std::ostream& out) {
  const Json cfg = load_config(opts);
  allow_keys(cfg, {"dataset", "generator", "model", "train"}, "train");
  Json resolved;
  Json inputs = Json::object();
  const Dataset dataset = obtain_dataset(cfg, resolved, inputs);
  EncoderConfig arch = json_config::encoder_from_json(section(cfg, "model"));
  arch.input_dim = dataset.feature_dim;
  arch.num_classes = dataset.num_classes;
  TrainConfig train_cfg = json_config::train_from_json(section(cfg, "train"));
  if (opts.seed_given) train_cfg.seed = opts.seed;
  resolved["model"] = json_config::to_json(arch);
  resolved["train"] = json_config::to_json(train_cfg);

  const std::vector<std::string> artifacts = {"checkpoint.ckpt", "train_log.csv", "eval.csv"};
  prepare_output(opts.out, artifacts, opts.force);
  const TrainResult result = train(train_cfg, arch, dataset, thread_cap());
  const fs::path dir = opts.out;
  save_checkpoint(dir / "checkpoint.ckpt", result.state);
  write_text(dir / "train_log.csv", train_log_to_csv(result.log));
  const std::string report = report_to_csv(result.final_report);
  write_text(dir / "eval.csv", report);
  write_manifest(dir, "train", train_cfg.seed, resolved, inputs, artifacts);
  out << report;
  return kExitOk;
}

int cmd_eval(const CommandOptions& opts, std::ostream& out) {
  const Json cfg = load_config(opts);
  allow_keys(cfg, {"dataset", "generator", "checkpoint", "ignore_labels"}, "eval");
  Json resolved;
  Json inputs = Json::object();
  const std::string checkpoint = string_field(cfg, "checkpoint", "eval");
  resolved["checkpoint"] = checkpoint;
  inputs["checkpoint"] = input_digest(checkpoint);
  const ModelState state = load_checkpoint(checkpoint);
  const Dataset dataset = obtain_dataset(cfg, resolved, inputs);
  const MetricOptions options = metric_options(cfg, resolved);
  if (state.config.input_dim != dataset.feature_dim || state.config.num_classes != dataset.num_classes) {
    throw ArgumentError("checkpoint expects " + std::to_string(state.config.input_dim) + "-dim features and " +
                        std::to_string(state.config.num_classes) + " classes; dataset has " +
                        std::to_string(dataset.feature_dim) + " and " + std::to_string(dataset.num_classes));
  }
  const std::vector<std::string> artifacts = {"eval.csv"};
  prepare_output(opts.out, artifacts, opts.force);
  const EvalReport report = evaluate_all(state, dataset, options, thread_cap());
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  const std::string csv = report_to_csv(report);
  write_text(fs::path(opts.out) / "eval.csv", csv);
  write_manifest(opts.out, "eval", nullptr, resolved, inputs, artifacts);
  out << csv;
  return kExitOk;
}

LabelSequence read_any_labels(const fs::path& path, const std::optional<std::vector<std::string>>& classes) {
  if (path.extension() == ".tasl") return read_labels(path);
  if (!classes) throw ArgumentError(path.string() + ": text label files need a 'classes' file");
  return read_text_labels(path, *classes);
}

int cmd_score(const CommandOptions& opts, std::ostream& out) {
  const Json cfg = load_config(opts);
  allow_keys(cfg, {"predictions", "ground_truth", "classes", "ignore_labels"}, "score");
  Json resolved;
  Json inputs = Json::object();
  const fs::path pred = string_field(cfg, "predictions", "score");
  const fs::path gt = string_field(cfg, "ground_truth", "score");
  resolved["predictions"] = pred.string();
  resolved["ground_truth"] = gt.string();
  inputs["predictions"] = input_digest(pred);
  inputs["ground_truth"] = input_digest(gt);
  std::optional<std::vector<std::string>> classes;
  if (cfg.contains("classes")) {
    const std::string path = string_field(cfg, "classes", "score");
    resolved["classes"] = path;
    inputs["classes"] = input_digest(path);
    classes = read_class_names(path);
  } else {
    resolved["classes"] = nullptr;
  }
  const MetricOptions options = metric_options(cfg, resolved);

  std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> pairs;
  if (fs::is_directory(gt)) {
    if (!fs::is_directory(pred)) throw ArgumentError("predictions must be a directory when ground_truth is");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(gt)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const fs::path p = pred / f.filename();
      if (!fs::exists(p)) throw ArgumentError("no prediction for " + f.filename().string());
      pairs.push_back({f.filename().string(), {p, f}});
    }
  } else {
    pairs.push_back({gt.filename().string(), {pred, gt}});
  }
  if (pairs.empty()) throw ArgumentError(gt.string() + ": no label files");

  const std::vector<std::string> artifacts = {"scores.csv", "recordings.csv"};
  prepare_output(opts.out, artifacts, opts.force);
  std::string detail = "recording,f1_10,f1_25,f1_50,edit,acc\n";
  GroupMetrics all;
  all.name = "all";
  char buf[256];
  for (const auto& [name, files] : pairs) {
    const LabelSequence p = read_any_labels(files.first, classes);
    const LabelSequence g = read_any_labels(files.second, classes);
    if (p.size() != g.size()) {
      throw ArgumentError(name + ": prediction has " + std::to_string(p.size()) + " frames, ground truth " +
                          std::to_string(g.size()));
    }
    const RecordingScore s = score_recording(p, g, options);
    std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.4f,%.4f,%.4f\n", s.f1_10, s.f1_25, s.f1_50, s.edit, s.acc);
    detail += name + buf;
    all.f1_10 += s.f1_10;
    all.f1_25 += s.f1_25;
    all.f1_50 += s.f1_50;
    all.edit += s.edit;
    all.acc += s.acc;
  }
  const double n = static_cast<double>(pairs.size());
  all.f1_10 /= n;
  all.f1_25 /= n;
  all.f1_50 /= n;
  all.edit /= n;
  all.acc /= n;
  all.count = pairs.size();
  EvalReport report;
  report.groups.push_back(all);
  const std::string csv = report_to_csv(report);
  write_text(fs::path(opts.out) / "scores.csv", csv);
  write_text(fs::path(opts.out) / "recordings.csv", detail);
  write_manifest(opts.out, "score", nullptr, resolved, inputs, artifacts);
  out << csv;
  return kExitOk;
}

int cmd_gradcheck(const CommandOptions& opts, std::ostream& out) {
  const Json cfg = load_config(opts);
  allow_keys(cfg, {"trials", "seed"}, "gradcheck");
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  try {
    if (cfg.contains("trials")) trials = cfg.at("trials").get<std::size_t>();
    if (cfg.contains("seed")) seed = cfg.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("gradcheck config: ") + e.what());
  }
  if (trials == 0) throw ArgumentError("gradcheck config: trials must be positive");
  if (opts.seed_given) seed = opts.seed;
  Json resolved;
  resolved["trials"] = trials;
  resolved["seed"] = seed;

  const std::vector<std::string> artifacts = {"gradcheck.csv"};
  prepare_output(opts.out, artifacts, opts.force);
  const auto results = run_gradcheck_suite(trials, seed);
  std::string csv = "case,trials,max_error\n";
  double worst = 0.0;
  char buf[256];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%.6e\n", r.name.c_str(), r.trials, r.max_error);
    csv += buf;
    if (!(r.max_error <= worst)) worst = r.max_error;
  }
  write_text(fs::path(opts.out) / "gradcheck.csv", csv);
  write_manifest(opts.out, "gradcheck", seed, resolved, Json::object(), artifacts);
  out << csv;
  const bool pass = worst <= kGradTolerance;
  std::snprintf(buf, sizeof buf, "max relative error %.3e (tolerance %.0e): %s\n", worst, kGradTolerance,
                pass ? "PASS" : "FAIL");
  out << buf;
  return pass ? kExitOk : kExitGradcheckFailed;
}

int cmd_bench(const CommandOptions& opts, std::ostream& out) {
  const Json cfg = load_config(opts);
  allow_keys(cfg, {"generator", "model", "train", "methods", "seeds"}, "bench");
  BenchConfig bench;
  bench.generator = json_config::generator_from_json(section(cfg, "generator"));
  bench.model = json_config::encoder_from_json(section(cfg, "model"));
  bench.train = json_config::train_from_json(section(cfg, "train"));
  try {
    if (cfg.contains("methods")) {
      bench.methods.clear();
      for (const auto& name : cfg.at("methods").get<std::vector<std::string>>()) {
        bench.methods.push_back(method_from_string(name));
      }
    }
    if (cfg.contains("seeds")) bench.seeds = cfg.at("seeds").get<std::vector<std::uint64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("bench config: ") + e.what());
  }
  if (opts.seed_given) {
    bench.generator.seed = opts.seed;
    bench.train.seed = opts.seed;
  }
  bench.model.input_dim = bench.generator.feature_dim;
  bench.model.num_classes = bench.generator.num_classes;
  bench.validate();

  Json resolved;
  resolved["generator"] = json_config::to_json(bench.generator);
  resolved["model"] = json_config::to_json(bench.model);
  resolved["train"] = json_config::to_json(bench.train);
  Json methods = Json::array();
  for (auto m : bench.methods) methods.push_back(std::string(to_string(m)));
  resolved["methods"] = methods;
  resolved["seeds"] = bench.seeds;

  const std::vector<std::string> artifacts = {"bench.csv", "cells"};
  prepare_output(opts.out, artifacts, opts.force);
  const fs::path root = opts.out;
  const BenchResult result = run_bench(bench, thread_cap(), [&](const BenchCell& cell) {
    const fs::path dir = root / "cells" / (std::string(to_string(cell.method)) + "_seed" + std::to_string(cell.seed));
    save_checkpoint(dir / "checkpoint.ckpt", cell.result.state);
    write_text(dir / "train_log.csv", train_log_to_csv(cell.result.log));
    write_text(dir / "eval.csv", report_to_csv(cell.result.final_report));
    out << "finished " << to_string(cell.method) << " seed " << cell.seed << "\n";
  });
  const std::string csv = bench_to_csv(result);
  write_text(root / "bench.csv", csv);
  write_manifest(root, "bench", bench.train.seed, resolved, Json::object(), artifacts);
  out << csv;
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"viewseg: multi-view temporal action segmentation experiments"};
  app.require_subcommand(1);
  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const CommandOptions&, std::ostream&);
  };
  const Entry entries[] = {
      {"gen", "generate a synthetic multi-view dataset", cmd_gen},
      {"train", "train a model and write its checkpoint and log", cmd_train},
      {"eval", "evaluate a checkpoint per view group", cmd_eval},
      {"score", "score predicted label files against ground truth", cmd_score},
      {"gradcheck", "run the finite-difference gradient suite", cmd_gradcheck},
      {"bench", "run the method comparison grid", cmd_bench},
  };
  CommandOptions opts;
  std::vector<std::pair<CLI::App*, const Entry*>> subcommands;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", opts.config, "JSON config file (defaults when omitted)");
    sub->add_option("--out", opts.out, "output directory")->required();
    sub->add_option("--seed", opts.seed, "override the config seed");
    sub->add_flag("--force", opts.force, "overwrite existing artifacts");
    subcommands.emplace_back(sub, &e);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }
  for (const auto& [sub, entry] : subcommands) {
    if (!sub->parsed()) continue;
    opts.seed_given = sub->count("--seed") > 0;
    try {
      return entry->fn(opts, out);
    } catch (const FormatError& e) {
      err << "viewseg " << entry->name << ": format error: " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
      err << "viewseg " << entry->name << ": " << e.what() << "\n";
    } catch (const fs::filesystem_error& e) {
      err << "viewseg " << entry->name << ": " << e.what() << "\n";
    } catch (const std::exception& e) {
      err << "viewseg " << entry->name << ": error: " << e.what() << "\n";
    }
    return kExitError;
  }
  return kExitError;
}

}  // namespace viewseg::cli
