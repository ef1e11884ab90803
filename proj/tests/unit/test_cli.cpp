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

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "viewseg/byte_io.hpp"
#include "viewseg/cli.hpp"
#include "viewseg/recording_io.hpp"

namespace fs = std::filesystem;
using viewseg::bytes::read_file;
using viewseg::bytes::write_file;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "viewseg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = viewseg::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("viewseg_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kGenerator = R"({"num_sequences": 4, "num_test_sequences": 2, "mean_segments": 3})";
const char* kModel = R"({"embed_dim": 6, "layers_per_stage": 2})";
const char* kTrain = R"({"epochs": 2, "steps_per_epoch": 3})";

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (const char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("gen, train and eval run end to end") {
  const auto dir = scratch("pipeline");
  write_file(dir / "gen.json", std::string(R"({"generator": )") + kGenerator + "}");
  REQUIRE(run({"gen", "--config", (dir / "gen.json").string(), "--out", (dir / "data").string()}).code == 0);
  CHECK(fs::exists(dir / "data" / "split.json"));
  CHECK(fs::exists(dir / "data" / "manifest.json"));

  write_file(dir / "train.json", R"({"dataset": ")" + (dir / "data").generic_string() + R"(", "model": )" +
                                     kModel + R"(, "train": )" + kTrain + "}");
  const auto trained = run({"train", "--config", (dir / "train.json").string(), "--out", (dir / "run").string()});
  REQUIRE(trained.code == 0);
  CHECK(fs::exists(dir / "run" / "checkpoint.ckpt"));
  CHECK(count_lines(read_file(dir / "run" / "train_log.csv")) == 3);

  write_file(dir / "eval.json", R"({"dataset": ")" + (dir / "data").generic_string() + R"(", "checkpoint": ")" +
                                    (dir / "run" / "checkpoint.ckpt").generic_string() + R"("})");
  REQUIRE(run({"eval", "--config", (dir / "eval.json").string(), "--out", (dir / "eval").string()}).code == 0);
  CHECK(read_file(dir / "eval" / "eval.csv") == read_file(dir / "run" / "eval.csv"));
  fs::remove_all(dir);
}

TEST_CASE("existing artifacts need --force and reruns reproduce bytes") {
  const auto dir = scratch("force");
  write_file(dir / "gen.json", std::string(R"({"generator": )") + kGenerator + "}");
  const std::vector<std::string> args{"gen", "--config", (dir / "gen.json").string(), "--out", (dir / "data").string(),
                                      "--seed", "5"};
  REQUIRE(run(args).code == 0);
  const std::string manifest = read_file(dir / "data" / "manifest.json");
  const auto refused = run(args);
  CHECK(refused.code == 1);
  CHECK(refused.err.find("--force") != std::string::npos);
  auto forced = args;
  forced.push_back("--force");
  REQUIRE(run(forced).code == 0);
  CHECK(read_file(dir / "data" / "manifest.json") == manifest);
  CHECK(manifest.find("\"seed\": 5") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("score with identical predictions gives 100") {
  const auto dir = scratch("score");
  fs::create_directories(dir / "pred");
  fs::create_directories(dir / "gt");
  const std::vector<std::string> names{"open", "close"};
  viewseg::write_class_names(dir / "classes.txt", names);
  viewseg::write_labels(dir / "gt" / "a.tasl", {0, 0, 1, 1, 0});
  viewseg::write_labels(dir / "pred" / "a.tasl", {0, 0, 1, 1, 0});
  viewseg::write_text_labels(dir / "gt" / "b.txt", {1, 1, 0}, names);
  viewseg::write_text_labels(dir / "pred" / "b.txt", {1, 1, 0}, names);
  write_file(dir / "score.json", R"({"predictions": ")" + (dir / "pred").generic_string() + R"(", "ground_truth": ")" +
                                     (dir / "gt").generic_string() + R"(", "classes": ")" +
                                     (dir / "classes.txt").generic_string() + R"("})");
  REQUIRE(run({"score", "--config", (dir / "score.json").string(), "--out", (dir / "out").string()}).code == 0);
  CHECK(read_file(dir / "out" / "scores.csv") ==
        "group,f1_10,f1_25,f1_50,edit,acc,count\nall,100.0000,100.0000,100.0000,100.0000,100.0000,2\n");
  fs::remove_all(dir);
}

TEST_CASE("configuration errors exit with 1") {
  const auto dir = scratch("errors");
  write_file(dir / "broken.json", "{\"generator\": ");
  CHECK(run({"gen", "--config", (dir / "broken.json").string(), "--out", (dir / "a").string()}).code == 1);
  write_file(dir / "unknown.json", R"({"generator": {"colour": 3}})");
  CHECK(run({"gen", "--config", (dir / "unknown.json").string(), "--out", (dir / "b").string()}).code == 1);
  write_file(dir / "extra.json", R"({"model": {}})");
  CHECK(run({"gen", "--config", (dir / "extra.json").string(), "--out", (dir / "c").string()}).code == 1);
  CHECK(run({"gen", "--config", (dir / "missing.json").string(), "--out", (dir / "d").string()}).code == 1);
  CHECK(run({"eval", "--out", (dir / "e").string()}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"gen"}).code == 1);
  write_file(dir / "bad.ckpt", "VSEGCKPT\x02");
  write_file(dir / "eval.json", R"({"checkpoint": ")" + (dir / "bad.ckpt").generic_string() + R"("})");
  CHECK(run({"eval", "--config", (dir / "eval.json").string(), "--out", (dir / "f").string()}).code == 1);
  fs::remove_all(dir);
}

TEST_CASE("gradcheck writes its table") {
  const auto dir = scratch("gradcheck");
  write_file(dir / "gc.json", R"({"trials": 2})");
  const auto r = run({"gradcheck", "--config", (dir / "gc.json").string(), "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(read_file(dir / "gradcheck.csv").rfind("case,trials,max_error\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("bench has one row per method per view group") {
  const auto dir = scratch("bench");
  write_file(dir / "bench.json", std::string(R"({"generator": )") + kGenerator + R"(, "model": )" + kModel +
                                     R"(, "train": {"epochs": 1, "steps_per_epoch": 2}, "methods": ["baseline", "ours", "advloss"], "seeds": [0]})");
  REQUIRE(run({"bench", "--config", (dir / "bench.json").string(), "--out", dir.string()}).code == 0);
  const std::string csv = read_file(dir / "bench.csv");
  CHECK(csv.rfind("method,group,f1_10,f1_25,f1_50,edit,acc,count\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 3 * 3);
  CHECK(fs::exists(dir / "cells" / "ours_seed0" / "checkpoint.ckpt"));
  fs::remove_all(dir);
}

TEST_CASE("VIEWSEG_THREADS must be a positive integer") {
  const auto dir = scratch("threads");
  write_file(dir / "bench.json", std::string(R"({"generator": )") + kGenerator + R"(, "model": )" + kModel +
                                     R"(, "train": {"epochs": 1, "steps_per_epoch": 1}, "methods": ["baseline"], "seeds": [0]})");
  setenv("VIEWSEG_THREADS", "zero", 1);
  CHECK(run({"bench", "--config", (dir / "bench.json").string(), "--out", dir.string()}).code == 1);
  setenv("VIEWSEG_THREADS", "1", 1);
  CHECK(run({"bench", "--config", (dir / "bench.json").string(), "--out", dir.string()}).code == 0);
  unsetenv("VIEWSEG_THREADS");
  fs::remove_all(dir);
}
