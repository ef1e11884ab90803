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

#include "viewseg/recording_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "viewseg/byte_io.hpp"
#include "viewseg/config_json.hpp"

namespace viewseg {

namespace fs = std::filesystem;
using json_config::Json;

std::string encode_features(const FeatureSequence& features) {
  bytes::Writer w;
  w.raw("TASF");
  w.u32(kFeatureFileVersion);
  w.u32(static_cast<std::uint32_t>(features.frames));
  w.u32(static_cast<std::uint32_t>(features.dim));
  for (const double v : features.values) w.f64(v);
  return std::move(w.str());
}

FeatureSequence decode_features(const std::string& data) {
  bytes::Reader r(data, "feature file");
  r.expect_magic("TASF");
  const std::size_t version_at = r.position();
  if (r.u32("version") != kFeatureFileVersion) {
    throw FormatError("feature file: unsupported version", version_at);
  }
  const std::uint32_t frames = r.u32("frame count");
  const std::uint32_t dim = r.u32("feature dimension");
  if (dim == 0 && frames > 0) r.fail("zero feature dimension");
  const std::uint64_t count = static_cast<std::uint64_t>(frames) * dim;
  r.need(count * 8, "feature values");
  std::vector<double> values(count);
  for (auto& v : values) v = r.f64("feature values");
  if (r.remaining() != 0) r.fail("trailing bytes");
  return FeatureSequence(frames, dim, std::move(values));
}

std::string encode_labels(const LabelSequence& labels) {
  bytes::Writer w;
  w.raw("TASL");
  w.u32(kLabelFileVersion);
  w.u32(static_cast<std::uint32_t>(labels.size()));
  for (const int l : labels) {
    if (l < 0 || l > 0xFFFF) throw ArgumentError("label " + std::to_string(l) + " does not fit u16");
    w.u16(static_cast<std::uint16_t>(l));
  }
  return std::move(w.str());
}

LabelSequence decode_labels(const std::string& data) {
  bytes::Reader r(data, "label file");
  r.expect_magic("TASL");
  const std::size_t version_at = r.position();
  if (r.u32("version") != kLabelFileVersion) {
    throw FormatError("label file: unsupported version", version_at);
  }
  const std::uint32_t frames = r.u32("frame count");
  r.need(static_cast<std::size_t>(frames) * 2, "class ids");
  LabelSequence labels(frames);
  for (auto& l : labels) l = r.u16("class ids");
  if (r.remaining() != 0) r.fail("trailing bytes");
  return labels;
}

void write_features(const fs::path& path, const FeatureSequence& features) {
  bytes::write_file(path, encode_features(features));
}

FeatureSequence read_features(const fs::path& path) {
  return decode_features(bytes::read_file(path));
}

void write_labels(const fs::path& path, const LabelSequence& labels) {
  bytes::write_file(path, encode_labels(labels));
}

LabelSequence read_labels(const fs::path& path) { return decode_labels(bytes::read_file(path)); }

void write_recording(const fs::path& features_path, const fs::path& labels_path,
                     const Recording& recording) {
  write_features(features_path, recording.features);
  write_labels(labels_path, recording.labels);
}

Recording read_recording(const fs::path& features_path, const fs::path& labels_path,
                         int sequence_id, int view_id) {
  Recording rec;
  rec.sequence_id = sequence_id;
  rec.view_id = view_id;
  rec.features = read_features(features_path);
  rec.labels = read_labels(labels_path);
  if (rec.features.frames != rec.labels.size()) {
    throw FormatError(features_path.string() + " has " + std::to_string(rec.features.frames) +
                          " frames but " + labels_path.string() + " has " +
                          std::to_string(rec.labels.size()),
                      0);
  }
  return rec;
}

namespace {

std::vector<std::string> read_lines(const fs::path& path) {
  std::istringstream in(bytes::read_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::vector<std::string> read_class_names(const fs::path& path) {
  auto lines = read_lines(path);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

void write_class_names(const fs::path& path, const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += n + "\n";
  bytes::write_file(path, out);
}

LabelSequence read_text_labels(const fs::path& path, const std::vector<std::string>& class_names) {
  LabelSequence labels;
  std::uint64_t offset = 0;
  for (const auto& line : read_lines(path)) {
    const std::uint64_t line_start = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    const auto it = std::find(class_names.begin(), class_names.end(), line);
    if (it == class_names.end()) {
      throw FormatError(path.string() + ": unknown class name '" + line + "'", line_start);
    }
    labels.push_back(static_cast<int>(it - class_names.begin()));
  }
  return labels;
}

void write_text_labels(const fs::path& path, const LabelSequence& labels,
                       const std::vector<std::string>& class_names) {
  std::string out;
  for (const int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= class_names.size()) {
      throw ArgumentError("label " + std::to_string(l) + " has no class name");
    }
    out += class_names[static_cast<std::size_t>(l)] + "\n";
  }
  bytes::write_file(path, out);
}

std::string recording_stem(int sequence_id, int view_id) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "seq%04d_view%02d", sequence_id, view_id);
  return buf;
}

void save_dataset(const fs::path& dir, const Dataset& dataset) {
  dataset.validate();
  fs::create_directories(dir / "features");
  fs::create_directories(dir / "labels");
  Json index;
  index["format"] = "viewseg-dataset";
  index["version"] = 1;
  index["num_classes"] = dataset.num_classes;
  index["feature_dim"] = dataset.feature_dim;
  Json recordings = Json::array();
  for (const auto& rec : dataset.recordings) {
    const std::string stem = recording_stem(rec.sequence_id, rec.view_id);
    const std::string features = "features/" + stem + ".tasf";
    const std::string labels = "labels/" + stem + ".tasl";
    write_recording(dir / features, dir / labels, rec);
    recordings.push_back({{"sequence_id", rec.sequence_id},
                          {"view_id", rec.view_id},
                          {"features", features},
                          {"labels", labels}});
  }
  index["recordings"] = std::move(recordings);
  Json scripts = Json::object();
  for (const auto& [seq, segments] : dataset.scripts) {
    Json list = Json::array();
    for (const auto& s : segments) list.push_back({s.start, s.end, s.label});
    scripts[std::to_string(seq)] = std::move(list);
  }
  index["scripts"] = std::move(scripts);
  bytes::write_file(dir / "dataset.json", index.dump(2) + "\n");
  bytes::write_file(dir / "split.json", json_config::to_json(dataset.split).dump(2) + "\n");
  write_class_names(dir / "classes.txt", dataset.class_names);
}

Dataset load_dataset(const fs::path& dir) {
  const Json index = json_config::parse(bytes::read_file(dir / "dataset.json"),
                                        (dir / "dataset.json").string());
  Dataset dataset;
  try {
    if (index.at("format") != "viewseg-dataset" || index.at("version") != 1) {
      throw ArgumentError("unsupported dataset index");
    }
    dataset.num_classes = index.at("num_classes").get<std::size_t>();
    dataset.feature_dim = index.at("feature_dim").get<std::size_t>();
    for (const auto& entry : index.at("recordings")) {
      dataset.recordings.push_back(read_recording(dir / entry.at("features").get<std::string>(),
                                                  dir / entry.at("labels").get<std::string>(),
                                                  entry.at("sequence_id").get<int>(),
                                                  entry.at("view_id").get<int>()));
    }
    for (const auto& [key, list] : index.at("scripts").items()) {
      std::vector<Segment> segments;
      for (const auto& s : list) {
        segments.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>(), s.at(2).get<int>()});
      }
      dataset.scripts[std::stoi(key)] = std::move(segments);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError((dir / "dataset.json").string() + ": " + e.what());
  }
  dataset.split = json_config::split_from_json(
      json_config::parse(bytes::read_file(dir / "split.json"), (dir / "split.json").string()));
  dataset.class_names = read_class_names(dir / "classes.txt");
  dataset.validate();
  return dataset;
}

}  // namespace viewseg
