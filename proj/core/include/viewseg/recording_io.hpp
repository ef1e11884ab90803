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

#include <filesystem>
#include <string>
#include <vector>

#include "viewseg/data.hpp"

namespace viewseg {

// Feature file (.tasf), little-endian:
//   "TASF", version u32 (=1), T u32, H u32, T*H f64 row-major.
// Label file (.tasl), little-endian:
//   "TASL", version u32 (=1), T u32, T u16 class ids.
// Decoding errors throw FormatError carrying the byte offset.
inline constexpr std::uint32_t kFeatureFileVersion = 1;
inline constexpr std::uint32_t kLabelFileVersion = 1;

std::string encode_features(const FeatureSequence& features);
FeatureSequence decode_features(const std::string& bytes);
std::string encode_labels(const LabelSequence& labels);
LabelSequence decode_labels(const std::string& bytes);

void write_features(const std::filesystem::path& path, const FeatureSequence& features);
FeatureSequence read_features(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const LabelSequence& labels);
LabelSequence read_labels(const std::filesystem::path& path);

// Feature and label file pair for one recording. Reading checks that both
// files agree on T.
void write_recording(const std::filesystem::path& features_path,
                     const std::filesystem::path& labels_path, const Recording& recording);
Recording read_recording(const std::filesystem::path& features_path,
                         const std::filesystem::path& labels_path, int sequence_id, int view_id);

// One class name per line; line number is the class id.
std::vector<std::string> read_class_names(const std::filesystem::path& path);
void write_class_names(const std::filesystem::path& path, const std::vector<std::string>& names);

// Plain-text labels, one class name per line, resolved against `class_names`.
LabelSequence read_text_labels(const std::filesystem::path& path,
                               const std::vector<std::string>& class_names);
void write_text_labels(const std::filesystem::path& path, const LabelSequence& labels,
                       const std::vector<std::string>& class_names);

// Dataset directory: dataset.json (index + segment scripts), split.json,
// classes.txt, features/*.tasf, labels/*.tasl.
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& dir);

std::string recording_stem(int sequence_id, int view_id);

}  // namespace viewseg
