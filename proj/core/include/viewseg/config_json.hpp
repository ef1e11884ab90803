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

#include <json.hpp>

#include "viewseg/data.hpp"
#include "viewseg/losses.hpp"
#include "viewseg/model.hpp"
#include "viewseg/trainer.hpp"

// JSON forms of the configuration structs. Parsing starts from the defaults,
// so any field may be omitted; unknown fields are rejected with
// ArgumentError. Serialization always writes every field.
namespace viewseg::json_config {

using Json = nlohmann::ordered_json;

Json to_json(const GeneratorConfig& config);
Json to_json(const SplitSpec& split);
Json to_json(const EncoderConfig& config);
Json to_json(const LossWeights& weights);
Json to_json(const TrainConfig& config);

GeneratorConfig generator_from_json(const Json& j);
SplitSpec split_from_json(const Json& j);
EncoderConfig encoder_from_json(const Json& j);
LossWeights weights_from_json(const Json& j);
TrainConfig train_from_json(const Json& j);

// Parses text, rethrowing syntax errors as ArgumentError.
Json parse(const std::string& text, const std::string& source);

}  // namespace viewseg::json_config
