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

#include "viewseg/model.hpp"

namespace viewseg {

// Binary checkpoint, all integers little-endian:
//
//   "VSEGCKPT"          8-byte magic
//   version   u32       currently 1
//   count     u32       number of parameter blobs
//   count x blob:
//     length  u32       bytes in the rest of this blob
//     name    u32 length + UTF-8 bytes
//     rank    u32, then rank x u32 dims
//     data    prod(dims) x f64
//
// The model configuration is implied by parameter names and shapes.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const ModelState& state);
ModelState deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const ModelState& state);
ModelState load_checkpoint(const std::filesystem::path& path);

}  // namespace viewseg
