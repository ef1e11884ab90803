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

#include "viewseg/checkpoint.hpp"

#include <fstream>
#include <iterator>

#include "viewseg/byte_io.hpp"

namespace viewseg {

namespace bytes {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace bytes

std::string serialize_checkpoint(const ModelState& state) {
  const auto named = state.named_parameters();
  bytes::Writer w;
  w.raw("VSEGCKPT");
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(named.size()));
  for (const auto& [name, tensor] : named) {
    bytes::Writer blob;
    blob.u32(static_cast<std::uint32_t>(name.size()));
    blob.raw(name);
    blob.u32(static_cast<std::uint32_t>(tensor.rank()));
    for (const auto d : tensor.shape()) blob.u32(static_cast<std::uint32_t>(d));
    for (const double v : tensor.values()) blob.f64(v);
    w.u32(static_cast<std::uint32_t>(blob.size()));
    w.raw(blob.str());
  }
  return std::move(w.str());
}

ModelState deserialize_checkpoint(const std::string& data) {
  bytes::Reader r(data, "checkpoint");
  r.expect_magic("VSEGCKPT");
  const std::size_t version_at = r.position();
  if (r.u32("version") != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version", version_at);
  }
  const std::uint32_t count = r.u32("parameter count");
  std::vector<NamedTensor> named;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t length = r.u32("blob length");
    r.need(length, "parameter blob");
    const std::size_t blob_end = r.position() + length;
    const std::uint32_t name_len = r.u32("name length");
    std::string name = r.raw(name_len, "name");
    const std::uint32_t rank = r.u32("rank");
    if (rank == 0 || rank > 8) r.fail("implausible rank " + std::to_string(rank));
    ad::Shape shape;
    std::size_t numel = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      const std::uint32_t d = r.u32("dimension");
      if (d == 0) r.fail("zero dimension in '" + name + "'");
      shape.push_back(d);
      numel *= d;
    }
    if (blob_end - r.position() != numel * 8) {
      r.fail("blob length disagrees with shape of '" + name + "'");
    }
    std::vector<double> values(numel);
    for (auto& v : values) v = r.f64("parameter data");
    named.push_back({std::move(name), ad::Tensor::parameter(std::move(shape), std::move(values))});
  }
  if (r.remaining() != 0) r.fail("trailing bytes after last parameter");
  try {
    return ModelState::from_named(named);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("checkpoint: ") + e.what(), r.position());
  }
}

void save_checkpoint(const std::filesystem::path& path, const ModelState& state) {
  bytes::write_file(path, serialize_checkpoint(state));
}

ModelState load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(bytes::read_file(path));
}

}  // namespace viewseg
