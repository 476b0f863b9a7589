// Copyright 2026 The Slid Authors.
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

#ifndef SLID_CONTAINER_HPP_
#define SLID_CONTAINER_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tensor.hpp"

namespace slid {

// Single-file model container.
//
//   magic   8 bytes "SLIDMDL1"
//   u32     format version (1)
//   u32     tensor count
//   per tensor: u32 name length, name bytes, u32 element type (0 = f32),
//               u32 rank, u64 dims[rank], u64 byte offset into payload
//   u32     metadata count
//   per entry: u32 key length, key, u32 value length, value
//   u64     payload size in bytes
//   u32     CRC-32 of the payload
//   payload raw little-endian float32 data
//
// Offsets are assigned densely in tensor-name order; the loader rejects
// overlapping or out-of-range offsets, bad magic, unknown versions and
// checksum mismatches with distinct errors.
struct ModelContainer {
  NamedTensorMap tensors;
  std::map<std::string, std::string> metadata;
};

inline constexpr char kContainerMagic[8] = {'S', 'L', 'I', 'D', 'M', 'D', 'L', '1'};
inline constexpr uint32_t kContainerVersion = 1;

uint32_t Crc32(const void* data, size_t size);

std::vector<uint8_t> SerializeContainer(const ModelContainer& container);
ModelContainer DeserializeContainer(const std::vector<uint8_t>& bytes);

void SaveContainer(const ModelContainer& container, const std::string& path);
ModelContainer LoadContainer(const std::string& path);

}  // namespace slid

#endif  // SLID_CONTAINER_HPP_
