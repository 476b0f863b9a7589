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

#include "container.hpp"

#include <cstring>
#include <fstream>

#include "error.hpp"

namespace slid {

uint32_t Crc32(const void* data, size_t size) {
  static uint32_t table[256];
  static bool table_ready = false;
  if (!table_ready) {
    for (uint32_t i = 0; i < 256; ++i) {
      uint32_t c = i;
      for (int k = 0; k < 8; ++k) {
        c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      }
      table[i] = c;
    }
    table_ready = true;
  }
  uint32_t crc = 0xffffffffu;
  const uint8_t* bytes = static_cast<const uint8_t*>(data);
  for (size_t i = 0; i < size; ++i) {
    crc = table[(crc ^ bytes[i]) & 0xffu] ^ (crc >> 8);
  }
  return crc ^ 0xffffffffu;
}

namespace {

void PutU32(std::vector<uint8_t>* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void PutU64(std::vector<uint8_t>* out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void PutString(std::vector<uint8_t>* out, const std::string& s) {
  PutU32(out, static_cast<uint32_t>(s.size()));
  out->insert(out->end(), s.begin(), s.end());
}

class Reader {
 public:
  Reader(const std::vector<uint8_t>& bytes) : bytes_(bytes) {}

  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  uint64_t U64() {
    Need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::string String() {
    const uint32_t len = U32();
    Need(len);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
    pos_ += len;
    return s;
  }
  const uint8_t* Raw(size_t n) {
    Need(n);
    const uint8_t* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void Need(size_t n) {
    if (pos_ + n > bytes_.size()) {
      ThrowModel("model container is truncated (checksum region unreadable)");
    }
  }
  const std::vector<uint8_t>& bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> SerializeContainer(const ModelContainer& container) {
  // Payload first: dense, in tensor-name order (map order).
  std::vector<uint8_t> payload;
  std::vector<uint64_t> offsets;
  offsets.reserve(container.tensors.size());
  for (const auto& [name, tensor] : container.tensors) {
    if (tensor.NumElements() != static_cast<int64_t>(tensor.data.size())) {
      ThrowInvalidInput("tensor '" + name + "' dims do not match its data size");
    }
    offsets.push_back(payload.size());
    const size_t bytes = tensor.data.size() * sizeof(float);
    const size_t old = payload.size();
    payload.resize(old + bytes);
    std::memcpy(payload.data() + old, tensor.data.data(), bytes);
  }

  std::vector<uint8_t> out;
  out.insert(out.end(), kContainerMagic, kContainerMagic + 8);
  PutU32(&out, kContainerVersion);
  PutU32(&out, static_cast<uint32_t>(container.tensors.size()));
  size_t idx = 0;
  for (const auto& [name, tensor] : container.tensors) {
    PutString(&out, name);
    PutU32(&out, 0);  // element type: float32
    PutU32(&out, static_cast<uint32_t>(tensor.dims.size()));
    for (int64_t d : tensor.dims) PutU64(&out, static_cast<uint64_t>(d));
    PutU64(&out, offsets[idx++]);
  }
  PutU32(&out, static_cast<uint32_t>(container.metadata.size()));
  for (const auto& [key, value] : container.metadata) {
    PutString(&out, key);
    PutString(&out, value);
  }
  PutU64(&out, payload.size());
  PutU32(&out, Crc32(payload.data(), payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

ModelContainer DeserializeContainer(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kContainerMagic, 8) != 0) {
    ThrowModel("not a model container (bad magic)");
  }
  Reader reader(bytes);
  reader.Raw(8);  // magic already checked
  const uint32_t version = reader.U32();
  if (version != kContainerVersion) {
    ThrowModel("unsupported model container version " + std::to_string(version));
  }

  struct Entry {
    std::string name;
    std::vector<int64_t> dims;
    uint64_t offset;
    uint64_t bytes;
  };
  const uint32_t num_tensors = reader.U32();
  std::vector<Entry> entries;
  entries.reserve(num_tensors);
  for (uint32_t i = 0; i < num_tensors; ++i) {
    Entry e;
    e.name = reader.String();
    const uint32_t dtype = reader.U32();
    if (dtype != 0) ThrowModel("tensor '" + e.name + "' has unsupported element type");
    const uint32_t rank = reader.U32();
    int64_t count = 1;
    for (uint32_t r = 0; r < rank; ++r) {
      const int64_t d = static_cast<int64_t>(reader.U64());
      e.dims.push_back(d);
      count *= d;
    }
    e.offset = reader.U64();
    e.bytes = static_cast<uint64_t>(count) * sizeof(float);
    entries.push_back(std::move(e));
  }

  ModelContainer container;
  const uint32_t num_metadata = reader.U32();
  for (uint32_t i = 0; i < num_metadata; ++i) {
    std::string key = reader.String();
    std::string value = reader.String();
    container.metadata[std::move(key)] = std::move(value);
  }

  const uint64_t payload_size = reader.U64();
  const uint32_t expected_crc = reader.U32();
  if (reader.remaining() != payload_size) {
    ThrowModel("model container payload size mismatch (checksum failure)");
  }
  const uint8_t* payload = reader.Raw(payload_size);
  if (Crc32(payload, payload_size) != expected_crc) {
    ThrowModel("model container payload checksum failure");
  }

  // Offset sanity: unique names, in-range non-overlapping spans.
  uint64_t expected_offset = 0;
  for (const Entry& e : entries) {
    if (container.tensors.count(e.name)) {
      ThrowModel("duplicate tensor name: " + e.name);
    }
    if (e.offset != expected_offset || e.offset + e.bytes > payload_size) {
      ThrowModel("tensor '" + e.name + "' has an invalid payload offset");
    }
    expected_offset += e.bytes;
    Tensor t;
    t.dims = e.dims;
    t.data.resize(e.bytes / sizeof(float));
    std::memcpy(t.data.data(), payload + e.offset, e.bytes);
    container.tensors[e.name] = std::move(t);
  }
  return container;
}

void SaveContainer(const ModelContainer& container, const std::string& path) {
  const std::vector<uint8_t> bytes = SerializeContainer(container);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write model file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing model file: " + path);
}

ModelContainer LoadContainer(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(ErrorCode::kIo, "cannot open model file: " + path);
  const std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<uint8_t> bytes(static_cast<size_t>(size));
  in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) throw Error(ErrorCode::kIo, "failed reading model file: " + path);
  return DeserializeContainer(bytes);
}

}  // namespace slid
