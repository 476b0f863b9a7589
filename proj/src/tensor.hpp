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

#ifndef SLID_TENSOR_HPP_
#define SLID_TENSOR_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "error.hpp"

namespace slid {

// Dense row-major float32 tensor. This is the unit of model storage; all
// heavy math runs on raw vectors, so no arithmetic lives here.
struct Tensor {
  std::vector<int64_t> dims;
  std::vector<float> data;

  Tensor() = default;
  Tensor(std::vector<int64_t> d, std::vector<float> values)
      : dims(std::move(d)), data(std::move(values)) {}

  static Tensor Zeros(std::vector<int64_t> dims) {
    int64_t n = 1;
    for (int64_t d : dims) n *= d;
    return Tensor(std::move(dims), std::vector<float>(static_cast<size_t>(n), 0.0f));
  }

  int64_t NumElements() const {
    int64_t n = 1;
    for (int64_t d : dims) n *= d;
    return n;
  }

  int64_t Rank() const { return static_cast<int64_t>(dims.size()); }

  // Row-major element access for rank-2 tensors.
  float At(int64_t r, int64_t c) const { return data[static_cast<size_t>(r * dims[1] + c)]; }
  float& At(int64_t r, int64_t c) { return data[static_cast<size_t>(r * dims[1] + c)]; }
};

using NamedTensorMap = std::map<std::string, Tensor>;

inline const Tensor& GetTensor(const NamedTensorMap& map, const std::string& name) {
  auto it = map.find(name);
  if (it == map.end()) {
    throw Error(ErrorCode::kNotFound, "tensor not found: " + name);
  }
  return it->second;
}

inline void ExpectShape(const Tensor& t, const std::string& name,
                        const std::vector<int64_t>& dims) {
  if (t.dims != dims) {
    std::string want, got;
    for (int64_t d : dims) want += std::to_string(d) + " ";
    for (int64_t d : t.dims) got += std::to_string(d) + " ";
    ThrowConfig("tensor '" + name + "' has shape [ " + got + "], expected [ " + want + "]");
  }
}

}  // namespace slid

#endif  // SLID_TENSOR_HPP_
