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

#ifndef SLID_NN_OPS_HPP_
#define SLID_NN_OPS_HPP_

#include <cmath>
#include <vector>

#include "tensor.hpp"

namespace slid {

inline float Sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }
inline double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline float Swish(float x) { return x * Sigmoid(x); }

// y = W x + b with W stored row-major [out, in].
inline void Linear(const Tensor& w, const Tensor& b, const float* x,
                   std::vector<float>* y) {
  const int64_t out_dim = w.dims[0];
  const int64_t in_dim = w.dims[1];
  y->resize(static_cast<size_t>(out_dim));
  const float* wp = w.data.data();
  for (int64_t o = 0; o < out_dim; ++o) {
    float acc = b.data[static_cast<size_t>(o)];
    const float* row = wp + o * in_dim;
    for (int64_t i = 0; i < in_dim; ++i) acc += row[i] * x[i];
    (*y)[static_cast<size_t>(o)] = acc;
  }
}

inline void LayerNorm(const Tensor& gain, const Tensor& bias, const float* x,
                      int dim, std::vector<float>* y, float eps = 1e-5f) {
  double mean = 0.0;
  for (int i = 0; i < dim; ++i) mean += x[i];
  mean /= dim;
  double var = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = x[i] - mean;
    var += d * d;
  }
  var /= dim;
  const float inv = 1.0f / std::sqrt(static_cast<float>(var) + eps);
  y->resize(dim);
  for (int i = 0; i < dim; ++i) {
    (*y)[i] = gain.data[i] * (static_cast<float>(x[i] - mean) * inv) + bias.data[i];
  }
}

// Numerically safe softmax over a contiguous buffer.
inline void SoftmaxInPlace(float* logits, int n) {
  float max_logit = logits[0];
  for (int i = 1; i < n; ++i) max_logit = std::max(max_logit, logits[i]);
  float denom = 0.0f;
  for (int i = 0; i < n; ++i) {
    logits[i] = std::exp(logits[i] - max_logit);
    denom += logits[i];
  }
  for (int i = 0; i < n; ++i) logits[i] /= denom;
}

// Multi-head scaled dot-product attention for one query over a causal
// window. `keys`/`values` hold pointers to d-dim vectors in temporal order,
// the last entry being the current step.
inline void AttendWindow(const std::vector<const float*>& keys,
                         const std::vector<const float*>& values,
                         const float* query, int dim, int num_heads,
                         std::vector<float>* out) {
  const int head_dim = dim / num_heads;
  const int window = static_cast<int>(keys.size());
  const float scale = 1.0f / std::sqrt(static_cast<float>(head_dim));
  out->assign(dim, 0.0f);
  std::vector<float> logits(window);
  for (int h = 0; h < num_heads; ++h) {
    const int base = h * head_dim;
    for (int s = 0; s < window; ++s) {
      float dot = 0.0f;
      const float* k = keys[s] + base;
      for (int i = 0; i < head_dim; ++i) dot += query[base + i] * k[i];
      logits[s] = dot * scale;
    }
    SoftmaxInPlace(logits.data(), window);
    for (int s = 0; s < window; ++s) {
      const float a = logits[s];
      const float* v = values[s] + base;
      for (int i = 0; i < head_dim; ++i) (*out)[base + i] += a * v[i];
    }
  }
}

}  // namespace slid

#endif  // SLID_NN_OPS_HPP_
