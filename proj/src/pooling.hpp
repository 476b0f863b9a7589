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

#ifndef SLID_POOLING_HPP_
#define SLID_POOLING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "encoder.hpp"

namespace slid {

// Attentive temporal pooling. A scalar attention weight per step drives
// running sufficient statistics (weight total, weighted sum, weighted sum
// of squares) from which weighted mean / std are read out at any step.

constexpr double kAttentionEpsilon = 1e-4;

enum class PoolingMode {
  kMean,            // naive, equal weight
  kMeanStd,
  kWeightedMean,
  kWeightedMeanStd,
};

bool PoolingModeUsesStd(PoolingMode mode);
bool PoolingModeUsesAttention(PoolingMode mode);
const char* PoolingModeName(PoolingMode mode);
PoolingMode PoolingModeFromName(const std::string& name);

struct AttentionParams {
  std::vector<double> weight;  // model_dim
  double bias = 0.0;
};

// sigmoid(weight . h + bias) + epsilon, in (epsilon, 1 + epsilon).
double AttentionWeight(const std::vector<float>& h, const AttentionParams& params);
double AttentionWeight(const std::vector<double>& h, const AttentionParams& params);

// Sufficient statistics. Accumulators are 64-bit so hour-long streams stay
// within test tolerances even with float32 embeddings.
struct PoolingState {
  double eta = 0.0;
  std::vector<double> sum_vec;    // weighted sum of h
  std::vector<double> sumsq_vec;  // weighted sum of h^2 (element-wise)
  int64_t step = 0;

  explicit PoolingState(int dim = 0)
      : sum_vec(dim, 0.0), sumsq_vec(dim, 0.0) {}
};

struct PooledVector {
  std::vector<double> mean;
  std::vector<double> std;  // empty unless the mode carries std
  PoolingMode mode = PoolingMode::kWeightedMean;

  // Classifier input: mean, or mean followed by std.
  std::vector<double> Concatenated() const;
};

void UpdateStatistics(PoolingState* state, const std::vector<float>& h, double w);
void UpdateStatistics(PoolingState* state, const std::vector<double>& h, double w);

PooledVector PooledOutput(const PoolingState& state, PoolingMode mode);

// One pooled output per input step.
std::vector<PooledVector> PoolStream(const std::vector<Embedding>& embeddings,
                                     const AttentionParams& params,
                                     PoolingMode mode);

struct AttentionGradient {
  std::vector<double> weight;
  double bias = 0.0;
};

// Gradient of a loss on the final-step pooled output with respect to the
// attention parameters, via the recurrences
//   w_s = sigmoid(weight . h_s + bias) + eps,
//   mu = A/eta, sigma = sqrt(Q/eta - mu^2).
//
// dmu/dw_s    = (h_s - mu) / eta
// dsigma/dw_s = ((h_s - mu)^2 - V) / (2 sigma eta),  V = Q/eta - mu^2
//
// `loss_grad_mean` has the embedding dimension; `loss_grad_std` may be
// empty when the mode carries no std path. `sigma_floor` is added inside
// the square root to avoid the nondifferentiable point at zero variance.
AttentionGradient PoolingGradients(const std::vector<std::vector<double>>& embeddings,
                                   const AttentionParams& params, PoolingMode mode,
                                   const std::vector<double>& loss_grad_mean,
                                   const std::vector<double>& loss_grad_std,
                                   double sigma_floor = 1e-8);

// Forward counterpart used by the trainer: final-step pooled output in
// double precision, with the same sigma_floor semantics as the gradients.
PooledVector PoolFinalDouble(const std::vector<std::vector<double>>& embeddings,
                             const AttentionParams& params, PoolingMode mode,
                             double sigma_floor = 0.0);

}  // namespace slid

#endif  // SLID_POOLING_HPP_
