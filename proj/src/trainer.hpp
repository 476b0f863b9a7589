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

#ifndef SLID_TRAINER_HPP_
#define SLID_TRAINER_HPP_

#include <cstdint>
#include <vector>

#include "classifier.hpp"
#include "pooling.hpp"

namespace slid {

// Trains the attentive pooling parameters and the classification head on
// labeled embedding streams with softmax cross entropy; the encoder stays
// frozen. Plain gradient descent by default for bit-stable tests, with an
// adaptive-moment option.
struct TrainConfig {
  double learning_rate = 0.05;
  int64_t steps = 200;
  int64_t batch_size = 0;  // 0 = full batch
  uint64_t seed = 1;
  bool train_sigma_path = false;
  bool use_adam = false;
  PoolingMode mode = PoolingMode::kWeightedMean;
  int hidden_dim = 256;
};

struct LabeledUtterance {
  std::vector<std::vector<double>> embeddings;  // one vector per step
  int truth_index = 0;
  uint64_t utterance_id = 0;
};

struct HeadGradient {
  std::vector<std::vector<double>> hidden_weight;
  std::vector<double> hidden_bias;
  std::vector<std::vector<double>> out_weight;
  std::vector<double> out_bias;
};

struct TrainResult {
  AttentionParams attention;
  HeadParams head;
  std::vector<double> loss_curve;  // mean batch loss per step
};

// Sigma floor used whenever gradients flow through the std path.
constexpr double kTrainSigmaFloor = 1e-8;

// Loss and parameter gradients averaged over `data` (forward uses the same
// sigma floor as the gradients when the mode carries a std path).
double ComputeBatchGradients(const std::vector<LabeledUtterance>& data,
                             const AttentionParams& attention,
                             const HeadParams& head, PoolingMode mode,
                             bool train_sigma_path, AttentionGradient* attn_grad,
                             HeadGradient* head_grad);

double UtteranceLoss(const LabeledUtterance& utt, const AttentionParams& attention,
                     const HeadParams& head, PoolingMode mode);

TrainResult TrainHead(const std::vector<LabeledUtterance>& data,
                      const TrainConfig& config);

// Fraction of utterances whose final-step argmax matches the truth.
double EvaluateAccuracy(const std::vector<LabeledUtterance>& data,
                        const AttentionParams& attention, const HeadParams& head,
                        PoolingMode mode);

// Compares analytic gradients against central finite differences on every
// parameter coordinate (or a seeded subset of at least `min_coords` when
// the parameter count is large). Returns the max relative error.
double GradientCheck(const LabeledUtterance& instance,
                     const AttentionParams& attention, const HeadParams& head,
                     PoolingMode mode, bool train_sigma_path, double step_size,
                     int min_coords = 100, uint64_t seed = 7);

}  // namespace slid

#endif  // SLID_TRAINER_HPP_
