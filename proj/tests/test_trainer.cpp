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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "rng.hpp"
#include "test_util.hpp"
#include "trainer.hpp"

using namespace slid;
using namespace slid::testing;

namespace {

// Two linearly separable classes: short streams around +/- centers.
std::vector<LabeledUtterance> SeparableData(uint64_t seed, int per_class) {
  Rng rng(seed);
  std::vector<LabeledUtterance> data;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < per_class; ++i) {
      LabeledUtterance utt;
      utt.truth_index = c;
      utt.utterance_id = data.size();
      const double center = c == 0 ? 1.0 : -1.0;
      const int steps = 5 + static_cast<int>(rng.NextBelow(5));
      for (int t = 0; t < steps; ++t) {
        utt.embeddings.push_back({center + rng.Uniform(-0.2, 0.2),
                                  rng.Uniform(-0.2, 0.2),
                                  -center + rng.Uniform(-0.2, 0.2)});
      }
      data.push_back(std::move(utt));
    }
  }
  return data;
}

LabeledUtterance RandomInstance(uint64_t seed, int steps, int dim, int truth,
                                double scale = 1.5) {
  Rng rng(seed);
  LabeledUtterance utt;
  utt.truth_index = truth;
  for (int t = 0; t < steps; ++t) {
    std::vector<double> h(dim);
    for (double& v : h) v = rng.Uniform(-scale, scale);
    utt.embeddings.push_back(std::move(h));
  }
  return utt;
}

}  // namespace

TEST_CASE("linearly separable two-class data trains to >= 99% accuracy") {
  const auto data = SeparableData(1, 20);
  TrainConfig config;
  config.learning_rate = 0.2;
  config.steps = 500;
  config.seed = 3;
  config.mode = PoolingMode::kWeightedMean;
  config.hidden_dim = 8;
  const TrainResult result = TrainHead(data, config);
  CHECK(EvaluateAccuracy(data, result.attention, result.head, config.mode) >= 0.99);
  CHECK(result.loss_curve.back() <= result.loss_curve.front());
}

TEST_CASE("zero learning rate leaves the parameters at their initialization") {
  const auto data = SeparableData(2, 4);
  TrainConfig config;
  config.learning_rate = 0.0;
  config.steps = 20;
  config.seed = 5;
  config.hidden_dim = 6;
  const TrainResult a = TrainHead(data, config);
  config.steps = 1;
  const TrainResult b = TrainHead(data, config);
  CHECK(a.attention.weight == b.attention.weight);
  CHECK(a.attention.bias == b.attention.bias);
  CHECK(a.head.hidden_weight == b.head.hidden_weight);
  CHECK(a.head.out_weight == b.head.out_weight);
  // And the loss never moves.
  for (double loss : a.loss_curve) CHECK(loss == a.loss_curve[0]);
}

TEST_CASE("duplicating the dataset does not change the full-batch trajectory") {
  const auto data = SeparableData(3, 6);
  std::vector<LabeledUtterance> doubled = data;
  doubled.insert(doubled.end(), data.begin(), data.end());

  TrainConfig config;
  config.learning_rate = 0.1;
  config.steps = 50;
  config.seed = 7;
  config.hidden_dim = 6;
  const TrainResult a = TrainHead(data, config);
  const TrainResult b = TrainHead(doubled, config);
  REQUIRE(a.loss_curve.size() == b.loss_curve.size());
  for (size_t i = 0; i < a.loss_curve.size(); ++i) {
    CHECK(a.loss_curve[i] == doctest::Approx(b.loss_curve[i]).epsilon(1e-12));
  }
  // The doubled mean sums in a different order; equal up to rounding.
  for (size_t c = 0; c < a.head.out_weight.size(); ++c) {
    CHECK(MaxRelDiff(a.head.out_weight[c], b.head.out_weight[c], 1e-9) < 1e-9);
  }
}

TEST_CASE("single-class data is rejected as degenerate") {
  auto data = SeparableData(4, 5);
  for (LabeledUtterance& utt : data) utt.truth_index = 0;
  TrainConfig config;
  try {
    TrainHead(data, config);
    FAIL("expected a degenerate-data error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateData);
  }
}

TEST_CASE("training is bit-deterministic given the seed") {
  const auto data = SeparableData(5, 8);
  TrainConfig config;
  config.learning_rate = 0.15;
  config.steps = 40;
  config.seed = 11;
  config.hidden_dim = 6;
  const TrainResult a = TrainHead(data, config);
  const TrainResult b = TrainHead(data, config);
  CHECK(a.attention.weight == b.attention.weight);
  CHECK(a.head.hidden_weight == b.head.hidden_weight);
  CHECK(a.head.hidden_bias == b.head.hidden_bias);
  CHECK(a.head.out_weight == b.head.out_weight);
  CHECK(a.head.out_bias == b.head.out_bias);
  CHECK(a.loss_curve == b.loss_curve);
}

TEST_CASE("head-only gradients pass the finite-difference check") {
  for (uint64_t seed : {31ull, 32ull, 33ull}) {
    const LabeledUtterance instance = RandomInstance(seed, 9, 4, seed % 2);
    const AttentionParams attention{std::vector<double>(4, 0.0), 0.0};
    const HeadParams head = InitRandomHead(4, 5, 3, seed + 100);
    const double max_rel = GradientCheck(instance, attention, head,
                                         PoolingMode::kMean, false, 1e-4);
    CHECK(max_rel <= 1e-4);
  }
}

TEST_CASE("attention gradients through the mean path pass the check") {
  Rng rng(40);
  for (uint64_t seed : {41ull, 42ull, 43ull}) {
    const LabeledUtterance instance = RandomInstance(seed, 11, 4, seed % 3);
    AttentionParams attention;
    attention.weight.resize(4);
    for (double& v : attention.weight) v = rng.Uniform(-0.6, 0.6);
    attention.bias = rng.Uniform(-0.3, 0.3);
    const HeadParams head = InitRandomHead(4, 5, 3, seed + 200);
    const double max_rel = GradientCheck(instance, attention, head,
                                         PoolingMode::kWeightedMean, false, 1e-4);
    CHECK(max_rel <= 1e-4);
  }
}

TEST_CASE("sigma-path gradients pass the check away from zero variance") {
  Rng rng(50);
  for (uint64_t seed : {51ull, 52ull}) {
    // Random streams: variance is bounded away from 0 in every dimension.
    const LabeledUtterance instance = RandomInstance(seed, 14, 4, seed % 3, 2.0);
    AttentionParams attention;
    attention.weight.resize(4);
    for (double& v : attention.weight) v = rng.Uniform(-0.5, 0.5);
    attention.bias = 0.1;
    const HeadParams head = InitRandomHead(8, 5, 3, seed + 300);
    const double max_rel = GradientCheck(instance, attention, head,
                                         PoolingMode::kWeightedMeanStd, true, 1e-4);
    CHECK(max_rel <= 1e-4);
  }
  // Constant streams sit at the nondifferentiable sigma = 0 point and are
  // excluded from sigma-path checking by contract.
}

TEST_CASE("a small step on the final linear layer never increases the loss") {
  // With attention and hidden activations frozen, the out-layer objective
  // is convex; a small full-batch step must not increase it.
  const auto data = SeparableData(6, 6);
  AttentionParams attention{std::vector<double>(3, 0.1), 0.05};
  HeadParams head = InitRandomHead(3, 6, 2, 60);

  AttentionGradient ag;
  HeadGradient hg;
  const double before = ComputeBatchGradients(data, attention, head,
                                              PoolingMode::kWeightedMean, false,
                                              &ag, &hg);
  const double lr = 1e-3;
  for (size_t c = 0; c < head.out_weight.size(); ++c) {
    for (size_t j = 0; j < head.out_weight[c].size(); ++j) {
      head.out_weight[c][j] -= lr * hg.out_weight[c][j];
    }
    head.out_bias[c] -= lr * hg.out_bias[c];
  }
  AttentionGradient ag2;
  HeadGradient hg2;
  const double after = ComputeBatchGradients(data, attention, head,
                                             PoolingMode::kWeightedMean, false,
                                             &ag2, &hg2);
  CHECK(after <= before + 1e-12);
}

TEST_CASE("adaptive-moment training also reduces the loss") {
  const auto data = SeparableData(7, 10);
  TrainConfig config;
  config.learning_rate = 0.05;
  config.steps = 200;
  config.seed = 13;
  config.use_adam = true;
  config.hidden_dim = 8;
  const TrainResult result = TrainHead(data, config);
  CHECK(result.loss_curve.back() < result.loss_curve.front());
  CHECK(EvaluateAccuracy(data, result.attention, result.head, config.mode) >= 0.9);
}
