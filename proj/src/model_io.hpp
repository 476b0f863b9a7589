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

#ifndef SLID_MODEL_IO_HPP_
#define SLID_MODEL_IO_HPP_

#include <string>

#include "classifier.hpp"
#include "config.hpp"
#include "container.hpp"
#include "encoder.hpp"
#include "frontend.hpp"
#include "pooling.hpp"

namespace slid {

// Everything a pipeline needs, bundled: configs, encoder weights, pooling
// attention, classification head and the language table.
struct Model {
  ConformerConfig encoder_config;
  FrontendConfig frontend_config;
  PoolingMode pooling_mode = PoolingMode::kWeightedMean;
  int sample_rate_hz = 16000;
  EncoderWeights encoder;
  AttentionParams attention;
  HeadParams head;
  LanguageTable languages;

  int PoolOutputDim() const {
    return PoolingModeUsesStd(pooling_mode) ? 2 * encoder_config.model_dim
                                            : encoder_config.model_dim;
  }
};

// Text-config keys (all optional, shown with defaults) cover the encoder,
// the frontend, pooling and the language table; see ParseModelSettings.
struct ModelSettings {
  ConformerConfig encoder;
  FrontendConfig frontend;
  PoolingMode pooling_mode = PoolingMode::kWeightedMean;
  int sample_rate_hz = 16000;
  int head_hidden_dim = 256;
  LanguageTable languages;
};

ModelSettings ParseModelSettings(const KeyValueConfig& config);
ModelSettings DefaultModelSettings();

// Fresh model with seeded random encoder/head weights and small random
// attention parameters.
Model CreateRandomModel(const ModelSettings& settings, uint64_t seed);

ModelContainer ModelToContainer(const Model& model);
Model ModelFromContainer(const ModelContainer& container);

void SaveModel(const Model& model, const std::string& path);
Model LoadModel(const std::string& path);

// Feature/embedding tensors travel in the same container format under
// reserved names ("features" [T, dim] or "embeddings" [T, dim]).
ModelContainer FeaturesToContainer(const std::vector<FeatureFrame>& features);
std::vector<FeatureFrame> FeaturesFromContainer(const ModelContainer& container);
ModelContainer EmbeddingsToContainer(const std::vector<Embedding>& embeddings);
std::vector<Embedding> EmbeddingsFromContainer(const ModelContainer& container);

std::string FeaturesToCsv(const std::vector<FeatureFrame>& features);

}  // namespace slid

#endif  // SLID_MODEL_IO_HPP_
