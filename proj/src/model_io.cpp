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

#include "model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace slid {

namespace {

LanguageTable DefaultLanguages(int k) {
  LanguageTable table;
  table.codes.reserve(k);
  for (int i = 0; i < k; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "lang%02d", i);
    table.codes.push_back(buf);
  }
  return table;
}

}  // namespace

ModelSettings ParseModelSettings(const KeyValueConfig& config) {
  ModelSettings s;
  s.encoder.num_layers = static_cast<int>(config.GetInt("num_layers", 12));
  s.encoder.model_dim = static_cast<int>(config.GetInt("model_dim", 144));
  s.encoder.num_heads = static_cast<int>(config.GetInt("num_heads", 8));
  s.encoder.conv_span = static_cast<int>(config.GetInt("conv_span", 32));
  s.encoder.subsample_after_layer =
      static_cast<int>(config.GetInt("subsample_after_layer", 3));
  s.encoder.projection_after_layer =
      static_cast<int>(config.GetInt("projection_after_layer", 4));
  s.encoder.attention_left_context =
      static_cast<int>(config.GetInt("attention_left_context", 64));
  s.encoder.feedforward_expansion =
      static_cast<int>(config.GetInt("feedforward_expansion", 4));

  s.frontend.frame_length_ms = static_cast<int>(config.GetInt("frame_length_ms", 32));
  s.frontend.frame_step_ms = static_cast<int>(config.GetInt("frame_step_ms", 10));
  s.frontend.num_mel_bins = static_cast<int>(config.GetInt("num_mel_bins", 128));
  s.frontend.mel_low_hz = config.GetDouble("mel_low_hz", 125.0);
  s.frontend.mel_high_hz = config.GetDouble("mel_high_hz", 7500.0);
  s.frontend.stack_factor = static_cast<int>(config.GetInt("stack_factor", 4));
  s.frontend.subsample_factor = static_cast<int>(config.GetInt("subsample_factor", 3));
  s.frontend.log_floor = config.GetDouble("log_floor", 1e-12);
  s.frontend.apply_agc = config.GetBool("apply_agc", true);
  s.frontend.agc_target_rms =
      static_cast<float>(config.GetDouble("agc_target_rms", 0.1));
  s.frontend.agc_window_ms = static_cast<int>(config.GetInt("agc_window_ms", 100));

  s.encoder.input_dim = s.frontend.StackedDim();
  s.pooling_mode =
      PoolingModeFromName(config.GetString("pooling_mode", "weighted_mean"));
  s.sample_rate_hz = static_cast<int>(config.GetInt("sample_rate", 16000));
  s.head_hidden_dim = static_cast<int>(config.GetInt("head_hidden_dim", 256));

  const std::vector<std::string> codes = config.GetList("languages");
  if (!codes.empty()) {
    s.languages.codes = codes;
  } else {
    s.languages = DefaultLanguages(
        static_cast<int>(config.GetInt("num_languages", 4)));
  }
  ValidateLanguageTable(s.languages);
  ValidateConformerConfig(s.encoder);
  return s;
}

ModelSettings DefaultModelSettings() {
  return ParseModelSettings(KeyValueConfig());
}

Model CreateRandomModel(const ModelSettings& settings, uint64_t seed) {
  Model model;
  model.encoder_config = settings.encoder;
  model.frontend_config = settings.frontend;
  model.pooling_mode = settings.pooling_mode;
  model.sample_rate_hz = settings.sample_rate_hz;
  model.languages = settings.languages;

  Rng rng(seed);
  model.encoder = InitRandomWeights(settings.encoder, rng.NextU64());

  const int d = settings.encoder.model_dim;
  model.attention.weight.resize(d);
  const double scale = std::sqrt(1.0 / d);
  for (double& v : model.attention.weight) {
    // Quantized to float so the container round-trip is exact.
    v = static_cast<float>(rng.Uniform(-scale, scale));
  }
  model.attention.bias = 0.0;

  const int pool_dim = model.PoolOutputDim();
  HeadParams head = InitRandomHead(pool_dim, settings.head_hidden_dim,
                                   settings.languages.size(), rng.NextU64());
  for (auto& row : head.hidden_weight) {
    for (double& v : row) v = static_cast<float>(v);
  }
  for (auto& row : head.out_weight) {
    for (double& v : row) v = static_cast<float>(v);
  }
  model.head = head;
  return model;
}

namespace {

Tensor MatrixToTensor(const std::vector<std::vector<double>>& m) {
  Tensor t = Tensor::Zeros({static_cast<int64_t>(m.size()),
                            static_cast<int64_t>(m.empty() ? 0 : m[0].size())});
  size_t i = 0;
  for (const auto& row : m) {
    for (double v : row) t.data[i++] = static_cast<float>(v);
  }
  return t;
}

std::vector<std::vector<double>> TensorToMatrix(const Tensor& t) {
  std::vector<std::vector<double>> m(t.dims[0], std::vector<double>(t.dims[1]));
  size_t i = 0;
  for (auto& row : m) {
    for (double& v : row) v = t.data[i++];
  }
  return m;
}

Tensor VectorToTensor(const std::vector<double>& v) {
  Tensor t = Tensor::Zeros({static_cast<int64_t>(v.size())});
  for (size_t i = 0; i < v.size(); ++i) t.data[i] = static_cast<float>(v[i]);
  return t;
}

std::vector<double> TensorToVector(const Tensor& t) {
  return std::vector<double>(t.data.begin(), t.data.end());
}

std::string JoinCodes(const std::vector<std::string>& codes) {
  std::string out;
  for (size_t i = 0; i < codes.size(); ++i) {
    if (i) out += ",";
    out += codes[i];
  }
  return out;
}

}  // namespace

ModelContainer ModelToContainer(const Model& model) {
  ModelContainer c;
  c.tensors = EncoderWeightsToTensors(model.encoder);
  c.tensors["pooling.attention.weight"] = VectorToTensor(model.attention.weight);
  c.tensors["pooling.attention.bias"] =
      VectorToTensor(std::vector<double>{model.attention.bias});
  c.tensors["head.hidden.weight"] = MatrixToTensor(model.head.hidden_weight);
  c.tensors["head.hidden.bias"] = VectorToTensor(model.head.hidden_bias);
  c.tensors["head.out.weight"] = MatrixToTensor(model.head.out_weight);
  c.tensors["head.out.bias"] = VectorToTensor(model.head.out_bias);

  auto put_int = [&](const char* key, int64_t v) {
    c.metadata[key] = std::to_string(v);
  };
  put_int("num_layers", model.encoder_config.num_layers);
  put_int("model_dim", model.encoder_config.model_dim);
  put_int("num_heads", model.encoder_config.num_heads);
  put_int("conv_span", model.encoder_config.conv_span);
  put_int("subsample_after_layer", model.encoder_config.subsample_after_layer);
  put_int("projection_after_layer", model.encoder_config.projection_after_layer);
  put_int("attention_left_context", model.encoder_config.attention_left_context);
  put_int("feedforward_expansion", model.encoder_config.feedforward_expansion);
  put_int("frame_length_ms", model.frontend_config.frame_length_ms);
  put_int("frame_step_ms", model.frontend_config.frame_step_ms);
  put_int("num_mel_bins", model.frontend_config.num_mel_bins);
  put_int("stack_factor", model.frontend_config.stack_factor);
  put_int("subsample_factor", model.frontend_config.subsample_factor);
  put_int("agc_window_ms", model.frontend_config.agc_window_ms);
  put_int("sample_rate", model.sample_rate_hz);
  {
    std::ostringstream os;
    os.precision(17);
    os << model.frontend_config.mel_low_hz << " " << model.frontend_config.mel_high_hz
       << " " << model.frontend_config.log_floor << " "
       << model.frontend_config.agc_target_rms;
    c.metadata["frontend_reals"] = os.str();
  }
  c.metadata["apply_agc"] = model.frontend_config.apply_agc ? "true" : "false";
  c.metadata["pooling_mode"] = PoolingModeName(model.pooling_mode);
  c.metadata["languages"] = JoinCodes(model.languages.codes);
  return c;
}

Model ModelFromContainer(const ModelContainer& c) {
  Model model;
  auto get_int = [&](const char* key, int fallback) {
    auto it = c.metadata.find(key);
    return it == c.metadata.end() ? fallback : std::stoi(it->second);
  };
  model.encoder_config.num_layers = get_int("num_layers", 12);
  model.encoder_config.model_dim = get_int("model_dim", 144);
  model.encoder_config.num_heads = get_int("num_heads", 8);
  model.encoder_config.conv_span = get_int("conv_span", 32);
  model.encoder_config.subsample_after_layer = get_int("subsample_after_layer", 3);
  model.encoder_config.projection_after_layer = get_int("projection_after_layer", 4);
  model.encoder_config.attention_left_context = get_int("attention_left_context", 64);
  model.encoder_config.feedforward_expansion = get_int("feedforward_expansion", 4);
  model.frontend_config.frame_length_ms = get_int("frame_length_ms", 32);
  model.frontend_config.frame_step_ms = get_int("frame_step_ms", 10);
  model.frontend_config.num_mel_bins = get_int("num_mel_bins", 128);
  model.frontend_config.stack_factor = get_int("stack_factor", 4);
  model.frontend_config.subsample_factor = get_int("subsample_factor", 3);
  model.frontend_config.agc_window_ms = get_int("agc_window_ms", 100);
  model.sample_rate_hz = get_int("sample_rate", 16000);
  model.encoder_config.input_dim = model.frontend_config.StackedDim();

  auto reals = c.metadata.find("frontend_reals");
  if (reals != c.metadata.end()) {
    std::istringstream is(reals->second);
    is >> model.frontend_config.mel_low_hz >> model.frontend_config.mel_high_hz >>
        model.frontend_config.log_floor >> model.frontend_config.agc_target_rms;
    if (!is) ThrowModel("container metadata 'frontend_reals' is malformed");
  }
  auto agc = c.metadata.find("apply_agc");
  if (agc != c.metadata.end()) model.frontend_config.apply_agc = agc->second == "true";

  auto mode = c.metadata.find("pooling_mode");
  model.pooling_mode = PoolingModeFromName(
      mode == c.metadata.end() ? "weighted_mean" : mode->second);

  auto langs = c.metadata.find("languages");
  if (langs == c.metadata.end()) ThrowModel("container is missing the language table");
  std::istringstream ls(langs->second);
  std::string code;
  while (std::getline(ls, code, ',')) model.languages.codes.push_back(code);
  ValidateLanguageTable(model.languages);

  model.encoder = EncoderWeightsFromTensors(c.tensors, model.encoder_config);
  model.attention.weight =
      TensorToVector(GetTensor(c.tensors, "pooling.attention.weight"));
  model.attention.bias =
      GetTensor(c.tensors, "pooling.attention.bias").data.at(0);
  model.head.hidden_weight =
      TensorToMatrix(GetTensor(c.tensors, "head.hidden.weight"));
  model.head.hidden_bias =
      TensorToVector(GetTensor(c.tensors, "head.hidden.bias"));
  model.head.out_weight = TensorToMatrix(GetTensor(c.tensors, "head.out.weight"));
  model.head.out_bias = TensorToVector(GetTensor(c.tensors, "head.out.bias"));

  if (model.head.pool_dim() != model.PoolOutputDim()) {
    ThrowConfig("head input dimension " + std::to_string(model.head.pool_dim()) +
                " does not match pooled output " +
                std::to_string(model.PoolOutputDim()));
  }
  if (model.head.num_classes() != model.languages.size()) {
    ThrowConfig("head output dimension does not match the language table");
  }
  return model;
}

void SaveModel(const Model& model, const std::string& path) {
  SaveContainer(ModelToContainer(model), path);
}

Model LoadModel(const std::string& path) {
  return ModelFromContainer(LoadContainer(path));
}

ModelContainer FeaturesToContainer(const std::vector<FeatureFrame>& features) {
  if (features.empty()) ThrowInvalidInput("cannot serialize an empty feature sequence");
  const size_t dim = features[0].values.size();
  ModelContainer c;
  Tensor t = Tensor::Zeros(
      {static_cast<int64_t>(features.size()), static_cast<int64_t>(dim)});
  Tensor ts = Tensor::Zeros({static_cast<int64_t>(features.size())});
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i].values.size() != dim) {
      ThrowInvalidInput("feature frames have inconsistent dimensions");
    }
    std::copy(features[i].values.begin(), features[i].values.end(),
              t.data.begin() + i * dim);
    ts.data[i] = static_cast<float>(features[i].timestamp_ms);
  }
  c.tensors["features"] = std::move(t);
  c.tensors["timestamps_ms"] = std::move(ts);
  c.metadata["kind"] = "features";
  return c;
}

std::vector<FeatureFrame> FeaturesFromContainer(const ModelContainer& c) {
  const Tensor& t = GetTensor(c.tensors, "features");
  if (t.Rank() != 2) ThrowModel("'features' tensor must have rank 2");
  std::vector<FeatureFrame> out(t.dims[0]);
  const Tensor* ts = c.tensors.count("timestamps_ms")
                         ? &c.tensors.at("timestamps_ms")
                         : nullptr;
  for (int64_t i = 0; i < t.dims[0]; ++i) {
    out[i].values.assign(t.data.begin() + i * t.dims[1],
                         t.data.begin() + (i + 1) * t.dims[1]);
    out[i].timestamp_ms = ts ? static_cast<int64_t>(ts->data[i]) : 0;
  }
  return out;
}

ModelContainer EmbeddingsToContainer(const std::vector<Embedding>& embeddings) {
  if (embeddings.empty()) ThrowInvalidInput("cannot serialize an empty embedding sequence");
  const size_t dim = embeddings[0].values.size();
  ModelContainer c;
  Tensor t = Tensor::Zeros(
      {static_cast<int64_t>(embeddings.size()), static_cast<int64_t>(dim)});
  for (size_t i = 0; i < embeddings.size(); ++i) {
    std::copy(embeddings[i].values.begin(), embeddings[i].values.end(),
              t.data.begin() + i * dim);
  }
  c.tensors["embeddings"] = std::move(t);
  c.metadata["kind"] = "embeddings";
  return c;
}

std::vector<Embedding> EmbeddingsFromContainer(const ModelContainer& c) {
  const Tensor& t = GetTensor(c.tensors, "embeddings");
  if (t.Rank() != 2) ThrowModel("'embeddings' tensor must have rank 2");
  std::vector<Embedding> out(t.dims[0]);
  for (int64_t i = 0; i < t.dims[0]; ++i) {
    out[i].values.assign(t.data.begin() + i * t.dims[1],
                         t.data.begin() + (i + 1) * t.dims[1]);
    out[i].step = i;
  }
  return out;
}

std::string FeaturesToCsv(const std::vector<FeatureFrame>& features) {
  std::ostringstream out;
  out.precision(9);
  for (const FeatureFrame& f : features) {
    out << f.timestamp_ms;
    for (float v : f.values) out << "," << v;
    out << "\n";
  }
  return out.str();
}

}  // namespace slid
