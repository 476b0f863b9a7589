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

#include "encoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"
#include "nn_ops.hpp"
#include "rng.hpp"

namespace slid {

void ValidateConformerConfig(const ConformerConfig& config) {
  if (config.num_layers <= 0) ThrowConfig("num_layers must be positive");
  if (config.model_dim <= 0) ThrowConfig("model_dim must be positive");
  if (config.num_heads <= 0 || config.model_dim % config.num_heads != 0) {
    ThrowConfig("model_dim must be divisible by num_heads");
  }
  if (config.conv_span <= 0) ThrowConfig("conv_span must be positive");
  if (config.attention_left_context <= 0) {
    ThrowConfig("attention_left_context must be positive");
  }
  if (config.feedforward_expansion <= 0) {
    ThrowConfig("feedforward_expansion must be positive");
  }
  if (!(config.subsample_after_layer < config.projection_after_layer &&
        config.projection_after_layer <= config.num_layers)) {
    ThrowConfig("require subsample_after_layer < projection_after_layer <= num_layers");
  }
  if (config.subsample_after_layer < 1) {
    ThrowConfig("subsample_after_layer must be >= 1");
  }
  if (config.input_dim <= 0) ThrowConfig("input_dim must be positive");
}

int64_t ReceptiveFieldFrames(const ConformerConfig& config) {
  const int64_t per_layer =
      static_cast<int64_t>(config.attention_left_context) + config.conv_span - 1;
  const int64_t pre = config.subsample_after_layer;
  const int64_t post = config.num_layers - config.subsample_after_layer;
  // Current pair of frames, plus accumulated left reach; post-subsample
  // layers tick once per 2 input frames.
  return 2 + pre * per_layer + post * 2 * per_layer;
}

namespace {

Tensor RandomMatrix(Rng& rng, int64_t out_dim, int64_t in_dim) {
  Tensor t = Tensor::Zeros({out_dim, in_dim});
  const double scale = std::sqrt(1.0 / static_cast<double>(in_dim));
  for (float& v : t.data) {
    v = static_cast<float>(rng.Uniform(-scale, scale));
  }
  return t;
}

Tensor Ones(int64_t n) {
  Tensor t = Tensor::Zeros({n});
  std::fill(t.data.begin(), t.data.end(), 1.0f);
  return t;
}

ConformerLayerWeights RandomLayer(Rng& rng, int dim, int expansion, int span) {
  ConformerLayerWeights w;
  const int64_t d = dim;
  const int64_t e = static_cast<int64_t>(expansion) * d;
  w.ffn1_ln_gain = Ones(d);
  w.ffn1_ln_bias = Tensor::Zeros({d});
  w.ffn1_w1 = RandomMatrix(rng, e, d);
  w.ffn1_b1 = Tensor::Zeros({e});
  w.ffn1_w2 = RandomMatrix(rng, d, e);
  w.ffn1_b2 = Tensor::Zeros({d});
  w.attn_ln_gain = Ones(d);
  w.attn_ln_bias = Tensor::Zeros({d});
  w.wq = RandomMatrix(rng, d, d);
  w.bq = Tensor::Zeros({d});
  w.wk = RandomMatrix(rng, d, d);
  w.bk = Tensor::Zeros({d});
  w.wv = RandomMatrix(rng, d, d);
  w.bv = Tensor::Zeros({d});
  w.wo = RandomMatrix(rng, d, d);
  w.bo = Tensor::Zeros({d});
  w.conv_ln_gain = Ones(d);
  w.conv_ln_bias = Tensor::Zeros({d});
  w.conv_pw1_w = RandomMatrix(rng, 2 * d, d);
  w.conv_pw1_b = Tensor::Zeros({2 * d});
  w.conv_dw_w = RandomMatrix(rng, d, span);
  w.conv_dw_b = Tensor::Zeros({d});
  w.conv_norm_gain = Ones(d);
  w.conv_norm_bias = Tensor::Zeros({d});
  w.conv_pw2_w = RandomMatrix(rng, d, d);
  w.conv_pw2_b = Tensor::Zeros({d});
  w.ffn2_ln_gain = Ones(d);
  w.ffn2_ln_bias = Tensor::Zeros({d});
  w.ffn2_w1 = RandomMatrix(rng, e, d);
  w.ffn2_b1 = Tensor::Zeros({e});
  w.ffn2_w2 = RandomMatrix(rng, d, e);
  w.ffn2_b2 = Tensor::Zeros({d});
  w.out_ln_gain = Ones(d);
  w.out_ln_bias = Tensor::Zeros({d});
  return w;
}

}  // namespace

EncoderWeights InitRandomWeights(const ConformerConfig& config, uint64_t seed) {
  ValidateConformerConfig(config);
  Rng rng(seed);
  EncoderWeights w;
  w.input_proj_w = RandomMatrix(rng, config.model_dim, config.input_dim);
  w.input_proj_b = Tensor::Zeros({config.model_dim});
  w.post_proj_w = RandomMatrix(rng, config.model_dim, 2 * config.model_dim);
  w.post_proj_b = Tensor::Zeros({config.model_dim});
  w.layers.reserve(config.num_layers);
  for (int l = 1; l <= config.num_layers; ++l) {
    w.layers.push_back(RandomLayer(rng, config.LayerDim(l),
                                   config.feedforward_expansion, config.conv_span));
  }
  return w;
}

namespace {

struct NamedShape {
  const Tensor* tensor;
  std::string name;
  std::vector<int64_t> dims;
};

void CollectLayerShapes(const ConformerLayerWeights& w, const std::string& prefix,
                        int64_t d, int64_t e, int64_t span,
                        std::vector<NamedShape>* out) {
  auto add = [&](const Tensor& t, const char* name, std::vector<int64_t> dims) {
    out->push_back({&t, prefix + name, std::move(dims)});
  };
  add(w.ffn1_ln_gain, "ffn1.ln_gain", {d});
  add(w.ffn1_ln_bias, "ffn1.ln_bias", {d});
  add(w.ffn1_w1, "ffn1.w1", {e, d});
  add(w.ffn1_b1, "ffn1.b1", {e});
  add(w.ffn1_w2, "ffn1.w2", {d, e});
  add(w.ffn1_b2, "ffn1.b2", {d});
  add(w.attn_ln_gain, "attn.ln_gain", {d});
  add(w.attn_ln_bias, "attn.ln_bias", {d});
  add(w.wq, "attn.wq", {d, d});
  add(w.bq, "attn.bq", {d});
  add(w.wk, "attn.wk", {d, d});
  add(w.bk, "attn.bk", {d});
  add(w.wv, "attn.wv", {d, d});
  add(w.bv, "attn.bv", {d});
  add(w.wo, "attn.wo", {d, d});
  add(w.bo, "attn.bo", {d});
  add(w.conv_ln_gain, "conv.ln_gain", {d});
  add(w.conv_ln_bias, "conv.ln_bias", {d});
  add(w.conv_pw1_w, "conv.pw1_w", {2 * d, d});
  add(w.conv_pw1_b, "conv.pw1_b", {2 * d});
  add(w.conv_dw_w, "conv.dw_w", {d, span});
  add(w.conv_dw_b, "conv.dw_b", {d});
  add(w.conv_norm_gain, "conv.norm_gain", {d});
  add(w.conv_norm_bias, "conv.norm_bias", {d});
  add(w.conv_pw2_w, "conv.pw2_w", {d, d});
  add(w.conv_pw2_b, "conv.pw2_b", {d});
  add(w.ffn2_ln_gain, "ffn2.ln_gain", {d});
  add(w.ffn2_ln_bias, "ffn2.ln_bias", {d});
  add(w.ffn2_w1, "ffn2.w1", {e, d});
  add(w.ffn2_b1, "ffn2.b1", {e});
  add(w.ffn2_w2, "ffn2.w2", {d, e});
  add(w.ffn2_b2, "ffn2.b2", {d});
  add(w.out_ln_gain, "out_ln_gain", {d});
  add(w.out_ln_bias, "out_ln_bias", {d});
}

std::vector<NamedShape> CollectShapes(const EncoderWeights& weights,
                                      const ConformerConfig& config) {
  std::vector<NamedShape> shapes;
  shapes.push_back({&weights.input_proj_w, "encoder.input_proj.weight",
                    {config.model_dim, config.input_dim}});
  shapes.push_back({&weights.input_proj_b, "encoder.input_proj.bias",
                    {config.model_dim}});
  shapes.push_back({&weights.post_proj_w, "encoder.post_proj.weight",
                    {config.model_dim, 2 * config.model_dim}});
  shapes.push_back({&weights.post_proj_b, "encoder.post_proj.bias",
                    {config.model_dim}});
  for (int l = 1; l <= config.num_layers; ++l) {
    const int64_t d = config.LayerDim(l);
    CollectLayerShapes(weights.layers[l - 1],
                       "encoder.layer" + std::to_string(l) + ".", d,
                       static_cast<int64_t>(config.feedforward_expansion) * d,
                       config.conv_span, &shapes);
  }
  return shapes;
}

}  // namespace

void ValidateEncoderWeights(const EncoderWeights& weights,
                            const ConformerConfig& config) {
  ValidateConformerConfig(config);
  if (static_cast<int>(weights.layers.size()) != config.num_layers) {
    ThrowConfig("weights hold " + std::to_string(weights.layers.size()) +
                " layers, config expects " + std::to_string(config.num_layers));
  }
  for (const NamedShape& s : CollectShapes(weights, config)) {
    ExpectShape(*s.tensor, s.name, s.dims);
    for (float v : s.tensor->data) {
      if (!std::isfinite(v)) ThrowConfig("tensor '" + s.name + "' has non-finite values");
    }
  }
}

NamedTensorMap EncoderWeightsToTensors(const EncoderWeights& weights) {
  NamedTensorMap map;
  map["encoder.input_proj.weight"] = weights.input_proj_w;
  map["encoder.input_proj.bias"] = weights.input_proj_b;
  map["encoder.post_proj.weight"] = weights.post_proj_w;
  map["encoder.post_proj.bias"] = weights.post_proj_b;
  for (size_t l = 0; l < weights.layers.size(); ++l) {
    std::vector<NamedShape> shapes;
    CollectLayerShapes(weights.layers[l],
                       "encoder.layer" + std::to_string(l + 1) + ".", 0, 0, 0,
                       &shapes);
    for (const NamedShape& s : shapes) map[s.name] = *s.tensor;
  }
  return map;
}

EncoderWeights EncoderWeightsFromTensors(const NamedTensorMap& tensors,
                                         const ConformerConfig& config) {
  EncoderWeights w;
  w.input_proj_w = GetTensor(tensors, "encoder.input_proj.weight");
  w.input_proj_b = GetTensor(tensors, "encoder.input_proj.bias");
  w.post_proj_w = GetTensor(tensors, "encoder.post_proj.weight");
  w.post_proj_b = GetTensor(tensors, "encoder.post_proj.bias");
  w.layers.resize(config.num_layers);
  for (int l = 1; l <= config.num_layers; ++l) {
    ConformerLayerWeights& lw = w.layers[l - 1];
    std::vector<NamedShape> shapes;
    CollectLayerShapes(lw, "encoder.layer" + std::to_string(l) + ".", 0, 0, 0,
                       &shapes);
    // NamedShape holds const pointers; fill through a parallel writable list.
    Tensor* slots[] = {
        &lw.ffn1_ln_gain, &lw.ffn1_ln_bias, &lw.ffn1_w1, &lw.ffn1_b1,
        &lw.ffn1_w2,      &lw.ffn1_b2,      &lw.attn_ln_gain, &lw.attn_ln_bias,
        &lw.wq,           &lw.bq,           &lw.wk,           &lw.bk,
        &lw.wv,           &lw.bv,           &lw.wo,           &lw.bo,
        &lw.conv_ln_gain, &lw.conv_ln_bias, &lw.conv_pw1_w,   &lw.conv_pw1_b,
        &lw.conv_dw_w,    &lw.conv_dw_b,    &lw.conv_norm_gain,
        &lw.conv_norm_bias, &lw.conv_pw2_w, &lw.conv_pw2_b,
        &lw.ffn2_ln_gain, &lw.ffn2_ln_bias, &lw.ffn2_w1, &lw.ffn2_b1,
        &lw.ffn2_w2,      &lw.ffn2_b2,      &lw.out_ln_gain, &lw.out_ln_bias};
    for (size_t i = 0; i < shapes.size(); ++i) {
      *slots[i] = GetTensor(tensors, shapes[i].name);
    }
  }
  ValidateEncoderWeights(w, config);
  return w;
}

std::vector<float> SinusoidalPositionalEncoding(int64_t t, int dim) {
  std::vector<float> pe(dim);
  for (int i = 0; i < dim; i += 2) {
    const double freq = std::pow(10000.0, -static_cast<double>(i) / dim);
    const double angle = static_cast<double>(t) * freq;
    pe[i] = static_cast<float>(std::sin(angle));
    if (i + 1 < dim) pe[i + 1] = static_cast<float>(std::cos(angle));
  }
  return pe;
}

void AddPositionalEncoding(std::vector<std::vector<float>>* xs, int64_t first_step) {
  for (size_t t = 0; t < xs->size(); ++t) {
    std::vector<float>& x = (*xs)[t];
    const std::vector<float> pe =
        SinusoidalPositionalEncoding(first_step + static_cast<int64_t>(t),
                                     static_cast<int>(x.size()));
    for (size_t i = 0; i < x.size(); ++i) x[i] += pe[i];
  }
}

namespace {

// x += 0.5 * W2 swish(W1 LN(x) + b1) + b2  (half-step feed-forward)
void FfnHalfStep(const Tensor& ln_gain, const Tensor& ln_bias, const Tensor& w1,
                 const Tensor& b1, const Tensor& w2, const Tensor& b2,
                 std::vector<float>* x) {
  std::vector<float> normed, hidden, out;
  LayerNorm(ln_gain, ln_bias, x->data(), static_cast<int>(x->size()), &normed);
  Linear(w1, b1, normed.data(), &hidden);
  for (float& v : hidden) v = Swish(v);
  Linear(w2, b2, hidden.data(), &out);
  for (size_t i = 0; i < x->size(); ++i) (*x)[i] += 0.5f * out[i];
}

// Post-GLU value for the convolution module.
void ConvFront(const ConformerLayerWeights& w, const std::vector<float>& x,
               std::vector<float>* glu) {
  const int dim = static_cast<int>(x.size());
  std::vector<float> normed, u;
  LayerNorm(w.conv_ln_gain, w.conv_ln_bias, x.data(), dim, &normed);
  Linear(w.conv_pw1_w, w.conv_pw1_b, normed.data(), &u);
  glu->resize(dim);
  for (int i = 0; i < dim; ++i) {
    (*glu)[i] = u[i] * Sigmoid(u[dim + i]);
  }
}

// Depthwise causal convolution over `window` (temporal order, current frame
// last, nullptr for left padding), then affine norm, swish, pointwise out.
void ConvBack(const ConformerLayerWeights& w,
              const std::vector<const float*>& window, std::vector<float>* x) {
  const int dim = static_cast<int>(x->size());
  const int span = static_cast<int>(w.conv_dw_w.dims[1]);
  std::vector<float> conv(dim);
  for (int ch = 0; ch < dim; ++ch) {
    float acc = w.conv_dw_b.data[ch];
    const float* kernel = w.conv_dw_w.data.data() + static_cast<size_t>(ch) * span;
    for (int j = 0; j < span; ++j) {
      if (window[j] != nullptr) acc += kernel[j] * window[j][ch];
    }
    conv[ch] = acc;
  }
  for (int ch = 0; ch < dim; ++ch) {
    conv[ch] = Swish(w.conv_norm_gain.data[ch] * conv[ch] + w.conv_norm_bias.data[ch]);
  }
  std::vector<float> out;
  Linear(w.conv_pw2_w, w.conv_pw2_b, conv.data(), &out);
  for (int i = 0; i < dim; ++i) (*x)[i] += out[i];
}

// Whole-sequence pass through one conformer layer.
std::vector<std::vector<float>> LayerForwardBatch(
    const ConformerLayerWeights& w, const ConformerConfig& config,
    std::vector<std::vector<float>> xs) {
  const int T = static_cast<int>(xs.size());
  if (T == 0) return xs;
  const int dim = static_cast<int>(xs[0].size());
  const int left = config.attention_left_context;
  const int span = config.conv_span;

  for (auto& x : xs) {
    FfnHalfStep(w.ffn1_ln_gain, w.ffn1_ln_bias, w.ffn1_w1, w.ffn1_b1, w.ffn1_w2,
                w.ffn1_b2, &x);
  }

  // Self-attention, masked to [t - left, t].
  std::vector<std::vector<float>> qs(T), ks(T), vs(T);
  for (int t = 0; t < T; ++t) {
    std::vector<float> normed;
    LayerNorm(w.attn_ln_gain, w.attn_ln_bias, xs[t].data(), dim, &normed);
    Linear(w.wq, w.bq, normed.data(), &qs[t]);
    Linear(w.wk, w.bk, normed.data(), &ks[t]);
    Linear(w.wv, w.bv, normed.data(), &vs[t]);
  }
  for (int t = 0; t < T; ++t) {
    const int lo = std::max(0, t - left);
    std::vector<const float*> wk, wv;
    wk.reserve(t - lo + 1);
    wv.reserve(t - lo + 1);
    for (int s = lo; s <= t; ++s) {
      wk.push_back(ks[s].data());
      wv.push_back(vs[s].data());
    }
    std::vector<float> attended, out;
    AttendWindow(wk, wv, qs[t].data(), dim, config.num_heads, &attended);
    Linear(w.wo, w.bo, attended.data(), &out);
    for (int i = 0; i < dim; ++i) xs[t][i] += out[i];
  }

  // Convolution module, left-padded (fully causal).
  std::vector<std::vector<float>> glus(T);
  for (int t = 0; t < T; ++t) ConvFront(w, xs[t], &glus[t]);
  for (int t = 0; t < T; ++t) {
    std::vector<const float*> window(span, nullptr);
    for (int j = 0; j < span; ++j) {
      const int s = t - span + 1 + j;
      if (s >= 0) window[j] = glus[s].data();
    }
    ConvBack(w, window, &xs[t]);
  }

  for (auto& x : xs) {
    FfnHalfStep(w.ffn2_ln_gain, w.ffn2_ln_bias, w.ffn2_w1, w.ffn2_b1, w.ffn2_w2,
                w.ffn2_b2, &x);
    std::vector<float> normed;
    LayerNorm(w.out_ln_gain, w.out_ln_bias, x.data(), dim, &normed);
    x = std::move(normed);
  }
  return xs;
}

std::vector<float> ApplyInputProjection(const EncoderWeights& weights,
                                        const FeatureFrame& frame,
                                        const ConformerConfig& config) {
  if (static_cast<int>(frame.values.size()) != config.input_dim) {
    ThrowConfig("feature frame has dimension " +
                std::to_string(frame.values.size()) + ", config expects " +
                std::to_string(config.input_dim));
  }
  std::vector<float> x;
  Linear(weights.input_proj_w, weights.input_proj_b, frame.values.data(), &x);
  return x;
}

std::vector<float> PostProjection(const EncoderWeights& weights,
                                  const std::vector<float>& x) {
  std::vector<float> out;
  Linear(weights.post_proj_w, weights.post_proj_b, x.data(), &out);
  for (float& v : out) v = Swish(v);
  return out;
}

}  // namespace

std::vector<Embedding> EncodeSequence(const std::vector<FeatureFrame>& features,
                                      const EncoderWeights& weights,
                                      const ConformerConfig& config) {
  ValidateEncoderWeights(weights, config);
  std::vector<std::vector<float>> xs;
  xs.reserve(features.size());
  for (const FeatureFrame& f : features) {
    xs.push_back(ApplyInputProjection(weights, f, config));
  }
  AddPositionalEncoding(&xs);

  for (int l = 1; l <= config.subsample_after_layer; ++l) {
    xs = LayerForwardBatch(weights.layers[l - 1], config, std::move(xs));
  }

  // Stack-by-2 then subsample-by-2.
  const size_t steps = xs.size() / 2;
  std::vector<std::vector<float>> ys;
  ys.reserve(steps);
  for (size_t i = 0; i < steps; ++i) {
    std::vector<float> y = xs[2 * i];
    y.insert(y.end(), xs[2 * i + 1].begin(), xs[2 * i + 1].end());
    ys.push_back(std::move(y));
  }

  for (int l = config.subsample_after_layer + 1; l <= config.projection_after_layer;
       ++l) {
    ys = LayerForwardBatch(weights.layers[l - 1], config, std::move(ys));
  }
  for (auto& y : ys) y = PostProjection(weights, y);
  for (int l = config.projection_after_layer + 1; l <= config.num_layers; ++l) {
    ys = LayerForwardBatch(weights.layers[l - 1], config, std::move(ys));
  }

  std::vector<Embedding> out(ys.size());
  for (size_t i = 0; i < ys.size(); ++i) {
    out[i].values = std::move(ys[i]);
    out[i].step = static_cast<int64_t>(i);
  }
  return out;
}

EncoderStream::EncoderStream(const EncoderWeights& weights,
                             const ConformerConfig& config)
    : weights_(weights), config_(config) {
  ValidateEncoderWeights(weights, config);
  states_.resize(config.num_layers);
}

std::vector<float> EncoderStream::LayerStep(int layer_index,
                                            const std::vector<float>& input) {
  const ConformerLayerWeights& w = weights_.layers[layer_index - 1];
  LayerState& st = states_[layer_index - 1];
  const int dim = static_cast<int>(input.size());
  const int left = config_.attention_left_context;
  const int span = config_.conv_span;

  std::vector<float> x = input;
  FfnHalfStep(w.ffn1_ln_gain, w.ffn1_ln_bias, w.ffn1_w1, w.ffn1_b1, w.ffn1_w2,
              w.ffn1_b2, &x);

  std::vector<float> normed, q, k, v;
  LayerNorm(w.attn_ln_gain, w.attn_ln_bias, x.data(), dim, &normed);
  Linear(w.wq, w.bq, normed.data(), &q);
  Linear(w.wk, w.bk, normed.data(), &k);
  Linear(w.wv, w.bv, normed.data(), &v);
  st.keys.push_back(std::move(k));
  st.values.push_back(std::move(v));
  if (static_cast<int>(st.keys.size()) > left + 1) {
    st.keys.pop_front();
    st.values.pop_front();
  }
  std::vector<const float*> wk, wv;
  wk.reserve(st.keys.size());
  wv.reserve(st.values.size());
  for (const auto& e : st.keys) wk.push_back(e.data());
  for (const auto& e : st.values) wv.push_back(e.data());
  std::vector<float> attended, attn_out;
  AttendWindow(wk, wv, q.data(), dim, config_.num_heads, &attended);
  Linear(w.wo, w.bo, attended.data(), &attn_out);
  for (int i = 0; i < dim; ++i) x[i] += attn_out[i];

  std::vector<float> glu;
  ConvFront(w, x, &glu);
  std::vector<const float*> window(span, nullptr);
  const int history = static_cast<int>(st.conv_tail.size());
  for (int j = 0; j < span - 1; ++j) {
    const int idx = history - (span - 1 - j);
    if (idx >= 0) window[j] = st.conv_tail[idx].data();
  }
  window[span - 1] = glu.data();
  ConvBack(w, window, &x);
  st.conv_tail.push_back(std::move(glu));
  if (static_cast<int>(st.conv_tail.size()) > span - 1) st.conv_tail.pop_front();

  FfnHalfStep(w.ffn2_ln_gain, w.ffn2_ln_bias, w.ffn2_w1, w.ffn2_b1, w.ffn2_w2,
              w.ffn2_b2, &x);
  std::vector<float> out;
  LayerNorm(w.out_ln_gain, w.out_ln_bias, x.data(), dim, &out);
  return out;
}

std::vector<Embedding> EncoderStream::Push(const std::vector<FeatureFrame>& frames) {
  std::vector<Embedding> out;
  for (const FeatureFrame& frame : frames) {
    std::vector<float> x = ApplyInputProjection(weights_, frame, config_);
    const std::vector<float> pe =
        SinusoidalPositionalEncoding(next_frame_, config_.model_dim);
    for (int i = 0; i < config_.model_dim; ++i) x[i] += pe[i];
    ++next_frame_;

    for (int l = 1; l <= config_.subsample_after_layer; ++l) {
      x = LayerStep(l, x);
    }

    if (!has_pending_half_) {
      pending_half_ = std::move(x);
      has_pending_half_ = true;
      continue;
    }
    std::vector<float> y = std::move(pending_half_);
    y.insert(y.end(), x.begin(), x.end());
    has_pending_half_ = false;

    for (int l = config_.subsample_after_layer + 1;
         l <= config_.projection_after_layer; ++l) {
      y = LayerStep(l, y);
    }
    y = PostProjection(weights_, y);
    for (int l = config_.projection_after_layer + 1; l <= config_.num_layers; ++l) {
      y = LayerStep(l, y);
    }
    Embedding e;
    e.values = std::move(y);
    e.step = next_step_++;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace slid
