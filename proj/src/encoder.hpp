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

#ifndef SLID_ENCODER_HPP_
#define SLID_ENCODER_HPP_

#include <cstdint>
#include <deque>
#include <vector>

#include "frontend.hpp"
#include "tensor.hpp"

namespace slid {

// Causal conformer encoder. Layers run at the stacked-feature rate until
// `subsample_after_layer`, where consecutive outputs are paired
// (stack-by-2, subsample-by-2, doubling the width); a non-linear
// projection after `projection_after_layer` brings the width back to
// model_dim. One embedding is produced per 2 input frames.
struct ConformerConfig {
  int num_layers = 12;
  int model_dim = 144;
  int num_heads = 8;
  int conv_span = 32;
  int subsample_after_layer = 3;
  int projection_after_layer = 4;
  int attention_left_context = 64;  // per layer, in that layer's own ticks
  int feedforward_expansion = 4;
  int input_dim = 512;

  // Layer width for 1-based layer index.
  int LayerDim(int layer) const {
    return (layer > subsample_after_layer && layer <= projection_after_layer)
               ? 2 * model_dim
               : model_dim;
  }
};

void ValidateConformerConfig(const ConformerConfig& config);

// Left receptive field of one embedding, in input frames. Attention and
// convolution reaches accumulate across layers; layers past the subsample
// stage cover two input frames per tick.
int64_t ReceptiveFieldFrames(const ConformerConfig& config);

struct ConformerLayerWeights {
  Tensor ffn1_ln_gain, ffn1_ln_bias, ffn1_w1, ffn1_b1, ffn1_w2, ffn1_b2;
  Tensor attn_ln_gain, attn_ln_bias, wq, bq, wk, bk, wv, bv, wo, bo;
  Tensor conv_ln_gain, conv_ln_bias, conv_pw1_w, conv_pw1_b;
  Tensor conv_dw_w, conv_dw_b;          // depthwise kernel [dim, span], causal
  Tensor conv_norm_gain, conv_norm_bias;  // per-channel affine
  Tensor conv_pw2_w, conv_pw2_b;
  Tensor ffn2_ln_gain, ffn2_ln_bias, ffn2_w1, ffn2_b1, ffn2_w2, ffn2_b2;
  Tensor out_ln_gain, out_ln_bias;
};

struct EncoderWeights {
  Tensor input_proj_w, input_proj_b;  // stacked features -> model_dim
  Tensor post_proj_w, post_proj_b;    // 2*model_dim -> model_dim, swish
  std::vector<ConformerLayerWeights> layers;
};

// Throws a configuration error naming the first offending tensor.
void ValidateEncoderWeights(const EncoderWeights& weights,
                            const ConformerConfig& config);

EncoderWeights InitRandomWeights(const ConformerConfig& config, uint64_t seed);

// Flat name <-> struct conversion for the model container.
NamedTensorMap EncoderWeightsToTensors(const EncoderWeights& weights);
EncoderWeights EncoderWeightsFromTensors(const NamedTensorMap& tensors,
                                         const ConformerConfig& config);

struct Embedding {
  std::vector<float> values;
  int64_t step = 0;
};

std::vector<float> SinusoidalPositionalEncoding(int64_t t, int dim);

// output[t] = input[t] + PE(t + first_step).
void AddPositionalEncoding(std::vector<std::vector<float>>* xs,
                           int64_t first_step = 0);

// Whole-sequence forward pass. Attention is masked to
// [t - attention_left_context, t]; nothing reads past the current tick, so
// embedding t is bit-identical under any future-frame perturbation.
std::vector<Embedding> EncodeSequence(const std::vector<FeatureFrame>& features,
                                      const EncoderWeights& weights,
                                      const ConformerConfig& config);

// Streaming forward pass with per-layer ring buffers. Feeding frames in any
// chunking yields the same embeddings as EncodeSequence.
class EncoderStream {
 public:
  EncoderStream(const EncoderWeights& weights, const ConformerConfig& config);

  // Processes frames; emits one embedding per completed pair.
  std::vector<Embedding> Push(const std::vector<FeatureFrame>& frames);

  int64_t next_step() const { return next_step_; }

 private:
  struct LayerState {
    std::deque<std::vector<float>> keys;
    std::deque<std::vector<float>> values;
    std::deque<std::vector<float>> conv_tail;  // last span-1 post-GLU frames
  };

  std::vector<float> LayerStep(int layer_index, const std::vector<float>& x);

  const EncoderWeights& weights_;
  ConformerConfig config_;
  std::vector<LayerState> states_;
  std::vector<float> pending_half_;  // layer-3 output waiting for its pair
  bool has_pending_half_ = false;
  int64_t next_frame_ = 0;
  int64_t next_step_ = 0;
};

}  // namespace slid

#endif  // SLID_ENCODER_HPP_
