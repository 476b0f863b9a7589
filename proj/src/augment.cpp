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

#include "augment.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace slid {

namespace {

double MeanSquare(const std::vector<float>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (float x : v) acc += static_cast<double>(x) * x;
  return acc / static_cast<double>(v.size());
}

}  // namespace

AudioSegment MixNoiseAtSnr(const AudioSegment& speech, const AudioSegment& noise,
                           double snr_db, size_t noise_offset, MixStatus* status) {
  if (speech.sample_rate_hz != noise.sample_rate_hz) {
    ThrowInvalidInput("speech and noise sample rates differ");
  }
  if (noise.samples.empty()) ThrowInvalidInput("noise segment is empty");
  if (status) *status = MixStatus::kOk;

  // Tile or crop the noise to the speech length.
  std::vector<float> tiled(speech.samples.size());
  for (size_t i = 0; i < tiled.size(); ++i) {
    tiled[i] = noise.samples[(noise_offset + i) % noise.samples.size()];
  }

  const double p_speech = MeanSquare(speech.samples);
  const double p_noise = MeanSquare(tiled);
  if (p_noise <= 0.0) ThrowInvalidInput("noise has zero power");
  if (p_speech <= 0.0) {
    // Silent speech: the requested SNR is unreachable; return it unchanged.
    if (status) *status = MixStatus::kSilentSpeech;
    return speech;
  }

  const double gain = std::sqrt(p_speech / (p_noise * std::pow(10.0, snr_db / 10.0)));
  AudioSegment out;
  out.sample_rate_hz = speech.sample_rate_hz;
  out.samples.resize(speech.samples.size());
  for (size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] = speech.samples[i] + static_cast<float>(gain * tiled[i]);
  }
  return out;
}

double MeasureSnrDb(const AudioSegment& speech, const AudioSegment& scaled_noise) {
  const double ps = MeanSquare(speech.samples);
  const double pn = MeanSquare(scaled_noise.samples);
  return 10.0 * std::log10(ps / pn);
}

AudioSegment ApplyReverb(const AudioSegment& speech, const AudioSegment& impulse) {
  if (speech.sample_rate_hz != impulse.sample_rate_hz) {
    ThrowInvalidInput("speech and impulse response sample rates differ");
  }
  if (impulse.samples.empty()) ThrowInvalidInput("impulse response is empty");
  AudioSegment out;
  out.sample_rate_hz = speech.sample_rate_hz;
  out.samples.assign(speech.samples.size(), 0.0f);
  for (size_t n = 0; n < out.samples.size(); ++n) {
    double acc = 0.0;
    const size_t kmax = std::min(n + 1, impulse.samples.size());
    for (size_t k = 0; k < kmax; ++k) {
      acc += static_cast<double>(impulse.samples[k]) * speech.samples[n - k];
    }
    out.samples[n] = static_cast<float>(acc);
  }
  return out;
}

std::vector<FeatureFrame> ApplySpecAugment(const std::vector<FeatureFrame>& features,
                                           const SpecAugmentConfig& config,
                                           uint64_t seed) {
  if (features.empty()) ThrowInvalidInput("specaugment: empty feature sequence");
  const int num_frames = static_cast<int>(features.size());
  const int dim = static_cast<int>(features[0].values.size());
  if (config.num_freq_masks < 0 || config.num_time_masks < 0 ||
      config.max_freq_mask_bins < 0 || config.max_time_mask_frames < 0) {
    ThrowInvalidInput("specaugment: negative mask parameters");
  }

  // Per-dimension mean over the utterance, used as the fill value.
  std::vector<double> mean(dim, 0.0);
  for (const FeatureFrame& f : features) {
    for (int d = 0; d < dim; ++d) mean[d] += f.values[d];
  }
  for (int d = 0; d < dim; ++d) mean[d] /= num_frames;

  std::vector<FeatureFrame> out = features;
  Rng rng(seed);

  for (int i = 0; i < config.num_freq_masks; ++i) {
    // Oversized masks are clamped, like time masks.
    const int max_width = std::min(config.max_freq_mask_bins, dim);
    const int width = static_cast<int>(rng.NextBelow(max_width + 1));
    const int f0 = static_cast<int>(rng.NextBelow(std::max(1, dim - width + 1)));
    for (FeatureFrame& frame : out) {
      for (int d = f0; d < f0 + width; ++d) {
        frame.values[d] = static_cast<float>(mean[d]);
      }
    }
  }
  for (int i = 0; i < config.num_time_masks; ++i) {
    // Clamp to the sequence length rather than failing.
    const int max_len = std::min(config.max_time_mask_frames, num_frames);
    const int width = static_cast<int>(rng.NextBelow(max_len + 1));
    const int t0 = static_cast<int>(rng.NextBelow(std::max(1, num_frames - width + 1)));
    for (int t = t0; t < t0 + width; ++t) {
      for (int d = 0; d < dim; ++d) {
        out[t].values[d] = static_cast<float>(mean[d]);
      }
    }
  }
  return out;
}

AugmentationKind ChooseAugmentation(uint64_t utterance_id, const MtrConfig& config,
                                    uint64_t seed) {
  if (config.apply_probability < 0.0 || config.apply_probability > 1.0) {
    ThrowInvalidInput("apply_probability must be in [0, 1]");
  }
  const uint64_t h = HashCombine(seed, utterance_id);
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return u < config.apply_probability ? AugmentationKind::kMtr
                                      : AugmentationKind::kSpecAugment;
}

}  // namespace slid
