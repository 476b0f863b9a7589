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

#ifndef SLID_AUGMENT_HPP_
#define SLID_AUGMENT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "audio.hpp"
#include "frontend.hpp"

namespace slid {

// Multi-style training: additive noise at a drawn SNR, optional
// reverberation with user-supplied impulse responses.
struct MtrConfig {
  double snr_db_min = 5.0;
  double snr_db_max = 25.0;
  std::vector<std::string> noise_sources;
  std::vector<std::string> rir_sources;
  double apply_probability = 0.5;
};

struct SpecAugmentConfig {
  int num_freq_masks = 2;
  int max_freq_mask_bins = 27;
  int num_time_masks = 2;
  int max_time_mask_frames = 40;
};

enum class AugmentationKind { kMtr, kSpecAugment };

enum class MixStatus { kOk, kSilentSpeech };

// output = speech + g * noise, g chosen so the realized SNR (mean-square
// powers over the full segment) equals snr_db. Noise is tiled or cropped
// to the speech length starting at `noise_offset`.
AudioSegment MixNoiseAtSnr(const AudioSegment& speech, const AudioSegment& noise,
                           double snr_db, size_t noise_offset = 0,
                           MixStatus* status = nullptr);

// Direct convolution with an impulse response, truncated to input length.
AudioSegment ApplyReverb(const AudioSegment& speech, const AudioSegment& impulse);

// Masked cells are replaced with the per-utterance mean of their dimension;
// all other cells are untouched. Mask placement comes from `seed` only.
std::vector<FeatureFrame> ApplySpecAugment(const std::vector<FeatureFrame>& features,
                                           const SpecAugmentConfig& config,
                                           uint64_t seed);

// Picks exactly one augmentation family per utterance, deterministically
// from (seed, utterance_id).
AugmentationKind ChooseAugmentation(uint64_t utterance_id, const MtrConfig& config,
                                    uint64_t seed);

// Measured 10*log10(P_speech / P_noise) of the two components.
double MeasureSnrDb(const AudioSegment& speech, const AudioSegment& scaled_noise);

}  // namespace slid

#endif  // SLID_AUGMENT_HPP_
