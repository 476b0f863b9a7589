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

#ifndef SLID_FRONTEND_HPP_
#define SLID_FRONTEND_HPP_

#include <cstdint>
#include <vector>

#include "audio.hpp"

namespace slid {

// Frontend: Hanning-windowed frames -> log mel-filterbank energies ->
// frame stacking with subsampling. Defaults give 512-dim features at a
// 30 ms rate from 16 kHz input.
struct FrontendConfig {
  int frame_length_ms = 32;
  int frame_step_ms = 10;
  int num_mel_bins = 128;
  double mel_low_hz = 125.0;
  double mel_high_hz = 7500.0;
  int stack_factor = 4;
  int subsample_factor = 3;
  double log_floor = 1e-12;

  // Gain control stage; `apply_agc=false` isolates the filterbank.
  bool apply_agc = true;
  float agc_target_rms = 0.1f;
  int agc_window_ms = 100;

  int FrameSamples(int sample_rate_hz) const {
    return static_cast<int>(static_cast<int64_t>(sample_rate_hz) * frame_length_ms / 1000);
  }
  int StepSamples(int sample_rate_hz) const {
    return static_cast<int>(static_cast<int64_t>(sample_rate_hz) * frame_step_ms / 1000);
  }
  int StackedDim() const { return stack_factor * num_mel_bins; }
  int OutputFrameMs() const { return frame_step_ms * subsample_factor; }
};

void ValidateFrontendConfig(const FrontendConfig& config, int sample_rate_hz);

// One stacked feature vector. `timestamp_ms` is the start time of the
// earliest raw frame that contributed.
struct FeatureFrame {
  std::vector<float> values;
  int64_t timestamp_ms = 0;
};

// HTK mel scale.
double HzToMel(double hz);
double MelToHz(double mel);

// Triangular mel filterbank sampled at FFT bin centers.
class MelFilterbank {
 public:
  MelFilterbank(int num_bins, double low_hz, double high_hz, int fft_size,
                int sample_rate_hz);

  // Energies for one power spectrum (fft_size/2 + 1 values).
  void Apply(const std::vector<double>& power, std::vector<double>* out) const;

  // Filter responses at an arbitrary frequency; tests use this as an oracle.
  std::vector<double> ResponseAt(double hz) const;

  int num_bins() const { return num_bins_; }

 private:
  double ResponseOfFilter(int m, double mel) const;

  int num_bins_;
  int num_fft_bins_;
  double low_mel_, high_mel_, mel_step_;
  std::vector<std::vector<double>> weights_;  // [num_bins][num_fft_bins]
};

// In-place power-of-two complex FFT (iterative radix-2).
void Fft(std::vector<double>& re, std::vector<double>& im);

int NextPowerOfTwo(int n);

// Per-frame LFBE kernel shared by the batch and streaming paths, so both
// produce bit-identical features for the same frame positions.
class LfbeExtractor {
 public:
  LfbeExtractor(const FrontendConfig& config, int sample_rate_hz);

  // One frame of `frame_samples()` raw samples -> num_mel_bins log energies.
  std::vector<float> Frame(const float* samples) const;

  int frame_samples() const { return frame_samples_; }
  int step_samples() const { return step_samples_; }

 private:
  FrontendConfig config_;
  int frame_samples_;
  int step_samples_;
  int fft_size_;
  std::vector<double> hann_;
  MelFilterbank mel_;
};

// 128-dim log mel energies per 10 ms frame. Returns zero frames when the
// audio is shorter than one full frame. No AGC here.
std::vector<std::vector<float>> ComputeLfbe(const AudioSegment& audio,
                                            const FrontendConfig& config);

// Stacks `stack_factor` consecutive frames starting at every
// `subsample_factor`-th frame. Output i concatenates inputs
// [s*i, s*i + stack_factor) in temporal order.
std::vector<FeatureFrame> StackAndSubsample(
    const std::vector<std::vector<float>>& frames, const FrontendConfig& config);

// Full pipeline: optional AGC, LFBE, stacking.
std::vector<FeatureFrame> ComputeFeatures(const AudioSegment& audio,
                                          const FrontendConfig& config);

// Incremental frontend. Push samples in arbitrary chunk sizes; stacked
// frames come out exactly as the batch functions would produce them.
class FrontendStream {
 public:
  FrontendStream(const FrontendConfig& config, int sample_rate_hz);

  std::vector<FeatureFrame> Push(const float* samples, size_t n);
  // Processes the trailing partial AGC window. Partial analysis frames
  // never produce output, matching batch behavior.
  std::vector<FeatureFrame> Finish();

 private:
  void Accept(const float* samples, size_t n, std::vector<FeatureFrame>* out);
  void ExtractFrames(std::vector<FeatureFrame>* out);

  FrontendConfig config_;
  LfbeExtractor lfbe_;
  size_t agc_window_samples_;
  std::vector<float> agc_pending_;  // waiting for a full AGC window
  std::vector<float> gained_;       // post-AGC samples not yet fully framed
  int64_t gained_offset_ = 0;       // absolute index of gained_[0]
  int64_t next_frame_ = 0;          // next 10ms-rate frame index
  std::vector<std::vector<float>> lfbe_queue_;
  int64_t lfbe_offset_ = 0;         // absolute index of lfbe_queue_[0]
  int64_t next_stacked_ = 0;
};

}  // namespace slid

#endif  // SLID_FRONTEND_HPP_
