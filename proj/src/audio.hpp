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

#ifndef SLID_AUDIO_HPP_
#define SLID_AUDIO_HPP_

#include <string>
#include <vector>

namespace slid {

// Mono audio at a fixed sample rate, amplitudes nominally in [-1, 1].
struct AudioSegment {
  std::vector<float> samples;
  int sample_rate_hz = 16000;
};

// Sliding-window RMS normalizer. The signal is processed in consecutive
// non-overlapping windows of `window_ms`; each window whose RMS exceeds
// `silence_floor` is rescaled to `target_rms`, quieter windows pass through
// unscaled so silence is never amplified.
AudioSegment ApplyGainControl(const AudioSegment& audio, float target_rms,
                              int window_ms, float silence_floor = 1e-4f);

double SegmentRms(const std::vector<float>& samples, size_t begin, size_t end);

// 16-bit linear PCM in a RIFF container, single channel.
AudioSegment ReadWavFile(const std::string& path);
void WriteWavFile(const std::string& path, const AudioSegment& audio);

// Headerless little-endian float32 samples.
AudioSegment ReadRawFloat32File(const std::string& path, int sample_rate_hz);

}  // namespace slid

#endif  // SLID_AUDIO_HPP_
