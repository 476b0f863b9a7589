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

#include "frontend.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace slid {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void ValidateFrontendConfig(const FrontendConfig& config, int sample_rate_hz) {
  if (sample_rate_hz < 2 * config.mel_high_hz) {
    ThrowInvalidInput("sample rate " + std::to_string(sample_rate_hz) +
                      " Hz is below twice the upper mel edge");
  }
  if (config.num_mel_bins <= 0 || config.stack_factor <= 0 ||
      config.subsample_factor <= 0 || config.frame_length_ms <= 0 ||
      config.frame_step_ms <= 0) {
    ThrowConfig("frontend config has non-positive parameters");
  }
  if (config.mel_low_hz >= config.mel_high_hz) {
    ThrowConfig("mel_low_hz must be below mel_high_hz");
  }
  if (config.log_floor <= 0.0) {
    ThrowConfig("log_floor must be positive");
  }
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

int NextPowerOfTwo(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void Fft(std::vector<double>& re, std::vector<double>& im) {
  const size_t n = re.size();
  if (n == 0 || (n & (n - 1)) != 0 || im.size() != n) {
    ThrowInvalidInput("fft size must be a power of two");
  }
  // Bit reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * kPi / static_cast<double>(len);
    const double wr = std::cos(angle);
    const double wi = std::sin(angle);
    for (size_t i = 0; i < n; i += len) {
      double cur_r = 1.0, cur_i = 0.0;
      for (size_t k = 0; k < len / 2; ++k) {
        const size_t a = i + k;
        const size_t b = i + k + len / 2;
        const double tr = re[b] * cur_r - im[b] * cur_i;
        const double ti = re[b] * cur_i + im[b] * cur_r;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
        const double nr = cur_r * wr - cur_i * wi;
        cur_i = cur_r * wi + cur_i * wr;
        cur_r = nr;
      }
    }
  }
}

MelFilterbank::MelFilterbank(int num_bins, double low_hz, double high_hz,
                             int fft_size, int sample_rate_hz)
    : num_bins_(num_bins), num_fft_bins_(fft_size / 2 + 1) {
  low_mel_ = HzToMel(low_hz);
  high_mel_ = HzToMel(high_hz);
  mel_step_ = (high_mel_ - low_mel_) / (num_bins + 1);
  weights_.assign(num_bins, std::vector<double>(num_fft_bins_, 0.0));
  const double hz_per_bin = static_cast<double>(sample_rate_hz) / fft_size;
  for (int m = 0; m < num_bins; ++m) {
    for (int k = 0; k < num_fft_bins_; ++k) {
      weights_[m][k] = ResponseOfFilter(m, HzToMel(k * hz_per_bin));
    }
  }
}

double MelFilterbank::ResponseOfFilter(int m, double mel) const {
  const double left = low_mel_ + m * mel_step_;
  const double center = left + mel_step_;
  const double right = center + mel_step_;
  if (mel <= left || mel >= right) return 0.0;
  if (mel <= center) return (mel - left) / mel_step_;
  return (right - mel) / mel_step_;
}

void MelFilterbank::Apply(const std::vector<double>& power,
                          std::vector<double>* out) const {
  out->assign(num_bins_, 0.0);
  for (int m = 0; m < num_bins_; ++m) {
    double acc = 0.0;
    const std::vector<double>& w = weights_[m];
    for (int k = 0; k < num_fft_bins_; ++k) acc += w[k] * power[k];
    (*out)[m] = acc;
  }
}

std::vector<double> MelFilterbank::ResponseAt(double hz) const {
  std::vector<double> response(num_bins_);
  const double mel = HzToMel(hz);
  for (int m = 0; m < num_bins_; ++m) response[m] = ResponseOfFilter(m, mel);
  return response;
}

LfbeExtractor::LfbeExtractor(const FrontendConfig& config, int sample_rate_hz)
    : config_(config),
      frame_samples_(config.FrameSamples(sample_rate_hz)),
      step_samples_(config.StepSamples(sample_rate_hz)),
      fft_size_(NextPowerOfTwo(config.FrameSamples(sample_rate_hz))),
      mel_(config.num_mel_bins, config.mel_low_hz, config.mel_high_hz,
           NextPowerOfTwo(config.FrameSamples(sample_rate_hz)), sample_rate_hz) {
  ValidateFrontendConfig(config, sample_rate_hz);
  hann_.resize(frame_samples_);
  for (int i = 0; i < frame_samples_; ++i) {
    hann_[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (frame_samples_ - 1));
  }
}

std::vector<float> LfbeExtractor::Frame(const float* samples) const {
  std::vector<double> re(fft_size_, 0.0), im(fft_size_, 0.0);
  for (int i = 0; i < frame_samples_; ++i) re[i] = samples[i] * hann_[i];
  Fft(re, im);
  std::vector<double> power(fft_size_ / 2 + 1);
  for (int k = 0; k <= fft_size_ / 2; ++k) {
    power[k] = re[k] * re[k] + im[k] * im[k];
  }
  std::vector<double> energies;
  mel_.Apply(power, &energies);
  std::vector<float> out(config_.num_mel_bins);
  for (int m = 0; m < config_.num_mel_bins; ++m) {
    out[m] = static_cast<float>(std::log(std::max(energies[m], config_.log_floor)));
  }
  return out;
}

std::vector<std::vector<float>> ComputeLfbe(const AudioSegment& audio,
                                            const FrontendConfig& config) {
  LfbeExtractor extractor(config, audio.sample_rate_hz);
  const int frame = extractor.frame_samples();
  const int step = extractor.step_samples();
  std::vector<std::vector<float>> out;
  if (static_cast<int>(audio.samples.size()) < frame) return out;
  const size_t num_frames = (audio.samples.size() - frame) / step + 1;
  out.reserve(num_frames);
  for (size_t f = 0; f < num_frames; ++f) {
    out.push_back(extractor.Frame(audio.samples.data() + f * step));
  }
  return out;
}

std::vector<FeatureFrame> StackAndSubsample(
    const std::vector<std::vector<float>>& frames, const FrontendConfig& config) {
  const int stack = config.stack_factor;
  const int sub = config.subsample_factor;
  std::vector<FeatureFrame> out;
  if (static_cast<int>(frames.size()) < stack) return out;
  const size_t count = (frames.size() - stack) / sub + 1;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    FeatureFrame f;
    f.timestamp_ms = static_cast<int64_t>(i) * sub * config.frame_step_ms;
    f.values.reserve(config.StackedDim());
    for (int j = 0; j < stack; ++j) {
      const std::vector<float>& src = frames[i * sub + j];
      f.values.insert(f.values.end(), src.begin(), src.end());
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<FeatureFrame> ComputeFeatures(const AudioSegment& audio,
                                          const FrontendConfig& config) {
  if (audio.samples.empty()) ThrowInvalidInput("frontend: empty audio");
  if (config.apply_agc) {
    AudioSegment gained =
        ApplyGainControl(audio, config.agc_target_rms, config.agc_window_ms);
    return StackAndSubsample(ComputeLfbe(gained, config), config);
  }
  return StackAndSubsample(ComputeLfbe(audio, config), config);
}

FrontendStream::FrontendStream(const FrontendConfig& config, int sample_rate_hz)
    : config_(config),
      lfbe_(config, sample_rate_hz),
      agc_window_samples_(static_cast<size_t>(
          static_cast<int64_t>(sample_rate_hz) * config.agc_window_ms / 1000)) {}

std::vector<FeatureFrame> FrontendStream::Push(const float* samples, size_t n) {
  std::vector<FeatureFrame> out;
  if (!config_.apply_agc) {
    Accept(samples, n, &out);
    return out;
  }
  agc_pending_.insert(agc_pending_.end(), samples, samples + n);
  size_t begin = 0;
  while (agc_pending_.size() - begin >= agc_window_samples_) {
    const double rms = SegmentRms(agc_pending_, begin, begin + agc_window_samples_);
    const double gain = rms > 1e-4 ? config_.agc_target_rms / rms : 1.0;
    std::vector<float> window(agc_window_samples_);
    for (size_t i = 0; i < agc_window_samples_; ++i) {
      window[i] = static_cast<float>(agc_pending_[begin + i] * gain);
    }
    Accept(window.data(), window.size(), &out);
    begin += agc_window_samples_;
  }
  agc_pending_.erase(agc_pending_.begin(), agc_pending_.begin() + begin);
  return out;
}

std::vector<FeatureFrame> FrontendStream::Finish() {
  std::vector<FeatureFrame> out;
  if (config_.apply_agc && !agc_pending_.empty()) {
    const double rms = SegmentRms(agc_pending_, 0, agc_pending_.size());
    const double gain = rms > 1e-4 ? config_.agc_target_rms / rms : 1.0;
    std::vector<float> window(agc_pending_.size());
    for (size_t i = 0; i < agc_pending_.size(); ++i) {
      window[i] = static_cast<float>(agc_pending_[i] * gain);
    }
    agc_pending_.clear();
    Accept(window.data(), window.size(), &out);
  }
  return out;
}

void FrontendStream::Accept(const float* samples, size_t n,
                            std::vector<FeatureFrame>* out) {
  gained_.insert(gained_.end(), samples, samples + n);
  ExtractFrames(out);
}

void FrontendStream::ExtractFrames(std::vector<FeatureFrame>* out) {
  const int frame = lfbe_.frame_samples();
  const int step = lfbe_.step_samples();
  // Emit every complete 10ms-rate analysis frame.
  while (true) {
    const int64_t frame_start = next_frame_ * step;
    const int64_t frame_end = frame_start + frame;
    if (frame_end > gained_offset_ + static_cast<int64_t>(gained_.size())) break;
    const float* ptr = gained_.data() + (frame_start - gained_offset_);
    lfbe_queue_.push_back(lfbe_.Frame(ptr));
    ++next_frame_;
  }
  // Drop samples no longer reachable by any future frame.
  const int64_t keep_from = next_frame_ * step;
  if (keep_from > gained_offset_) {
    const size_t drop =
        std::min(static_cast<size_t>(keep_from - gained_offset_), gained_.size());
    gained_.erase(gained_.begin(), gained_.begin() + drop);
    gained_offset_ += static_cast<int64_t>(drop);
  }
  // Stack.
  const int stack = config_.stack_factor;
  const int sub = config_.subsample_factor;
  while (true) {
    const int64_t need_first = next_stacked_ * sub;
    const int64_t need_last = need_first + stack - 1;
    if (need_last >= lfbe_offset_ + static_cast<int64_t>(lfbe_queue_.size())) break;
    FeatureFrame f;
    f.timestamp_ms = need_first * config_.frame_step_ms;
    f.values.reserve(config_.StackedDim());
    for (int j = 0; j < stack; ++j) {
      const std::vector<float>& src =
          lfbe_queue_[static_cast<size_t>(need_first + j - lfbe_offset_)];
      f.values.insert(f.values.end(), src.begin(), src.end());
    }
    out->push_back(std::move(f));
    ++next_stacked_;
  }
  const int64_t lfbe_keep_from = next_stacked_ * sub;
  if (lfbe_keep_from > lfbe_offset_) {
    const size_t drop = std::min(
        static_cast<size_t>(lfbe_keep_from - lfbe_offset_), lfbe_queue_.size());
    lfbe_queue_.erase(lfbe_queue_.begin(), lfbe_queue_.begin() + drop);
    lfbe_offset_ += static_cast<int64_t>(drop);
  }
}

}  // namespace slid
