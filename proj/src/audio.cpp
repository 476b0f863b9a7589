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

#include "audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "error.hpp"

namespace slid {

double SegmentRms(const std::vector<float>& samples, size_t begin, size_t end) {
  if (end <= begin) return 0.0;
  double sumsq = 0.0;
  for (size_t i = begin; i < end; ++i) {
    sumsq += static_cast<double>(samples[i]) * samples[i];
  }
  return std::sqrt(sumsq / static_cast<double>(end - begin));
}

AudioSegment ApplyGainControl(const AudioSegment& audio, float target_rms,
                              int window_ms, float silence_floor) {
  if (audio.samples.empty()) ThrowInvalidInput("gain control: empty audio");
  if (target_rms <= 0.0f) ThrowInvalidInput("gain control: target_rms must be > 0");
  if (window_ms <= 0) ThrowInvalidInput("gain control: window_ms must be > 0");

  const size_t window = static_cast<size_t>(
      static_cast<int64_t>(audio.sample_rate_hz) * window_ms / 1000);
  AudioSegment out;
  out.sample_rate_hz = audio.sample_rate_hz;
  out.samples.resize(audio.samples.size());

  for (size_t begin = 0; begin < audio.samples.size(); begin += window) {
    const size_t end = std::min(begin + window, audio.samples.size());
    const double rms = SegmentRms(audio.samples, begin, end);
    const double gain = rms > silence_floor ? target_rms / rms : 1.0;
    for (size_t i = begin; i < end; ++i) {
      out.samples[i] = static_cast<float>(audio.samples[i] * gain);
    }
  }
  return out;
}

namespace {

uint32_t ReadU32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

uint16_t ReadU16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

void WriteU32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<char*>(b), 4);
}

void WriteU16(std::ostream& out, uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff)};
  out.write(reinterpret_cast<char*>(b), 2);
}

}  // namespace

AudioSegment ReadWavFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open audio file: " + path);

  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0) {
    ThrowInvalidInput("not a RIFF file: " + path);
  }
  ReadU32(in);  // riff size
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0) {
    ThrowInvalidInput("not a WAVE file: " + path);
  }

  uint16_t num_channels = 0;
  uint16_t bits_per_sample = 0;
  uint32_t sample_rate = 0;
  bool have_fmt = false;
  AudioSegment out;

  while (in.read(tag, 4)) {
    uint32_t chunk_size = ReadU32(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      uint16_t format = ReadU16(in);
      num_channels = ReadU16(in);
      sample_rate = ReadU32(in);
      ReadU32(in);  // byte rate
      ReadU16(in);  // block align
      bits_per_sample = ReadU16(in);
      if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
      if (format != 1) ThrowInvalidInput("only PCM wav is supported: " + path);
      if (num_channels != 1) ThrowInvalidInput("only mono wav is supported: " + path);
      if (bits_per_sample != 16) ThrowInvalidInput("only 16-bit wav is supported: " + path);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) ThrowInvalidInput("wav data chunk before fmt chunk: " + path);
      const size_t n = chunk_size / 2;
      out.samples.resize(n);
      std::vector<unsigned char> raw(chunk_size);
      in.read(reinterpret_cast<char*>(raw.data()), chunk_size);
      if (!in) ThrowInvalidInput("truncated wav data chunk: " + path);
      for (size_t i = 0; i < n; ++i) {
        int16_t s = static_cast<int16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
        out.samples[i] = static_cast<float>(s) / 32768.0f;
      }
      out.sample_rate_hz = static_cast<int>(sample_rate);
      return out;
    } else {
      // Skip unknown chunk (word aligned).
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
  }
  ThrowInvalidInput("wav file has no data chunk: " + path);
}

void WriteWavFile(const std::string& path, const AudioSegment& audio) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write audio file: " + path);

  const uint32_t data_bytes = static_cast<uint32_t>(audio.samples.size() * 2);
  out.write("RIFF", 4);
  WriteU32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  WriteU32(out, 16);
  WriteU16(out, 1);  // PCM
  WriteU16(out, 1);  // mono
  WriteU32(out, static_cast<uint32_t>(audio.sample_rate_hz));
  WriteU32(out, static_cast<uint32_t>(audio.sample_rate_hz * 2));
  WriteU16(out, 2);
  WriteU16(out, 16);
  out.write("data", 4);
  WriteU32(out, data_bytes);
  for (float s : audio.samples) {
    float clamped = std::min(1.0f, std::max(-1.0f, s));
    int16_t v = static_cast<int16_t>(std::lrintf(clamped * 32767.0f));
    WriteU16(out, static_cast<uint16_t>(v));
  }
}

AudioSegment ReadRawFloat32File(const std::string& path, int sample_rate_hz) {
  if (sample_rate_hz <= 0) ThrowInvalidInput("raw audio requires a positive sample rate");
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(ErrorCode::kIo, "cannot open audio file: " + path);
  const std::streamsize bytes = in.tellg();
  in.seekg(0);
  AudioSegment out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.resize(static_cast<size_t>(bytes) / 4);
  in.read(reinterpret_cast<char*>(out.samples.data()),
          static_cast<std::streamsize>(out.samples.size() * 4));
  return out;
}

}  // namespace slid
