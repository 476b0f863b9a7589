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

#include "pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "error.hpp"

namespace slid {

namespace {

std::vector<std::pair<int, double>> TopN(const std::vector<double>& probs, int n) {
  std::vector<std::pair<int, double>> pairs;
  pairs.reserve(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) {
    pairs.emplace_back(static_cast<int>(i), probs[i]);
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<int>(pairs.size()) > n) pairs.resize(n);
  return pairs;
}

}  // namespace

PipelineStream::PipelineStream(const Model& model, const PipelineOptions& options)
    : model_(model),
      options_(options),
      frontend_(model.frontend_config, model.sample_rate_hz),
      encoder_(model.encoder, model.encoder_config),
      extractor_(options.confidence.continuity_cap) {
  if (static_cast<int>(options_.adaptation.a.size()) != model.languages.size()) {
    if (options_.adaptation.a.empty()) {
      options_.adaptation = AdaptationParams::Identity(model.languages.size());
    } else {
      ThrowInvalidInput("adaptation parameters do not match the language table");
    }
  }
}

std::vector<StepOutput> PipelineStream::PushSamples(const float* samples, size_t n) {
  return ProcessFrames(frontend_.Push(samples, n));
}

std::vector<StepOutput> PipelineStream::Finish() {
  return ProcessFrames(frontend_.Finish());
}

std::vector<StepOutput> PipelineStream::ProcessFrames(
    const std::vector<FeatureFrame>& frames) {
  std::vector<StepOutput> outputs;
  if (frames.empty()) return outputs;

  const auto start = std::chrono::steady_clock::now();
  const std::vector<Embedding> embeddings = encoder_.Push(frames);
  for (const Embedding& e : embeddings) {
    const double w = PoolingModeUsesAttention(model_.pooling_mode)
                         ? AttentionWeight(e.values, model_.attention)
                         : 1.0;
    UpdateStatistics(&pooling_, e.values, w);
    const PooledVector pooled = PooledOutput(pooling_, model_.pooling_mode);

    StepOutput out;
    out.step = e.step;
    out.time_ms = e.step * 2 * model_.frontend_config.OutputFrameMs();
    out.posterior = Classify(pooled, model_.head);
    out.posterior.step = e.step;
    out.adapted_posterior = AdaptPosterior(out.posterior, options_.adaptation);
    out.top = TopN(out.posterior.probs, options_.top_n);
    out.adapted_top = TopN(out.adapted_posterior.probs, options_.top_n);

    const Posterior& scored = options_.confidence_on_adapted
                                  ? out.adapted_posterior
                                  : out.posterior;
    const ConfidenceFeatures features = extractor_.Push(scored);
    out.confidence = ConfidenceScore(features, options_.confidence);

    const int top_language = Argmax(scored.probs);
    if (out.confidence >= options_.tau && top_language != last_emitted_language_) {
      out.switch_fired = true;
      out.switch_from = last_emitted_language_;
      out.switch_to = top_language;
      last_emitted_language_ = top_language;
    }
    outputs.push_back(std::move(out));
  }
  const auto end = std::chrono::steady_clock::now();
  if (!embeddings.empty()) {
    const double elapsed_ms =
        std::chrono::duration<double, std::milli>(end - start).count();
    const double per_step = elapsed_ms / static_cast<double>(embeddings.size());
    latency_.steps += static_cast<int64_t>(embeddings.size());
    latency_.total_ms += elapsed_ms;
    latency_.max_ms = std::max(latency_.max_ms, per_step);
  }
  return outputs;
}

std::vector<StepOutput> RunPipeline(const Model& model, const AudioSegment& audio,
                                    const PipelineOptions& options,
                                    LatencyStats* latency) {
  if (audio.samples.empty()) ThrowInvalidInput("pipeline: empty audio");
  if (audio.sample_rate_hz != model.sample_rate_hz) {
    ThrowInvalidInput("audio sample rate " + std::to_string(audio.sample_rate_hz) +
                      " does not match the model rate " +
                      std::to_string(model.sample_rate_hz) +
                      " (resampling is out of scope)");
  }
  PipelineStream stream(model, options);
  std::vector<StepOutput> outputs =
      stream.PushSamples(audio.samples.data(), audio.samples.size());
  std::vector<StepOutput> tail = stream.Finish();
  outputs.insert(outputs.end(), std::make_move_iterator(tail.begin()),
                 std::make_move_iterator(tail.end()));
  if (latency) *latency = stream.latency();
  return outputs;
}

namespace {

std::string FormatProb(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void AppendTopList(std::ostringstream& out,
                   const std::vector<std::pair<int, double>>& top,
                   const LanguageTable& table) {
  out << "[";
  for (size_t i = 0; i < top.size(); ++i) {
    if (i) out << ",";
    out << "{\"lang\":\"" << table.codes[top[i].first]
        << "\",\"p\":" << FormatProb(top[i].second) << "}";
  }
  out << "]";
}

}  // namespace

std::string StepOutputsToJsonLines(const std::vector<StepOutput>& outputs,
                                   const LanguageTable& table) {
  std::ostringstream out;
  for (const StepOutput& s : outputs) {
    out << "{\"step\":" << s.step << ",\"time_ms\":" << s.time_ms << ",\"top\":";
    AppendTopList(out, s.top, table);
    out << ",\"adapted_top\":";
    AppendTopList(out, s.adapted_top, table);
    out << ",\"confidence\":" << FormatProb(s.confidence);
    if (s.switch_fired) {
      out << ",\"switch\":{\"from\":";
      if (s.switch_from < 0) {
        out << "null";
      } else {
        out << "\"" << table.codes[s.switch_from] << "\"";
      }
      out << ",\"to\":\"" << table.codes[s.switch_to] << "\"}";
    }
    out << "}\n";
  }
  return out.str();
}

}  // namespace slid
