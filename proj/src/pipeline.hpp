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

#ifndef SLID_PIPELINE_HPP_
#define SLID_PIPELINE_HPP_

#include <memory>
#include <string>
#include <vector>

#include "adaptation.hpp"
#include "confidence.hpp"
#include "eval.hpp"
#include "model_io.hpp"

namespace slid {

struct PipelineOptions {
  AdaptationParams adaptation;   // identity when no domain applies
  ConfidenceModel confidence;    // zero model scores a flat 0.5
  double tau = 0.999;            // switch threshold
  // Confidence features read the adapted stream by default.
  bool confidence_on_adapted = true;
  int top_n = 5;
};

struct StepOutput {
  int64_t step = 0;
  int64_t time_ms = 0;  // start time of the step's earliest frame
  std::vector<std::pair<int, double>> top;          // raw posterior, desc
  std::vector<std::pair<int, double>> adapted_top;  // adapted posterior, desc
  Posterior posterior;          // full raw distribution
  Posterior adapted_posterior;  // full adapted distribution
  double confidence = 0.0;
  bool switch_fired = false;
  int switch_from = -1;  // -1 on the initial event
  int switch_to = -1;
};

// Wall time spent past the frontend (encode, pool, classify, adapt, score);
// reported out-of-band so the output stream stays deterministic.
struct LatencyStats {
  int64_t steps = 0;
  double total_ms = 0.0;
  double max_ms = 0.0;
};

// Streaming composition: samples -> frontend -> encoder -> pooling ->
// classifier -> adaptation -> confidence -> switch events.
class PipelineStream {
 public:
  PipelineStream(const Model& model, const PipelineOptions& options);

  std::vector<StepOutput> PushSamples(const float* samples, size_t n);
  std::vector<StepOutput> Finish();

  const LatencyStats& latency() const { return latency_; }

 private:
  std::vector<StepOutput> ProcessFrames(const std::vector<FeatureFrame>& frames);

  const Model& model_;
  PipelineOptions options_;
  FrontendStream frontend_;
  EncoderStream encoder_;
  PoolingState pooling_;
  ConfidenceExtractor extractor_;
  int last_emitted_language_ = -1;
  LatencyStats latency_;
};

// Batch convenience over a whole segment.
std::vector<StepOutput> RunPipeline(const Model& model, const AudioSegment& audio,
                                    const PipelineOptions& options,
                                    LatencyStats* latency = nullptr);

// One JSON object per step:
// {"step":..,"time_ms":..,"top":[{"lang":..,"p":..}...],
//  "adapted_top":[...],"confidence":..,"switch":{"from":..,"to":..}}
std::string StepOutputsToJsonLines(const std::vector<StepOutput>& outputs,
                                   const LanguageTable& table);

}  // namespace slid

#endif  // SLID_PIPELINE_HPP_
