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

#ifndef SLID_OPERATIONS_HPP_
#define SLID_OPERATIONS_HPP_

#include <string>
#include <vector>

#include "augment.hpp"
#include "confidence.hpp"
#include "pipeline.hpp"
#include "trainer.hpp"

namespace slid {

// File-level operations behind the C API / CLI subcommands. Paths in,
// paths out; all of them throw slid::Error on failure.

// `model_path` empty -> build a seeded random model from the config file
// (or defaults when that is empty too).
Model LoadModelOrCreate(const std::string& model_path,
                        const std::string& config_path, uint64_t seed);

AudioSegment ReadAudioAuto(const std::string& path, int raw_rate_hz);

struct AugmentOptions {
  std::string noise_manifest;  // one path per line; empty = no MTR source
  std::string rir_manifest;
  double snr_db_min = 5.0;
  double snr_db_max = 25.0;
  double apply_probability = 0.5;
  SpecAugmentConfig specaugment;
  uint64_t seed = 0;
  uint64_t utterance_id = 0;
  bool enabled = false;
};

void OpFeaturize(const std::string& audio_path, int raw_rate_hz,
                 const std::string& config_path, const std::string& output_path,
                 bool as_csv, const AugmentOptions& augment);

struct InferOptions {
  std::string domain_id;
  std::string registry_path;          // optional domain registry
  std::string confidence_model_path;  // optional 6-field record
  double tau = -1.0;                  // <0: use the confidence model's tau
  bool confidence_on_adapted = true;
  int top_n = 5;
};

// Writes JSON-lines to output_path (and, when `switch_events_path` is
// non-empty, one JSON line per switch event there); returns a
// human-readable latency summary kept out of the deterministic streams.
std::string OpInfer(const std::string& model_path, const std::string& config_path,
                    uint64_t seed, const std::string& audio_path, int raw_rate_hz,
                    const InferOptions& options, const std::string& output_path,
                    const std::string& switch_events_path = "");

struct ManifestRecord {
  std::string path;
  std::string language_code;
};

// One record per line: <path> <language code>.
std::vector<ManifestRecord> LoadManifest(const std::string& path);

// Feature containers run through the frozen encoder; embedding containers
// are used as-is.
std::vector<LabeledUtterance> LoadTrainingData(
    const std::vector<ManifestRecord>& records, const Model& model);

struct TrainHeadOptions {
  double learning_rate = 0.05;
  int64_t steps = 200;
  int64_t batch_size = 0;
  uint64_t seed = 1;
  bool train_sigma_path = false;
  bool use_adam = false;
};

void OpTrainHead(const std::string& manifest_path, const std::string& model_path,
                 const std::string& config_path, uint64_t model_seed,
                 const TrainHeadOptions& options, const std::string& output_model_path,
                 const std::string& loss_csv_path);

void OpTrainAdaptation(const std::string& model_path, const std::string& manifest_path,
                       const std::string& domain_id, double w_reg,
                       double learning_rate, int64_t steps,
                       const std::string& registry_path);

struct TrainConfidenceOptions {
  double learning_rate = 0.5;
  int64_t steps = 3000;
  uint64_t seed = 1;
  std::string domain_id;       // optional: score the adapted stream
  std::string registry_path;
  bool on_adapted = true;
};

void OpTrainConfidence(const std::string& model_path, const std::string& manifest_path,
                       const TrainConfidenceOptions& options,
                       const std::string& output_record_path);

// Recomputes dev scores, sweeps the DET curve, and writes the updated
// 6-field record (and optionally the curve CSV).
DetCurve OpCalibrate(const std::string& model_path, const std::string& manifest_path,
                     const std::string& confidence_model_path,
                     const TrainConfidenceOptions& stream_options,
                     ThresholdRule rule, double max_false_accept,
                     const std::string& output_record_path,
                     const std::string& det_csv_path);

struct EvalSummary {
  double average_accuracy = 0.0;
  double total_accuracy = 0.0;
  int64_t num_records = 0;
};

EvalSummary OpEval(const std::string& model_path, const std::string& manifest_path,
                   const std::string& domain_id, const std::string& registry_path,
                   bool majority_vote, const std::string& output_csv_path);

void WriteTextFile(const std::string& path, const std::string& content);
std::string ReadTextFile(const std::string& path);

}  // namespace slid

#endif  // SLID_OPERATIONS_HPP_
