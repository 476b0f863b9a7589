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

#include "operations.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace slid {

namespace {

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file: " + path);
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "failed writing file: " + path);
}

Model LoadModelOrCreate(const std::string& model_path,
                        const std::string& config_path, uint64_t seed) {
  if (!model_path.empty()) return LoadModel(model_path);
  const ModelSettings settings =
      config_path.empty() ? DefaultModelSettings()
                          : ParseModelSettings(KeyValueConfig::FromFile(config_path));
  return CreateRandomModel(settings, seed);
}

AudioSegment ReadAudioAuto(const std::string& path, int raw_rate_hz) {
  if (raw_rate_hz > 0 && !EndsWith(path, ".wav")) {
    return ReadRawFloat32File(path, raw_rate_hz);
  }
  return ReadWavFile(path);
}

namespace {

std::vector<std::string> LoadPathList(const std::string& manifest_path) {
  std::istringstream in(ReadTextFile(manifest_path));
  std::vector<std::string> paths;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) paths.push_back(line);
  }
  if (paths.empty()) ThrowInvalidInput("manifest is empty: " + manifest_path);
  return paths;
}

AudioSegment ApplyMtr(const AudioSegment& audio, const AugmentOptions& options,
                      int sample_rate_hz) {
  Rng rng(HashCombine(options.seed, options.utterance_id));
  const std::vector<std::string> noise_paths = LoadPathList(options.noise_manifest);
  const std::string& noise_path =
      noise_paths[rng.NextBelow(noise_paths.size())];
  AudioSegment noise = ReadAudioAuto(noise_path, sample_rate_hz);
  AudioSegment speech = audio;
  if (!options.rir_manifest.empty()) {
    const std::vector<std::string> rir_paths = LoadPathList(options.rir_manifest);
    const AudioSegment rir =
        ReadAudioAuto(rir_paths[rng.NextBelow(rir_paths.size())], sample_rate_hz);
    speech = ApplyReverb(speech, rir);
  }
  const double snr = rng.Uniform(options.snr_db_min, options.snr_db_max);
  const size_t offset = noise.samples.empty() ? 0 : rng.NextBelow(noise.samples.size());
  return MixNoiseAtSnr(speech, noise, snr, offset);
}

}  // namespace

void OpFeaturize(const std::string& audio_path, int raw_rate_hz,
                 const std::string& config_path, const std::string& output_path,
                 bool as_csv, const AugmentOptions& augment) {
  const ModelSettings settings =
      config_path.empty() ? DefaultModelSettings()
                          : ParseModelSettings(KeyValueConfig::FromFile(config_path));
  AudioSegment audio = ReadAudioAuto(audio_path, raw_rate_hz);
  if (audio.sample_rate_hz != settings.sample_rate_hz) {
    ThrowInvalidInput("audio sample rate " + std::to_string(audio.sample_rate_hz) +
                      " does not match the configured rate " +
                      std::to_string(settings.sample_rate_hz));
  }

  bool specaugment_selected = false;
  if (augment.enabled) {
    MtrConfig mtr;
    mtr.snr_db_min = augment.snr_db_min;
    mtr.snr_db_max = augment.snr_db_max;
    mtr.apply_probability = augment.apply_probability;
    const AugmentationKind kind = augment.noise_manifest.empty()
                                      ? AugmentationKind::kSpecAugment
                                      : ChooseAugmentation(augment.utterance_id, mtr,
                                                           augment.seed);
    if (kind == AugmentationKind::kMtr) {
      audio = ApplyMtr(audio, augment, settings.sample_rate_hz);
    } else {
      specaugment_selected = true;  // applied on features below
    }
  }

  std::vector<FeatureFrame> features = ComputeFeatures(audio, settings.frontend);
  if (specaugment_selected && !features.empty()) {
    features = ApplySpecAugment(features, augment.specaugment,
                                HashCombine(augment.seed, augment.utterance_id));
  }

  if (as_csv) {
    WriteTextFile(output_path, FeaturesToCsv(features));
  } else {
    if (features.empty()) {
      ThrowInvalidInput("audio is too short to produce any stacked feature frame");
    }
    SaveContainer(FeaturesToContainer(features), output_path);
  }
}

namespace {

PipelineOptions BuildPipelineOptions(const Model& model, const InferOptions& options) {
  PipelineOptions pipeline;
  pipeline.adaptation = AdaptationParams::Identity(model.languages.size());
  if (!options.registry_path.empty()) {
    const DomainRegistry registry = DomainRegistry::LoadFromFile(
        options.registry_path, model.languages.Checksum());
    pipeline.adaptation = registry.Lookup(
        options.domain_id.empty() ? "default" : options.domain_id);
  }
  if (!options.confidence_model_path.empty()) {
    pipeline.confidence = LoadConfidenceModel(options.confidence_model_path);
  }
  pipeline.tau = options.tau >= 0.0 ? options.tau : pipeline.confidence.threshold;
  pipeline.confidence_on_adapted = options.confidence_on_adapted;
  pipeline.top_n = options.top_n;
  return pipeline;
}

}  // namespace

std::string OpInfer(const std::string& model_path, const std::string& config_path,
                    uint64_t seed, const std::string& audio_path, int raw_rate_hz,
                    const InferOptions& options, const std::string& output_path,
                    const std::string& switch_events_path) {
  const Model model = LoadModelOrCreate(model_path, config_path, seed);
  const AudioSegment audio = ReadAudioAuto(audio_path, raw_rate_hz);
  const PipelineOptions pipeline = BuildPipelineOptions(model, options);

  LatencyStats latency;
  const std::vector<StepOutput> outputs =
      RunPipeline(model, audio, pipeline, &latency);
  WriteTextFile(output_path, StepOutputsToJsonLines(outputs, model.languages));

  if (!switch_events_path.empty()) {
    std::vector<SwitchEvent> events;
    for (const StepOutput& step : outputs) {
      if (!step.switch_fired) continue;
      SwitchEvent event;
      event.step = step.step;
      event.previous_language = step.switch_from;
      event.new_language = step.switch_to;
      event.confidence = step.confidence;
      events.push_back(event);
    }
    WriteTextFile(switch_events_path, SwitchEventsJsonLines(events, model.languages));
  }

  std::ostringstream summary;
  summary.precision(3);
  summary << "steps=" << latency.steps;
  if (latency.steps > 0) {
    summary << " post-frontend latency avg_ms="
            << latency.total_ms / static_cast<double>(latency.steps)
            << " max_ms=" << latency.max_ms;
  }
  return summary.str();
}

std::vector<ManifestRecord> LoadManifest(const std::string& path) {
  std::istringstream in(ReadTextFile(path));
  std::vector<ManifestRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const size_t sep = line.find_last_of(" \t");
    if (sep == std::string::npos) {
      ThrowInvalidInput("manifest line needs '<path> <language>': " + line);
    }
    ManifestRecord record;
    record.path = line.substr(0, sep);
    while (!record.path.empty() &&
           (record.path.back() == ' ' || record.path.back() == '\t')) {
      record.path.pop_back();
    }
    record.language_code = line.substr(sep + 1);
    records.push_back(std::move(record));
  }
  if (records.empty()) ThrowInvalidInput("manifest is empty: " + path);
  return records;
}

namespace {

std::vector<Embedding> EmbeddingsForRecord(const ManifestRecord& record,
                                           const Model& model) {
  const ModelContainer container = LoadContainer(record.path);
  if (container.tensors.count("embeddings")) {
    return EmbeddingsFromContainer(container);
  }
  if (container.tensors.count("features")) {
    return EncodeSequence(FeaturesFromContainer(container), model.encoder,
                          model.encoder_config);
  }
  throw Error(ErrorCode::kNotFound,
              "container holds neither 'features' nor 'embeddings': " + record.path);
}

int LanguageIndexOrThrow(const Model& model, const std::string& code) {
  const int index = model.languages.IndexOf(code);
  if (index < 0) {
    ThrowInvalidInput("language '" + code + "' is not in the model's table");
  }
  return index;
}

}  // namespace

std::vector<LabeledUtterance> LoadTrainingData(
    const std::vector<ManifestRecord>& records, const Model& model) {
  std::vector<LabeledUtterance> data;
  data.reserve(records.size());
  uint64_t id = 0;
  for (const ManifestRecord& record : records) {
    LabeledUtterance utt;
    utt.truth_index = LanguageIndexOrThrow(model, record.language_code);
    utt.utterance_id = id++;
    const std::vector<Embedding> embeddings = EmbeddingsForRecord(record, model);
    if (embeddings.empty()) {
      ThrowInvalidInput("record produced no embeddings: " + record.path);
    }
    if (static_cast<int>(embeddings[0].values.size()) !=
        model.encoder_config.model_dim) {
      ThrowInvalidInput("embeddings in " + record.path + " have dimension " +
                        std::to_string(embeddings[0].values.size()) +
                        ", model expects " +
                        std::to_string(model.encoder_config.model_dim));
    }
    utt.embeddings.reserve(embeddings.size());
    for (const Embedding& e : embeddings) {
      utt.embeddings.emplace_back(e.values.begin(), e.values.end());
    }
    data.push_back(std::move(utt));
  }
  return data;
}

void OpTrainHead(const std::string& manifest_path, const std::string& model_path,
                 const std::string& config_path, uint64_t model_seed,
                 const TrainHeadOptions& options, const std::string& output_model_path,
                 const std::string& loss_csv_path) {
  Model model = LoadModelOrCreate(model_path, config_path, model_seed);
  const std::vector<ManifestRecord> records = LoadManifest(manifest_path);
  const std::vector<LabeledUtterance> data = LoadTrainingData(records, model);

  TrainConfig config;
  config.learning_rate = options.learning_rate;
  config.steps = options.steps;
  config.batch_size = options.batch_size;
  config.seed = options.seed;
  config.train_sigma_path = options.train_sigma_path;
  config.use_adam = options.use_adam;
  config.mode = model.pooling_mode;
  config.hidden_dim = model.head.hidden_dim();

  const TrainResult result = TrainHead(data, config);
  if (result.head.num_classes() > model.languages.size()) {
    ThrowInvalidInput("training data references classes beyond the language table");
  }

  model.attention = result.attention;
  // Keep the head K-way even when the data covers fewer classes.
  model.head.hidden_weight = result.head.hidden_weight;
  model.head.hidden_bias = result.head.hidden_bias;
  for (int c = 0; c < result.head.num_classes(); ++c) {
    model.head.out_weight[c] = result.head.out_weight[c];
    model.head.out_bias[c] = result.head.out_bias[c];
  }
  SaveModel(model, output_model_path);

  if (!loss_csv_path.empty()) {
    std::ostringstream csv;
    csv.precision(12);
    csv << "step,loss\n";
    for (size_t i = 0; i < result.loss_curve.size(); ++i) {
      csv << i << "," << result.loss_curve[i] << "\n";
    }
    WriteTextFile(loss_csv_path, csv.str());
  }
}

namespace {

// Final-step posterior of every record, with truth labels.
std::vector<AdaptExample> DevPosteriors(const std::vector<ManifestRecord>& records,
                                        const Model& model) {
  std::vector<AdaptExample> dev;
  dev.reserve(records.size());
  for (const ManifestRecord& record : records) {
    const std::vector<Embedding> embeddings = EmbeddingsForRecord(record, model);
    if (embeddings.empty()) {
      ThrowInvalidInput("record produced no embeddings: " + record.path);
    }
    const std::vector<PooledVector> pooled =
        PoolStream(embeddings, model.attention, model.pooling_mode);
    AdaptExample ex;
    ex.posterior = Classify(pooled.back(), model.head);
    ex.truth_index = LanguageIndexOrThrow(model, record.language_code);
    dev.push_back(std::move(ex));
  }
  return dev;
}

}  // namespace

void OpTrainAdaptation(const std::string& model_path, const std::string& manifest_path,
                       const std::string& domain_id, double w_reg,
                       double learning_rate, int64_t steps,
                       const std::string& registry_path) {
  if (domain_id.empty()) ThrowInvalidInput("train-adaptation requires a domain id");
  const Model model = LoadModel(model_path);
  const std::vector<ManifestRecord> records = LoadManifest(manifest_path);
  const std::vector<AdaptExample> dev = DevPosteriors(records, model);

  AdaptObjectiveConfig config;
  config.w_reg = w_reg;
  config.learning_rate = learning_rate;
  config.steps = steps;
  const AdaptationParams params = TrainAdaptation(dev, config, domain_id);

  DomainRegistry registry(model.languages.size(), model.languages.Checksum());
  std::ifstream probe(registry_path);
  if (probe.good()) {
    probe.close();
    registry = DomainRegistry::LoadFromFile(registry_path, model.languages.Checksum());
  }
  registry.Register(params);
  registry.SaveToFile(registry_path);
}

namespace {

// Per-step confidence samples across the dev manifest.
std::vector<ConfidenceSample> DevConfidenceSamples(
    const std::vector<ManifestRecord>& records, const Model& model,
    const TrainConfidenceOptions& options) {
  AdaptationParams adaptation = AdaptationParams::Identity(model.languages.size());
  if (!options.registry_path.empty() && !options.domain_id.empty()) {
    const DomainRegistry registry = DomainRegistry::LoadFromFile(
        options.registry_path, model.languages.Checksum());
    adaptation = registry.Lookup(options.domain_id);
  }

  std::vector<ConfidenceSample> samples;
  for (const ManifestRecord& record : records) {
    const int truth = LanguageIndexOrThrow(model, record.language_code);
    const std::vector<Embedding> embeddings = EmbeddingsForRecord(record, model);
    const std::vector<PooledVector> pooled =
        PoolStream(embeddings, model.attention, model.pooling_mode);
    ConfidenceExtractor extractor;
    for (size_t t = 0; t < pooled.size(); ++t) {
      Posterior p = Classify(pooled[t], model.head);
      p.step = static_cast<int64_t>(t);
      if (options.on_adapted) p = AdaptPosterior(p, adaptation);
      ConfidenceSample sample;
      sample.features = extractor.Push(p);
      sample.label = Argmax(p.probs) == truth ? 1 : 0;
      samples.push_back(sample);
    }
  }
  return samples;
}

}  // namespace

void OpTrainConfidence(const std::string& model_path, const std::string& manifest_path,
                       const TrainConfidenceOptions& options,
                       const std::string& output_record_path) {
  const Model model = LoadModel(model_path);
  const std::vector<ManifestRecord> records = LoadManifest(manifest_path);
  const std::vector<ConfidenceSample> samples =
      DevConfidenceSamples(records, model, options);

  ConfidenceTrainConfig config;
  config.learning_rate = options.learning_rate;
  config.steps = options.steps;
  config.seed = options.seed;
  const ConfidenceModel trained = TrainConfidence(samples, config);
  SaveConfidenceModel(trained, output_record_path);
}

DetCurve OpCalibrate(const std::string& model_path, const std::string& manifest_path,
                     const std::string& confidence_model_path,
                     const TrainConfidenceOptions& stream_options,
                     ThresholdRule rule, double max_false_accept,
                     const std::string& output_record_path,
                     const std::string& det_csv_path) {
  const Model model = LoadModel(model_path);
  ConfidenceModel confidence = LoadConfidenceModel(confidence_model_path);
  const std::vector<ManifestRecord> records = LoadManifest(manifest_path);
  const std::vector<ConfidenceSample> samples =
      DevConfidenceSamples(records, model, stream_options);

  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(samples.size());
  labels.reserve(samples.size());
  for (const ConfidenceSample& s : samples) {
    scores.push_back(ConfidenceScore(s.features, confidence));
    labels.push_back(s.label);
  }
  const DetCurve curve = CalibrateThreshold(scores, labels, rule, max_false_accept);

  if (!output_record_path.empty()) {
    confidence.threshold = curve.tau;
    SaveConfidenceModel(confidence, output_record_path);
  }
  if (!det_csv_path.empty()) {
    WriteTextFile(det_csv_path, DetCurveCsv(curve));
  }
  return curve;
}

EvalSummary OpEval(const std::string& model_path, const std::string& manifest_path,
                   const std::string& domain_id, const std::string& registry_path,
                   bool majority_vote, const std::string& output_csv_path) {
  const Model model = LoadModel(model_path);
  AdaptationParams adaptation = AdaptationParams::Identity(model.languages.size());
  if (!registry_path.empty() && !domain_id.empty()) {
    const DomainRegistry registry =
        DomainRegistry::LoadFromFile(registry_path, model.languages.Checksum());
    adaptation = registry.Lookup(domain_id);
  }

  const std::vector<ManifestRecord> records = LoadManifest(manifest_path);
  std::vector<EvalRecord> eval_records;
  eval_records.reserve(records.size());
  uint64_t id = 0;
  for (const ManifestRecord& record : records) {
    const std::vector<Embedding> embeddings = EmbeddingsForRecord(record, model);
    const std::vector<PooledVector> pooled =
        PoolStream(embeddings, model.attention, model.pooling_mode);
    EvalRecord r;
    r.utterance_id = std::to_string(id++);
    r.truth_index = LanguageIndexOrThrow(model, record.language_code);
    if (majority_vote) {
      std::map<int, int64_t> votes;
      for (const PooledVector& pv : pooled) {
        Posterior p = Classify(pv, model.head);
        p = AdaptPosterior(p, adaptation);
        ++votes[Argmax(p.probs)];
      }
      int best = -1;
      int64_t best_votes = -1;
      for (const auto& [lang, count] : votes) {
        if (count > best_votes) {
          best = lang;
          best_votes = count;
        }
      }
      r.predicted_index = best;
    } else {
      Posterior p = Classify(pooled.back(), model.head);
      p = AdaptPosterior(p, adaptation);
      r.predicted_index = Argmax(p.probs);
    }
    eval_records.push_back(std::move(r));
  }

  if (!output_csv_path.empty()) {
    WriteTextFile(output_csv_path, EvalCsv(eval_records, model.languages));
  }

  EvalSummary summary;
  summary.num_records = static_cast<int64_t>(eval_records.size());
  summary.total_accuracy = TotalAccuracy(eval_records);
  summary.average_accuracy = AverageAccuracy(PerLanguageAccuracy(eval_records));
  return summary;
}

}  // namespace slid
