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

#include "slid.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <string>

#include "error.hpp"
#include "operations.hpp"
#include "pipeline.hpp"

namespace {

thread_local std::string g_last_error;

slid_status CodeToStatus(slid::ErrorCode code) {
  switch (code) {
    case slid::ErrorCode::kOk: return SLID_OK;
    case slid::ErrorCode::kInvalidInput: return SLID_ERROR_INVALID_INPUT;
    case slid::ErrorCode::kConfig: return SLID_ERROR_CONFIG;
    case slid::ErrorCode::kModel: return SLID_ERROR_MODEL;
    case slid::ErrorCode::kUsage: return SLID_ERROR_USAGE;
    case slid::ErrorCode::kDegenerateData: return SLID_ERROR_DEGENERATE_DATA;
    case slid::ErrorCode::kNotFound: return SLID_ERROR_NOT_FOUND;
    case slid::ErrorCode::kIo: return SLID_ERROR_IO;
    case slid::ErrorCode::kInternal: return SLID_ERROR_INTERNAL;
  }
  return SLID_ERROR_INTERNAL;
}

template <typename Fn>
slid_status Guard(Fn&& fn) {
  try {
    fn();
    return SLID_OK;
  } catch (const slid::Error& e) {
    g_last_error = e.what();
    return CodeToStatus(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SLID_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SLID_ERROR_INTERNAL;
  }
}

std::string OrEmpty(const char* s) { return s ? std::string(s) : std::string(); }

slid_status RequireArg(const void* p, const char* what) {
  if (p != nullptr) return SLID_OK;
  g_last_error = std::string("missing required argument: ") + what;
  return SLID_ERROR_USAGE;
}

}  // namespace

struct slid_model {
  slid::Model model;
};

struct slid_stream {
  const slid_model* owner;
  slid::PipelineStream stream;

  slid_stream(const slid_model* model, const slid::PipelineOptions& options)
      : owner(model), stream(model->model, options) {}
};

namespace {

slid::PipelineOptions BuildOptions(const slid::Model& model,
                                   const slid_stream_options* options) {
  slid::InferOptions infer;
  if (options) {
    infer.domain_id = OrEmpty(options->domain_id);
    infer.registry_path = OrEmpty(options->registry_path);
    infer.confidence_model_path = OrEmpty(options->confidence_model_path);
    infer.tau = options->tau;
    infer.confidence_on_adapted = options->confidence_on_adapted != 0;
  }
  slid::PipelineOptions pipeline;
  pipeline.adaptation = slid::AdaptationParams::Identity(model.languages.size());
  if (!infer.registry_path.empty()) {
    const slid::DomainRegistry registry = slid::DomainRegistry::LoadFromFile(
        infer.registry_path, model.languages.Checksum());
    pipeline.adaptation =
        registry.Lookup(infer.domain_id.empty() ? "default" : infer.domain_id);
  }
  if (!infer.confidence_model_path.empty()) {
    pipeline.confidence = slid::LoadConfidenceModel(infer.confidence_model_path);
  }
  pipeline.tau = infer.tau >= 0.0 ? infer.tau : pipeline.confidence.threshold;
  pipeline.confidence_on_adapted = infer.confidence_on_adapted;
  return pipeline;
}

void FillResult(const slid::StepOutput& step, slid_step_result* out) {
  std::memset(out, 0, sizeof(*out));
  out->step = step.step;
  out->time_ms = step.time_ms;
  out->n_top = static_cast<int32_t>(
      std::min<size_t>(step.top.size(), SLID_MAX_TOP));
  for (int i = 0; i < out->n_top; ++i) {
    out->top_index[i] = step.top[i].first;
    out->top_prob[i] = static_cast<float>(step.top[i].second);
    out->adapted_top_index[i] = step.adapted_top[i].first;
    out->adapted_top_prob[i] = static_cast<float>(step.adapted_top[i].second);
  }
  out->confidence = static_cast<float>(step.confidence);
  out->switch_fired = step.switch_fired ? 1 : 0;
  out->switch_from = step.switch_from;
  out->switch_to = step.switch_to;
}

slid_status DrainSteps(const std::vector<slid::StepOutput>& steps,
                       slid_step_result* results, size_t max_results,
                       size_t* n_results) {
  if (steps.size() > max_results) {
    g_last_error = "result buffer too small: need " + std::to_string(steps.size()) +
                   " entries, got " + std::to_string(max_results);
    return SLID_ERROR_INVALID_INPUT;
  }
  for (size_t i = 0; i < steps.size(); ++i) FillResult(steps[i], &results[i]);
  if (n_results) *n_results = steps.size();
  return SLID_OK;
}

}  // namespace

namespace {

slid::TrainConfidenceOptions ToConfidenceOptions(
    const slid_train_confidence_options* options) {
  slid::TrainConfidenceOptions out;
  if (options) {
    out.learning_rate = options->learning_rate;
    out.steps = options->steps;
    out.seed = options->seed;
    out.domain_id = OrEmpty(options->domain_id);
    out.registry_path = OrEmpty(options->registry_path);
    out.on_adapted = options->on_adapted != 0;
  }
  return out;
}

}  // namespace

extern "C" {

const char* slid_version(void) { return "slid 1.0.0"; }

const char* slid_last_error(void) { return g_last_error.c_str(); }

slid_status slid_model_load(const char* path, slid_model** out_model) {
  if (slid_status s = RequireArg(path, "path"); s != SLID_OK) return s;
  if (slid_status s = RequireArg(out_model, "out_model"); s != SLID_OK) return s;
  return Guard([&] {
    auto* handle = new slid_model{slid::LoadModel(path)};
    *out_model = handle;
  });
}

slid_status slid_model_create(const char* config_path, uint64_t seed,
                              slid_model** out_model) {
  if (slid_status s = RequireArg(out_model, "out_model"); s != SLID_OK) return s;
  return Guard([&] {
    auto* handle =
        new slid_model{slid::LoadModelOrCreate("", OrEmpty(config_path), seed)};
    *out_model = handle;
  });
}

slid_status slid_model_save(const slid_model* model, const char* path) {
  if (slid_status s = RequireArg(model, "model"); s != SLID_OK) return s;
  if (slid_status s = RequireArg(path, "path"); s != SLID_OK) return s;
  return Guard([&] { slid::SaveModel(model->model, path); });
}

void slid_model_free(slid_model* model) { delete model; }

int slid_model_num_languages(const slid_model* model) {
  return model ? model->model.languages.size() : 0;
}

const char* slid_model_language(const slid_model* model, int index) {
  if (!model || index < 0 || index >= model->model.languages.size()) return nullptr;
  return model->model.languages.codes[index].c_str();
}

slid_status slid_model_export_languages(const slid_model* model, const char* path) {
  if (slid_status s = RequireArg(model, "model"); s != SLID_OK) return s;
  if (slid_status s = RequireArg(path, "path"); s != SLID_OK) return s;
  return Guard([&] {
    std::string text;
    for (const std::string& code : model->model.languages.codes) {
      text += code + "\n";
    }
    slid::WriteTextFile(path, text);
  });
}

void slid_stream_options_init(slid_stream_options* options) {
  if (!options) return;
  options->domain_id = nullptr;
  options->registry_path = nullptr;
  options->confidence_model_path = nullptr;
  options->tau = -1.0;
  options->confidence_on_adapted = 1;
}

slid_status slid_stream_new(const slid_model* model,
                            const slid_stream_options* options,
                            slid_stream** out_stream) {
  if (slid_status s = RequireArg(model, "model"); s != SLID_OK) return s;
  if (slid_status s = RequireArg(out_stream, "out_stream"); s != SLID_OK) return s;
  return Guard([&] {
    *out_stream = new slid_stream(model, BuildOptions(model->model, options));
  });
}

slid_status slid_stream_push(slid_stream* stream, const float* samples, size_t n,
                             slid_step_result* results, size_t max_results,
                             size_t* n_results) {
  if (slid_status s = RequireArg(stream, "stream"); s != SLID_OK) return s;
  if (n > 0) {
    if (slid_status s = RequireArg(samples, "samples"); s != SLID_OK) return s;
  }
  if (n_results) *n_results = 0;
  slid_status status = SLID_OK;
  slid_status guard = Guard([&] {
    const std::vector<slid::StepOutput> steps = stream->stream.PushSamples(samples, n);
    status = DrainSteps(steps, results, max_results, n_results);
  });
  return guard != SLID_OK ? guard : status;
}

slid_status slid_stream_finish(slid_stream* stream, slid_step_result* results,
                               size_t max_results, size_t* n_results) {
  if (slid_status s = RequireArg(stream, "stream"); s != SLID_OK) return s;
  if (n_results) *n_results = 0;
  slid_status status = SLID_OK;
  slid_status guard = Guard([&] {
    const std::vector<slid::StepOutput> steps = stream->stream.Finish();
    status = DrainSteps(steps, results, max_results, n_results);
  });
  return guard != SLID_OK ? guard : status;
}

void slid_stream_free(slid_stream* stream) { delete stream; }

void slid_augment_options_init(slid_augment_options* options) {
  if (!options) return;
  options->noise_manifest = nullptr;
  options->rir_manifest = nullptr;
  options->snr_db_min = 5.0;
  options->snr_db_max = 25.0;
  options->apply_probability = 0.5;
  options->num_freq_masks = 2;
  options->max_freq_mask_bins = 27;
  options->num_time_masks = 2;
  options->max_time_mask_frames = 40;
  options->seed = 0;
  options->utterance_id = 0;
}

slid_status slid_featurize(const char* audio_path, int raw_rate_hz,
                           const char* config_path, const char* output_path,
                           int as_csv, const slid_augment_options* augment) {
  if (slid_status s = RequireArg(audio_path, "audio_path"); s != SLID_OK) return s;
  if (slid_status s = RequireArg(output_path, "output_path"); s != SLID_OK) return s;
  return Guard([&] {
    slid::AugmentOptions options;
    if (augment) {
      options.enabled = true;
      options.noise_manifest = OrEmpty(augment->noise_manifest);
      options.rir_manifest = OrEmpty(augment->rir_manifest);
      options.snr_db_min = augment->snr_db_min;
      options.snr_db_max = augment->snr_db_max;
      options.apply_probability = augment->apply_probability;
      options.specaugment.num_freq_masks = augment->num_freq_masks;
      options.specaugment.max_freq_mask_bins = augment->max_freq_mask_bins;
      options.specaugment.num_time_masks = augment->num_time_masks;
      options.specaugment.max_time_mask_frames = augment->max_time_mask_frames;
      options.seed = augment->seed;
      options.utterance_id = augment->utterance_id;
    }
    slid::OpFeaturize(audio_path, raw_rate_hz, OrEmpty(config_path), output_path,
                      as_csv != 0, options);
  });
}

slid_status slid_infer_file(const char* model_path, const char* config_path,
                            uint64_t seed, const char* audio_path, int raw_rate_hz,
                            const slid_stream_options* options,
                            const char* output_jsonl_path,
                            const char* switch_events_jsonl_path,
                            char* latency_summary, size_t latency_summary_size) {
  if (slid_status s = RequireArg(audio_path, "audio_path"); s != SLID_OK) return s;
  if (slid_status s = RequireArg(output_jsonl_path, "output_jsonl_path"); s != SLID_OK) {
    return s;
  }
  return Guard([&] {
    slid::InferOptions infer;
    if (options) {
      infer.domain_id = OrEmpty(options->domain_id);
      infer.registry_path = OrEmpty(options->registry_path);
      infer.confidence_model_path = OrEmpty(options->confidence_model_path);
      infer.tau = options->tau;
      infer.confidence_on_adapted = options->confidence_on_adapted != 0;
    }
    const std::string summary = slid::OpInfer(
        OrEmpty(model_path), OrEmpty(config_path), seed, audio_path, raw_rate_hz,
        infer, output_jsonl_path, OrEmpty(switch_events_jsonl_path));
    if (latency_summary && latency_summary_size > 0) {
      std::snprintf(latency_summary, latency_summary_size, "%s", summary.c_str());
    }
  });
}

void slid_train_head_options_init(slid_train_head_options* options) {
  if (!options) return;
  options->learning_rate = 0.05;
  options->steps = 200;
  options->batch_size = 0;
  options->seed = 1;
  options->train_sigma_path = 0;
  options->use_adam = 0;
}

slid_status slid_train_head(const char* manifest_path, const char* model_path,
                            const char* config_path, uint64_t model_seed,
                            const slid_train_head_options* options,
                            const char* output_model_path,
                            const char* loss_csv_path) {
  if (slid_status s = RequireArg(manifest_path, "manifest_path"); s != SLID_OK) return s;
  if (slid_status s = RequireArg(output_model_path, "output_model_path"); s != SLID_OK) {
    return s;
  }
  return Guard([&] {
    slid::TrainHeadOptions opts;
    if (options) {
      opts.learning_rate = options->learning_rate;
      opts.steps = options->steps;
      opts.batch_size = options->batch_size;
      opts.seed = options->seed;
      opts.train_sigma_path = options->train_sigma_path != 0;
      opts.use_adam = options->use_adam != 0;
    }
    slid::OpTrainHead(manifest_path, OrEmpty(model_path), OrEmpty(config_path),
                      model_seed, opts, output_model_path, OrEmpty(loss_csv_path));
  });
}

slid_status slid_train_adaptation(const char* model_path,
                                  const char* dev_manifest_path,
                                  const char* domain_id, double w_reg,
                                  double learning_rate, int64_t steps,
                                  const char* registry_path) {
  if (slid_status s = RequireArg(model_path, "model_path"); s != SLID_OK) return s;
  if (slid_status s = RequireArg(dev_manifest_path, "dev_manifest_path"); s != SLID_OK) {
    return s;
  }
  if (slid_status s = RequireArg(domain_id, "domain_id"); s != SLID_OK) return s;
  if (slid_status s = RequireArg(registry_path, "registry_path"); s != SLID_OK) return s;
  return Guard([&] {
    slid::OpTrainAdaptation(model_path, dev_manifest_path, domain_id, w_reg,
                            learning_rate, steps, registry_path);
  });
}

void slid_train_confidence_options_init(slid_train_confidence_options* options) {
  if (!options) return;
  options->learning_rate = 0.5;
  options->steps = 3000;
  options->seed = 1;
  options->domain_id = nullptr;
  options->registry_path = nullptr;
  options->on_adapted = 1;
}

slid_status slid_train_confidence(const char* model_path,
                                  const char* dev_manifest_path,
                                  const slid_train_confidence_options* options,
                                  const char* output_record_path) {
  if (slid_status s = RequireArg(model_path, "model_path"); s != SLID_OK) return s;
  if (slid_status s = RequireArg(dev_manifest_path, "dev_manifest_path"); s != SLID_OK) {
    return s;
  }
  if (slid_status s = RequireArg(output_record_path, "output_record_path");
      s != SLID_OK) {
    return s;
  }
  return Guard([&] {
    slid::OpTrainConfidence(model_path, dev_manifest_path,
                            ToConfidenceOptions(options), output_record_path);
  });
}

slid_status slid_calibrate(const char* model_path, const char* dev_manifest_path,
                           const char* confidence_model_path, int rule,
                           double max_false_accept, const char* output_record_path,
                           const char* det_csv_path) {
  if (slid_status s = RequireArg(model_path, "model_path"); s != SLID_OK) return s;
  if (slid_status s = RequireArg(dev_manifest_path, "dev_manifest_path"); s != SLID_OK) {
    return s;
  }
  if (slid_status s = RequireArg(confidence_model_path, "confidence_model_path");
      s != SLID_OK) {
    return s;
  }
  return Guard([&] {
    slid::OpCalibrate(model_path, dev_manifest_path, confidence_model_path,
                      slid::TrainConfidenceOptions(),
                      rule == 1 ? slid::ThresholdRule::kMaxFalseAccept
                                : slid::ThresholdRule::kEqualErrorRate,
                      max_false_accept, OrEmpty(output_record_path),
                      OrEmpty(det_csv_path));
  });
}

slid_status slid_eval(const char* model_path, const char* manifest_path,
                      const char* domain_id, const char* registry_path,
                      int majority_vote, const char* output_csv_path,
                      double* out_average_accuracy, double* out_total_accuracy) {
  if (slid_status s = RequireArg(model_path, "model_path"); s != SLID_OK) return s;
  if (slid_status s = RequireArg(manifest_path, "manifest_path"); s != SLID_OK) return s;
  return Guard([&] {
    const slid::EvalSummary summary =
        slid::OpEval(model_path, manifest_path, OrEmpty(domain_id),
                     OrEmpty(registry_path), majority_vote != 0,
                     OrEmpty(output_csv_path));
    if (out_average_accuracy) *out_average_accuracy = summary.average_accuracy;
    if (out_total_accuracy) *out_total_accuracy = summary.total_accuracy;
  });
}

slid_status slid_estimate_flops(const char* config_path,
                                double* out_flops_per_second) {
  if (slid_status s = RequireArg(out_flops_per_second, "out_flops_per_second");
      s != SLID_OK) {
    return s;
  }
  return Guard([&] {
    const slid::ModelSettings settings =
        config_path ? slid::ParseModelSettings(slid::KeyValueConfig::FromFile(config_path))
                    : slid::DefaultModelSettings();
    *out_flops_per_second =
        slid::EstimateFlops(settings.encoder, settings.frontend,
                            settings.languages.size(), settings.head_hidden_dim)
            .Total();
  });
}

slid_status slid_flops_report(const char* config_path, char* buffer,
                              size_t buffer_size) {
  if (slid_status s = RequireArg(buffer, "buffer"); s != SLID_OK) return s;
  return Guard([&] {
    const slid::ModelSettings settings =
        config_path ? slid::ParseModelSettings(slid::KeyValueConfig::FromFile(config_path))
                    : slid::DefaultModelSettings();
    const std::string report =
        slid::FlopReport(settings.encoder, settings.frontend,
                         settings.languages.size(), settings.head_hidden_dim);
    std::snprintf(buffer, buffer_size, "%s", report.c_str());
  });
}

}  // extern "C"
