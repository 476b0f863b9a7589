/* Copyright 2026 The Slid Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* slid -- streaming spoken language identification engine.
 *
 * C interface of the shared library. Handles are opaque; every function
 * returns a slid_status, and slid_last_error() describes the most recent
 * failure on the calling thread.
 */

#ifndef SLID_H_
#define SLID_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SLID_API __declspec(dllexport)
#else
#define SLID_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum slid_status {
  SLID_OK = 0,
  SLID_ERROR_INVALID_INPUT = 2, /* bad caller data: audio, manifests, ranges */
  SLID_ERROR_MODEL = 3,         /* container magic/version/checksum, registry */
  SLID_ERROR_CONFIG = 4,        /* config / weight-shape inconsistencies */
  SLID_ERROR_USAGE = 5,
  SLID_ERROR_DEGENERATE_DATA = 6,
  SLID_ERROR_NOT_FOUND = 7,
  SLID_ERROR_IO = 8,
  SLID_ERROR_INTERNAL = 9
} slid_status;

typedef struct slid_model slid_model;
typedef struct slid_stream slid_stream;

SLID_API const char* slid_version(void);

/* Message for the last failing call on this thread; never NULL. */
SLID_API const char* slid_last_error(void);

/* ------------------------------------------------------------------ */
/* Model lifecycle                                                     */

SLID_API slid_status slid_model_load(const char* path, slid_model** out_model);

/* Random-weight model from a key-value config file (NULL -> defaults). */
SLID_API slid_status slid_model_create(const char* config_path, uint64_t seed,
                                       slid_model** out_model);

SLID_API slid_status slid_model_save(const slid_model* model, const char* path);
SLID_API void slid_model_free(slid_model* model);

SLID_API int slid_model_num_languages(const slid_model* model);
/* Borrowed pointer, valid while the model lives; NULL when out of range. */
SLID_API const char* slid_model_language(const slid_model* model, int index);
/* Writes the language table as plain text, one code per line. */
SLID_API slid_status slid_model_export_languages(const slid_model* model,
                                                 const char* path);

/* ------------------------------------------------------------------ */
/* Streaming inference                                                 */

#define SLID_MAX_TOP 5

typedef struct slid_step_result {
  int64_t step;
  int64_t time_ms;
  int32_t n_top; /* entries filled in the arrays below */
  int32_t top_index[SLID_MAX_TOP];
  float top_prob[SLID_MAX_TOP];
  int32_t adapted_top_index[SLID_MAX_TOP];
  float adapted_top_prob[SLID_MAX_TOP];
  float confidence;
  int32_t switch_fired; /* 1 when a language switch event fired */
  int32_t switch_from;  /* -1 on the initial event */
  int32_t switch_to;
} slid_step_result;

typedef struct slid_stream_options {
  const char* domain_id;             /* NULL -> identity adaptation */
  const char* registry_path;         /* NULL -> no registry */
  const char* confidence_model_path; /* NULL -> zero model (score 0.5) */
  double tau;                        /* < 0 -> confidence model's tau */
  int confidence_on_adapted;         /* default 1 */
} slid_stream_options;

SLID_API void slid_stream_options_init(slid_stream_options* options);

SLID_API slid_status slid_stream_new(const slid_model* model,
                                     const slid_stream_options* options,
                                     slid_stream** out_stream);

/* Push float samples at the model's rate. Results (0 or more per call) are
 * written to `results`; *n_results receives the count. Returns
 * SLID_ERROR_INVALID_INPUT if more than `max_results` steps would be
 * produced; push smaller chunks in that case. */
SLID_API slid_status slid_stream_push(slid_stream* stream, const float* samples,
                                      size_t n, slid_step_result* results,
                                      size_t max_results, size_t* n_results);

/* Flushes buffered audio (trailing partial gain-control window). */
SLID_API slid_status slid_stream_finish(slid_stream* stream,
                                        slid_step_result* results,
                                        size_t max_results, size_t* n_results);

SLID_API void slid_stream_free(slid_stream* stream);

/* ------------------------------------------------------------------ */
/* Batch operations (paths in, paths out)                              */

/* Training-time augmentation: exactly one of noise mixing (MTR) or
 * SpecAugment is chosen per utterance from (seed, utterance_id). */
typedef struct slid_augment_options {
  const char* noise_manifest; /* one audio path per line; NULL -> SpecAugment */
  const char* rir_manifest;   /* impulse responses for reverb; NULL ok */
  double snr_db_min;
  double snr_db_max;
  double apply_probability; /* probability of the MTR branch */
  int num_freq_masks;
  int max_freq_mask_bins;
  int num_time_masks;
  int max_time_mask_frames;
  uint64_t seed;
  uint64_t utterance_id;
} slid_augment_options;

SLID_API void slid_augment_options_init(slid_augment_options* options);

/* raw_rate_hz > 0 reads headerless float32 at that rate (non-.wav paths);
 * otherwise the file must be a 16-bit PCM RIFF wav. `augment` NULL disables
 * augmentation. */
SLID_API slid_status slid_featurize(const char* audio_path, int raw_rate_hz,
                                    const char* config_path, /* NULL ok */
                                    const char* output_path, int as_csv,
                                    const slid_augment_options* augment);

/* Runs the streaming pipeline over a whole file. One JSON object per step
 * goes to output_jsonl_path; switch events additionally go to
 * switch_events_jsonl_path when given (one {"step","from","to","confidence"}
 * object per event). */
SLID_API slid_status slid_infer_file(const char* model_path,  /* NULL -> random */
                                     const char* config_path, /* NULL ok */
                                     uint64_t seed, const char* audio_path,
                                     int raw_rate_hz,
                                     const slid_stream_options* options,
                                     const char* output_jsonl_path,
                                     const char* switch_events_jsonl_path, /* NULL ok */
                                     char* latency_summary, /* NULL ok */
                                     size_t latency_summary_size);

typedef struct slid_train_head_options {
  double learning_rate;
  int64_t steps;
  int64_t batch_size; /* 0 = full batch */
  uint64_t seed;
  int train_sigma_path;
  int use_adam;
} slid_train_head_options;

SLID_API void slid_train_head_options_init(slid_train_head_options* options);

/* Trains pooling attention + head on a manifest of feature/embedding
 * containers ("<path> <language>" per line); the encoder stays frozen.
 * model_path NULL -> a fresh random model from config_path/model_seed. */
SLID_API slid_status slid_train_head(const char* manifest_path,
                                     const char* model_path,  /* NULL ok */
                                     const char* config_path, /* NULL ok */
                                     uint64_t model_seed,
                                     const slid_train_head_options* options,
                                     const char* output_model_path,
                                     const char* loss_csv_path /* NULL ok */);

SLID_API slid_status slid_train_adaptation(const char* model_path,
                                           const char* dev_manifest_path,
                                           const char* domain_id, double w_reg,
                                           double learning_rate, int64_t steps,
                                           const char* registry_path);

typedef struct slid_train_confidence_options {
  double learning_rate;
  int64_t steps;
  uint64_t seed;
  const char* domain_id;     /* NULL -> unadapted stream */
  const char* registry_path; /* NULL -> unadapted stream */
  int on_adapted;
} slid_train_confidence_options;

SLID_API void slid_train_confidence_options_init(
    slid_train_confidence_options* options);

SLID_API slid_status slid_train_confidence(
    const char* model_path, const char* dev_manifest_path,
    const slid_train_confidence_options* options, const char* output_record_path);

/* rule: 0 = equal error rate, 1 = max false-accept constraint. */
SLID_API slid_status slid_calibrate(const char* model_path,
                                    const char* dev_manifest_path,
                                    const char* confidence_model_path, int rule,
                                    double max_false_accept,
                                    const char* output_record_path, /* NULL ok */
                                    const char* det_csv_path /* NULL ok */);

SLID_API slid_status slid_eval(const char* model_path, const char* manifest_path,
                               const char* domain_id,     /* NULL ok */
                               const char* registry_path, /* NULL ok */
                               int majority_vote, const char* output_csv_path,
                               double* out_average_accuracy,
                               double* out_total_accuracy);

/* Analytic FLOP estimate per second of audio for the configured encoder. */
SLID_API slid_status slid_estimate_flops(const char* config_path, /* NULL ok */
                                         double* out_flops_per_second);

/* Human-readable breakdown of the same estimate. */
SLID_API slid_status slid_flops_report(const char* config_path, /* NULL ok */
                                       char* buffer, size_t buffer_size);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SLID_H_ */
