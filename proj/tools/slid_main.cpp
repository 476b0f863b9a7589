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

// Command-line front end. Everything here goes through the C API in
// slid.h; the core library is not linked directly.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slid.h"

namespace {

const char* StatusName(slid_status status) {
  switch (status) {
    case SLID_OK: return "ok";
    case SLID_ERROR_INVALID_INPUT: return "invalid input";
    case SLID_ERROR_MODEL: return "model error";
    case SLID_ERROR_CONFIG: return "configuration error";
    case SLID_ERROR_USAGE: return "usage error";
    case SLID_ERROR_DEGENERATE_DATA: return "degenerate data";
    case SLID_ERROR_NOT_FOUND: return "not found";
    case SLID_ERROR_IO: return "io error";
    case SLID_ERROR_INTERNAL: return "internal error";
  }
  return "error";
}

// Exit codes: 0 success, 2 invalid input, 3 model error.
int ExitCode(slid_status status) {
  switch (status) {
    case SLID_OK:
      return 0;
    case SLID_ERROR_INVALID_INPUT:
    case SLID_ERROR_USAGE:
    case SLID_ERROR_DEGENERATE_DATA:
    case SLID_ERROR_IO:
      return 2;
    case SLID_ERROR_MODEL:
    case SLID_ERROR_CONFIG:
    case SLID_ERROR_NOT_FOUND:
      return 3;
    default:
      return 1;
  }
}

int Finish(slid_status status) {
  if (status != SLID_OK) {
    std::fprintf(stderr, "slid: %s: %s\n", StatusName(status), slid_last_error());
  }
  return ExitCode(status);
}

const char* CStrOrNull(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slid: streaming spoken language identification engine"};
  app.require_subcommand(1);

  // Shared flag storage.
  std::string model_path, config_path, output_path, domain, registry;
  std::string confidence_model, dev_manifest, audio_path, manifest;
  double tau = -1.0;
  uint64_t seed = 1;
  int raw_rate = 0;

  // featurize ------------------------------------------------------------
  auto* featurize = app.add_subcommand("featurize", "audio -> stacked LFBE features");
  bool feat_csv = false, augment = false;
  slid_augment_options aug;
  slid_augment_options_init(&aug);
  std::string noise_manifest, rir_manifest;
  uint64_t utterance_id = 0;
  featurize->add_option("audio", audio_path, "wav or raw float32 file")->required();
  featurize->add_option("--config", config_path, "key-value config file");
  featurize->add_option("--output", output_path, "output container or csv")->required();
  featurize->add_option("--rate", raw_rate, "sample rate for raw float32 input");
  featurize->add_flag("--csv", feat_csv, "write csv instead of a container");
  featurize->add_flag("--augment", augment, "apply MTR or SpecAugment (never both)");
  featurize->add_option("--noise-manifest", noise_manifest,
                        "noise files, one path per line");
  featurize->add_option("--rir-manifest", rir_manifest,
                        "impulse responses, one path per line");
  featurize->add_option("--snr-min", aug.snr_db_min, "lowest SNR in dB");
  featurize->add_option("--snr-max", aug.snr_db_max, "highest SNR in dB");
  featurize->add_option("--augment-prob", aug.apply_probability,
                        "probability of the MTR branch");
  featurize->add_option("--freq-masks", aug.num_freq_masks, "SpecAugment freq masks");
  featurize->add_option("--freq-mask-bins", aug.max_freq_mask_bins,
                        "max freq mask width");
  featurize->add_option("--time-masks", aug.num_time_masks, "SpecAugment time masks");
  featurize->add_option("--time-mask-frames", aug.max_time_mask_frames,
                        "max time mask width");
  featurize->add_option("--seed", seed, "augmentation seed");
  featurize->add_option("--utterance-id", utterance_id,
                        "id for the per-utterance augmentation choice");

  // infer ----------------------------------------------------------------
  auto* infer = app.add_subcommand("infer", "streaming inference to JSON-lines");
  std::string switch_events;
  infer->add_option("audio", audio_path, "wav or raw float32 file")->required();
  infer->add_option("--model", model_path, "model container");
  infer->add_option("--config", config_path, "config for a seeded random model");
  infer->add_option("--seed", seed, "seed when no --model is given");
  infer->add_option("--rate", raw_rate, "sample rate for raw float32 input");
  infer->add_option("--domain", domain, "domain id for adaptation");
  infer->add_option("--registry", registry, "domain registry file");
  infer->add_option("--confidence-model", confidence_model, "6-field record");
  infer->add_option("--tau", tau, "switch threshold (default: model's tau)");
  infer->add_option("--output", output_path, "JSON-lines output")->required();
  infer->add_option("--switch-events", switch_events,
                    "switch events as JSON-lines (step, from, to, confidence)");

  // train-head -----------------------------------------------------------
  auto* train_head = app.add_subcommand(
      "train-head", "train pooling attention + classifier head");
  std::string loss_csv;
  slid_train_head_options head_opts;
  slid_train_head_options_init(&head_opts);
  train_head->add_option("--data", manifest, "manifest: <container> <language>")
      ->required();
  train_head->add_option("--model", model_path, "starting model container");
  train_head->add_option("--config", config_path, "config for a fresh random model");
  train_head->add_option("--seed", seed, "model seed when no --model is given");
  train_head->add_option("--lr", head_opts.learning_rate, "learning rate");
  train_head->add_option("--steps", head_opts.steps, "training steps");
  train_head->add_option("--batch-size", head_opts.batch_size, "0 = full batch");
  train_head->add_option("--train-seed", head_opts.seed, "init/order seed");
  bool sigma_path = false, use_adam = false;
  train_head->add_flag("--train-sigma", sigma_path, "backprop through std path");
  train_head->add_flag("--adam", use_adam, "adaptive-moment updates");
  train_head->add_option("--output", output_path, "trained model container")->required();
  train_head->add_option("--loss-csv", loss_csv, "loss curve (step,loss)");

  // train-adaptation -----------------------------------------------------
  auto* train_adapt = app.add_subcommand("train-adaptation",
                                         "fit per-domain {a,b} on a dev set");
  double w_reg = 0.1, adapt_lr = 0.5;
  int64_t adapt_steps = 2000;
  train_adapt->add_option("--model", model_path)->required();
  train_adapt->add_option("--dev", dev_manifest, "dev manifest")->required();
  train_adapt->add_option("--domain", domain, "domain id")->required();
  train_adapt->add_option("--w-reg", w_reg, "regularizer weight");
  train_adapt->add_option("--lr", adapt_lr, "learning rate");
  train_adapt->add_option("--steps", adapt_steps, "max steps");
  train_adapt->add_option("--registry", registry, "registry file (updated in place)")
      ->required();

  // train-confidence -----------------------------------------------------
  auto* train_conf = app.add_subcommand("train-confidence",
                                        "logistic regression on c1..c4");
  slid_train_confidence_options conf_opts;
  slid_train_confidence_options_init(&conf_opts);
  double conf_lr = conf_opts.learning_rate;
  int64_t conf_steps = conf_opts.steps;
  uint64_t conf_seed = conf_opts.seed;
  bool on_raw = false;
  train_conf->add_option("--model", model_path)->required();
  train_conf->add_option("--dev", dev_manifest, "dev manifest")->required();
  train_conf->add_option("--domain", domain, "adapt posteriors with this domain");
  train_conf->add_option("--registry", registry, "domain registry file");
  train_conf->add_option("--lr", conf_lr, "learning rate");
  train_conf->add_option("--steps", conf_steps, "training steps");
  train_conf->add_option("--seed", conf_seed, "seed");
  train_conf->add_flag("--on-raw", on_raw, "score unadapted posteriors");
  train_conf->add_option("--output", output_path, "6-field record")->required();

  // calibrate ------------------------------------------------------------
  auto* calibrate = app.add_subcommand("calibrate", "pick tau from the DET curve");
  std::string rule = "eer", det_csv;
  double max_fa = 0.01;
  calibrate->add_option("--model", model_path)->required();
  calibrate->add_option("--dev", dev_manifest, "dev manifest")->required();
  calibrate->add_option("--confidence-model", confidence_model)->required();
  calibrate->add_option("--rule", rule, "eer | max-fa");
  calibrate->add_option("--max-fa", max_fa, "false-accept budget for max-fa");
  calibrate->add_option("--output", output_path, "updated 6-field record");
  calibrate->add_option("--det-csv", det_csv, "DET curve csv");

  // det-csv ----------------------------------------------------------------
  auto* det = app.add_subcommand("det-csv", "emit the DET curve only");
  det->add_option("--model", model_path)->required();
  det->add_option("--dev", dev_manifest, "dev manifest")->required();
  det->add_option("--confidence-model", confidence_model)->required();
  det->add_option("--output", output_path, "DET curve csv")->required();

  // eval -------------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "accuracy metrics over a manifest");
  bool majority = false;
  std::string export_languages;
  eval->add_option("--model", model_path)->required();
  eval->add_option("--data", manifest, "manifest")->required();
  eval->add_option("--domain", domain, "domain id for adaptation");
  eval->add_option("--registry", registry, "domain registry file");
  eval->add_flag("--majority-vote", majority, "vote over steps instead of final");
  eval->add_option("--output", output_path, "per-language csv");
  eval->add_option("--export-languages", export_languages,
                   "write the model's language table as a text list");

  // flops ------------------------------------------------------------------
  auto* flops = app.add_subcommand("flops", "analytic FLOP/s estimate");
  flops->add_option("--config", config_path, "key-value config file");

  CLI11_PARSE(app, argc, argv);

  if (featurize->parsed()) {
    aug.noise_manifest = CStrOrNull(noise_manifest);
    aug.rir_manifest = CStrOrNull(rir_manifest);
    aug.seed = seed;
    aug.utterance_id = utterance_id;
    return Finish(slid_featurize(audio_path.c_str(), raw_rate,
                                 CStrOrNull(config_path), output_path.c_str(),
                                 feat_csv ? 1 : 0, augment ? &aug : nullptr));
  }

  if (infer->parsed()) {
    slid_stream_options options;
    slid_stream_options_init(&options);
    options.domain_id = CStrOrNull(domain);
    options.registry_path = CStrOrNull(registry);
    options.confidence_model_path = CStrOrNull(confidence_model);
    options.tau = tau;
    char latency[256] = {0};
    const slid_status status = slid_infer_file(
        CStrOrNull(model_path), CStrOrNull(config_path), seed, audio_path.c_str(),
        raw_rate, &options, output_path.c_str(), CStrOrNull(switch_events),
        latency, sizeof(latency));
    if (status == SLID_OK && latency[0] != '\0') {
      std::fprintf(stderr, "%s\n", latency);
    }
    return Finish(status);
  }

  if (train_head->parsed()) {
    head_opts.train_sigma_path = sigma_path ? 1 : 0;
    head_opts.use_adam = use_adam ? 1 : 0;
    return Finish(slid_train_head(manifest.c_str(), CStrOrNull(model_path),
                                  CStrOrNull(config_path), seed, &head_opts,
                                  output_path.c_str(), CStrOrNull(loss_csv)));
  }

  if (train_adapt->parsed()) {
    return Finish(slid_train_adaptation(model_path.c_str(), dev_manifest.c_str(),
                                        domain.c_str(), w_reg, adapt_lr,
                                        adapt_steps, registry.c_str()));
  }

  if (train_conf->parsed()) {
    conf_opts.learning_rate = conf_lr;
    conf_opts.steps = conf_steps;
    conf_opts.seed = conf_seed;
    conf_opts.domain_id = CStrOrNull(domain);
    conf_opts.registry_path = CStrOrNull(registry);
    conf_opts.on_adapted = on_raw ? 0 : 1;
    return Finish(slid_train_confidence(model_path.c_str(), dev_manifest.c_str(),
                                        &conf_opts, output_path.c_str()));
  }

  if (calibrate->parsed()) {
    return Finish(slid_calibrate(model_path.c_str(), dev_manifest.c_str(),
                                 confidence_model.c_str(),
                                 rule == "max-fa" ? 1 : 0, max_fa,
                                 CStrOrNull(output_path), CStrOrNull(det_csv)));
  }

  if (det->parsed()) {
    return Finish(slid_calibrate(model_path.c_str(), dev_manifest.c_str(),
                                 confidence_model.c_str(), 0, 0.01, nullptr,
                                 output_path.c_str()));
  }

  if (eval->parsed()) {
    if (!export_languages.empty()) {
      slid_model* model = nullptr;
      slid_status status = slid_model_load(model_path.c_str(), &model);
      if (status == SLID_OK) {
        status = slid_model_export_languages(model, export_languages.c_str());
        slid_model_free(model);
      }
      if (status != SLID_OK) return Finish(status);
    }
    double average = 0.0, total = 0.0;
    const slid_status status =
        slid_eval(model_path.c_str(), manifest.c_str(), CStrOrNull(domain),
                  CStrOrNull(registry), majority ? 1 : 0, CStrOrNull(output_path),
                  &average, &total);
    if (status == SLID_OK) {
      std::printf("average_accuracy %.6f total_accuracy %.6f\n", average, total);
    }
    return Finish(status);
  }

  if (flops->parsed()) {
    char report[4096] = {0};
    const slid_status status = slid_flops_report(CStrOrNull(config_path), report,
                                                 sizeof(report));
    if (status == SLID_OK) std::fputs(report, stdout);
    return Finish(status);
  }

  return 1;
}
