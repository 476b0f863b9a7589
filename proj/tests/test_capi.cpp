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

// Exercises the shared-library surface the way an external consumer would:
// through slid.h only (plus test scaffolding for fixtures).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "audio.hpp"  // fixture generation only
#include "doctest.h"
#include "slid.h"
#include "test_util.hpp"

using namespace slid::testing;

namespace {

const char* kTinyConfig =
    "num_layers = 5\n"
    "model_dim = 16\n"
    "num_heads = 4\n"
    "conv_span = 4\n"
    "attention_left_context = 8\n"
    "feedforward_expansion = 2\n"
    "num_mel_bins = 16\n"
    "head_hidden_dim = 8\n"
    "languages = en,es,fr\n";

std::string WriteTinyConfig(const TempDir& dir) {
  const std::string path = dir.File("tiny.cfg");
  std::ofstream out(path);
  out << kTinyConfig;
  return path;
}

std::string WriteToneWav(const TempDir& dir, const char* name, double freq,
                         int samples) {
  slid::AudioSegment audio;
  audio.sample_rate_hz = 16000;
  audio.samples = SineWave(freq, 0.4, 16000, samples);
  const std::string path = dir.File(name);
  slid::WriteWavFile(path, audio);
  return path;
}

std::string ReadAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

}  // namespace

TEST_CASE("version string is present") {
  CHECK(std::string(slid_version()).find("slid") != std::string::npos);
}

TEST_CASE("model create, save, load round-trip through the C API") {
  TempDir dir("capi_model");
  const std::string config = WriteTinyConfig(dir);

  slid_model* model = nullptr;
  REQUIRE(slid_model_create(config.c_str(), 42, &model) == SLID_OK);
  REQUIRE(model != nullptr);
  CHECK(slid_model_num_languages(model) == 3);
  CHECK(std::string(slid_model_language(model, 1)) == "es");
  CHECK(slid_model_language(model, 9) == nullptr);

  const std::string path = dir.File("model.slid");
  REQUIRE(slid_model_save(model, path.c_str()) == SLID_OK);

  const std::string lang_list = dir.File("languages.txt");
  REQUIRE(slid_model_export_languages(model, lang_list.c_str()) == SLID_OK);
  CHECK(ReadAll(lang_list) == "en\nes\nfr\n");

  slid_model* loaded = nullptr;
  REQUIRE(slid_model_load(path.c_str(), &loaded) == SLID_OK);
  CHECK(slid_model_num_languages(loaded) == 3);

  // Byte-exact second save.
  const std::string path2 = dir.File("model2.slid");
  REQUIRE(slid_model_save(loaded, path2.c_str()) == SLID_OK);
  CHECK(ReadAll(path) == ReadAll(path2));

  slid_model_free(model);
  slid_model_free(loaded);
}

TEST_CASE("loading garbage reports a model error with a message") {
  TempDir dir("capi_bad");
  const std::string path = dir.File("junk.slid");
  std::ofstream(path) << "definitely not a container";
  slid_model* model = nullptr;
  CHECK(slid_model_load(path.c_str(), &model) == SLID_ERROR_MODEL);
  CHECK(model == nullptr);
  CHECK(std::strlen(slid_last_error()) > 0);
}

TEST_CASE("missing files are io errors; null arguments are usage errors") {
  slid_model* model = nullptr;
  CHECK(slid_model_load("/nonexistent/path.slid", &model) == SLID_ERROR_IO);
  CHECK(slid_model_load(nullptr, &model) == SLID_ERROR_USAGE);
  CHECK(slid_model_create("/nonexistent/config.cfg", 1, &model) == SLID_ERROR_IO);
}

TEST_CASE("streaming via the C API matches the batch infer output") {
  TempDir dir("capi_stream");
  const std::string config = WriteTinyConfig(dir);
  const std::string wav = WriteToneWav(dir, "tone.wav", 650.0, 16000);

  slid_model* model = nullptr;
  REQUIRE(slid_model_create(config.c_str(), 7, &model) == SLID_OK);

  // Batch run through the file API.
  slid_stream_options options;
  slid_stream_options_init(&options);
  const std::string jsonl = dir.File("out.jsonl");
  REQUIRE(slid_infer_file(nullptr, config.c_str(), 7, wav.c_str(), 0, &options,
                          jsonl.c_str(), nullptr, nullptr, 0) == SLID_OK);
  const std::string batch_json = ReadAll(jsonl);
  REQUIRE(!batch_json.empty());

  // Streaming run, push in uneven chunks.
  slid_stream* stream = nullptr;
  REQUIRE(slid_stream_new(model, &options, &stream) == SLID_OK);
  const slid::AudioSegment audio = slid::ReadWavFile(wav);
  std::vector<slid_step_result> results(256);
  std::vector<slid_step_result> all;
  size_t produced = 0;
  const size_t chunks[] = {123, 1600, 5000, 16000};
  size_t pos = 0;
  for (size_t chunk : chunks) {
    if (pos >= audio.samples.size()) break;
    const size_t n = std::min(chunk, audio.samples.size() - pos);
    REQUIRE(slid_stream_push(stream, audio.samples.data() + pos, n, results.data(),
                             results.size(), &produced) == SLID_OK);
    all.insert(all.end(), results.begin(), results.begin() + produced);
    pos += n;
  }
  while (pos < audio.samples.size()) {
    const size_t n = std::min<size_t>(3200, audio.samples.size() - pos);
    REQUIRE(slid_stream_push(stream, audio.samples.data() + pos, n, results.data(),
                             results.size(), &produced) == SLID_OK);
    all.insert(all.end(), results.begin(), results.begin() + produced);
    pos += n;
  }
  REQUIRE(slid_stream_finish(stream, results.data(), results.size(), &produced) ==
          SLID_OK);
  all.insert(all.end(), results.begin(), results.begin() + produced);

  // Compare step count and top-1 with the JSON output.
  size_t lines = 0;
  for (char c : batch_json) {
    if (c == '\n') ++lines;
  }
  CHECK(all.size() == lines);
  for (size_t i = 0; i < all.size(); ++i) {
    CHECK(all[i].step == static_cast<int64_t>(i));
    CHECK(all[i].n_top == 3);
  }

  slid_stream_free(stream);
  slid_model_free(model);
}

TEST_CASE("infer output is byte-identical across runs") {
  TempDir dir("capi_det");
  const std::string config = WriteTinyConfig(dir);
  const std::string wav = WriteToneWav(dir, "tone.wav", 480.0, 12000);
  slid_stream_options options;
  slid_stream_options_init(&options);
  const std::string out1 = dir.File("a.jsonl"), out2 = dir.File("b.jsonl");
  REQUIRE(slid_infer_file(nullptr, config.c_str(), 3, wav.c_str(), 0, &options,
                          out1.c_str(), nullptr, nullptr, 0) == SLID_OK);
  REQUIRE(slid_infer_file(nullptr, config.c_str(), 3, wav.c_str(), 0, &options,
                          out2.c_str(), nullptr, nullptr, 0) == SLID_OK);
  CHECK(ReadAll(out1) == ReadAll(out2));
}

TEST_CASE("featurize writes a loadable container and csv") {
  TempDir dir("capi_feat");
  const std::string config = WriteTinyConfig(dir);
  const std::string wav = WriteToneWav(dir, "tone.wav", 520.0, 16000);
  const std::string container = dir.File("feat.slid");
  const std::string csv = dir.File("feat.csv");
  REQUIRE(slid_featurize(wav.c_str(), 0, config.c_str(), container.c_str(), 0, nullptr) ==
          SLID_OK);
  REQUIRE(slid_featurize(wav.c_str(), 0, config.c_str(), csv.c_str(), 1, nullptr) == SLID_OK);
  CHECK(!ReadAll(container).empty());
  const std::string csv_text = ReadAll(csv);
  CHECK(!csv_text.empty());
  size_t commas = 0;
  for (char c : csv_text) {
    if (c == ',') {
      ++commas;
      break;
    }
  }
  CHECK(commas > 0);
}

TEST_CASE("the full desk workflow runs end to end through the C API") {
  TempDir dir("capi_flow");
  const std::string config = WriteTinyConfig(dir);

  // Fixture audio per language: distinct tones.
  struct Fixture {
    const char* lang;
    double freq;
  };
  const Fixture fixtures[] = {{"en", 400.0}, {"es", 1200.0}, {"fr", 2600.0}};
  std::string manifest_text;
  for (int copy = 0; copy < 4; ++copy) {
    for (const Fixture& f : fixtures) {
      const std::string name =
          std::string(f.lang) + "_" + std::to_string(copy) + ".wav";
      const std::string wav =
          WriteToneWav(dir, name.c_str(), f.freq * (1.0 + 0.01 * copy), 16000);
      const std::string feat = dir.File(name + ".feat");
      REQUIRE(slid_featurize(wav.c_str(), 0, config.c_str(), feat.c_str(), 0, nullptr) ==
              SLID_OK);
      manifest_text += feat + " " + f.lang + "\n";
    }
  }
  const std::string manifest = dir.File("manifest.txt");
  std::ofstream(manifest) << manifest_text;

  // Train head on the fixtures.
  slid_train_head_options train;
  slid_train_head_options_init(&train);
  train.steps = 150;
  train.learning_rate = 0.3;
  const std::string model_path = dir.File("trained.slid");
  const std::string loss_csv = dir.File("loss.csv");
  REQUIRE(slid_train_head(manifest.c_str(), nullptr, config.c_str(), 5, &train,
                          model_path.c_str(), loss_csv.c_str()) == SLID_OK);
  CHECK(ReadAll(loss_csv).find("step,loss") == 0);

  // Eval on the training manifest: the tones are easily separable.
  double average = 0.0, total = 0.0;
  const std::string eval_csv = dir.File("eval.csv");
  REQUIRE(slid_eval(model_path.c_str(), manifest.c_str(), nullptr, nullptr, 0,
                    eval_csv.c_str(), &average, &total) == SLID_OK);
  CHECK(total >= 0.9);
  CHECK(ReadAll(eval_csv).find("language,total,correct,accuracy") == 0);

  // Adaptation on a skewed dev set.
  std::string dev_text;
  for (int copy = 0; copy < 4; ++copy) {
    dev_text += dir.File("en_" + std::to_string(copy) + ".wav.feat") + " en\n";
  }
  dev_text += dir.File("es_0.wav.feat") + " es\n";
  const std::string dev_manifest = dir.File("dev.txt");
  std::ofstream(dev_manifest) << dev_text;
  const std::string registry = dir.File("domains.txt");
  REQUIRE(slid_train_adaptation(model_path.c_str(), dev_manifest.c_str(), "assistant",
                                0.05, 0.5, 400, registry.c_str()) == SLID_OK);
  CHECK(ReadAll(registry).find("slid-domains v1") == 0);
  CHECK(ReadAll(registry).find("assistant") != std::string::npos);

  // Confidence training + calibration. The dev manifest needs incorrect
  // steps too, so a few records carry deliberately wrong labels.
  std::string conf_text = manifest_text;
  conf_text += dir.File("en_0.wav.feat") + " fr\n";
  conf_text += dir.File("es_1.wav.feat") + " en\n";
  const std::string conf_manifest = dir.File("conf_dev.txt");
  std::ofstream(conf_manifest) << conf_text;
  slid_train_confidence_options conf;
  slid_train_confidence_options_init(&conf);
  conf.steps = 400;
  const std::string conf_record = dir.File("confidence.txt");
  REQUIRE(slid_train_confidence(model_path.c_str(), conf_manifest.c_str(), &conf,
                                conf_record.c_str()) == SLID_OK);
  const std::string calibrated = dir.File("confidence_cal.txt");
  const std::string det_csv = dir.File("det.csv");
  REQUIRE(slid_calibrate(model_path.c_str(), conf_manifest.c_str(),
                         conf_record.c_str(), 0, 0.01, calibrated.c_str(),
                         det_csv.c_str()) == SLID_OK);
  CHECK(ReadAll(det_csv).find("threshold,false_accept,false_reject") == 0);

  // Inference with the registry and calibrated confidence model.
  slid_stream_options options;
  slid_stream_options_init(&options);
  options.domain_id = "assistant";
  options.registry_path = registry.c_str();
  options.confidence_model_path = calibrated.c_str();
  const std::string wav = dir.File("en_0.wav");
  const std::string out = dir.File("final.jsonl");
  char latency[128] = {0};
  REQUIRE(slid_infer_file(model_path.c_str(), nullptr, 0, wav.c_str(), 0, &options,
                          out.c_str(), nullptr, latency, sizeof(latency)) == SLID_OK);
  CHECK(ReadAll(out).find("\"adapted_top\"") != std::string::npos);
  CHECK(std::string(latency).find("steps=") == 0);
}

TEST_CASE("featurize applies exactly one augmentation family per utterance") {
  TempDir dir("capi_aug");
  const std::string config = WriteTinyConfig(dir);
  // Two-tone signal: time-varying features, so mean-fill masks are visible.
  slid::AudioSegment speech;
  speech.sample_rate_hz = 16000;
  speech.samples = SineWave(800.0, 0.4, 16000, 8000);
  const std::vector<float> second = SineWave(2200.0, 0.4, 16000, 8000);
  speech.samples.insert(speech.samples.end(), second.begin(), second.end());
  const std::string wav = dir.File("speech.wav");
  slid::WriteWavFile(wav, speech);
  const std::string noise_wav = WriteToneWav(dir, "noise.wav", 90.0, 8000);
  const std::string noise_manifest = dir.File("noise.txt");
  std::ofstream(noise_manifest) << noise_wav << "\n";

  const std::string clean = dir.File("clean.csv");
  REQUIRE(slid_featurize(wav.c_str(), 0, config.c_str(), clean.c_str(), 1, nullptr) ==
          SLID_OK);

  slid_augment_options aug;
  slid_augment_options_init(&aug);
  aug.noise_manifest = noise_manifest.c_str();
  aug.seed = 11;

  // MTR branch: probability 1 mixes noise, so the features change.
  aug.apply_probability = 1.0;
  const std::string mtr = dir.File("mtr.csv");
  REQUIRE(slid_featurize(wav.c_str(), 0, config.c_str(), mtr.c_str(), 1, &aug) ==
          SLID_OK);
  CHECK(ReadAll(mtr) != ReadAll(clean));

  // SpecAugment branch: probability 0; masked cells change on features.
  aug.apply_probability = 0.0;
  const std::string specaug = dir.File("specaug.csv");
  REQUIRE(slid_featurize(wav.c_str(), 0, config.c_str(), specaug.c_str(), 1, &aug) ==
          SLID_OK);
  CHECK(ReadAll(specaug) != ReadAll(clean));
  CHECK(ReadAll(specaug) != ReadAll(mtr));

  // Deterministic given the seed.
  const std::string specaug2 = dir.File("specaug2.csv");
  REQUIRE(slid_featurize(wav.c_str(), 0, config.c_str(), specaug2.c_str(), 1, &aug) ==
          SLID_OK);
  CHECK(ReadAll(specaug2) == ReadAll(specaug));
}

TEST_CASE("raw float32 audio is read at the flag-provided rate") {
  TempDir dir("capi_raw");
  const std::string config = WriteTinyConfig(dir);
  const std::vector<float> samples = SineWave(600.0, 0.4, 16000, 16000);
  const std::string raw = dir.File("audio.f32");
  std::ofstream(raw, std::ios::binary)
      .write(reinterpret_cast<const char*>(samples.data()), samples.size() * 4);

  const std::string out = dir.File("raw.jsonl");
  slid_stream_options options;
  slid_stream_options_init(&options);
  REQUIRE(slid_infer_file(nullptr, config.c_str(), 1, raw.c_str(), 16000, &options,
                          out.c_str(), nullptr, nullptr, 0) == SLID_OK);
  CHECK(!ReadAll(out).empty());

  // Same content as the wav path (up to 16-bit quantization producing the
  // same frame count).
  slid::AudioSegment seg;
  seg.sample_rate_hz = 16000;
  seg.samples = samples;
  const std::string wav = dir.File("audio.wav");
  slid::WriteWavFile(wav, seg);
  const std::string out_wav = dir.File("wav.jsonl");
  REQUIRE(slid_infer_file(nullptr, config.c_str(), 1, wav.c_str(), 0, &options,
                          out_wav.c_str(), nullptr, nullptr, 0) == SLID_OK);
  size_t lines_raw = 0, lines_wav = 0;
  for (char c : ReadAll(out)) lines_raw += c == '\n';
  for (char c : ReadAll(out_wav)) lines_wav += c == '\n';
  CHECK(lines_raw == lines_wav);
}

TEST_CASE("infer writes standalone switch events when asked") {
  TempDir dir("capi_events");
  const std::string config = WriteTinyConfig(dir);
  const std::string wav = WriteToneWav(dir, "tone.wav", 700.0, 16000);
  slid_stream_options options;
  slid_stream_options_init(&options);
  options.tau = 0.4;  // untrained confidence scores 0.5, so events fire
  const std::string out = dir.File("steps.jsonl");
  const std::string events = dir.File("events.jsonl");
  REQUIRE(slid_infer_file(nullptr, config.c_str(), 5, wav.c_str(), 0, &options,
                          out.c_str(), events.c_str(), nullptr, 0) == SLID_OK);
  const std::string text = ReadAll(events);
  CHECK(text.find("\"step\":") != std::string::npos);
  CHECK(text.find("\"from\":null") != std::string::npos);
  CHECK(text.find("\"confidence\":") != std::string::npos);
}

TEST_CASE("flops estimate is exposed through the C API") {
  double flops = 0.0;
  REQUIRE(slid_estimate_flops(nullptr, &flops) == SLID_OK);
  CHECK(flops > 1e8);
  char report[4096] = {0};
  REQUIRE(slid_flops_report(nullptr, report, sizeof(report)) == SLID_OK);
  CHECK(std::string(report).find("GFLOP/s") != std::string::npos);
}
