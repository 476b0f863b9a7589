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

#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "error.hpp"

namespace slid {

std::map<int, double> PerLanguageAccuracy(const std::vector<EvalRecord>& records) {
  std::map<int, int64_t> total, correct;
  for (const EvalRecord& r : records) {
    ++total[r.truth_index];
    if (r.predicted_index == r.truth_index) ++correct[r.truth_index];
  }
  std::map<int, double> out;
  for (const auto& [lang, n] : total) {
    out[lang] = static_cast<double>(correct[lang]) / static_cast<double>(n);
  }
  return out;
}

double AverageAccuracy(const std::map<int, double>& per_language) {
  if (per_language.empty()) ThrowInvalidInput("average accuracy of an empty map");
  double acc = 0.0;
  for (const auto& [lang, a] : per_language) acc += a;
  return acc / static_cast<double>(per_language.size());
}

double TotalAccuracy(const std::vector<EvalRecord>& records) {
  if (records.empty()) ThrowInvalidInput("total accuracy of an empty record set");
  int64_t correct = 0;
  for (const EvalRecord& r : records) {
    if (r.predicted_index == r.truth_index) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

std::vector<SwitchEvent> EmitSwitchEvents(const std::vector<Posterior>& posteriors,
                                          const std::vector<double>& confidences,
                                          double tau) {
  if (posteriors.size() != confidences.size()) {
    ThrowInvalidInput("switch events: posterior and confidence streams must align");
  }
  std::vector<SwitchEvent> events;
  int last_emitted = -1;
  for (size_t t = 0; t < posteriors.size(); ++t) {
    if (confidences[t] < tau) continue;
    const int top = Argmax(posteriors[t].probs);
    if (top == last_emitted) continue;
    SwitchEvent event;
    event.step = static_cast<int64_t>(t);
    event.previous_language = last_emitted;
    event.new_language = top;
    event.confidence = confidences[t];
    events.push_back(event);
    last_emitted = top;
  }
  return events;
}

namespace {

// Ops for one pass through a conformer layer of width d; `window` is the
// attention span in that layer's ticks.
double LayerFlops(int d, int expansion, int span, int heads, int window) {
  const double dd = static_cast<double>(d);
  const double e = static_cast<double>(expansion) * dd;
  const double w = static_cast<double>(window);
  const double ffn = 2.0 * (2.0 * e * dd)  // two matmuls (2 ops per MAC)
                     + 5.0 * dd            // layer norm
                     + 4.0 * e             // swish
                     + 2.0 * dd;           // halved residual add
  const double attn = 4.0 * (2.0 * dd * dd)      // q,k,v,o projections
                      + 2.0 * dd * w              // scores
                      + 3.0 * w * heads           // softmax
                      + 2.0 * dd * w               // weighted values
                      + 5.0 * dd + dd;            // norm + residual
  const double conv = 2.0 * (2.0 * dd) * dd       // pointwise in (to 2d)
                      + 4.0 * dd                  // GLU
                      + 2.0 * static_cast<double>(span) * dd  // depthwise
                      + 2.0 * dd + 4.0 * dd       // affine norm + swish
                      + 2.0 * dd * dd             // pointwise out
                      + 5.0 * dd + dd;            // input norm + residual
  const double final_norm = 5.0 * dd;
  return 2.0 * ffn + attn + conv + final_norm;
}

}  // namespace

FlopBreakdown EstimateFlops(const ConformerConfig& config,
                            const FrontendConfig& frontend, int num_languages,
                            int head_hidden_dim, bool pool_with_std) {
  FlopBreakdown out;

  // Frontend, per 10 ms analysis frame.
  const double lfbe_per_sec = 1000.0 / frontend.frame_step_ms;
  const int frame_samples = frontend.FrameSamples(16000);
  const int fft_size = NextPowerOfTwo(frame_samples);
  const double fft_flops = 5.0 * fft_size * std::log2(static_cast<double>(fft_size));
  const double frame_flops = frame_samples                   // windowing
                             + fft_flops                     // spectral transform
                             + 3.0 * (fft_size / 2 + 1)      // power spectrum
                             + 4.0 * (fft_size / 2 + 1)      // mel accumulation
                             + frontend.num_mel_bins;        // log
  out.frontend = frame_flops * lfbe_per_sec;

  if (config.num_layers == 0) return out;  // frontend-only configuration

  const double frames_per_sec =
      1000.0 / (frontend.frame_step_ms * frontend.subsample_factor);
  const double steps_per_sec = frames_per_sec / 2.0;
  const int window = config.attention_left_context + 1;

  out.input_projection =
      (2.0 * config.model_dim * config.input_dim) * frames_per_sec +
      config.model_dim * frames_per_sec;  // positional encoding add

  const int pre = std::min(config.subsample_after_layer, config.num_layers);
  const int mid = std::clamp(config.projection_after_layer, pre, config.num_layers) - pre;
  const int post = config.num_layers - pre - mid;

  out.conformer_layers =
      pre * LayerFlops(config.model_dim, config.feedforward_expansion,
                       config.conv_span, config.num_heads, window) *
          frames_per_sec +
      mid * LayerFlops(2 * config.model_dim, config.feedforward_expansion,
                       config.conv_span, config.num_heads, window) *
          steps_per_sec +
      post * LayerFlops(config.model_dim, config.feedforward_expansion,
                        config.conv_span, config.num_heads, window) *
          steps_per_sec;

  out.post_projection =
      (2.0 * config.model_dim * (2 * config.model_dim) + 4.0 * config.model_dim) *
      steps_per_sec;

  // Attention weight, statistic updates, readout.
  const double d = config.model_dim;
  out.pooling = (2.0 * d + 4.0             // f_att
                 + 4.0 * d                 // eta/A/Q updates
                 + (pool_with_std ? 6.0 * d : 2.0 * d)) *  // mu (and sigma)
                steps_per_sec;

  const double pool_dim = pool_with_std ? 2.0 * d : d;
  out.classifier_head = (2.0 * pool_dim * head_hidden_dim + head_hidden_dim +
                         2.0 * head_hidden_dim * num_languages +
                         4.0 * num_languages) *
                        steps_per_sec;
  return out;
}

namespace {

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string FlopReport(const ConformerConfig& config, const FrontendConfig& frontend,
                       int num_languages, int head_hidden_dim) {
  const FlopBreakdown b =
      EstimateFlops(config, frontend, num_languages, head_hidden_dim);
  std::ostringstream out;
  out << "FLOP estimate per second of audio (2 ops per multiply-add;\n"
         "normalizations and activations counted linearly):\n";
  out << "  frontend          " << FormatDouble(b.frontend) << "\n";
  out << "  input projection  " << FormatDouble(b.input_projection) << "\n";
  out << "  conformer layers  " << FormatDouble(b.conformer_layers) << "\n";
  out << "  post projection   " << FormatDouble(b.post_projection) << "\n";
  out << "  pooling           " << FormatDouble(b.pooling) << "\n";
  out << "  classifier head   " << FormatDouble(b.classifier_head) << "\n";
  out << "  total             " << FormatDouble(b.Total()) << " ("
      << FormatDouble(b.Total() / 1e9) << " GFLOP/s)\n";
  return out.str();
}

std::string EvalCsv(const std::vector<EvalRecord>& records,
                    const LanguageTable& table) {
  std::map<int, int64_t> total, correct;
  for (const EvalRecord& r : records) {
    ++total[r.truth_index];
    if (r.predicted_index == r.truth_index) ++correct[r.truth_index];
  }
  std::ostringstream out;
  out << "language,total,correct,accuracy\n";
  for (const auto& [lang, n] : total) {
    const std::string code = lang >= 0 && lang < table.size()
                                 ? table.codes[lang]
                                 : std::to_string(lang);
    out << code << "," << n << "," << correct[lang] << ","
        << FormatDouble(static_cast<double>(correct[lang]) / static_cast<double>(n))
        << "\n";
  }
  return out.str();
}

std::string SwitchEventsJsonLines(const std::vector<SwitchEvent>& events,
                                  const LanguageTable& table) {
  std::ostringstream out;
  for (const SwitchEvent& e : events) {
    out << "{\"step\":" << e.step << ",\"from\":";
    if (e.previous_language < 0) {
      out << "null";
    } else {
      out << "\"" << table.codes[e.previous_language] << "\"";
    }
    out << ",\"to\":\"" << table.codes[e.new_language] << "\",\"confidence\":"
        << FormatDouble(e.confidence) << "}\n";
  }
  return out.str();
}

}  // namespace slid
