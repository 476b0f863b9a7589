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

#ifndef SLID_EVAL_HPP_
#define SLID_EVAL_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "classifier.hpp"
#include "encoder.hpp"
#include "frontend.hpp"

namespace slid {

struct EvalRecord {
  std::string utterance_id;
  int truth_index = 0;
  int predicted_index = 0;
};

// accuracy_L = correct_L / total_L; languages with no records are absent.
std::map<int, double> PerLanguageAccuracy(const std::vector<EvalRecord>& records);

// Unweighted mean over languages (assumes a uniform language prior).
double AverageAccuracy(const std::map<int, double>& per_language);

// Overall fraction correct, regardless of language.
double TotalAccuracy(const std::vector<EvalRecord>& records);

struct SwitchEvent {
  int64_t step = 0;
  int previous_language = -1;  // -1 on the initial emission
  int new_language = 0;
  double confidence = 0.0;
};

// Emits an event whenever the argmax changes from the last *emitted*
// language and the confidence clears tau; the first emission announces the
// initial language.
std::vector<SwitchEvent> EmitSwitchEvents(const std::vector<Posterior>& posteriors,
                                          const std::vector<double>& confidences,
                                          double tau);

// Analytic floating-point-operation estimate for processing one second of
// audio. Counting convention: 2 ops per multiply-add in matrix products,
// convolutions and attention; normalizations and activations count one op
// per element pass. Reported per second using the 30 ms feature rate and
// the 2-frame inference step.
struct FlopBreakdown {
  double frontend = 0.0;
  double input_projection = 0.0;
  double conformer_layers = 0.0;
  double post_projection = 0.0;
  double pooling = 0.0;
  double classifier_head = 0.0;

  double Total() const {
    return frontend + input_projection + conformer_layers + post_projection +
           pooling + classifier_head;
  }
};

FlopBreakdown EstimateFlops(const ConformerConfig& config,
                            const FrontendConfig& frontend = FrontendConfig(),
                            int num_languages = 65, int head_hidden_dim = 256,
                            bool pool_with_std = false);

std::string FlopReport(const ConformerConfig& config,
                       const FrontendConfig& frontend = FrontendConfig(),
                       int num_languages = 65, int head_hidden_dim = 256);

// CSV: language,total,correct,accuracy (one row per language, by index
// order), as exposed by the `eval` subcommand.
std::string EvalCsv(const std::vector<EvalRecord>& records,
                    const LanguageTable& table);

std::string SwitchEventsJsonLines(const std::vector<SwitchEvent>& events,
                                  const LanguageTable& table);

}  // namespace slid

#endif  // SLID_EVAL_HPP_
