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

#ifndef SLID_CONFIDENCE_HPP_
#define SLID_CONFIDENCE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "classifier.hpp"

namespace slid {

// Linear confidence model over four features of the posterior stream:
// top probability, top-to-second delta, negentropy, and the run length of
// the current top language.
struct ConfidenceFeatures {
  double top_prob = 0.0;
  double prob_delta = 0.0;
  double negentropy = 0.0;
  int64_t continuity = 1;
};

struct ConfidenceModel {
  double alphas[4] = {0.0, 0.0, 0.0, 0.0};
  double beta = 0.0;
  double threshold = 0.5;  // tau

  // Continuity handling: the counter saturates at `continuity_cap`; when
  // `normalize_continuity` is set the scoring input is continuity / cap.
  int64_t continuity_cap = 1000;
  bool normalize_continuity = false;
};

// Natural-log entropy, so negentropy = ln(K) - H(p) lies in [0, ln K].
double PosteriorEntropy(const std::vector<double>& probs);

// Stateful extractor; Push consumes posteriors in stream order.
class ConfidenceExtractor {
 public:
  explicit ConfidenceExtractor(int64_t continuity_cap = 1000);

  ConfidenceFeatures Push(const Posterior& p);
  void Reset();

 private:
  int64_t cap_;
  int last_argmax_ = -1;
  int64_t run_length_ = 0;
};

// Features at every step of a posterior sequence.
std::vector<ConfidenceFeatures> ExtractFeatureSequence(
    const std::vector<Posterior>& posteriors, int64_t continuity_cap = 1000);

// sigmoid(sum_i alpha_i c_i + beta), strictly in (0, 1).
double ConfidenceScore(const ConfidenceFeatures& features,
                       const ConfidenceModel& model);

struct ConfidenceSample {
  ConfidenceFeatures features;
  int label = 0;  // 1 iff the top prediction was correct
};

struct ConfidenceTrainConfig {
  double learning_rate = 0.5;
  int64_t steps = 3000;
  uint64_t seed = 1;
  bool use_adam = true;
  double param_norm_cap = 100.0;  // keeps separable data from diverging
  int64_t continuity_cap = 1000;
  bool normalize_continuity = false;
};

// Binary cross entropy of the model's scores against the labels.
double ConfidenceLogLoss(const std::vector<ConfidenceSample>& dev,
                         const ConfidenceModel& model);

// Logistic regression from zero initialization; requires both labels.
ConfidenceModel TrainConfidence(const std::vector<ConfidenceSample>& dev,
                                const ConfidenceTrainConfig& config);

struct DetPoint {
  double threshold = 0.0;
  double false_accept = 0.0;  // z=0 with score >= threshold
  double false_reject = 0.0;  // z=1 with score < threshold
};

enum class ThresholdRule { kEqualErrorRate, kMaxFalseAccept };

struct DetCurve {
  std::vector<DetPoint> points;  // ascending threshold
  double tau = 0.5;
};

// Sweeps all distinct scores (plus the trivial accept-all / reject-all
// endpoints) and picks tau by the requested rule.
DetCurve CalibrateThreshold(const std::vector<double>& scores,
                            const std::vector<int>& labels, ThresholdRule rule,
                            double max_false_accept = 0.01);

// 6-field text record: 4 alphas, beta, tau.
std::string SerializeConfidenceModel(const ConfidenceModel& model);
ConfidenceModel DeserializeConfidenceModel(const std::string& text);
void SaveConfidenceModel(const ConfidenceModel& model, const std::string& path);
ConfidenceModel LoadConfidenceModel(const std::string& path);

std::string DetCurveCsv(const DetCurve& curve);

}  // namespace slid

#endif  // SLID_CONFIDENCE_HPP_
