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

#include "confidence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace slid {

double PosteriorEntropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

ConfidenceExtractor::ConfidenceExtractor(int64_t continuity_cap)
    : cap_(continuity_cap) {}

void ConfidenceExtractor::Reset() {
  last_argmax_ = -1;
  run_length_ = 0;
}

ConfidenceFeatures ConfidenceExtractor::Push(const Posterior& p) {
  if (p.probs.empty()) ThrowInvalidInput("confidence: empty posterior");
  const int top = Argmax(p.probs);
  if (top == last_argmax_) {
    run_length_ = std::min(run_length_ + 1, cap_);
  } else {
    run_length_ = 1;
    last_argmax_ = top;
  }

  ConfidenceFeatures f;
  f.top_prob = p.probs[top];
  double second = -1.0;
  for (size_t i = 0; i < p.probs.size(); ++i) {
    if (static_cast<int>(i) == top) continue;
    second = std::max(second, p.probs[i]);
  }
  f.prob_delta = second < 0.0 ? f.top_prob : f.top_prob - second;
  f.negentropy = std::log(static_cast<double>(p.probs.size())) - PosteriorEntropy(p.probs);
  f.continuity = run_length_;
  return f;
}

std::vector<ConfidenceFeatures> ExtractFeatureSequence(
    const std::vector<Posterior>& posteriors, int64_t continuity_cap) {
  ConfidenceExtractor extractor(continuity_cap);
  std::vector<ConfidenceFeatures> out;
  out.reserve(posteriors.size());
  for (const Posterior& p : posteriors) out.push_back(extractor.Push(p));
  return out;
}

namespace {

double ScoreLogit(const ConfidenceFeatures& f, const ConfidenceModel& m) {
  const double c4 = m.normalize_continuity
                        ? static_cast<double>(std::min(f.continuity, m.continuity_cap)) /
                              static_cast<double>(m.continuity_cap)
                        : static_cast<double>(f.continuity);
  return m.alphas[0] * f.top_prob + m.alphas[1] * f.prob_delta +
         m.alphas[2] * f.negentropy + m.alphas[3] * c4 + m.beta;
}

}  // namespace

double ConfidenceScore(const ConfidenceFeatures& features,
                       const ConfidenceModel& model) {
  return 1.0 / (1.0 + std::exp(-ScoreLogit(features, model)));
}

double ConfidenceLogLoss(const std::vector<ConfidenceSample>& dev,
                         const ConfidenceModel& model) {
  if (dev.empty()) ThrowInvalidInput("confidence: empty dev set");
  double loss = 0.0;
  for (const ConfidenceSample& s : dev) {
    const double c = ConfidenceScore(s.features, model);
    const double p = s.label == 1 ? c : 1.0 - c;
    loss += -std::log(std::max(p, 1e-12));
  }
  return loss / static_cast<double>(dev.size());
}

ConfidenceModel TrainConfidence(const std::vector<ConfidenceSample>& dev,
                                const ConfidenceTrainConfig& config) {
  if (dev.empty()) ThrowInvalidInput("confidence: empty dev set");
  bool has_positive = false, has_negative = false;
  for (const ConfidenceSample& s : dev) {
    if (s.label == 1) has_positive = true;
    else has_negative = true;
  }
  if (!has_positive || !has_negative) {
    throw Error(ErrorCode::kDegenerateData,
                "confidence training needs both correct and incorrect samples");
  }

  ConfidenceModel model;
  model.continuity_cap = config.continuity_cap;
  model.normalize_continuity = config.normalize_continuity;

  const double inv_n = 1.0 / static_cast<double>(dev.size());
  double m_state[5] = {0, 0, 0, 0, 0};
  double v_state[5] = {0, 0, 0, 0, 0};

  for (int64_t step = 0; step < config.steps; ++step) {
    double grad[5] = {0, 0, 0, 0, 0};
    for (const ConfidenceSample& s : dev) {
      const double c = ConfidenceScore(s.features, model);
      const double err = (c - static_cast<double>(s.label)) * inv_n;
      const double c4 =
          model.normalize_continuity
              ? static_cast<double>(std::min(s.features.continuity,
                                             model.continuity_cap)) /
                    static_cast<double>(model.continuity_cap)
              : static_cast<double>(s.features.continuity);
      grad[0] += err * s.features.top_prob;
      grad[1] += err * s.features.prob_delta;
      grad[2] += err * s.features.negentropy;
      grad[3] += err * c4;
      grad[4] += err;
    }

    double* params[5] = {&model.alphas[0], &model.alphas[1], &model.alphas[2],
                         &model.alphas[3], &model.beta};
    if (config.use_adam) {
      const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
      const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step + 1));
      const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step + 1));
      for (int i = 0; i < 5; ++i) {
        m_state[i] = b1 * m_state[i] + (1.0 - b1) * grad[i];
        v_state[i] = b2 * v_state[i] + (1.0 - b2) * grad[i] * grad[i];
        *params[i] -= config.learning_rate * (m_state[i] / bc1) /
                      (std::sqrt(v_state[i] / bc2) + eps);
      }
    } else {
      for (int i = 0; i < 5; ++i) *params[i] -= config.learning_rate * grad[i];
    }

    // Norm cap: perfectly separated data would otherwise diverge.
    double norm_sq = model.beta * model.beta;
    for (double a : model.alphas) norm_sq += a * a;
    const double norm = std::sqrt(norm_sq);
    if (norm > config.param_norm_cap) {
      const double scale = config.param_norm_cap / norm;
      for (double& a : model.alphas) a *= scale;
      model.beta *= scale;
    }
  }
  return model;
}

DetCurve CalibrateThreshold(const std::vector<double>& scores,
                            const std::vector<int>& labels, ThresholdRule rule,
                            double max_false_accept) {
  if (scores.size() != labels.size() || scores.empty()) {
    ThrowInvalidInput("DET calibration: scores and labels must align");
  }
  int64_t positives = 0, negatives = 0;
  for (int z : labels) {
    if (z == 1) ++positives;
    else ++negatives;
  }
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::kDegenerateData,
                "DET calibration needs both correct and incorrect samples");
  }

  std::vector<double> thresholds = scores;
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  // Accept-all endpoint below every score, reject-all endpoint above.
  thresholds.insert(thresholds.begin(), thresholds.front() - 1.0);
  thresholds.push_back(thresholds.back() + 1.0);

  DetCurve curve;
  curve.points.reserve(thresholds.size());
  for (double t : thresholds) {
    int64_t fa = 0, fr = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
      if (labels[i] == 0 && scores[i] >= t) ++fa;
      if (labels[i] == 1 && scores[i] < t) ++fr;
    }
    DetPoint point;
    point.threshold = t;
    point.false_accept = static_cast<double>(fa) / static_cast<double>(negatives);
    point.false_reject = static_cast<double>(fr) / static_cast<double>(positives);
    curve.points.push_back(point);
  }

  if (rule == ThresholdRule::kEqualErrorRate) {
    double best_gap = 2.0;
    for (const DetPoint& p : curve.points) {
      const double gap = std::abs(p.false_accept - p.false_reject);
      if (gap < best_gap) {
        best_gap = gap;
        curve.tau = p.threshold;
      }
    }
  } else {
    // Smallest threshold meeting the FA budget (FA is non-increasing in
    // tau, so this keeps FR minimal among feasible thresholds).
    curve.tau = curve.points.back().threshold;
    for (const DetPoint& p : curve.points) {
      if (p.false_accept <= max_false_accept) {
        curve.tau = p.threshold;
        break;
      }
    }
  }
  return curve;
}

std::string SerializeConfidenceModel(const ConfidenceModel& model) {
  std::ostringstream out;
  out.precision(17);
  out << model.alphas[0] << " " << model.alphas[1] << " " << model.alphas[2]
      << " " << model.alphas[3] << " " << model.beta << " " << model.threshold
      << "\n";
  return out.str();
}

ConfidenceModel DeserializeConfidenceModel(const std::string& text) {
  std::istringstream in(text);
  ConfidenceModel model;
  in >> model.alphas[0] >> model.alphas[1] >> model.alphas[2] >>
      model.alphas[3] >> model.beta >> model.threshold;
  if (!in) ThrowModel("confidence model record must have 6 fields");
  return model;
}

void SaveConfidenceModel(const ConfidenceModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write confidence model: " + path);
  out << SerializeConfidenceModel(model);
}

ConfidenceModel LoadConfidenceModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open confidence model: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return DeserializeConfidenceModel(buffer.str());
}

std::string DetCurveCsv(const DetCurve& curve) {
  std::ostringstream out;
  out.precision(9);
  out << "threshold,false_accept,false_reject\n";
  for (const DetPoint& p : curve.points) {
    out << p.threshold << "," << p.false_accept << "," << p.false_reject << "\n";
  }
  return out.str();
}

}  // namespace slid
