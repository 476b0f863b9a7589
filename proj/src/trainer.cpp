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

#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "error.hpp"
#include "rng.hpp"

namespace slid {

namespace {

HeadGradient ZeroHeadGradient(const HeadParams& head) {
  HeadGradient g;
  g.hidden_weight.assign(head.hidden_dim(),
                         std::vector<double>(head.pool_dim(), 0.0));
  g.hidden_bias.assign(head.hidden_dim(), 0.0);
  g.out_weight.assign(head.num_classes(),
                      std::vector<double>(head.hidden_dim(), 0.0));
  g.out_bias.assign(head.num_classes(), 0.0);
  return g;
}

// Forward + backward for one utterance. Returns the loss; accumulates
// parameter gradients (unscaled) into the output structs.
double BackpropUtterance(const LabeledUtterance& utt,
                         const AttentionParams& attention, const HeadParams& head,
                         PoolingMode mode, bool train_sigma_path,
                         AttentionGradient* attn_grad, HeadGradient* head_grad) {
  const bool use_std = PoolingModeUsesStd(mode);
  const double sigma_floor = use_std ? kTrainSigmaFloor : 0.0;
  const PooledVector pooled =
      PoolFinalDouble(utt.embeddings, attention, mode, sigma_floor);
  const std::vector<double> x = pooled.Concatenated();

  const int pool_dim = head.pool_dim();
  const int hidden_dim = head.hidden_dim();
  const int k = head.num_classes();
  if (static_cast<int>(x.size()) != pool_dim) {
    ThrowConfig("trainer: pooled vector dimension " + std::to_string(x.size()) +
                " does not match head input " + std::to_string(pool_dim));
  }

  std::vector<double> pre(hidden_dim), hidden(hidden_dim);
  for (int j = 0; j < hidden_dim; ++j) {
    double acc = head.hidden_bias[j];
    for (int i = 0; i < pool_dim; ++i) acc += head.hidden_weight[j][i] * x[i];
    pre[j] = acc;
    hidden[j] = std::max(acc, 0.0);
  }
  std::vector<double> logits(k);
  for (int c = 0; c < k; ++c) {
    double acc = head.out_bias[c];
    for (int j = 0; j < hidden_dim; ++j) acc += head.out_weight[c][j] * hidden[j];
    logits[c] = acc;
  }
  const std::vector<double> probs = Softmax(logits);
  const double loss = -std::log(std::max(probs[utt.truth_index], 1e-12));

  // Softmax cross entropy backward.
  std::vector<double> dlogits = probs;
  dlogits[utt.truth_index] -= 1.0;

  std::vector<double> dhidden(hidden_dim, 0.0);
  for (int c = 0; c < k; ++c) {
    head_grad->out_bias[c] += dlogits[c];
    for (int j = 0; j < hidden_dim; ++j) {
      head_grad->out_weight[c][j] += dlogits[c] * hidden[j];
      dhidden[j] += dlogits[c] * head.out_weight[c][j];
    }
  }
  std::vector<double> dx(pool_dim, 0.0);
  for (int j = 0; j < hidden_dim; ++j) {
    const double dpre = pre[j] > 0.0 ? dhidden[j] : 0.0;
    head_grad->hidden_bias[j] += dpre;
    for (int i = 0; i < pool_dim; ++i) {
      head_grad->hidden_weight[j][i] += dpre * x[i];
      dx[i] += dpre * head.hidden_weight[j][i];
    }
  }

  if (PoolingModeUsesAttention(mode)) {
    const size_t dim = utt.embeddings[0].size();
    std::vector<double> dmean(dx.begin(), dx.begin() + dim);
    std::vector<double> dstd;
    if (use_std && train_sigma_path) {
      dstd.assign(dx.begin() + dim, dx.end());
    }
    const AttentionGradient g = PoolingGradients(
        utt.embeddings, attention, mode, dmean, dstd, sigma_floor);
    for (size_t i = 0; i < g.weight.size(); ++i) attn_grad->weight[i] += g.weight[i];
    attn_grad->bias += g.bias;
  }
  return loss;
}

}  // namespace

double UtteranceLoss(const LabeledUtterance& utt, const AttentionParams& attention,
                     const HeadParams& head, PoolingMode mode) {
  // Same sigma floor as the training forward pass, so finite differences
  // probe exactly the function the analytic gradients differentiate.
  const double floor = PoolingModeUsesStd(mode) ? kTrainSigmaFloor : 0.0;
  const PooledVector pooled = PoolFinalDouble(utt.embeddings, attention, mode, floor);
  const Posterior p = Classify(pooled.Concatenated(), head);
  return CrossEntropy(p, utt.truth_index);
}

double ComputeBatchGradients(const std::vector<LabeledUtterance>& data,
                             const AttentionParams& attention,
                             const HeadParams& head, PoolingMode mode,
                             bool train_sigma_path, AttentionGradient* attn_grad,
                             HeadGradient* head_grad) {
  if (data.empty()) ThrowInvalidInput("trainer: empty batch");
  attn_grad->weight.assign(attention.weight.size(), 0.0);
  attn_grad->bias = 0.0;
  *head_grad = ZeroHeadGradient(head);
  double loss = 0.0;
  for (const LabeledUtterance& utt : data) {
    loss += BackpropUtterance(utt, attention, head, mode, train_sigma_path,
                              attn_grad, head_grad);
  }
  const double inv = 1.0 / static_cast<double>(data.size());
  loss *= inv;
  for (double& v : attn_grad->weight) v *= inv;
  attn_grad->bias *= inv;
  for (auto& row : head_grad->hidden_weight) {
    for (double& v : row) v *= inv;
  }
  for (double& v : head_grad->hidden_bias) v *= inv;
  for (auto& row : head_grad->out_weight) {
    for (double& v : row) v *= inv;
  }
  for (double& v : head_grad->out_bias) v *= inv;
  return loss;
}

namespace {

// Flat views over all trainable coordinates, in a fixed order:
// attention weight, attention bias, hidden W, hidden b, out W, out b.
struct ParamView {
  std::vector<double*> coords;

  static ParamView Of(AttentionParams* a, HeadParams* h, bool include_attention) {
    ParamView v;
    if (include_attention) {
      for (double& x : a->weight) v.coords.push_back(&x);
      v.coords.push_back(&a->bias);
    }
    for (auto& row : h->hidden_weight) {
      for (double& x : row) v.coords.push_back(&x);
    }
    for (double& x : h->hidden_bias) v.coords.push_back(&x);
    for (auto& row : h->out_weight) {
      for (double& x : row) v.coords.push_back(&x);
    }
    for (double& x : h->out_bias) v.coords.push_back(&x);
    return v;
  }
};

std::vector<double> FlattenGradient(const AttentionGradient& ag,
                                    const HeadGradient& hg,
                                    bool include_attention) {
  std::vector<double> out;
  if (include_attention) {
    out.insert(out.end(), ag.weight.begin(), ag.weight.end());
    out.push_back(ag.bias);
  }
  for (const auto& row : hg.hidden_weight) out.insert(out.end(), row.begin(), row.end());
  out.insert(out.end(), hg.hidden_bias.begin(), hg.hidden_bias.end());
  for (const auto& row : hg.out_weight) out.insert(out.end(), row.begin(), row.end());
  out.insert(out.end(), hg.out_bias.begin(), hg.out_bias.end());
  return out;
}

}  // namespace

TrainResult TrainHead(const std::vector<LabeledUtterance>& data,
                      const TrainConfig& config) {
  if (data.empty()) ThrowInvalidInput("trainer: empty dataset");
  std::set<int> classes;
  size_t dim = 0;
  for (const LabeledUtterance& utt : data) {
    if (utt.embeddings.empty()) ThrowInvalidInput("trainer: utterance with no steps");
    classes.insert(utt.truth_index);
    dim = utt.embeddings[0].size();
  }
  if (classes.size() < 2) {
    throw Error(ErrorCode::kDegenerateData,
                "training data contains a single class");
  }
  const int num_classes = *classes.rbegin() + 1;

  TrainResult result;
  Rng rng(config.seed);
  result.attention.weight.assign(dim, 0.0);
  result.attention.bias = 0.0;
  if (PoolingModeUsesAttention(config.mode)) {
    const double scale = std::sqrt(1.0 / static_cast<double>(dim));
    for (double& v : result.attention.weight) v = rng.Uniform(-scale, scale);
  }
  const int pool_dim =
      PoolingModeUsesStd(config.mode) ? 2 * static_cast<int>(dim) : static_cast<int>(dim);
  result.head =
      InitRandomHead(pool_dim, config.hidden_dim, num_classes, rng.NextU64());

  // Adam state (allocated lazily when enabled).
  std::vector<double> m, v;
  int64_t adam_t = 0;

  const int64_t n = static_cast<int64_t>(data.size());
  const int64_t batch =
      (config.batch_size <= 0 || config.batch_size >= n) ? n : config.batch_size;
  int64_t cursor = 0;

  result.loss_curve.reserve(config.steps);
  for (int64_t step = 0; step < config.steps; ++step) {
    std::vector<LabeledUtterance> batch_data;
    if (batch == n) {
      batch_data = data;
    } else {
      batch_data.reserve(batch);
      for (int64_t i = 0; i < batch; ++i) {
        batch_data.push_back(data[(cursor + i) % n]);
      }
      cursor = (cursor + batch) % n;
    }

    AttentionGradient ag;
    HeadGradient hg;
    const double loss =
        ComputeBatchGradients(batch_data, result.attention, result.head,
                              config.mode, config.train_sigma_path, &ag, &hg);
    result.loss_curve.push_back(loss);

    ParamView params = ParamView::Of(&result.attention, &result.head,
                                     PoolingModeUsesAttention(config.mode));
    const std::vector<double> grad =
        FlattenGradient(ag, hg, PoolingModeUsesAttention(config.mode));

    if (config.use_adam) {
      if (m.empty()) {
        m.assign(grad.size(), 0.0);
        v.assign(grad.size(), 0.0);
      }
      ++adam_t;
      const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
      const double bc1 = 1.0 - std::pow(b1, static_cast<double>(adam_t));
      const double bc2 = 1.0 - std::pow(b2, static_cast<double>(adam_t));
      for (size_t i = 0; i < grad.size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
        v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        *params.coords[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + eps);
      }
    } else {
      for (size_t i = 0; i < grad.size(); ++i) {
        *params.coords[i] -= config.learning_rate * grad[i];
      }
    }
  }
  return result;
}

double EvaluateAccuracy(const std::vector<LabeledUtterance>& data,
                        const AttentionParams& attention, const HeadParams& head,
                        PoolingMode mode) {
  if (data.empty()) return 0.0;
  int correct = 0;
  for (const LabeledUtterance& utt : data) {
    const PooledVector pooled = PoolFinalDouble(utt.embeddings, attention, mode);
    const Posterior p = Classify(pooled.Concatenated(), head);
    if (Argmax(p.probs) == utt.truth_index) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double GradientCheck(const LabeledUtterance& instance,
                     const AttentionParams& attention, const HeadParams& head,
                     PoolingMode mode, bool train_sigma_path, double step_size,
                     int min_coords, uint64_t seed) {
  AttentionParams a = attention;
  HeadParams h = head;
  const bool include_attention = PoolingModeUsesAttention(mode);

  AttentionGradient ag;
  HeadGradient hg;
  const std::vector<LabeledUtterance> batch{instance};
  ComputeBatchGradients(batch, a, h, mode, train_sigma_path, &ag, &hg);
  const std::vector<double> analytic = FlattenGradient(ag, hg, include_attention);

  ParamView params = ParamView::Of(&a, &h, include_attention);
  const size_t total = params.coords.size();

  std::vector<size_t> indices;
  if (total <= static_cast<size_t>(min_coords)) {
    for (size_t i = 0; i < total; ++i) indices.push_back(i);
  } else {
    Rng rng(seed);
    std::set<size_t> chosen;
    while (chosen.size() < static_cast<size_t>(min_coords)) {
      chosen.insert(static_cast<size_t>(rng.NextBelow(total)));
    }
    indices.assign(chosen.begin(), chosen.end());
  }

  double max_rel = 0.0;
  for (size_t idx : indices) {
    double* coord = params.coords[idx];
    const double original = *coord;
    *coord = original + step_size;
    const double plus = UtteranceLoss(instance, a, h, mode);
    *coord = original - step_size;
    const double minus = UtteranceLoss(instance, a, h, mode);
    *coord = original;
    const double fd = (plus - minus) / (2.0 * step_size);
    const double denom = std::max({std::abs(fd), std::abs(analytic[idx]), 1e-4});
    max_rel = std::max(max_rel, std::abs(fd - analytic[idx]) / denom);
  }
  return max_rel;
}

}  // namespace slid
