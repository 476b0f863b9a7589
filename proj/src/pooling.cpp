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

#include "pooling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace slid {

bool PoolingModeUsesStd(PoolingMode mode) {
  return mode == PoolingMode::kMeanStd || mode == PoolingMode::kWeightedMeanStd;
}

bool PoolingModeUsesAttention(PoolingMode mode) {
  return mode == PoolingMode::kWeightedMean || mode == PoolingMode::kWeightedMeanStd;
}

const char* PoolingModeName(PoolingMode mode) {
  switch (mode) {
    case PoolingMode::kMean: return "mean";
    case PoolingMode::kMeanStd: return "mean_std";
    case PoolingMode::kWeightedMean: return "weighted_mean";
    case PoolingMode::kWeightedMeanStd: return "weighted_mean_std";
  }
  return "weighted_mean";
}

PoolingMode PoolingModeFromName(const std::string& name) {
  if (name == "mean") return PoolingMode::kMean;
  if (name == "mean_std") return PoolingMode::kMeanStd;
  if (name == "weighted_mean") return PoolingMode::kWeightedMean;
  if (name == "weighted_mean_std") return PoolingMode::kWeightedMeanStd;
  ThrowInvalidInput("unknown pooling mode: " + name);
}

namespace {

template <typename T>
double AttentionWeightImpl(const std::vector<T>& h, const AttentionParams& params) {
  if (h.size() != params.weight.size()) {
    ThrowInvalidInput("attention weight dimension mismatch");
  }
  double logit = params.bias;
  for (size_t i = 0; i < h.size(); ++i) logit += params.weight[i] * h[i];
  return 1.0 / (1.0 + std::exp(-logit)) + kAttentionEpsilon;
}

template <typename T>
void UpdateStatisticsImpl(PoolingState* state, const std::vector<T>& h, double w) {
  if (w <= 0.0) ThrowInvalidInput("attention weight must be positive");
  if (state->sum_vec.empty()) {
    state->sum_vec.assign(h.size(), 0.0);
    state->sumsq_vec.assign(h.size(), 0.0);
  }
  if (state->sum_vec.size() != h.size()) {
    ThrowInvalidInput("pooling state dimension mismatch");
  }
  state->eta += w;
  for (size_t i = 0; i < h.size(); ++i) {
    const double v = static_cast<double>(h[i]);
    state->sum_vec[i] += w * v;
    state->sumsq_vec[i] += w * v * v;
  }
  ++state->step;
}

}  // namespace

double AttentionWeight(const std::vector<float>& h, const AttentionParams& params) {
  return AttentionWeightImpl(h, params);
}
double AttentionWeight(const std::vector<double>& h, const AttentionParams& params) {
  return AttentionWeightImpl(h, params);
}

void UpdateStatistics(PoolingState* state, const std::vector<float>& h, double w) {
  UpdateStatisticsImpl(state, h, w);
}
void UpdateStatistics(PoolingState* state, const std::vector<double>& h, double w) {
  UpdateStatisticsImpl(state, h, w);
}

std::vector<double> PooledVector::Concatenated() const {
  std::vector<double> out = mean;
  out.insert(out.end(), std.begin(), std.end());
  return out;
}

PooledVector PooledOutput(const PoolingState& state, PoolingMode mode) {
  if (state.step == 0) {
    throw Error(ErrorCode::kUsage, "pooled output requested on an empty stream");
  }
  PooledVector out;
  out.mode = mode;
  const size_t dim = state.sum_vec.size();
  out.mean.resize(dim);
  for (size_t i = 0; i < dim; ++i) out.mean[i] = state.sum_vec[i] / state.eta;
  if (PoolingModeUsesStd(mode)) {
    out.std.resize(dim);
    for (size_t i = 0; i < dim; ++i) {
      // Q/eta - mu^2 can go slightly negative in floating point.
      const double var =
          std::max(state.sumsq_vec[i] / state.eta - out.mean[i] * out.mean[i], 0.0);
      out.std[i] = std::sqrt(var);
    }
  }
  return out;
}

std::vector<PooledVector> PoolStream(const std::vector<Embedding>& embeddings,
                                     const AttentionParams& params,
                                     PoolingMode mode) {
  std::vector<PooledVector> out;
  out.reserve(embeddings.size());
  PoolingState state;
  for (const Embedding& e : embeddings) {
    const double w =
        PoolingModeUsesAttention(mode) ? AttentionWeight(e.values, params) : 1.0;
    UpdateStatistics(&state, e.values, w);
    out.push_back(PooledOutput(state, mode));
  }
  return out;
}

PooledVector PoolFinalDouble(const std::vector<std::vector<double>>& embeddings,
                             const AttentionParams& params, PoolingMode mode,
                             double sigma_floor) {
  if (embeddings.empty()) {
    throw Error(ErrorCode::kUsage, "pooled output requested on an empty stream");
  }
  PoolingState state(static_cast<int>(embeddings[0].size()));
  for (const auto& h : embeddings) {
    const double w =
        PoolingModeUsesAttention(mode) ? AttentionWeight(h, params) : 1.0;
    UpdateStatistics(&state, h, w);
  }
  PooledVector out = PooledOutput(state, mode);
  if (PoolingModeUsesStd(mode) && sigma_floor > 0.0) {
    const size_t dim = out.mean.size();
    for (size_t i = 0; i < dim; ++i) {
      const double var = std::max(
          state.sumsq_vec[i] / state.eta - out.mean[i] * out.mean[i], 0.0);
      out.std[i] = std::sqrt(var + sigma_floor);
    }
  }
  return out;
}

AttentionGradient PoolingGradients(const std::vector<std::vector<double>>& embeddings,
                                   const AttentionParams& params, PoolingMode mode,
                                   const std::vector<double>& loss_grad_mean,
                                   const std::vector<double>& loss_grad_std,
                                   double sigma_floor) {
  AttentionGradient grad;
  grad.weight.assign(params.weight.size(), 0.0);
  grad.bias = 0.0;
  if (!PoolingModeUsesAttention(mode)) return grad;  // weights are constant
  if (embeddings.empty()) ThrowInvalidInput("pooling gradients: empty stream");

  const size_t dim = embeddings[0].size();
  const int64_t T = static_cast<int64_t>(embeddings.size());

  // Forward pass, keeping per-step sigmoid values.
  std::vector<double> sig(T);
  double eta = 0.0;
  std::vector<double> a(dim, 0.0), q(dim, 0.0);
  for (int64_t t = 0; t < T; ++t) {
    double logit = params.bias;
    for (size_t i = 0; i < dim; ++i) logit += params.weight[i] * embeddings[t][i];
    sig[t] = 1.0 / (1.0 + std::exp(-logit));
    const double w = sig[t] + kAttentionEpsilon;
    eta += w;
    for (size_t i = 0; i < dim; ++i) {
      a[i] += w * embeddings[t][i];
      q[i] += w * embeddings[t][i] * embeddings[t][i];
    }
  }
  std::vector<double> mu(dim), var(dim), sigma(dim);
  for (size_t i = 0; i < dim; ++i) {
    mu[i] = a[i] / eta;
    var[i] = std::max(q[i] / eta - mu[i] * mu[i], 0.0);
    sigma[i] = std::sqrt(var[i] + sigma_floor);
  }

  const bool use_std = PoolingModeUsesStd(mode) && !loss_grad_std.empty();

  // dL/dw_t, then chain through the sigmoid.
  for (int64_t t = 0; t < T; ++t) {
    double dl_dw = 0.0;
    for (size_t i = 0; i < dim; ++i) {
      const double centered = embeddings[t][i] - mu[i];
      dl_dw += loss_grad_mean[i] * centered / eta;
      if (use_std) {
        dl_dw += loss_grad_std[i] * (centered * centered - var[i]) /
                 (2.0 * sigma[i] * eta);
      }
    }
    const double dw_dlogit = sig[t] * (1.0 - sig[t]);
    const double g = dl_dw * dw_dlogit;
    for (size_t i = 0; i < dim; ++i) grad.weight[i] += g * embeddings[t][i];
    grad.bias += g;
  }
  return grad;
}

}  // namespace slid
