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

#include "classifier.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "error.hpp"
#include "rng.hpp"

namespace slid {

HeadParams InitRandomHead(int pool_dim, int hidden_dim, int num_classes,
                          uint64_t seed) {
  Rng rng(seed);
  HeadParams p;
  const double s1 = std::sqrt(1.0 / pool_dim);
  const double s2 = std::sqrt(1.0 / hidden_dim);
  p.hidden_weight.assign(hidden_dim, std::vector<double>(pool_dim));
  p.hidden_bias.assign(hidden_dim, 0.0);
  p.out_weight.assign(num_classes, std::vector<double>(hidden_dim));
  p.out_bias.assign(num_classes, 0.0);
  for (auto& row : p.hidden_weight) {
    for (double& v : row) v = rng.Uniform(-s1, s1);
  }
  for (auto& row : p.out_weight) {
    for (double& v : row) v = rng.Uniform(-s2, s2);
  }
  return p;
}

int LanguageTable::IndexOf(const std::string& code) const {
  for (size_t i = 0; i < codes.size(); ++i) {
    if (codes[i] == code) return static_cast<int>(i);
  }
  return -1;
}

uint64_t LanguageTable::Checksum() const {
  // FNV-1a over the codes with separators.
  uint64_t h = 0xcbf29ce484222325ull;
  for (const std::string& code : codes) {
    for (char c : code) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    h ^= 0x1f;
    h *= 0x100000001b3ull;
  }
  return h;
}

void ValidateLanguageTable(const LanguageTable& table) {
  if (table.size() < 2) ThrowInvalidInput("language table needs at least 2 codes");
  std::set<std::string> seen(table.codes.begin(), table.codes.end());
  if (seen.size() != table.codes.size()) {
    ThrowInvalidInput("language table has duplicate codes");
  }
}

std::vector<double> Softmax(const std::vector<double>& logits) {
  std::vector<double> out(logits.size());
  double max_logit = logits[0];
  for (double v : logits) max_logit = std::max(max_logit, v);
  double denom = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max_logit);
    denom += out[i];
  }
  for (double& v : out) v /= denom;
  return out;
}

Posterior Classify(const std::vector<double>& pooled_concat,
                   const HeadParams& params) {
  if (static_cast<int>(pooled_concat.size()) != params.pool_dim()) {
    ThrowConfig("classifier input has dimension " +
                std::to_string(pooled_concat.size()) + ", head expects " +
                std::to_string(params.pool_dim()));
  }
  const int hidden_dim = params.hidden_dim();
  const int k = params.num_classes();
  std::vector<double> hidden(hidden_dim);
  for (int j = 0; j < hidden_dim; ++j) {
    double acc = params.hidden_bias[j];
    const std::vector<double>& row = params.hidden_weight[j];
    for (size_t i = 0; i < pooled_concat.size(); ++i) acc += row[i] * pooled_concat[i];
    hidden[j] = std::max(acc, 0.0);
  }
  std::vector<double> logits(k);
  for (int c = 0; c < k; ++c) {
    double acc = params.out_bias[c];
    const std::vector<double>& row = params.out_weight[c];
    for (int j = 0; j < hidden_dim; ++j) acc += row[j] * hidden[j];
    logits[c] = acc;
  }
  Posterior p;
  p.probs = Softmax(logits);
  return p;
}

Posterior Classify(const PooledVector& pooled, const HeadParams& params) {
  return Classify(pooled.Concatenated(), params);
}

double CrossEntropy(const Posterior& posterior, int truth_index) {
  if (truth_index < 0 || truth_index >= static_cast<int>(posterior.probs.size())) {
    ThrowInvalidInput("cross entropy: truth index out of range");
  }
  return -std::log(std::max(posterior.probs[truth_index], 1e-12));
}

int Argmax(const std::vector<double>& values) {
  int best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace slid
