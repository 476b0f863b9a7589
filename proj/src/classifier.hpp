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

#ifndef SLID_CLASSIFIER_HPP_
#define SLID_CLASSIFIER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "pooling.hpp"

namespace slid {

// Classification head: hidden layer with rectified-linear activation,
// linear projection to K languages, softmax.
struct HeadParams {
  // hidden_weight: [hidden_dim, pool_dim]; out_weight: [K, hidden_dim].
  std::vector<std::vector<double>> hidden_weight;
  std::vector<double> hidden_bias;
  std::vector<std::vector<double>> out_weight;
  std::vector<double> out_bias;

  int pool_dim() const {
    return hidden_weight.empty() ? 0 : static_cast<int>(hidden_weight[0].size());
  }
  int hidden_dim() const { return static_cast<int>(hidden_bias.size()); }
  int num_classes() const { return static_cast<int>(out_bias.size()); }
};

HeadParams InitRandomHead(int pool_dim, int hidden_dim, int num_classes,
                          uint64_t seed);

struct Posterior {
  std::vector<double> probs;
  int64_t step = 0;
};

// Ordered candidate language codes; the position is the class index.
struct LanguageTable {
  std::vector<std::string> codes;

  int size() const { return static_cast<int>(codes.size()); }
  int IndexOf(const std::string& code) const;  // -1 when absent
  // Checksum binding stored artifacts (adaptation registry) to this table.
  uint64_t Checksum() const;
};

void ValidateLanguageTable(const LanguageTable& table);

// Overflow-safe softmax (max subtraction).
std::vector<double> Softmax(const std::vector<double>& logits);

Posterior Classify(const PooledVector& pooled, const HeadParams& params);
Posterior Classify(const std::vector<double>& pooled_concat, const HeadParams& params);

// -log(probs[truth]), probability floored at 1e-12.
double CrossEntropy(const Posterior& posterior, int truth_index);

int Argmax(const std::vector<double>& values);  // ties -> lowest index

}  // namespace slid

#endif  // SLID_CLASSIFIER_HPP_
