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

#ifndef SLID_ADAPTATION_HPP_
#define SLID_ADAPTATION_HPP_

#include <cstdint>
#include <map>
#include <shared_mutex>
#include <string>
#include <vector>

#include "classifier.hpp"

namespace slid {

// Post-hoc domain adaptation: posteriors are re-scored as
// softmax(a * p + b) with one (a, b) pair per deployment domain -- 2K
// parameters, trained on a small in-domain dev set.
struct AdaptationParams {
  std::vector<double> a;  // K, identity = all ones
  std::vector<double> b;  // K, identity = all zeros
  std::string domain_id;

  static AdaptationParams Identity(int k, const std::string& domain = "default");
};

enum class RegularizerNorm { kL2, kL1 };

struct AdaptObjectiveConfig {
  double w_reg = 0.1;
  double learning_rate = 0.5;
  int64_t steps = 2000;
  uint64_t seed = 1;
  RegularizerNorm norm = RegularizerNorm::kL2;
  double convergence_delta = 1e-9;
};

Posterior AdaptPosterior(const Posterior& p, const AdaptationParams& params);

struct AdaptExample {
  Posterior posterior;
  int truth_index = 0;
};

// Mean cross entropy of the adapted posteriors plus
// w_reg * (||a - 1|| + ||b||).
double AdaptationObjective(const std::vector<AdaptExample>& dev,
                           const AdaptationParams& params,
                           const AdaptObjectiveConfig& config);

// Full-batch gradient descent from the identity initialization. The best
// parameters seen are returned, so the objective never exceeds the
// identity's objective.
AdaptationParams TrainAdaptation(const std::vector<AdaptExample>& dev,
                                 const AdaptObjectiveConfig& config,
                                 const std::string& domain_id = "default");

// Many-reader / single-writer registry of per-domain parameters. Lookups
// never fail: unknown domains get the identity entry.
class DomainRegistry {
 public:
  explicit DomainRegistry(int num_languages, uint64_t language_checksum = 0);

  AdaptationParams Lookup(const std::string& domain_id) const;
  void Register(const AdaptationParams& params);
  std::vector<std::string> DomainIds() const;

  int num_languages() const { return num_languages_; }
  uint64_t language_checksum() const { return language_checksum_; }

  // Text round-trip. Loading verifies the language-table checksum when the
  // caller provides one.
  std::string Serialize() const;
  static DomainRegistry Deserialize(const std::string& text,
                                    uint64_t expected_checksum = 0);
  void SaveToFile(const std::string& path) const;
  static DomainRegistry LoadFromFile(const std::string& path,
                                     uint64_t expected_checksum = 0);

  DomainRegistry(const DomainRegistry& other);
  DomainRegistry& operator=(const DomainRegistry& other);

 private:
  int num_languages_;
  uint64_t language_checksum_;
  std::map<std::string, AdaptationParams> domains_;
  mutable std::shared_mutex mutex_;
};

}  // namespace slid

#endif  // SLID_ADAPTATION_HPP_
