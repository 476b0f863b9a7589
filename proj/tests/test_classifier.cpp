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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "classifier.hpp"
#include "doctest.h"
#include "error.hpp"
#include "rng.hpp"
#include "test_util.hpp"

using namespace slid;
using namespace slid::testing;

namespace {

HeadParams ZeroHead(int pool_dim, int hidden, int k) {
  HeadParams p;
  p.hidden_weight.assign(hidden, std::vector<double>(pool_dim, 0.0));
  p.hidden_bias.assign(hidden, 0.0);
  p.out_weight.assign(k, std::vector<double>(hidden, 0.0));
  p.out_bias.assign(k, 0.0);
  return p;
}

std::vector<double> RandomVec(uint64_t seed, int dim, double scale = 1.0) {
  Rng rng(seed);
  std::vector<double> out(dim);
  for (double& v : out) v = rng.Uniform(-scale, scale);
  return out;
}

}  // namespace

TEST_CASE("zero weights and biases give the uniform posterior") {
  const int k = 5;
  const HeadParams head = ZeroHead(6, 8, k);
  const Posterior p = Classify(RandomVec(1, 6), head);
  for (double prob : p.probs) CHECK(prob == doctest::Approx(1.0 / k).epsilon(1e-12));
}

TEST_CASE("adding a constant to every output logit leaves probs unchanged") {
  Rng rng(2);
  HeadParams head = InitRandomHead(6, 8, 4, 3);
  const std::vector<double> x = RandomVec(4, 6);
  const Posterior base = Classify(x, head);
  for (double& b : head.out_bias) b += 7.5;
  const Posterior shifted = Classify(x, head);
  for (size_t i = 0; i < base.probs.size(); ++i) {
    CHECK(shifted.probs[i] == doctest::Approx(base.probs[i]).epsilon(1e-9));
  }
}

TEST_CASE("classify matches a brute-force dense oracle") {
  // Oracle: an independent straightforward re-implementation.
  Rng rng(5);
  const int pool_dim = 7, hidden = 9, k = 4;
  const HeadParams head = InitRandomHead(pool_dim, hidden, k, 11);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> x = RandomVec(100 + trial, pool_dim, 2.0);

    std::vector<double> h(hidden);
    for (int j = 0; j < hidden; ++j) {
      double acc = head.hidden_bias[j];
      for (int i = 0; i < pool_dim; ++i) acc += head.hidden_weight[j][i] * x[i];
      h[j] = acc > 0 ? acc : 0.0;
    }
    std::vector<double> logits(k);
    double max_logit = -1e300;
    for (int c = 0; c < k; ++c) {
      double acc = head.out_bias[c];
      for (int j = 0; j < hidden; ++j) acc += head.out_weight[c][j] * h[j];
      logits[c] = acc;
      max_logit = std::max(max_logit, acc);
    }
    double denom = 0.0;
    for (int c = 0; c < k; ++c) denom += std::exp(logits[c] - max_logit);

    const Posterior p = Classify(x, head);
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
      const double expected = std::exp(logits[c] - max_logit) / denom;
      CHECK(std::abs(p.probs[c] - expected) < 1e-6);
      sum += p.probs[c];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("posterior stays normalized under extreme logits") {
  HeadParams head = ZeroHead(2, 2, 3);
  head.out_bias = {1e4, -1e4, 0.0};
  const Posterior p = Classify(std::vector<double>{0.0, 0.0}, head);
  double sum = 0.0;
  for (double prob : p.probs) {
    CHECK(std::isfinite(prob));
    sum += prob;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p.probs[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cross entropy of a one-hot posterior at the truth is zero") {
  Posterior p;
  p.probs = {0.0, 1.0, 0.0};
  CHECK(CrossEntropy(p, 1) == doctest::Approx(0.0));
}

TEST_CASE("cross entropy of the uniform posterior is ln K") {
  Posterior p;
  p.probs.assign(65, 1.0 / 65);
  CHECK(CrossEntropy(p, 12) == doctest::Approx(std::log(65.0)).epsilon(1e-9));
  CHECK(CrossEntropy(p, 12) == doctest::Approx(4.174).epsilon(1e-3));
}

TEST_CASE("zero truth probability is floored, not infinite") {
  Posterior p;
  p.probs = {1.0, 0.0};
  const double loss = CrossEntropy(p, 1);
  CHECK(std::isfinite(loss));
  CHECK(loss <= -std::log(1e-12) + 1e-9);
}

TEST_CASE("out-of-range truth index is an invalid input") {
  Posterior p;
  p.probs = {0.5, 0.5};
  CHECK_THROWS_AS(CrossEntropy(p, 2), Error);
  CHECK_THROWS_AS(CrossEntropy(p, -1), Error);
}

TEST_CASE("classifier input dimension mismatch is a configuration error") {
  const HeadParams head = ZeroHead(6, 4, 3);
  CHECK_THROWS_AS(Classify(RandomVec(9, 5), head), Error);
}

TEST_CASE("classify is deterministic and position independent") {
  const HeadParams head = InitRandomHead(5, 6, 3, 21);
  PooledVector pooled;
  pooled.mean = RandomVec(22, 5);
  pooled.mode = PoolingMode::kWeightedMean;
  const Posterior a = Classify(pooled, head);
  pooled.mean = RandomVec(22, 5);
  const Posterior b = Classify(pooled, head);
  CHECK(a.probs == b.probs);
}

TEST_CASE("language table validation and checksum") {
  LanguageTable table;
  table.codes = {"en", "es", "fr"};
  CHECK_NOTHROW(ValidateLanguageTable(table));
  CHECK(table.IndexOf("es") == 1);
  CHECK(table.IndexOf("de") == -1);

  LanguageTable other;
  other.codes = {"en", "es", "de"};
  CHECK(table.Checksum() != other.Checksum());
  CHECK(table.Checksum() == table.Checksum());

  LanguageTable dup;
  dup.codes = {"en", "en"};
  CHECK_THROWS_AS(ValidateLanguageTable(dup), Error);
  LanguageTable single;
  single.codes = {"en"};
  CHECK_THROWS_AS(ValidateLanguageTable(single), Error);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(Argmax(std::vector<double>{0.4, 0.4, 0.2}) == 0);
  CHECK(Argmax(std::vector<double>{0.1, 0.45, 0.45}) == 1);
}
