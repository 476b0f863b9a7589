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

#include "doctest.h"
#include "error.hpp"
#include "eval.hpp"
#include "rng.hpp"
#include "test_util.hpp"

using namespace slid;
using namespace slid::testing;

namespace {

EvalRecord Rec(int truth, int predicted) {
  EvalRecord r;
  r.truth_index = truth;
  r.predicted_index = predicted;
  return r;
}

Posterior MakePosterior(std::vector<double> probs) {
  Posterior p;
  p.probs = std::move(probs);
  return p;
}

}  // namespace

TEST_CASE("all-correct records give accuracy one for every language") {
  const std::vector<EvalRecord> records{Rec(0, 0), Rec(1, 1), Rec(1, 1), Rec(2, 2)};
  const auto per_language = PerLanguageAccuracy(records);
  REQUIRE(per_language.size() == 3);
  for (const auto& [lang, acc] : per_language) CHECK(acc == doctest::Approx(1.0));
  CHECK(AverageAccuracy(per_language) == doctest::Approx(1.0));
  CHECK(TotalAccuracy(records) == doctest::Approx(1.0));
}

TEST_CASE("always predicting language 0 nails class 0 and misses class 1") {
  const std::vector<EvalRecord> records{Rec(0, 0), Rec(0, 0), Rec(1, 0), Rec(1, 0)};
  const auto per_language = PerLanguageAccuracy(records);
  CHECK(per_language.at(0) == doctest::Approx(1.0));
  CHECK(per_language.at(1) == doctest::Approx(0.0));
  CHECK(AverageAccuracy(per_language) == doctest::Approx(0.5));
}

TEST_CASE("per-language accuracy matches a hand-counted oracle on a random fixture") {
  Rng rng(3);
  std::vector<EvalRecord> records;
  int64_t correct[3] = {0, 0, 0};
  int64_t total[3] = {0, 0, 0};
  for (int i = 0; i < 300; ++i) {
    const int truth = static_cast<int>(rng.NextBelow(3));
    const int predicted = static_cast<int>(rng.NextBelow(3));
    records.push_back(Rec(truth, predicted));
    ++total[truth];
    if (truth == predicted) ++correct[truth];
  }
  const auto per_language = PerLanguageAccuracy(records);
  for (int c = 0; c < 3; ++c) {
    CHECK(per_language.at(c) ==
          doctest::Approx(static_cast<double>(correct[c]) / total[c]));
  }
}

TEST_CASE("languages with zero records are excluded from the map") {
  const std::vector<EvalRecord> records{Rec(0, 0), Rec(5, 5)};
  const auto per_language = PerLanguageAccuracy(records);
  CHECK(per_language.size() == 2);
  CHECK(per_language.count(1) == 0);
}

TEST_CASE("uniform per-language map averages to itself") {
  std::map<int, double> map{{0, 0.8}, {1, 0.8}, {2, 0.8}};
  CHECK(AverageAccuracy(map) == doctest::Approx(0.8));
  std::map<int, double> split{{0, 1.0}, {1, 0.0}};
  CHECK(AverageAccuracy(split) == doctest::Approx(0.5));
}

TEST_CASE("total accuracy counts records, not languages") {
  std::vector<EvalRecord> records;
  for (int i = 0; i < 90; ++i) records.push_back(Rec(0, 0));
  for (int i = 0; i < 10; ++i) records.push_back(Rec(1, 0));
  CHECK(TotalAccuracy(records) == doctest::Approx(0.9));
  // Skewed class sizes: total != average.
  const auto per_language = PerLanguageAccuracy(records);
  CHECK(AverageAccuracy(per_language) == doctest::Approx(0.5));
}

TEST_CASE("total equals average exactly when class sizes are equal") {
  Rng rng(5);
  std::vector<EvalRecord> records;
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i < 25; ++i) {
      records.push_back(Rec(c, static_cast<int>(rng.NextBelow(4))));
    }
  }
  CHECK(TotalAccuracy(records) ==
        doctest::Approx(AverageAccuracy(PerLanguageAccuracy(records))).epsilon(1e-12));
}

TEST_CASE("constant argmax emits at most one switch event") {
  std::vector<Posterior> posteriors(6, MakePosterior({0.8, 0.2}));
  const std::vector<double> confidences(6, 0.95);
  const auto events = EmitSwitchEvents(posteriors, confidences, 0.9);
  REQUIRE(events.size() == 1);
  CHECK(events[0].step == 0);
  CHECK(events[0].previous_language == -1);
  CHECK(events[0].new_language == 0);
}

TEST_CASE("no events when confidence never clears tau") {
  std::vector<Posterior> posteriors{MakePosterior({0.9, 0.1}),
                                    MakePosterior({0.1, 0.9})};
  const std::vector<double> confidences{0.5, 0.6};
  CHECK(EmitSwitchEvents(posteriors, confidences, 0.999999).empty());
}

TEST_CASE("alternating argmax with high confidence fires on every change") {
  // Six-step fixture, walked through by hand:
  //   steps 0,1: lang 0 (event at 0); steps 2,3: lang 1 (event at 2);
  //   step 4: lang 0 but low confidence (no event); step 5: lang 0 (event).
  std::vector<Posterior> posteriors{
      MakePosterior({0.9, 0.1}), MakePosterior({0.8, 0.2}),
      MakePosterior({0.2, 0.8}), MakePosterior({0.3, 0.7}),
      MakePosterior({0.7, 0.3}), MakePosterior({0.9, 0.1})};
  const std::vector<double> confidences{0.99, 0.99, 0.99, 0.99, 0.10, 0.99};
  const auto events = EmitSwitchEvents(posteriors, confidences, 0.9);
  REQUIRE(events.size() == 3);
  CHECK(events[0].step == 0);
  CHECK(events[0].new_language == 0);
  CHECK(events[1].step == 2);
  CHECK(events[1].previous_language == 0);
  CHECK(events[1].new_language == 1);
  CHECK(events[2].step == 5);
  CHECK(events[2].previous_language == 1);
  CHECK(events[2].new_language == 0);
  // Events are strictly increasing in step and never repeat a language.
  for (size_t i = 1; i < events.size(); ++i) {
    CHECK(events[i].step > events[i - 1].step);
    CHECK(events[i].new_language != events[i - 1].new_language);
  }
}

TEST_CASE("switch events JSON lines carry the language codes") {
  LanguageTable table;
  table.codes = {"en", "es"};
  std::vector<Posterior> posteriors{MakePosterior({0.9, 0.1}),
                                    MakePosterior({0.1, 0.9})};
  const std::vector<double> confidences{0.99, 0.99};
  const auto events = EmitSwitchEvents(posteriors, confidences, 0.9);
  const std::string json = SwitchEventsJsonLines(events, table);
  CHECK(json.find("\"from\":null") != std::string::npos);
  CHECK(json.find("\"to\":\"en\"") != std::string::npos);
  CHECK(json.find("\"from\":\"en\"") != std::string::npos);
  CHECK(json.find("\"to\":\"es\"") != std::string::npos);
}

namespace {

ConformerConfig ProductionConfig(int model_dim) {
  ConformerConfig config;
  config.model_dim = model_dim;
  return config;  // remaining fields already hold the production defaults
}

}  // namespace

TEST_CASE("small-model estimate lands within a factor of 2 of 0.45 GFLOP/s") {
  const FlopBreakdown b = EstimateFlops(ProductionConfig(144));
  const double total = b.Total();
  CHECK(total > 0.45e9 / 2.0);
  CHECK(total < 0.45e9 * 2.0);
}

TEST_CASE("doubling model_dim roughly quadruples the matmul-dominated count") {
  const double small = EstimateFlops(ProductionConfig(144)).conformer_layers;
  const double big = EstimateFlops(ProductionConfig(288)).conformer_layers;
  CHECK(big / small > 3.0);
  CHECK(big / small < 4.5);
}

TEST_CASE("estimate is monotone in model_dim across the production sizes") {
  const double s = EstimateFlops(ProductionConfig(144)).Total();
  const double m = EstimateFlops(ProductionConfig(256)).Total();
  const double l = EstimateFlops(ProductionConfig(512)).Total();
  CHECK(s < m);
  CHECK(m < l);
}

TEST_CASE("estimate is monotone in the number of layers") {
  ConformerConfig base = ProductionConfig(144);
  ConformerConfig deeper = base;
  deeper.num_layers = 16;
  CHECK(EstimateFlops(deeper).Total() > EstimateFlops(base).Total());
}

TEST_CASE("a zero-layer config counts only the frontend") {
  ConformerConfig config = ProductionConfig(144);
  config.num_layers = 0;
  const FlopBreakdown b = EstimateFlops(config);
  CHECK(b.frontend > 0.0);
  CHECK(b.input_projection == 0.0);
  CHECK(b.conformer_layers == 0.0);
  CHECK(b.post_projection == 0.0);
  CHECK(b.classifier_head == 0.0);
  CHECK(b.Total() == doctest::Approx(b.frontend));
}

TEST_CASE("eval csv lists language, totals, correct counts and accuracy") {
  LanguageTable table;
  table.codes = {"en", "es", "fr"};
  const std::vector<EvalRecord> records{Rec(0, 0), Rec(0, 1), Rec(1, 1), Rec(2, 2)};
  const std::string csv = EvalCsv(records, table);
  CHECK(csv.find("language,total,correct,accuracy") != std::string::npos);
  CHECK(csv.find("en,2,1,0.5") != std::string::npos);
  CHECK(csv.find("es,1,1,1") != std::string::npos);
  CHECK(csv.find("fr,1,1,1") != std::string::npos);
}
