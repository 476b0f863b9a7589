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

#include "adaptation.hpp"

#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include "error.hpp"

namespace slid {

AdaptationParams AdaptationParams::Identity(int k, const std::string& domain) {
  AdaptationParams p;
  p.a.assign(k, 1.0);
  p.b.assign(k, 0.0);
  p.domain_id = domain;
  return p;
}

Posterior AdaptPosterior(const Posterior& p, const AdaptationParams& params) {
  if (p.probs.size() != params.a.size() || p.probs.size() != params.b.size()) {
    ThrowInvalidInput("adaptation parameter length does not match posterior");
  }
  std::vector<double> logits(p.probs.size());
  for (size_t i = 0; i < p.probs.size(); ++i) {
    logits[i] = params.a[i] * p.probs[i] + params.b[i];
  }
  Posterior out;
  out.probs = Softmax(logits);
  out.step = p.step;
  return out;
}

namespace {

double Norm(const std::vector<double>& v, RegularizerNorm norm) {
  if (norm == RegularizerNorm::kL1) {
    double acc = 0.0;
    for (double x : v) acc += std::abs(x);
    return acc;
  }
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

// Subgradient of ||v||; zero at the origin.
std::vector<double> NormGradient(const std::vector<double>& v, RegularizerNorm norm) {
  std::vector<double> g(v.size(), 0.0);
  if (norm == RegularizerNorm::kL1) {
    for (size_t i = 0; i < v.size(); ++i) {
      g[i] = v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
    }
    return g;
  }
  const double n = Norm(v, norm);
  if (n < 1e-12) return g;
  for (size_t i = 0; i < v.size(); ++i) g[i] = v[i] / n;
  return g;
}

}  // namespace

double AdaptationObjective(const std::vector<AdaptExample>& dev,
                           const AdaptationParams& params,
                           const AdaptObjectiveConfig& config) {
  if (dev.empty()) ThrowInvalidInput("adaptation: empty dev set");
  double loss = 0.0;
  for (const AdaptExample& ex : dev) {
    const Posterior adapted = AdaptPosterior(ex.posterior, params);
    loss += CrossEntropy(adapted, ex.truth_index);
  }
  loss /= static_cast<double>(dev.size());
  std::vector<double> a_shift = params.a;
  for (double& v : a_shift) v -= 1.0;
  return loss + config.w_reg * (Norm(a_shift, config.norm) + Norm(params.b, config.norm));
}

AdaptationParams TrainAdaptation(const std::vector<AdaptExample>& dev,
                                 const AdaptObjectiveConfig& config,
                                 const std::string& domain_id) {
  if (dev.empty()) ThrowInvalidInput("adaptation: empty dev set");
  const int k = static_cast<int>(dev[0].posterior.probs.size());
  for (const AdaptExample& ex : dev) {
    if (static_cast<int>(ex.posterior.probs.size()) != k) {
      ThrowInvalidInput("adaptation: inconsistent posterior lengths in dev set");
    }
    if (ex.truth_index < 0 || ex.truth_index >= k) {
      ThrowInvalidInput("adaptation: truth index out of range");
    }
  }

  AdaptationParams params = AdaptationParams::Identity(k, domain_id);
  AdaptationParams best = params;
  double best_objective = AdaptationObjective(dev, params, config);
  double prev_objective = best_objective;

  const double inv_n = 1.0 / static_cast<double>(dev.size());
  for (int64_t step = 0; step < config.steps; ++step) {
    std::vector<double> grad_a(k, 0.0), grad_b(k, 0.0);
    for (const AdaptExample& ex : dev) {
      const Posterior adapted = AdaptPosterior(ex.posterior, params);
      // d CE / d logit = p_adapted - onehot(y); logits = a*p + b.
      for (int i = 0; i < k; ++i) {
        const double dlogit =
            adapted.probs[i] - (i == ex.truth_index ? 1.0 : 0.0);
        grad_a[i] += dlogit * ex.posterior.probs[i] * inv_n;
        grad_b[i] += dlogit * inv_n;
      }
    }
    std::vector<double> a_shift = params.a;
    for (double& v : a_shift) v -= 1.0;
    const std::vector<double> reg_a = NormGradient(a_shift, config.norm);
    const std::vector<double> reg_b = NormGradient(params.b, config.norm);
    for (int i = 0; i < k; ++i) {
      params.a[i] -= config.learning_rate * (grad_a[i] + config.w_reg * reg_a[i]);
      params.b[i] -= config.learning_rate * (grad_b[i] + config.w_reg * reg_b[i]);
    }

    const double objective = AdaptationObjective(dev, params, config);
    if (objective < best_objective) {
      best_objective = objective;
      best = params;
      best.domain_id = domain_id;
    }
    if (std::abs(prev_objective - objective) < config.convergence_delta) break;
    prev_objective = objective;
  }
  return best;
}

DomainRegistry::DomainRegistry(int num_languages, uint64_t language_checksum)
    : num_languages_(num_languages), language_checksum_(language_checksum) {}

DomainRegistry::DomainRegistry(const DomainRegistry& other) {
  std::shared_lock lock(other.mutex_);
  num_languages_ = other.num_languages_;
  language_checksum_ = other.language_checksum_;
  domains_ = other.domains_;
}

DomainRegistry& DomainRegistry::operator=(const DomainRegistry& other) {
  if (this == &other) return *this;
  std::shared_lock other_lock(other.mutex_);
  std::unique_lock lock(mutex_);
  num_languages_ = other.num_languages_;
  language_checksum_ = other.language_checksum_;
  domains_ = other.domains_;
  return *this;
}

AdaptationParams DomainRegistry::Lookup(const std::string& domain_id) const {
  std::shared_lock lock(mutex_);
  auto it = domains_.find(domain_id);
  if (it != domains_.end()) return it->second;
  return AdaptationParams::Identity(num_languages_, domain_id);
}

void DomainRegistry::Register(const AdaptationParams& params) {
  if (static_cast<int>(params.a.size()) != num_languages_ ||
      static_cast<int>(params.b.size()) != num_languages_) {
    ThrowInvalidInput("adaptation parameters do not match the language count");
  }
  std::unique_lock lock(mutex_);
  domains_[params.domain_id] = params;
}

std::vector<std::string> DomainRegistry::DomainIds() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  out.reserve(domains_.size());
  for (const auto& [id, params] : domains_) out.push_back(id);
  return out;
}

std::string DomainRegistry::Serialize() const {
  std::shared_lock lock(mutex_);
  std::ostringstream out;
  out.precision(17);
  out << "slid-domains v1\n";
  out << "languages " << num_languages_ << "\n";
  out << "checksum " << language_checksum_ << "\n";
  for (const auto& [id, params] : domains_) {
    out << "domain " << id << "\n";
    out << "a";
    for (double v : params.a) out << " " << v;
    out << "\nb";
    for (double v : params.b) out << " " << v;
    out << "\n";
  }
  return out.str();
}

DomainRegistry DomainRegistry::Deserialize(const std::string& text,
                                           uint64_t expected_checksum) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "slid-domains v1") {
    ThrowModel("domain registry: bad header");
  }
  std::string word;
  int num_languages = 0;
  uint64_t checksum = 0;
  in >> word >> num_languages;
  if (word != "languages" || num_languages < 2) {
    ThrowModel("domain registry: bad language count");
  }
  in >> word >> checksum;
  if (word != "checksum") ThrowModel("domain registry: missing checksum");
  if (expected_checksum != 0 && checksum != 0 && checksum != expected_checksum) {
    ThrowModel("domain registry was built for a different language table");
  }

  DomainRegistry registry(num_languages, checksum);
  while (in >> word) {
    if (word != "domain") ThrowModel("domain registry: expected 'domain', got " + word);
    AdaptationParams params;
    in >> params.domain_id;
    in >> word;
    if (word != "a") ThrowModel("domain registry: expected 'a'");
    params.a.resize(num_languages);
    for (double& v : params.a) in >> v;
    in >> word;
    if (word != "b") ThrowModel("domain registry: expected 'b'");
    params.b.resize(num_languages);
    for (double& v : params.b) in >> v;
    if (!in) ThrowModel("domain registry: truncated entry");
    registry.Register(params);
  }
  return registry;
}

void DomainRegistry::SaveToFile(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write registry: " + path);
  out << Serialize();
}

DomainRegistry DomainRegistry::LoadFromFile(const std::string& path,
                                            uint64_t expected_checksum) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open registry: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return Deserialize(buffer.str(), expected_checksum);
}

}  // namespace slid
