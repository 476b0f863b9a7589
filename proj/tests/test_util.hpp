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

#ifndef SLID_TESTS_TEST_UTIL_HPP_
#define SLID_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace slid::testing {

// |a - b| <= tol * max(|a|, |b|) + floor, the comparison used wherever the
// contracts say "within X relative".
inline bool ApproxRel(double a, double b, double tol, double floor = 1e-12) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)) + floor;
}

inline double MaxRelDiff(const std::vector<float>& a, const std::vector<float>& b,
                         double floor = 1e-12) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double denom =
        std::max({std::abs(static_cast<double>(a[i])),
                  std::abs(static_cast<double>(b[i])), floor});
    worst = std::max(worst, std::abs(static_cast<double>(a[i]) - b[i]) / denom);
  }
  return worst;
}

inline double MaxRelDiff(const std::vector<double>& a, const std::vector<double>& b,
                         double floor = 1e-12) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

// Unique scratch directory under the build tree, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("slid_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string File(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::vector<float> SineWave(double freq_hz, double amplitude, int rate_hz,
                                   int num_samples) {
  std::vector<float> out(num_samples);
  for (int i = 0; i < num_samples; ++i) {
    out[i] = static_cast<float>(
        amplitude * std::sin(2.0 * 3.14159265358979323846 * freq_hz * i / rate_hz));
  }
  return out;
}

}  // namespace slid::testing

#endif  // SLID_TESTS_TEST_UTIL_HPP_
