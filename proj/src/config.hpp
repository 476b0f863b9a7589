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

#ifndef SLID_CONFIG_HPP_
#define SLID_CONFIG_HPP_

#include <map>
#include <string>
#include <vector>

namespace slid {

// Plain `key = value` text files ('#' starts a comment). Values keep their
// raw string form; typed getters parse on demand.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig FromFile(const std::string& path);
  static KeyValueConfig FromString(const std::string& text);

  bool Has(const std::string& key) const;
  std::string GetString(const std::string& key, const std::string& fallback) const;
  int64_t GetInt(const std::string& key, int64_t fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;
  // Comma-separated list.
  std::vector<std::string> GetList(const std::string& key) const;

  void Set(const std::string& key, const std::string& value);
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace slid

#endif  // SLID_CONFIG_HPP_
