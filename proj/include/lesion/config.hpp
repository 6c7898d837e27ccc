// Copyright 2026 The Lesion Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace lesion {

/// Flat `key = value` settings. Blank lines and lines starting with `#` are
/// ignored; later keys override earlier ones. Values are trimmed strings and
/// converted on access.
class Config {
 public:
  Config() = default;
  static Config parse(std::string_view text, std::string_view origin = "<config>");
  static Config load(const std::filesystem::path& file);

  bool has(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;

  double get_double(std::string_view key, double fallback) const;
  int get_int(std::string_view key, int fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  /// "lo,hi", "(lo,hi)" or a single value meaning lo == hi.
  std::pair<int, int> get_int_range(std::string_view key, std::pair<int, int> fallback) const;

  /// Keys starting with `prefix`, with the prefix removed.
  std::map<std::string, std::string> with_prefix(std::string_view prefix) const;

  /// FNV-1a over the raw text; 0 for an empty config.
  std::uint64_t digest() const { return digest_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
  std::uint64_t digest_ = 0;
  std::string origin_;
};

}  // namespace lesion
