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

#include "lesion/config.hpp"

#include <charconv>
#include <cmath>

#include "lesion/datamodel.hpp"
#include "lesion/error.hpp"
#include "lesion/rng.hpp"

namespace lesion {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Config Config::parse(std::string_view text, std::string_view origin) {
  Config cfg;
  cfg.origin_ = origin;
  cfg.digest_ = text.empty() ? 0 : fnv1a64(text);
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = trim(text.substr(start, nl - start));
    start = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(std::string(origin) + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
    cfg.values_[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& file) {
  return parse(read_text_file(file), file.string());
}

bool Config::has(std::string_view key) const { return values_.find(key) != values_.end(); }

std::optional<std::string> Config::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double Config::get_double(std::string_view key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size() || !std::isfinite(out)) {
    throw Error("config key '" + std::string(key) + "' expects a number, got '" + *v + "'");
  }
  return out;
}

int Config::get_int(std::string_view key, int fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw Error("config key '" + std::string(key) + "' expects an integer, got '" + *v + "'");
  }
  return out;
}

bool Config::get_bool(std::string_view key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "True" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "False" || *v == "0" || *v == "no") return false;
  throw Error("config key '" + std::string(key) + "' expects a boolean, got '" + *v + "'");
}

std::pair<int, int> Config::get_int_range(std::string_view key, std::pair<int, int> fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::string_view s = trim(*v);
  if (!s.empty() && s.front() == '(' && s.back() == ')') s = trim(s.substr(1, s.size() - 2));
  auto parse_int = [&](std::string_view part) {
    part = trim(part);
    int out = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
      throw Error("config key '" + std::string(key) + "' expects 'lo,hi', got '" + *v + "'");
    }
    return out;
  };
  const auto comma = s.find(',');
  if (comma == std::string_view::npos) {
    const int x = parse_int(s);
    return {x, x};
  }
  return {parse_int(s.substr(0, comma)), parse_int(s.substr(comma + 1))};
}

std::map<std::string, std::string> Config::with_prefix(std::string_view prefix) const {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : values_) {
    if (k.size() > prefix.size() && std::string_view(k).substr(0, prefix.size()) == prefix) {
      out[k.substr(prefix.size())] = v;
    }
  }
  return out;
}

}  // namespace lesion
