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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace lesion {

/// The nine diagnostic categories. The enumerator order is the canonical
/// column order of every file, vector and report in this project.
enum class Category : std::uint8_t { MEL, NV, BCC, AK, BKL, DF, VASC, SCC, UNK };

inline constexpr std::size_t kNumCategories = 9;

inline constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
    "MEL", "NV", "BCC", "AK", "BKL", "DF", "VASC", "SCC", "UNK"};

inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::MEL, Category::NV,   Category::BCC, Category::AK, Category::BKL,
    Category::DF,  Category::VASC, Category::SCC, Category::UNK};

constexpr std::size_t index_of(Category c) { return static_cast<std::size_t>(c); }

constexpr std::string_view to_string(Category c) { return kCategoryNames[index_of(c)]; }

/// Exact, case-sensitive lookup.
std::optional<Category> parse_category(std::string_view name);

/// Throws lesion::Error for an index outside 0..8.
Category category_at(std::size_t index);

}  // namespace lesion
