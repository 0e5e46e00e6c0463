// Copyright 2026 The cricket_sort Authors.
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

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cricket_sort/errors.hpp"

namespace cricket_sort {

enum class SexLabel : unsigned char { Female = 0, Male = 1 };

inline constexpr std::array<SexLabel, 2> kAllLabels = {SexLabel::Male,
                                                       SexLabel::Female};

constexpr std::string_view to_string(SexLabel label) {
  return label == SexLabel::Male ? "male" : "female";
}

constexpr SexLabel other(SexLabel label) {
  return label == SexLabel::Male ? SexLabel::Female : SexLabel::Male;
}

// Accepts "male"/"female"/"m"/"f", case-insensitive.
inline std::optional<SexLabel> parse_sex(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "male" || lower == "m") return SexLabel::Male;
  if (lower == "female" || lower == "f") return SexLabel::Female;
  return std::nullopt;
}

// Maps the integer class ids of annotation files onto labels. The default
// assigns ids alphabetically over the class names: female = 0, male = 1.
class LabelMap {
 public:
  LabelMap() : by_code_{{0, SexLabel::Female}, {1, SexLabel::Male}} {}

  explicit LabelMap(std::map<int, SexLabel> by_code)
      : by_code_(std::move(by_code)) {
    for (SexLabel label : kAllLabels) {
      int count = 0;
      for (const auto& [code, mapped] : by_code_) count += mapped == label;
      if (count != 1) {
        throw ContentError("label map must assign exactly one code to '" +
                           std::string(to_string(label)) + "'");
      }
    }
  }

  std::optional<SexLabel> label_of(int code) const {
    auto it = by_code_.find(code);
    if (it == by_code_.end()) return std::nullopt;
    return it->second;
  }

  int code_of(SexLabel label) const {
    for (const auto& [code, mapped] : by_code_) {
      if (mapped == label) return code;
    }
    return -1;  // unreachable for a validated map
  }

  const std::map<int, SexLabel>& entries() const { return by_code_; }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  std::map<int, SexLabel> by_code_;
};

}  // namespace cricket_sort
