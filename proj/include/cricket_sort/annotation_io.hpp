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

// YOLO-style text annotations: one object per line,
//   <label_id> <cx> <cy> <w> <h>            (ground truth)
//   <label_id> <cx> <cy> <w> <h> <conf>     (predictions)

#pragma once

#include <cctype>
#include <charconv>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cricket_sort/detection.hpp"
#include "cricket_sort/errors.hpp"
#include "cricket_sort/labels.hpp"

namespace cricket_sort {

namespace detail {

inline std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

template <typename T>
std::string format_number(T value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

// Calls fn(line_number, tokens) for every non-blank line.
template <typename Fn>
void for_each_token_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto tokens = split_whitespace(text.substr(pos, end - pos));
    if (!tokens.empty()) fn(line_no, tokens);
    pos = end + 1;
  }
}

inline NormBBox parse_bbox_tokens(std::span<const std::string_view> tokens,
                                  std::size_t line) {
  double v[4];
  for (int i = 0; i < 4; ++i) {
    if (!parse_number(tokens[i], v[i])) {
      throw FormatError("non-numeric coordinate '" + std::string(tokens[i]) + "'", line);
    }
  }
  NormBBox b{v[0], v[1], v[2], v[3]};
  if (auto err = validation_error(b); !err.empty()) throw FormatError(err, line);
  return b;
}

inline SexLabel parse_label_token(std::string_view token, const LabelMap& labels,
                                  std::size_t line) {
  int code = 0;
  if (!parse_number(token, code)) {
    throw FormatError("non-numeric label id '" + std::string(token) + "'", line);
  }
  auto label = labels.label_of(code);
  if (!label) throw FormatError("unknown label id " + std::to_string(code), line);
  return *label;
}

}  // namespace detail

inline std::vector<GroundTruthBox> parse_annotation_file(
    std::string_view text, const LabelMap& labels = {}) {
  std::vector<GroundTruthBox> boxes;
  detail::for_each_token_line(text, [&](std::size_t line, const auto& tokens) {
    if (tokens.size() != 5) {
      throw FormatError("expected 5 fields, got " + std::to_string(tokens.size()), line);
    }
    SexLabel label = detail::parse_label_token(tokens[0], labels, line);
    NormBBox bbox = detail::parse_bbox_tokens(std::span(tokens).subspan(1, 4), line);
    boxes.push_back({bbox, label});
  });
  return boxes;
}

inline std::vector<Detection> parse_prediction_file(std::string_view text,
                                                    const LabelMap& labels = {}) {
  std::vector<Detection> preds;
  detail::for_each_token_line(text, [&](std::size_t line, const auto& tokens) {
    if (tokens.size() != 6) {
      throw FormatError("expected 6 fields, got " + std::to_string(tokens.size()), line);
    }
    SexLabel label = detail::parse_label_token(tokens[0], labels, line);
    NormBBox bbox = detail::parse_bbox_tokens(std::span(tokens).subspan(1, 4), line);
    double conf = 0.0;
    if (!detail::parse_number(tokens[5], conf)) {
      throw FormatError("non-numeric confidence '" + std::string(tokens[5]) + "'", line);
    }
    if (!(conf >= 0.0 && conf <= 1.0)) throw FormatError("confidence out of range", line);
    preds.push_back({bbox, label, conf});
  });
  return preds;
}

// Shortest round-trip formatting, so parse(serialize(x)) == x exactly.
inline std::string serialize_annotations(std::span<const GroundTruthBox> boxes,
                                         const LabelMap& labels = {}) {
  std::string out;
  for (const auto& b : boxes) {
    out += std::to_string(labels.code_of(b.label));
    for (double v : {b.bbox.cx, b.bbox.cy, b.bbox.w, b.bbox.h}) {
      out += ' ';
      out += detail::format_number(v);
    }
    out += '\n';
  }
  return out;
}

inline std::string serialize_predictions(std::span<const Detection> preds,
                                         const LabelMap& labels = {}) {
  std::string out;
  for (const auto& d : preds) {
    out += std::to_string(labels.code_of(d.label));
    for (double v : {d.bbox.cx, d.bbox.cy, d.bbox.w, d.bbox.h, d.confidence}) {
      out += ' ';
      out += detail::format_number(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace cricket_sort
