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

// Detection logs are JSON Lines, one frame per line:
//
//   {"frame_index": 0, "timestamp_ms": 0, "detections": [
//      {"label": "female", "confidence": 0.91,
//       "cx": 0.5, "cy": 0.8, "w": 0.1, "h": 0.2}]}

#pragma once

#include <istream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "cricket_sort/detection.hpp"
#include "cricket_sort/errors.hpp"

namespace cricket_sort {

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& obj, const char* key,
                                         std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(std::string("missing key '") + key + "'", line);
  return *it;
}

inline double require_number(const nlohmann::json& obj, const char* key,
                             std::size_t line) {
  const auto& v = require_key(obj, key, line);
  if (!v.is_number()) throw FormatError(std::string("'") + key + "' is not a number", line);
  return v.get<double>();
}

inline std::int64_t require_integer(const nlohmann::json& obj, const char* key,
                                    std::size_t line) {
  const auto& v = require_key(obj, key, line);
  if (!v.is_number_integer()) {
    throw FormatError(std::string("'") + key + "' is not an integer", line);
  }
  auto value = v.get<std::int64_t>();
  if (value < 0) throw FormatError(std::string("'") + key + "' is negative", line);
  return value;
}

}  // namespace detail

inline Detection detection_from_json(const nlohmann::json& j, std::size_t line = 0) {
  if (!j.is_object()) throw FormatError("detection is not an object", line);
  const auto& label_json = detail::require_key(j, "label", line);
  if (!label_json.is_string()) throw FormatError("'label' is not a string", line);
  auto label = parse_sex(label_json.get<std::string>());
  if (!label) {
    throw FormatError("unknown label '" + label_json.get<std::string>() + "'", line);
  }
  Detection d;
  d.label = *label;
  d.confidence = detail::require_number(j, "confidence", line);
  if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
    throw FormatError("confidence out of range", line);
  }
  d.bbox = {detail::require_number(j, "cx", line), detail::require_number(j, "cy", line),
            detail::require_number(j, "w", line), detail::require_number(j, "h", line)};
  if (auto err = validation_error(d.bbox); !err.empty()) throw FormatError(err, line);
  return d;
}

inline nlohmann::ordered_json to_json(const Detection& d) {
  return {{"label", std::string(to_string(d.label))},
          {"confidence", d.confidence},
          {"cx", d.bbox.cx},
          {"cy", d.bbox.cy},
          {"w", d.bbox.w},
          {"h", d.bbox.h}};
}

inline FrameObservations frame_from_json(const nlohmann::json& j, std::size_t line = 0) {
  if (!j.is_object()) throw FormatError("frame is not a JSON object", line);
  FrameObservations f;
  f.frame_index = detail::require_integer(j, "frame_index", line);
  f.timestamp_ms = detail::require_integer(j, "timestamp_ms", line);
  const auto& dets = detail::require_key(j, "detections", line);
  if (!dets.is_array()) throw FormatError("'detections' is not an array", line);
  f.detections.reserve(dets.size());
  for (const auto& d : dets) f.detections.push_back(detection_from_json(d, line));
  return f;
}

inline nlohmann::ordered_json to_json(const FrameObservations& f) {
  nlohmann::ordered_json dets = nlohmann::ordered_json::array();
  for (const auto& d : f.detections) dets.push_back(to_json(d));
  return {{"frame_index", f.frame_index},
          {"timestamp_ms", f.timestamp_ms},
          {"detections", std::move(dets)}};
}

// Parses a whole log. Blank lines are skipped. Frame indices must strictly
// increase and timestamps must not decrease; violations throw OrderError
// carrying the offending line.
inline std::vector<FrameObservations> parse_detection_log(std::istream& in) {
  std::vector<FrameObservations> frames;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(std::string("invalid JSON: ") + e.what(), line);
    }
    FrameObservations f = frame_from_json(j, line);
    if (!frames.empty()) {
      if (f.frame_index <= frames.back().frame_index) {
        throw OrderError("frame_index does not increase", line);
      }
      if (f.timestamp_ms < frames.back().timestamp_ms) {
        throw OrderError("timestamp_ms goes backwards", line);
      }
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

inline std::string serialize_detection_log(std::span<const FrameObservations> frames) {
  std::string out;
  for (const auto& f : frames) {
    out += to_json(f).dump();
    out += '\n';
  }
  return out;
}

}  // namespace cricket_sort
