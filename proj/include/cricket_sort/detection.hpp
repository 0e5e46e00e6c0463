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

#include <cstdint>
#include <optional>
#include <vector>

#include "cricket_sort/geometry.hpp"
#include "cricket_sort/labels.hpp"

namespace cricket_sort {

struct Detection {
  NormBBox bbox;
  SexLabel label = SexLabel::Female;
  double confidence = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct GroundTruthBox {
  NormBBox bbox;
  SexLabel label = SexLabel::Female;

  friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

// One camera frame. An empty detection list is the detector's
// "no detection" answer.
struct FrameObservations {
  std::int64_t frame_index = 0;
  std::int64_t timestamp_ms = 0;
  std::vector<Detection> detections;

  friend bool operator==(const FrameObservations&,
                         const FrameObservations&) = default;
};

// Signed pixel distance from the box's leading (max-y, clamped) edge to the
// sort line. Zero or negative once the edge has reached the line.
inline double distance_to_sort_line(const NormBBox& b, const ImageGeometry& g,
                                    double sort_line_y_px) {
  const double leading_edge_px = to_corners(b).y1 * g.height_px;
  return sort_line_y_px - leading_edge_px;
}

// The detection nearest the sort line. Ties go to the higher confidence,
// then to the earlier entry.
inline std::optional<Detection> select_target(const FrameObservations& f,
                                              const ImageGeometry& g,
                                              double sort_line_y_px) {
  const Detection* best = nullptr;
  double best_distance = 0.0;
  for (const Detection& d : f.detections) {
    const double dist = distance_to_sort_line(d.bbox, g, sort_line_y_px);
    if (best == nullptr || dist < best_distance ||
        (dist == best_distance && d.confidence > best->confidence)) {
      best = &d;
      best_distance = dist;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

}  // namespace cricket_sort
