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
#include <cmath>
#include <string>

#include "cricket_sort/errors.hpp"

namespace cricket_sort {

// Bounding box in YOLO convention: center and size as fractions of the
// image dimensions.
struct NormBBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const NormBBox&, const NormBBox&) = default;
};

struct ImageGeometry {
  int width_px = 480;
  int height_px = 480;

  friend bool operator==(const ImageGeometry&, const ImageGeometry&) = default;
};

// Axis-aligned box as (x0, y0) top-left, (x1, y1) bottom-right, in any unit.
struct CornerBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
};

// Pixel-space box in center + size form.
struct PixelBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  double bottom() const { return cy + 0.5 * h; }
};

inline bool is_finite(const NormBBox& b) {
  return std::isfinite(b.cx) && std::isfinite(b.cy) && std::isfinite(b.w) &&
         std::isfinite(b.h);
}

// Corners clamped to the unit square.
inline CornerBox to_corners(const NormBBox& b) {
  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  return {clamp01(b.cx - 0.5 * b.w), clamp01(b.cy - 0.5 * b.h),
          clamp01(b.cx + 0.5 * b.w), clamp01(b.cy + 0.5 * b.h)};
}

// Returns an empty string when the box satisfies the NormBBox invariants,
// otherwise a description of the first violation.
inline std::string validation_error(const NormBBox& b) {
  if (!is_finite(b)) return "non-finite coordinate";
  if (b.cx < 0.0 || b.cx > 1.0) return "center x out of range";
  if (b.cy < 0.0 || b.cy > 1.0) return "center y out of range";
  if (!(b.w > 0.0) || b.w > 1.0) return "width out of range";
  if (!(b.h > 0.0) || b.h > 1.0) return "height out of range";
  if (to_corners(b).area() <= 0.0) return "box is empty after clamping";
  return {};
}

inline void validate(const NormBBox& b) {
  if (auto err = validation_error(b); !err.empty()) throw InvalidGeometry(err);
}

inline void validate(const ImageGeometry& g) {
  if (g.width_px <= 0 || g.height_px <= 0) {
    throw InvalidGeometry("image dimensions must be positive");
  }
}

inline double iou(const CornerBox& a, const CornerBox& b) {
  const double area_a = a.area();
  const double area_b = b.area();
  if (!(area_a > 0.0) || !(area_b > 0.0)) {
    throw InvalidGeometry("iou of a zero-area box");
  }
  const double ix = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double iy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  return inter / (area_a + area_b - inter);
}

inline double iou(const NormBBox& a, const NormBBox& b) {
  return iou(to_corners(a), to_corners(b));
}

inline PixelBox to_pixels(const NormBBox& b, const ImageGeometry& g) {
  const double w = g.width_px;
  const double h = g.height_px;
  return {b.cx * w, b.cy * h, b.w * w, b.h * h};
}

inline NormBBox to_normalized(const PixelBox& p, const ImageGeometry& g) {
  const double w = g.width_px;
  const double h = g.height_px;
  return {p.cx / w, p.cy / h, p.w / w, p.h / h};
}

}  // namespace cricket_sort
