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

#include <array>

#include "cricket_sort/labels.hpp"

namespace cricket_sort {

// Measured traversal of the 75 mm detection zone by 40 crickets during the
// two free-crossing trials. `printed_speed_mm_s` is the value as tabulated
// (two decimals).
struct MeasuredCrossing {
  int id;
  SexLabel sex;
  double time_s;
  SexLabel classified_as;
  double printed_speed_mm_s;
};

namespace speed_table_detail {
inline constexpr SexLabel F = SexLabel::Female;
inline constexpr SexLabel M = SexLabel::Male;
}  // namespace speed_table_detail

inline constexpr std::array<MeasuredCrossing, 40> kMeasuredCrossings = [] {
  using speed_table_detail::F;
  using speed_table_detail::M;
  return std::array<MeasuredCrossing, 40>{{
      {1, F, 7.00, F, 10.71},   {2, F, 4.00, F, 18.75},   {3, F, 1.80, F, 41.67},
      {4, F, 2.05, F, 36.59},   {5, F, 1.90, F, 39.47},   {6, F, 1.10, F, 68.18},
      {7, M, 0.80, F, 93.75},   {8, F, 4.10, F, 18.29},   {9, F, 6.00, F, 12.50},
      {10, M, 5.10, M, 14.71},  {11, F, 4.00, F, 18.75},  {12, F, 4.10, F, 18.29},
      {13, F, 1.80, F, 41.67},  {14, M, 1.80, M, 41.67},  {15, F, 5.10, F, 14.71},
      {16, M, 1.90, M, 39.47},  {17, M, 2.00, M, 37.50},  {18, M, 1.95, M, 38.46},
      {19, F, 1.80, F, 41.67},  {20, M, 2.10, M, 35.71},  {21, M, 0.20, M, 375.00},
      {22, M, 0.70, M, 107.14}, {23, M, 1.00, M, 75.00},  {24, F, 0.10, M, 750.00},
      {25, F, 1.00, F, 75.00},  {26, M, 4.50, M, 16.67},  {27, M, 3.10, M, 24.19},
      {28, F, 0.80, F, 93.75},  {29, F, 11.00, F, 6.82},  {30, F, 2.10, F, 35.71},
      {31, F, 7.00, F, 10.71},  {32, F, 10.00, F, 7.50},  {33, F, 8.50, F, 8.82},
      {34, M, 6.60, M, 11.36},  {35, M, 3.80, M, 19.74},  {36, F, 4.00, M, 18.75},
      {37, M, 3.70, M, 20.27},  {38, F, 20.00, F, 3.75},  {39, F, 5.60, F, 13.39},
      {40, F, 8.10, F, 9.26},
  }};
}();

}  // namespace cricket_sort
