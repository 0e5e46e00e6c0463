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

#include "cricket_sort/annotation_io.hpp"
#include "cricket_sort/controller.hpp"
#include "cricket_sort/detection.hpp"
#include "cricket_sort/detection_log.hpp"
#include "cricket_sort/errors.hpp"
#include "cricket_sort/evaluation.hpp"
#include "cricket_sort/geometry.hpp"
#include "cricket_sort/labels.hpp"
#include "cricket_sort/metrics.hpp"
#include "cricket_sort/rng.hpp"
#include "cricket_sort/run_config.hpp"
#include "cricket_sort/simulator.hpp"
#include "cricket_sort/speed_table.hpp"
#include "cricket_sort/table_io.hpp"

namespace cricket_sort {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cricket_sort
