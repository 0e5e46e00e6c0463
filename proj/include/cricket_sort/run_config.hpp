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

// Merged run configuration. JSON documents are overlaid onto an existing
// config field by field; unknown keys and type mismatches are rejected.
//
//   {
//     "controller": {"window_len": 10, "majority": 6, "frame_period_ms": 300,
//                    "threshold_px": 100, "sort_line_y_px": 480,
//                    "release_clear_frames": 3,
//                    "geometry": {"width_px": 480, "height_px": 480}},
//     "detector":   {"p_detect": 0.97, "p_correct_label": 0.975, ...},
//     "arm":        {"travel_time_ms": 250},
//     "bridge":     {"zone_length_mm": 75, "px_per_mm": 1.333, ...},
//     "simulation": {"preset": "e3", "n": 25, "seed": 42, "speed_scale": 1},
//     "evaluation": {"iou_threshold": 0.5},
//     "label_map":  {"0": "female", "1": "male"},
//     "inputs":     {"pred_dir": "...", "gt_dir": "...", "log": "...", ...},
//     "outputs":    {"out": "...", "emit_log": "...", ...}
//   }

#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <type_traits>

#include "json.hpp"

#include "cricket_sort/controller.hpp"
#include "cricket_sort/errors.hpp"
#include "cricket_sort/labels.hpp"
#include "cricket_sort/simulator.hpp"

namespace cricket_sort {

struct SimulationSettings {
  std::string preset = "e3";
  int n = 25;
  std::uint64_t seed = 42;
  // Multiplies the preset's own speed scale.
  double speed_scale = 1.0;

  friend bool operator==(const SimulationSettings&, const SimulationSettings&) = default;
};

// Input locations, kept so a manifest can replay the run on its own.
struct InputPaths {
  std::string pred_dir;
  std::string gt_dir;
  std::string log;
  std::string confusion;
  std::string arrivals;
  std::string speeds;

  friend bool operator==(const InputPaths&, const InputPaths&) = default;
};

struct OutputPaths {
  std::string out;
  std::string emit_log;
  std::string pr_csv;
  std::string series_csv;

  friend bool operator==(const OutputPaths&, const OutputPaths&) = default;
};

struct RunConfig {
  ControllerConfig controller;
  DetectorModel detector;
  ArmModel arm;
  BridgeModel bridge;
  SimulationSettings simulation;
  double iou_threshold = 0.5;
  LabelMap label_map;
  InputPaths inputs;
  OutputPaths outputs;

  void validate() const {
    controller.validate();
    detector.validate();
    arm.validate();
    bridge.validate();
    if (simulation.n <= 0) throw ContentError("simulation.n must be positive");
    if (!(simulation.speed_scale > 0.0)) throw ContentError("simulation.speed_scale must be > 0");
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
      throw ContentError("evaluation.iou_threshold must lie in (0, 1)");
    }
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace config_detail {

inline void check_object(const nlohmann::json& j, std::string_view where,
                         std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw FormatError(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) throw FormatError("unknown config key '" + std::string(where) + "." + key + "'");
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, std::string_view where, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  const auto& v = *it;
  const std::string name = std::string(where) + "." + key;
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw FormatError("'" + name + "' must be a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw FormatError("'" + name + "' must be a number");
    out = v.get<double>();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned()) throw FormatError("'" + name + "' must be a non-negative integer");
    out = v.get<std::uint64_t>();
  } else {
    static_assert(std::is_same_v<T, int>);
    if (!v.is_number_integer()) throw FormatError("'" + name + "' must be an integer");
    out = v.get<int>();
  }
}

}  // namespace config_detail

inline void merge_controller(const nlohmann::json& j, ControllerConfig& c,
                             std::string_view where = "controller") {
  using namespace config_detail;
  check_object(j, where,
               {"window_len", "majority", "frame_period_ms", "threshold_px", "sort_line_y_px",
                "release_clear_frames", "geometry"});
  read(j, "window_len", where, c.window_len);
  read(j, "majority", where, c.majority);
  read(j, "frame_period_ms", where, c.frame_period_ms);
  read(j, "threshold_px", where, c.threshold_px);
  read(j, "release_clear_frames", where, c.release_clear_frames);
  if (auto it = j.find("sort_line_y_px"); it != j.end()) {
    if (it->is_null()) {
      c.sort_line_y_px.reset();
    } else {
      double v = 0.0;
      read(j, "sort_line_y_px", where, v);
      c.sort_line_y_px = v;
    }
  }
  if (auto it = j.find("geometry"); it != j.end()) {
    const std::string g = std::string(where) + ".geometry";
    check_object(*it, g, {"width_px", "height_px"});
    read(*it, "width_px", g, c.geometry.width_px);
    read(*it, "height_px", g, c.geometry.height_px);
  }
}

inline void merge_run_config(const nlohmann::json& j, RunConfig& c) {
  using namespace config_detail;
  check_object(j, "config",
               {"controller", "detector", "arm", "bridge", "simulation", "evaluation",
                "label_map", "inputs", "outputs"});
  if (auto it = j.find("controller"); it != j.end()) merge_controller(*it, c.controller);
  if (auto it = j.find("detector"); it != j.end()) {
    check_object(*it, "detector",
                 {"p_detect", "p_correct_label", "bg_fp_rate", "confidence_min", "confidence_max"});
    read(*it, "p_detect", "detector", c.detector.p_detect);
    read(*it, "p_correct_label", "detector", c.detector.p_correct_label);
    read(*it, "bg_fp_rate", "detector", c.detector.bg_fp_rate);
    read(*it, "confidence_min", "detector", c.detector.confidence_min);
    read(*it, "confidence_max", "detector", c.detector.confidence_max);
  }
  if (auto it = j.find("arm"); it != j.end()) {
    check_object(*it, "arm", {"travel_time_ms"});
    read(*it, "travel_time_ms", "arm", c.arm.travel_time_ms);
  }
  if (auto it = j.find("bridge"); it != j.end()) {
    check_object(*it, "bridge", {"zone_length_mm", "px_per_mm", "body_width_mm", "p_return"});
    read(*it, "zone_length_mm", "bridge", c.bridge.zone_length_mm);
    read(*it, "px_per_mm", "bridge", c.bridge.px_per_mm);
    read(*it, "body_width_mm", "bridge", c.bridge.body_width_mm);
    read(*it, "p_return", "bridge", c.bridge.p_return);
  }
  if (auto it = j.find("simulation"); it != j.end()) {
    check_object(*it, "simulation", {"preset", "n", "seed", "speed_scale"});
    read(*it, "preset", "simulation", c.simulation.preset);
    read(*it, "n", "simulation", c.simulation.n);
    read(*it, "seed", "simulation", c.simulation.seed);
    read(*it, "speed_scale", "simulation", c.simulation.speed_scale);
  }
  if (auto it = j.find("evaluation"); it != j.end()) {
    check_object(*it, "evaluation", {"iou_threshold"});
    read(*it, "iou_threshold", "evaluation", c.iou_threshold);
  }
  if (auto it = j.find("label_map"); it != j.end()) {
    if (!it->is_object()) throw FormatError("label_map must be a JSON object");
    std::map<int, SexLabel> entries;
    for (const auto& [key, value] : it->items()) {
      int code = 0;
      try {
        std::size_t used = 0;
        code = std::stoi(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw FormatError("label_map key '" + key + "' is not an integer");
      }
      auto label = value.is_string() ? parse_sex(value.get<std::string>()) : std::nullopt;
      if (!label) throw FormatError("label_map value for '" + key + "' must be male or female");
      entries[code] = *label;
    }
    c.label_map = LabelMap(std::move(entries));
  }
  if (auto it = j.find("inputs"); it != j.end()) {
    check_object(*it, "inputs", {"pred_dir", "gt_dir", "log", "confusion", "arrivals", "speeds"});
    read(*it, "pred_dir", "inputs", c.inputs.pred_dir);
    read(*it, "gt_dir", "inputs", c.inputs.gt_dir);
    read(*it, "log", "inputs", c.inputs.log);
    read(*it, "confusion", "inputs", c.inputs.confusion);
    read(*it, "arrivals", "inputs", c.inputs.arrivals);
    read(*it, "speeds", "inputs", c.inputs.speeds);
  }
  if (auto it = j.find("outputs"); it != j.end()) {
    check_object(*it, "outputs", {"out", "emit_log", "pr_csv", "series_csv"});
    read(*it, "out", "outputs", c.outputs.out);
    read(*it, "emit_log", "outputs", c.outputs.emit_log);
    read(*it, "pr_csv", "outputs", c.outputs.pr_csv);
    read(*it, "series_csv", "outputs", c.outputs.series_csv);
  }
}

inline nlohmann::json to_json(const ControllerConfig& c) {
  nlohmann::json j = {{"window_len", c.window_len},
                      {"majority", c.majority},
                      {"frame_period_ms", c.frame_period_ms},
                      {"threshold_px", c.threshold_px},
                      {"release_clear_frames", c.release_clear_frames},
                      {"geometry",
                       {{"width_px", c.geometry.width_px}, {"height_px", c.geometry.height_px}}}};
  j["sort_line_y_px"] = c.sort_line_y_px ? nlohmann::json(*c.sort_line_y_px) : nlohmann::json();
  return j;
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [code, label] : c.label_map.entries()) {
    labels[std::to_string(code)] = std::string(to_string(label));
  }
  return {
      {"controller", to_json(c.controller)},
      {"detector",
       {{"p_detect", c.detector.p_detect},
        {"p_correct_label", c.detector.p_correct_label},
        {"bg_fp_rate", c.detector.bg_fp_rate},
        {"confidence_min", c.detector.confidence_min},
        {"confidence_max", c.detector.confidence_max}}},
      {"arm", {{"travel_time_ms", c.arm.travel_time_ms}}},
      {"bridge",
       {{"zone_length_mm", c.bridge.zone_length_mm},
        {"px_per_mm", c.bridge.px_per_mm},
        {"body_width_mm", c.bridge.body_width_mm},
        {"p_return", c.bridge.p_return}}},
      {"simulation",
       {{"preset", c.simulation.preset},
        {"n", c.simulation.n},
        {"seed", c.simulation.seed},
        {"speed_scale", c.simulation.speed_scale}}},
      {"evaluation", {{"iou_threshold", c.iou_threshold}}},
      {"label_map", std::move(labels)},
      {"inputs",
       {{"pred_dir", c.inputs.pred_dir},
        {"gt_dir", c.inputs.gt_dir},
        {"log", c.inputs.log},
        {"confusion", c.inputs.confusion},
        {"arrivals", c.inputs.arrivals},
        {"speeds", c.inputs.speeds}}},
      {"outputs",
       {{"out", c.outputs.out},
        {"emit_log", c.outputs.emit_log},
        {"pr_csv", c.outputs.pr_csv},
        {"series_csv", c.outputs.series_csv}}},
  };
}

// Accepts a RunConfig document, a run manifest (its "resolved_config" is
// used), or, for the controller-only commands, a bare ControllerConfig.
inline void merge_config_document(const nlohmann::json& j, RunConfig& c) {
  if (j.is_object() && j.contains("resolved_config")) {
    merge_run_config(j.at("resolved_config"), c);
    return;
  }
  if (j.is_object() && !j.empty()) {
    static constexpr std::string_view kControllerKeys[] = {
        "window_len", "majority", "frame_period_ms", "threshold_px",
        "sort_line_y_px", "release_clear_frames", "geometry"};
    bool bare_controller = true;
    for (const auto& [key, value] : j.items()) {
      bool hit = false;
      for (auto k : kControllerKeys) hit = hit || k == key;
      bare_controller = bare_controller && hit;
    }
    if (bare_controller) {
      merge_controller(j, c.controller, "config");
      return;
    }
  }
  merge_run_config(j, c);
}

}  // namespace cricket_sort
