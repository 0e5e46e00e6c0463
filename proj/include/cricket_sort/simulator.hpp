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

// Discrete-event model of crickets crossing the bridge under the camera.
//
// Geometry: each cricket walks at constant speed along the last
// `zone_length_mm` of the bridge before the sort point. In the image that
// zone is the band of `zone_length_mm * px_per_mm` pixels above the sort
// line; an agent's leading edge enters the band at `spawn_time_ms` and
// reaches the sort line at the arrival time, when it is routed into the
// compartment the arm currently points at. With the default scale the band
// coincides with the controller's 100 px proximity threshold.
//
// A run is a pure function of (agents or preset, models, seed). Independent
// random streams are used for the spawn process, the detector, and the
// outcome of unsorted arrivals.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cricket_sort/controller.hpp"
#include "cricket_sort/detection.hpp"
#include "cricket_sort/errors.hpp"
#include "cricket_sort/metrics.hpp"
#include "cricket_sort/rng.hpp"
#include "cricket_sort/speed_table.hpp"

namespace cricket_sort {

struct CricketAgent {
  int id = 0;
  SexLabel sex = SexLabel::Female;
  double speed_mm_s = 0.0;
  std::int64_t spawn_time_ms = 0;
  double body_length_mm = 20.0;
  // Normalized horizontal box center across the bridge.
  double lateral = 0.5;

  friend bool operator==(const CricketAgent&, const CricketAgent&) = default;
};

struct BridgeModel {
  double zone_length_mm = kZoneLengthMm;
  double px_per_mm = 100.0 / kZoneLengthMm;
  double body_width_mm = 7.0;
  // Probability that a cricket reaching a neutral arm walks back instead of
  // entering one of the compartments at random.
  double p_return = 0.5;

  void validate() const {
    if (!(zone_length_mm > 0.0)) throw ContentError("zone_length_mm must be > 0");
    if (!(px_per_mm > 0.0)) throw ContentError("px_per_mm must be > 0");
    if (!(body_width_mm > 0.0)) throw ContentError("body_width_mm must be > 0");
    if (!(p_return >= 0.0 && p_return <= 1.0)) {
      throw ContentError("p_return must lie in [0, 1]");
    }
  }

  double crossing_ms(const CricketAgent& a) const {
    return zone_length_mm / a.speed_mm_s * 1000.0;
  }
  double arrival_ms(const CricketAgent& a) const {
    return static_cast<double>(a.spawn_time_ms) + crossing_ms(a);
  }

  friend bool operator==(const BridgeModel&, const BridgeModel&) = default;
};

struct DetectorModel {
  double p_detect = 0.97;
  double p_correct_label = 0.975;
  double bg_fp_rate = 0.005;  // per frame
  double confidence_min = 0.55;
  double confidence_max = 0.95;

  void validate() const {
    auto prob = [](double p, const char* name) {
      if (!(p >= 0.0 && p <= 1.0)) throw ContentError(std::string(name) + " must lie in [0, 1]");
    };
    prob(p_detect, "p_detect");
    prob(p_correct_label, "p_correct_label");
    prob(bg_fp_rate, "bg_fp_rate");
    prob(confidence_min, "confidence_min");
    prob(confidence_max, "confidence_max");
    if (confidence_min > confidence_max) {
      throw ContentError("confidence_min must not exceed confidence_max");
    }
  }

  friend bool operator==(const DetectorModel&, const DetectorModel&) = default;
};

struct ArmModel {
  double travel_time_ms = 250.0;

  void validate() const {
    if (!(travel_time_ms >= 0.0)) throw ContentError("travel_time_ms must be >= 0");
  }

  friend bool operator==(const ArmModel&, const ArmModel&) = default;
};

enum class GapShape { Uniform, Exponential };

// Arrival process and speed regime of one trial condition.
//
// Gap i (the wait before agent i enters the zone) has mean
// `mean_gap_s * exp(gap_growth * i)`. With `group_size > 1` agents arrive in
// groups: only every group_size-th gap follows that law, the others are
// exponential with mean `group_gap_s`.
struct StressPreset {
  std::string name;
  double mean_gap_s = 60.0;
  GapShape shape = GapShape::Exponential;
  double gap_jitter = 0.0;  // Uniform shape: half-width as a fraction of the mean
  double gap_growth = 0.0;
  int group_size = 1;
  double group_gap_s = 0.0;
  double speed_scale = 1.0;

  bool starts_group(int i) const { return group_size <= 1 || i % group_size == 0; }

  double expected_gap_s(int i) const {
    if (!starts_group(i)) return group_gap_s;
    return mean_gap_s * std::exp(gap_growth * i);
  }

  friend bool operator==(const StressPreset&, const StressPreset&) = default;
};

// Fields: name, mean gap, shape, jitter, growth, group size, in-group gap,
// speed scale. Values were tuned with `calibrate`.
inline std::array<StressPreset, 4> default_presets() {
  return {{
      {"e1", 21.0, GapShape::Uniform, 0.12, 0.0, 1, 0.0, 1.8},
      {"e2", 150.0, GapShape::Uniform, 0.3, 0.0, 5, 10.0, 1.5},
      {"e3", 84.0, GapShape::Exponential, 0.0, 0.0, 1, 0.0, 0.8},
      {"e4", 62.0, GapShape::Exponential, 0.0, 0.1, 1, 0.0, 0.75},
  }};
}

inline std::optional<StressPreset> find_preset(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (auto& p : default_presets()) {
    if (p.name == lower) return p;
  }
  return std::nullopt;
}

namespace detail {

// Resamples a same-sex row of the measured crossings, with +/-10 % jitter in
// log space.
inline double sample_speed(SexLabel sex, double scale, Rng& rng) {
  std::array<double, kMeasuredCrossings.size()> pool{};
  std::size_t n = 0;
  for (const auto& row : kMeasuredCrossings) {
    if (row.sex == sex) pool[n++] = kZoneLengthMm / row.time_s;
  }
  const double base = pool[rng.index(n)];
  const double jitter = std::exp(rng.uniform(-std::log(1.1), std::log(1.1)));
  return base * jitter * scale;
}

inline double sample_gap_s(const StressPreset& p, int i, Rng& rng) {
  const double mean = p.expected_gap_s(i);
  if (!p.starts_group(i) || p.shape == GapShape::Exponential) return rng.exponential(mean);
  return mean * rng.uniform(1.0 - p.gap_jitter, 1.0 + p.gap_jitter);
}

}  // namespace detail

inline std::vector<CricketAgent> spawn_schedule(const StressPreset& preset, int n, Rng& rng,
                                                double body_length_mm = 20.0) {
  if (n <= 0) throw ContentError("agent count must be positive");
  if (!(preset.speed_scale > 0.0)) throw ContentError("speed_scale must be > 0");
  std::vector<CricketAgent> agents;
  agents.reserve(static_cast<std::size_t>(n));
  double t_s = 0.0;
  for (int i = 0; i < n; ++i) {
    t_s += detail::sample_gap_s(preset, i, rng);
    CricketAgent a;
    a.id = i;
    a.sex = rng.bernoulli(0.5) ? SexLabel::Male : SexLabel::Female;
    a.speed_mm_s = detail::sample_speed(a.sex, preset.speed_scale, rng);
    a.spawn_time_ms = std::llround(t_s * 1000.0);
    a.body_length_mm = body_length_mm;
    a.lateral = rng.uniform(0.2, 0.8);
    agents.push_back(a);
  }
  return agents;
}

namespace detail {

inline std::optional<NormBBox> agent_box(const CricketAgent& a, double t_ms,
                                         const BridgeModel& bridge,
                                         const ControllerConfig& cfg) {
  const auto& g = cfg.geometry;
  const double walked_mm = a.speed_mm_s * (t_ms - static_cast<double>(a.spawn_time_ms)) / 1000.0;
  const double lead_px = cfg.sort_line() - (bridge.zone_length_mm - walked_mm) * bridge.px_per_mm;
  const double top_px = std::max(0.0, lead_px - a.body_length_mm * bridge.px_per_mm);
  if (!(lead_px > top_px)) return std::nullopt;  // still above the image
  NormBBox b;
  b.cx = a.lateral;
  b.cy = 0.5 * (lead_px + top_px) / g.height_px;
  b.h = (lead_px - top_px) / g.height_px;
  b.w = std::min(1.0, bridge.body_width_mm * bridge.px_per_mm / g.width_px);
  if (!validation_error(b).empty()) return std::nullopt;
  return b;
}

}  // namespace detail

// One frame every frame_period_ms from t = 0 until a few release periods after
// the last arrival. An agent is visible while spawn < t < arrival.
inline std::vector<FrameObservations> synth_frames(std::span<const CricketAgent> agents,
                                                   const DetectorModel& detector,
                                                   const ControllerConfig& cfg,
                                                   const BridgeModel& bridge, Rng& rng) {
  detector.validate();
  cfg.validate();
  bridge.validate();
  std::vector<FrameObservations> frames;
  if (agents.empty()) return frames;

  std::vector<const CricketAgent*> by_spawn;
  double last_arrival = 0.0;
  for (const auto& a : agents) {
    by_spawn.push_back(&a);
    last_arrival = std::max(last_arrival, bridge.arrival_ms(a));
  }
  std::stable_sort(by_spawn.begin(), by_spawn.end(), [](const auto* x, const auto* y) {
    return x->spawn_time_ms < y->spawn_time_ms;
  });

  const std::int64_t period = cfg.frame_period_ms;
  const double end_ms = last_arrival + static_cast<double>((cfg.release_clear_frames + 1) * period);
  std::vector<const CricketAgent*> active;
  std::size_t next = 0;
  const double fp_w = std::min(1.0, bridge.body_width_mm * bridge.px_per_mm / cfg.geometry.width_px);
  const double fp_h = std::min(1.0, 20.0 * bridge.px_per_mm / cfg.geometry.height_px);

  for (std::int64_t k = 0; static_cast<double>(k * period) <= end_ms; ++k) {
    const std::int64_t t = k * period;
    const double td = static_cast<double>(t);
    while (next < by_spawn.size() && by_spawn[next]->spawn_time_ms < t) {
      active.push_back(by_spawn[next++]);
    }
    std::erase_if(active, [&](const CricketAgent* a) { return bridge.arrival_ms(*a) <= td; });

    FrameObservations f;
    f.frame_index = k;
    f.timestamp_ms = t;
    for (const CricketAgent* a : active) {
      if (!rng.bernoulli(detector.p_detect)) continue;
      const SexLabel label = rng.bernoulli(detector.p_correct_label) ? a->sex : other(a->sex);
      const double conf = rng.uniform(detector.confidence_min, detector.confidence_max);
      if (auto box = detail::agent_box(*a, td, bridge, cfg)) {
        f.detections.push_back({*box, label, conf});
      }
    }
    if (rng.bernoulli(detector.bg_fp_rate)) {
      Detection fp;
      fp.bbox = {rng.uniform(0.2, 0.8), rng.uniform(0.5 * fp_h, 1.0 - 0.5 * fp_h), fp_w, fp_h};
      fp.label = rng.bernoulli(0.5) ? SexLabel::Male : SexLabel::Female;
      fp.confidence = rng.uniform(0.3, 0.6);
      f.detections.push_back(fp);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

enum class Destination { MaleCompartment, FemaleCompartment, Returned };

constexpr std::string_view to_string(Destination d) {
  switch (d) {
    case Destination::MaleCompartment: return "male";
    case Destination::FemaleCompartment: return "female";
    case Destination::Returned: break;
  }
  return "returned";
}

struct SimOutcome {
  int agent_id = 0;
  SexLabel sex = SexLabel::Female;
  Destination destination = Destination::Returned;
  bool correct = false;
  double crossing_time_s = 0.0;
  double arrival_ms = 0.0;
  ArmCommand arm_at_arrival = ArmCommand::Neutral;

  friend bool operator==(const SimOutcome&, const SimOutcome&) = default;
};

struct SimResult {
  std::vector<CricketAgent> agents;
  std::vector<FrameObservations> frames;
  std::vector<TimedCommand> commands;
  std::vector<SimOutcome> outcomes;  // by agent id
  SortConfusion confusion;           // non-returned agents only
  double duration_ms = 0.0;          // last arrival

  std::optional<double> accuracy() const {
    if (confusion.total() == 0) return std::nullopt;
    return sorting_accuracy(confusion);
  }
  std::size_t returned() const {
    return static_cast<std::size_t>(std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) {
      return o.destination == Destination::Returned;
    }));
  }
};

// Arm position at time t: the latest command that has finished its travel.
inline ArmCommand arm_position_at(std::span<const TimedCommand> commands, const ArmModel& arm,
                                  double t_ms) {
  ArmCommand pos = ArmCommand::Neutral;
  for (const auto& c : commands) {
    if (static_cast<double>(c.timestamp_ms) + arm.travel_time_ms > t_ms) break;
    pos = c.command;
  }
  return pos;
}

namespace stream {
inline constexpr std::uint64_t kSpawn = 1;
inline constexpr std::uint64_t kDetector = 2;
inline constexpr std::uint64_t kOutcome = 3;
}  // namespace stream

inline SimResult simulate_agents(std::vector<CricketAgent> agents, const DetectorModel& detector,
                                 const ArmModel& arm, const ControllerConfig& cfg,
                                 const BridgeModel& bridge, std::uint64_t seed) {
  arm.validate();
  for (const auto& a : agents) {
    if (!(a.speed_mm_s > 0.0)) throw ContentError("agent speed must be > 0");
  }
  SimResult r;
  Rng detector_rng(seed, stream::kDetector);
  r.frames = synth_frames(agents, detector, cfg, bridge, detector_rng);
  r.commands = replay_log(r.frames, cfg);

  std::vector<std::size_t> by_arrival(agents.size());
  for (std::size_t i = 0; i < by_arrival.size(); ++i) by_arrival[i] = i;
  std::stable_sort(by_arrival.begin(), by_arrival.end(), [&](std::size_t x, std::size_t y) {
    return bridge.arrival_ms(agents[x]) < bridge.arrival_ms(agents[y]);
  });

  Rng outcome_rng(seed, stream::kOutcome);
  r.outcomes.resize(agents.size());
  for (std::size_t i : by_arrival) {
    const auto& a = agents[i];
    SimOutcome o;
    o.agent_id = a.id;
    o.sex = a.sex;
    o.arrival_ms = bridge.arrival_ms(a);
    o.crossing_time_s = bridge.crossing_ms(a) / 1000.0;
    o.arm_at_arrival = arm_position_at(r.commands, arm, o.arrival_ms);
    switch (o.arm_at_arrival) {
      case ArmCommand::FemaleSort: o.destination = Destination::FemaleCompartment; break;
      case ArmCommand::MaleSort: o.destination = Destination::MaleCompartment; break;
      case ArmCommand::Neutral:
        if (outcome_rng.bernoulli(bridge.p_return)) {
          o.destination = Destination::Returned;
        } else {
          o.destination = outcome_rng.bernoulli(0.5) ? Destination::MaleCompartment
                                                     : Destination::FemaleCompartment;
        }
        break;
    }
    if (o.destination != Destination::Returned) {
      const SexLabel sorted_as =
          o.destination == Destination::MaleCompartment ? SexLabel::Male : SexLabel::Female;
      o.correct = sorted_as == a.sex;
      r.confusion.add(a.sex, sorted_as);
    }
    r.duration_ms = std::max(r.duration_ms, o.arrival_ms);
    r.outcomes[i] = o;
  }
  r.agents = std::move(agents);
  return r;
}

inline SimResult simulate_run(const StressPreset& preset, int n, const DetectorModel& detector,
                              const ArmModel& arm, const ControllerConfig& cfg,
                              const BridgeModel& bridge, std::uint64_t seed) {
  Rng spawn_rng(seed, stream::kSpawn);
  return simulate_agents(spawn_schedule(preset, n, spawn_rng), detector, arm, cfg, bridge, seed);
}

struct CalibrationRow {
  std::string preset;
  int runs = 0;
  double median_duration_min = 0.0;
  double median_accuracy = 0.0;
  double mean_accuracy = 0.0;
};

// Seeds 0..runs-1 per preset, n agents per run.
inline std::vector<CalibrationRow> preset_calibration_report(
    std::span<const StressPreset> presets, int n = 25, int runs = 30,
    const DetectorModel& detector = {}, const ArmModel& arm = {},
    const ControllerConfig& cfg = {}, const BridgeModel& bridge = {}) {
  std::vector<CalibrationRow> rows;
  for (const auto& p : presets) {
    std::vector<double> durations, accuracies;
    for (int seed = 0; seed < runs; ++seed) {
      auto r = simulate_run(p, n, detector, arm, cfg, bridge, static_cast<std::uint64_t>(seed));
      durations.push_back(r.duration_ms / 60000.0);
      if (auto acc = r.accuracy()) accuracies.push_back(*acc);
    }
    CalibrationRow row;
    row.preset = p.name;
    row.runs = runs;
    row.median_duration_min = order_stats(durations)->median;
    if (auto s = order_stats(accuracies)) {
      row.median_accuracy = s->median;
      double sum = 0.0;
      for (double a : accuracies) sum += a;
      row.mean_accuracy = sum / static_cast<double>(accuracies.size());
    }
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json to_json(const TimedCommand& c) {
  return {{"timestamp_ms", c.timestamp_ms}, {"command", std::string(to_string(c.command))}};
}

inline nlohmann::json to_json(const SimResult& r) {
  nlohmann::json agents = nlohmann::json::array();
  for (std::size_t i = 0; i < r.agents.size(); ++i) {
    const auto& a = r.agents[i];
    const auto& o = r.outcomes[i];
    agents.push_back({{"id", a.id},
                      {"sex", std::string(to_string(a.sex))},
                      {"speed_mm_s", a.speed_mm_s},
                      {"spawn_time_ms", a.spawn_time_ms},
                      {"arrival_ms", o.arrival_ms},
                      {"crossing_time_s", o.crossing_time_s},
                      {"arm_at_arrival", std::string(to_string(o.arm_at_arrival))},
                      {"destination", std::string(to_string(o.destination))},
                      {"correct", o.correct}});
  }
  nlohmann::json commands = nlohmann::json::array();
  for (const auto& c : r.commands) commands.push_back(to_json(c));
  nlohmann::json out = {{"agents", std::move(agents)},
                        {"confusion", to_json(r.confusion)},
                        {"returned", r.returned()},
                        {"duration_ms", r.duration_ms},
                        {"duration_min", r.duration_ms / 60000.0},
                        {"frames", r.frames.size()},
                        {"commands", std::move(commands)}};
  if (auto acc = r.accuracy()) {
    out["accuracy"] = *acc;
  } else {
    out["accuracy"] = nullptr;
  }
  return out;
}

}  // namespace cricket_sort
