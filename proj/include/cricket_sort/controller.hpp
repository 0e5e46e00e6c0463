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

// Real-time decision engine for the sorting arm.
//
// Each frame contributes one vote: the label of the detection closest to the
// sort line, provided its leading edge lies within `threshold_px` of the
// line, otherwise an abstention. Votes go into a sliding window of the last
// `window_len` frames. When one label holds at least `majority` votes in the
// window the arm is commanded to that label's position. After
// `release_clear_frames` consecutive abstentions the arm returns to neutral
// and the window is cleared. Commands equal to the current position are
// suppressed.

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cricket_sort/detection.hpp"
#include "cricket_sort/errors.hpp"

namespace cricket_sort {

struct ControllerConfig {
  int window_len = 10;
  int majority = 6;
  int frame_period_ms = 300;
  double threshold_px = 100.0;
  // Unset means the bottom image edge.
  std::optional<double> sort_line_y_px;
  int release_clear_frames = 3;
  ImageGeometry geometry;

  double sort_line() const {
    return sort_line_y_px.value_or(static_cast<double>(geometry.height_px));
  }

  void validate() const {
    cricket_sort::validate(geometry);
    if (window_len < 1) throw ContentError("window_len must be >= 1");
    if (majority < 1 || majority > window_len) {
      throw ContentError("majority must lie in [1, window_len]");
    }
    if (frame_period_ms <= 0) throw ContentError("frame_period_ms must be > 0");
    if (!(threshold_px >= 0.0)) throw ContentError("threshold_px must be >= 0");
    if (release_clear_frames < 1) throw ContentError("release_clear_frames must be >= 1");
    const double line = sort_line();
    if (!(line >= 0.0 && line <= geometry.height_px)) {
      throw ContentError("sort_line_y_px must lie within the image height");
    }
  }

  friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

enum class FrameVote { Female, Male, Abstain };

enum class ArmCommand { Neutral, FemaleSort, MaleSort };

constexpr std::string_view to_string(ArmCommand c) {
  switch (c) {
    case ArmCommand::FemaleSort: return "female";
    case ArmCommand::MaleSort: return "male";
    case ArmCommand::Neutral: break;
  }
  return "neutral";
}

inline std::optional<ArmCommand> parse_arm_command(std::string_view s) {
  if (s == "neutral") return ArmCommand::Neutral;
  if (s == "female") return ArmCommand::FemaleSort;
  if (s == "male") return ArmCommand::MaleSort;
  return std::nullopt;
}

constexpr FrameVote vote_of(SexLabel label) {
  return label == SexLabel::Male ? FrameVote::Male : FrameVote::Female;
}

inline FrameVote vote_for_frame(const FrameObservations& f, const ControllerConfig& cfg) {
  const double line = cfg.sort_line();
  auto target = select_target(f, cfg.geometry, line);
  if (!target) return FrameVote::Abstain;
  if (distance_to_sort_line(target->bbox, cfg.geometry, line) > cfg.threshold_px) {
    return FrameVote::Abstain;
  }
  return vote_of(target->label);
}

struct ControllerState {
  std::deque<FrameVote> window;
  int female_votes = 0;
  int male_votes = 0;
  ArmCommand arm = ArmCommand::Neutral;
  int consecutive_abstains = 0;
  std::optional<std::int64_t> last_timestamp_ms;
  std::optional<std::int64_t> last_actuation_ms;

  friend bool operator==(const ControllerState&, const ControllerState&) = default;
};

struct TimedCommand {
  std::int64_t timestamp_ms = 0;
  ArmCommand command = ArmCommand::Neutral;

  friend bool operator==(const TimedCommand&, const TimedCommand&) = default;
};

// Value type; copy it to fork a controller.
class SortingController {
 public:
  explicit SortingController(ControllerConfig cfg = {}) : cfg_(std::move(cfg)) {
    cfg_.validate();
  }

  const ControllerConfig& config() const { return cfg_; }
  const ControllerState& state() const { return state_; }

  // Returns the new arm command when the frame changes the arm position.
  std::optional<ArmCommand> push_frame(const FrameObservations& f) {
    return push_vote(vote_for_frame(f, cfg_), f.timestamp_ms);
  }

  std::optional<ArmCommand> push_vote(FrameVote vote, std::int64_t timestamp_ms) {
    if (state_.last_timestamp_ms && timestamp_ms < *state_.last_timestamp_ms) {
      throw OrderError("frame timestamp " + std::to_string(timestamp_ms) +
                       " precedes " + std::to_string(*state_.last_timestamp_ms));
    }
    state_.last_timestamp_ms = timestamp_ms;

    append(vote);
    if (vote == FrameVote::Abstain) {
      ++state_.consecutive_abstains;
    } else {
      state_.consecutive_abstains = 0;
    }

    if (state_.arm != ArmCommand::Neutral &&
        state_.consecutive_abstains >= cfg_.release_clear_frames) {
      clear_window();
      state_.consecutive_abstains = 0;
      return actuate(ArmCommand::Neutral, timestamp_ms);
    }

    std::optional<ArmCommand> wanted;
    if (state_.female_votes >= cfg_.majority) {
      wanted = ArmCommand::FemaleSort;
    } else if (state_.male_votes >= cfg_.majority) {
      wanted = ArmCommand::MaleSort;
    }
    if (wanted && *wanted != state_.arm) return actuate(*wanted, timestamp_ms);
    return std::nullopt;
  }

 private:
  void append(FrameVote vote) {
    if (static_cast<int>(state_.window.size()) == cfg_.window_len) {
      count(state_.window.front(), -1);
      state_.window.pop_front();
    }
    state_.window.push_back(vote);
    count(vote, +1);
  }

  void count(FrameVote vote, int delta) {
    if (vote == FrameVote::Female) state_.female_votes += delta;
    if (vote == FrameVote::Male) state_.male_votes += delta;
  }

  void clear_window() {
    state_.window.clear();
    state_.female_votes = 0;
    state_.male_votes = 0;
  }

  ArmCommand actuate(ArmCommand c, std::int64_t timestamp_ms) {
    state_.arm = c;
    state_.last_actuation_ms = timestamp_ms;
    return c;
  }

  ControllerConfig cfg_;
  ControllerState state_;
};

inline std::vector<TimedCommand> replay_log(std::span<const FrameObservations> frames,
                                            const ControllerConfig& cfg) {
  SortingController controller(cfg);
  std::vector<TimedCommand> timeline;
  for (const auto& f : frames) {
    if (auto c = controller.push_frame(f)) timeline.push_back({f.timestamp_ms, *c});
  }
  return timeline;
}

}  // namespace cricket_sort
