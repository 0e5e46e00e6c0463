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

// Whole-system sorting analytics: accuracy and class-wise metrics of the
// 2x2 sorting confusion, cumulative-arrival step series, and traversal speed
// statistics.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cricket_sort/errors.hpp"
#include "cricket_sort/labels.hpp"

namespace cricket_sort {

inline constexpr double kZoneLengthMm = 75.0;

// Rows: true sex. Columns: compartment the animal was sorted into.
struct SortConfusion {
  std::int64_t tm_pm = 0;
  std::int64_t tm_pf = 0;
  std::int64_t tf_pm = 0;
  std::int64_t tf_pf = 0;

  std::int64_t total() const { return tm_pm + tm_pf + tf_pm + tf_pf; }
  std::int64_t trace() const { return tm_pm + tf_pf; }

  void add(SexLabel truth, SexLabel sorted_as) {
    if (truth == SexLabel::Male) {
      (sorted_as == SexLabel::Male ? tm_pm : tm_pf) += 1;
    } else {
      (sorted_as == SexLabel::Male ? tf_pm : tf_pf) += 1;
    }
  }

  SortConfusion swapped_labels() const { return {tf_pf, tf_pm, tm_pf, tm_pm}; }

  SortConfusion& operator+=(const SortConfusion& o) {
    tm_pm += o.tm_pm;
    tm_pf += o.tm_pf;
    tf_pm += o.tf_pm;
    tf_pf += o.tf_pf;
    return *this;
  }

  friend bool operator==(const SortConfusion&, const SortConfusion&) = default;
};

inline double sorting_accuracy(const SortConfusion& c) {
  if (c.tm_pm < 0 || c.tm_pf < 0 || c.tf_pm < 0 || c.tf_pf < 0) {
    throw ContentError("confusion counts must be non-negative");
  }
  if (c.total() == 0) throw ContentError("confusion matrix is empty");
  return static_cast<double>(c.trace()) / static_cast<double>(c.total());
}

// A ratio whose denominator was zero reports 0 and sets `undefined`.
struct Ratio {
  double value = 0.0;
  bool undefined = false;
};

inline Ratio safe_ratio(double num, double den) {
  if (den == 0.0) return {0.0, true};
  return {num / den, false};
}

struct LabelMetrics {
  Ratio precision;
  Ratio recall;
  Ratio f1;
  Ratio specificity;
};

struct ClassMetricsReport {
  LabelMetrics male;
  LabelMetrics female;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double macro_specificity = 0.0;
  double accuracy = 0.0;

  const LabelMetrics& of(SexLabel label) const {
    return label == SexLabel::Male ? male : female;
  }
};

namespace detail {

// tp/fn/fp/tn from the point of view of one label.
inline LabelMetrics label_metrics(double tp, double fn, double fp, double tn) {
  LabelMetrics m;
  m.precision = safe_ratio(tp, tp + fp);
  m.recall = safe_ratio(tp, tp + fn);
  m.specificity = safe_ratio(tn, tn + fp);
  if (m.precision.undefined || m.recall.undefined) {
    m.f1 = {0.0, true};
  } else {
    m.f1 = safe_ratio(2.0 * m.precision.value * m.recall.value,
                      m.precision.value + m.recall.value);
  }
  return m;
}

}  // namespace detail

// Macro averages are unweighted means over the two labels.
inline ClassMetricsReport class_metrics(const SortConfusion& c) {
  ClassMetricsReport r;
  r.accuracy = sorting_accuracy(c);
  const double mm = c.tm_pm, mf = c.tm_pf, fm = c.tf_pm, ff = c.tf_pf;
  r.male = detail::label_metrics(mm, mf, fm, ff);
  r.female = detail::label_metrics(ff, fm, mf, mm);
  r.macro_precision = 0.5 * (r.male.precision.value + r.female.precision.value);
  r.macro_recall = 0.5 * (r.male.recall.value + r.female.recall.value);
  r.macro_f1 = 0.5 * (r.male.f1.value + r.female.f1.value);
  r.macro_specificity = 0.5 * (r.male.specificity.value + r.female.specificity.value);
  return r;
}

// ---------------------------------------------------------------------------
// Cumulative arrivals

struct ArrivalEvent {
  double time_min = 0.0;
  SexLabel sex = SexLabel::Female;
};

// Right-continuous step function: value(t) = number of events at or before t.
class StepSeries {
 public:
  StepSeries() = default;
  explicit StepSeries(std::vector<double> sorted_times) : times_(std::move(sorted_times)) {}

  std::int64_t value_at(double t) const {
    return std::upper_bound(times_.begin(), times_.end(), t) - times_.begin();
  }

  std::int64_t final_count() const { return static_cast<std::int64_t>(times_.size()); }

  // (time, count) after each event, preceded by (0, 0).
  std::vector<std::pair<double, std::int64_t>> points() const {
    std::vector<std::pair<double, std::int64_t>> out{{0.0, 0}};
    for (std::size_t i = 0; i < times_.size(); ++i) {
      out.emplace_back(times_[i], static_cast<std::int64_t>(i + 1));
    }
    return out;
  }

  const std::vector<double>& times() const { return times_; }

 private:
  std::vector<double> times_;
};

struct ArrivalSeries {
  StepSeries female;
  StepSeries male;

  const StepSeries& of(SexLabel label) const {
    return label == SexLabel::Male ? male : female;
  }
};

inline ArrivalSeries cumulative_arrivals(std::span<const ArrivalEvent> events) {
  std::vector<double> female, male;
  for (const auto& e : events) {
    if (!std::isfinite(e.time_min) || e.time_min < 0.0) {
      throw ContentError("arrival time must be a non-negative number");
    }
    (e.sex == SexLabel::Male ? male : female).push_back(e.time_min);
  }
  std::sort(female.begin(), female.end());
  std::sort(male.begin(), male.end());
  return {StepSeries(std::move(female)), StepSeries(std::move(male))};
}

// ---------------------------------------------------------------------------
// Traversal speeds

inline double speed_from_traversal(double time_s, double zone_length_mm = kZoneLengthMm) {
  if (!(time_s > 0.0)) throw ContentError("traversal time must be positive");
  return zone_length_mm / time_s;
}

struct SpeedRecord {
  int id = 0;
  SexLabel sex = SexLabel::Female;
  double traversal_time_s = 0.0;
  SexLabel classified_as = SexLabel::Female;
  double speed_mm_s = 0.0;

  bool correct() const { return sex == classified_as; }
};

struct OrderStats {
  std::size_t count = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

// Linear interpolation between order statistics, so an even-sized sample's
// median is the mean of the two central values.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Empty input yields no statistics.
inline std::optional<OrderStats> order_stats(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  OrderStats s;
  s.count = values.size();
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  return s;
}

struct SpeedSummary {
  std::optional<OrderStats> male_correct;
  std::optional<OrderStats> male_misclassified;
  std::optional<OrderStats> female_correct;
  std::optional<OrderStats> female_misclassified;
  std::optional<OrderStats> correct;
  std::optional<OrderStats> misclassified;
  std::optional<OrderStats> male;
  std::optional<OrderStats> female;
};

inline SpeedSummary speed_summary(std::span<const SpeedRecord> records) {
  auto group = [&](auto&& keep) {
    std::vector<double> v;
    for (const auto& r : records) {
      if (keep(r)) v.push_back(r.speed_mm_s);
    }
    return order_stats(std::move(v));
  };
  auto is_male = [](const SpeedRecord& r) { return r.sex == SexLabel::Male; };
  SpeedSummary s;
  s.male_correct = group([&](const auto& r) { return is_male(r) && r.correct(); });
  s.male_misclassified = group([&](const auto& r) { return is_male(r) && !r.correct(); });
  s.female_correct = group([&](const auto& r) { return !is_male(r) && r.correct(); });
  s.female_misclassified = group([&](const auto& r) { return !is_male(r) && !r.correct(); });
  s.correct = group([](const auto& r) { return r.correct(); });
  s.misclassified = group([](const auto& r) { return !r.correct(); });
  s.male = group(is_male);
  s.female = group([&](const auto& r) { return !is_male(r); });
  return s;
}

// Medians printed alongside the speed boxplot of the original trials. They
// disagree with the order statistics of the published speed table for the
// male and misclassified groups; reports carry both.
struct PublishedSpeedMedians {
  double male = 39.5;
  double female = 18.8;
  double misclassified = 75.0;
  double correct = 20.3;
};

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const Ratio& r) {
  if (r.undefined) return {{"value", r.value}, {"undefined", true}};
  return r.value;
}

inline nlohmann::json to_json(const LabelMetrics& m) {
  return {{"precision", to_json(m.precision)},
          {"recall", to_json(m.recall)},
          {"f1", to_json(m.f1)},
          {"specificity", to_json(m.specificity)}};
}

inline nlohmann::json to_json(const SortConfusion& c) {
  return {{"tm_pm", c.tm_pm}, {"tm_pf", c.tm_pf}, {"tf_pm", c.tf_pm}, {"tf_pf", c.tf_pf}};
}

inline nlohmann::json to_json(const ClassMetricsReport& r) {
  return {{"accuracy", r.accuracy},
          {"male", to_json(r.male)},
          {"female", to_json(r.female)},
          {"macro",
           {{"precision", r.macro_precision},
            {"recall", r.macro_recall},
            {"f1", r.macro_f1},
            {"specificity", r.macro_specificity}}}};
}

inline nlohmann::json to_json(const StepSeries& s) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [t, n] : s.points()) pts.push_back({t, n});
  return {{"final_count", s.final_count()}, {"points", std::move(pts)}};
}

inline nlohmann::json to_json(const ArrivalSeries& a) {
  return {{"female", to_json(a.female)}, {"male", to_json(a.male)}};
}

inline nlohmann::json to_json(const std::optional<OrderStats>& s) {
  if (!s) return nullptr;
  return {{"count", s->count}, {"min", s->min},       {"q1", s->q1},
          {"median", s->median}, {"q3", s->q3}, {"max", s->max}};
}

inline nlohmann::json to_json(const SpeedSummary& s) {
  return {{"male_correct", to_json(s.male_correct)},
          {"male_misclassified", to_json(s.male_misclassified)},
          {"female_correct", to_json(s.female_correct)},
          {"female_misclassified", to_json(s.female_misclassified)},
          {"correct", to_json(s.correct)},
          {"misclassified", to_json(s.misclassified)},
          {"male", to_json(s.male)},
          {"female", to_json(s.female)}};
}

// Published medians next to the recomputed ones, with the signed delta
// (recomputed minus published).
inline nlohmann::json median_discrepancies(const SpeedSummary& s,
                                           const PublishedSpeedMedians& pub = {}) {
  nlohmann::json out = nlohmann::json::object();
  auto row = [&](const char* name, const std::optional<OrderStats>& g, double published) {
    if (!g) {
      out[name] = {{"published", published}, {"recomputed", nullptr}};
      return;
    }
    out[name] = {{"published", published},
                 {"recomputed", g->median},
                 {"delta", g->median - published}};
  };
  row("male", s.male, pub.male);
  row("female", s.female, pub.female);
  row("misclassified", s.misclassified, pub.misclassified);
  row("correct", s.correct, pub.correct);
  return out;
}

}  // namespace cricket_sort
