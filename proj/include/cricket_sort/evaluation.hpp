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

// Detection-quality evaluation: greedy IoU matching, per-label
// precision/recall curves, all-point interpolated AP and mAP, and a
// background-aware 3x3 confusion matrix.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "cricket_sort/detection.hpp"
#include "cricket_sort/errors.hpp"

namespace cricket_sort {

inline constexpr double kDefaultIouThreshold = 0.5;

struct MatchedPrediction {
  Detection prediction;
  // Same-label ground truth this prediction was matched to (a TP).
  std::optional<std::size_t> gt_index;
  // Other-label ground truth overlapping at or above the threshold. Feeds the
  // confusion matrix only; the prediction still counts as an FP for PR.
  std::optional<std::size_t> cross_label_gt;

  bool is_true_positive() const { return gt_index.has_value(); }
};

// Matching result for one image. `predictions` keeps the input order.
struct ImageMatches {
  std::vector<MatchedPrediction> predictions;
  std::vector<GroundTruthBox> ground_truth;
  // Ground truths without a same-label match (false negatives).
  std::vector<std::size_t> unmatched_gt;
};

using MatchSet = std::vector<ImageMatches>;

namespace detail {

// Indices sorted by descending confidence; ties keep input order.
inline std::vector<std::size_t> confidence_order(std::span<const Detection> preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds[a].confidence > preds[b].confidence;
  });
  return order;
}

}  // namespace detail

// Greedy matching in descending confidence. Each prediction claims the
// highest-IoU unclaimed same-label ground truth with IoU >= threshold.
// Leftover predictions then claim leftover other-label ground truths the
// same way, which records label confusions.
inline ImageMatches match_detections(std::span<const Detection> preds,
                                     std::span<const GroundTruthBox> gts,
                                     double iou_threshold = kDefaultIouThreshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw ContentError("iou threshold must lie in (0, 1)");
  }
  ImageMatches out;
  out.ground_truth.assign(gts.begin(), gts.end());
  out.predictions.reserve(preds.size());
  for (const auto& p : preds) out.predictions.push_back({p, std::nullopt, std::nullopt});

  const auto order = detail::confidence_order(preds);
  std::vector<bool> claimed(gts.size(), false);

  auto best_match = [&](const Detection& p, bool same_label) {
    std::optional<std::size_t> best;
    double best_iou = iou_threshold;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (claimed[g] || (gts[g].label == p.label) != same_label) continue;
      const double overlap = iou(p.bbox, gts[g].bbox);
      if (overlap > best_iou || (!best && overlap >= best_iou)) {
        best = g;
        best_iou = overlap;
      }
    }
    return best;
  };

  for (std::size_t i : order) {
    if (auto g = best_match(preds[i], /*same_label=*/true)) {
      claimed[*g] = true;
      out.predictions[i].gt_index = g;
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!claimed[g]) out.unmatched_gt.push_back(g);
  }
  for (std::size_t i : order) {
    if (out.predictions[i].gt_index) continue;
    if (auto g = best_match(preds[i], /*same_label=*/false)) {
      claimed[*g] = true;
      out.predictions[i].cross_label_gt = g;
    }
  }
  return out;
}

struct PRPoint {
  double recall = 0.0;
  double precision = 0.0;
  double threshold = 0.0;
};

inline std::size_t count_ground_truth(const MatchSet& matches, SexLabel label) {
  std::size_t n = 0;
  for (const auto& image : matches) {
    for (const auto& gt : image.ground_truth) n += gt.label == label;
  }
  return n;
}

// One point per prediction of `label`, swept by descending confidence across
// the whole dataset. Ties are ordered by image, then by position in the image.
inline std::vector<PRPoint> pr_curve(const MatchSet& matches, SexLabel label) {
  const std::size_t total_gt = count_ground_truth(matches, label);
  if (total_gt == 0) {
    throw ContentError("no ground truth for label '" + std::string(to_string(label)) +
                       "': recall is undefined");
  }
  std::vector<const MatchedPrediction*> preds;
  for (const auto& image : matches) {
    for (const auto& p : image.predictions) {
      if (p.prediction.label == label) preds.push_back(&p);
    }
  }
  std::stable_sort(preds.begin(), preds.end(), [](const auto* a, const auto* b) {
    return a->prediction.confidence > b->prediction.confidence;
  });

  std::vector<PRPoint> curve;
  curve.reserve(preds.size());
  std::size_t tp = 0;
  std::size_t seen = 0;
  for (const auto* p : preds) {
    ++seen;
    tp += p->is_true_positive();
    curve.push_back({static_cast<double>(tp) / static_cast<double>(total_gt),
                     static_cast<double>(tp) / static_cast<double>(seen),
                     p->prediction.confidence});
  }
  return curve;
}

// All-point interpolation: precision is replaced by its running maximum from
// the right, then summed over recall steps.
inline double average_precision(std::span<const PRPoint> curve) {
  if (curve.empty()) return 0.0;
  std::vector<double> envelope(curve.size());
  double running = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    ap += (curve[i].recall - prev_recall) * envelope[i];
    prev_recall = curve[i].recall;
  }
  return ap;
}

enum class ConfusionClass : int { Male = 0, Female = 1, Background = 2 };

constexpr int confusion_index(SexLabel label) {
  return label == SexLabel::Male ? 0 : 1;
}

// Rows are the truth, columns the prediction, both ordered
// {male, female, background}.
struct DetectionConfusion {
  std::array<std::array<std::int64_t, 3>, 3> counts{};

  std::int64_t& at(ConfusionClass truth, ConfusionClass pred) {
    return counts[static_cast<int>(truth)][static_cast<int>(pred)];
  }
  std::int64_t at(ConfusionClass truth, ConfusionClass pred) const {
    return counts[static_cast<int>(truth)][static_cast<int>(pred)];
  }
  std::int64_t row_total(ConfusionClass truth) const {
    const auto& row = counts[static_cast<int>(truth)];
    return row[0] + row[1] + row[2];
  }
};

inline void accumulate_confusion(const ImageMatches& image, DetectionConfusion& c) {
  std::vector<bool> covered(image.ground_truth.size(), false);
  for (const auto& p : image.predictions) {
    const int pred = confusion_index(p.prediction.label);
    if (p.gt_index) {
      c.counts[pred][pred] += 1;
      covered[*p.gt_index] = true;
    } else if (p.cross_label_gt) {
      c.counts[confusion_index(image.ground_truth[*p.cross_label_gt].label)][pred] += 1;
      covered[*p.cross_label_gt] = true;
    } else {
      c.counts[2][pred] += 1;
    }
  }
  for (std::size_t g = 0; g < image.ground_truth.size(); ++g) {
    if (!covered[g]) c.counts[confusion_index(image.ground_truth[g].label)][2] += 1;
  }
}

struct LabelEval {
  SexLabel label = SexLabel::Female;
  std::size_t num_ground_truth = 0;
  std::size_t num_predictions = 0;
  std::vector<PRPoint> curve;
  double ap = 0.0;
};

struct EvalReport {
  double iou_threshold = kDefaultIouThreshold;
  // Only labels that occur in the ground truth, in {male, female} order.
  std::vector<LabelEval> per_label;
  double map = 0.0;
  DetectionConfusion confusion;
  std::size_t num_images = 0;
  std::size_t num_objects = 0;
  std::size_t num_predictions = 0;

  const LabelEval* find(SexLabel label) const {
    for (const auto& l : per_label) {
      if (l.label == label) return &l;
    }
    return nullptr;
  }
};

inline EvalReport evaluate_matches(const MatchSet& matches, double iou_threshold) {
  EvalReport report;
  report.iou_threshold = iou_threshold;
  report.num_images = matches.size();
  for (const auto& image : matches) {
    report.num_objects += image.ground_truth.size();
    report.num_predictions += image.predictions.size();
    accumulate_confusion(image, report.confusion);
  }
  if (report.num_objects == 0) throw ContentError("ground truth is empty");

  double ap_sum = 0.0;
  for (SexLabel label : kAllLabels) {
    const std::size_t n_gt = count_ground_truth(matches, label);
    if (n_gt == 0) continue;
    LabelEval eval;
    eval.label = label;
    eval.num_ground_truth = n_gt;
    eval.curve = pr_curve(matches, label);
    eval.num_predictions = eval.curve.size();
    eval.ap = average_precision(eval.curve);
    ap_sum += eval.ap;
    report.per_label.push_back(std::move(eval));
  }
  report.map = ap_sum / static_cast<double>(report.per_label.size());
  return report;
}

// Per-image prediction and ground-truth lists must be paired by index.
inline EvalReport evaluate_detections(std::span<const std::vector<Detection>> preds,
                                      std::span<const std::vector<GroundTruthBox>> gts,
                                      double iou_threshold = kDefaultIouThreshold) {
  if (preds.size() != gts.size()) {
    throw ContentError("prediction and ground-truth image counts differ");
  }
  MatchSet matches;
  matches.reserve(gts.size());
  for (std::size_t i = 0; i < gts.size(); ++i) {
    matches.push_back(match_detections(preds[i], gts[i], iou_threshold));
  }
  return evaluate_matches(matches, iou_threshold);
}

inline EvalReport map_at_50(std::span<const std::vector<Detection>> preds,
                            std::span<const std::vector<GroundTruthBox>> gts) {
  return evaluate_detections(preds, gts, 0.5);
}

struct ConfusionSummary {
  std::int64_t matched_objects = 0;  // labeled rows, labeled columns only
  std::int64_t correct = 0;
  double accuracy = 0.0;
  std::int64_t female_as_male = 0;
  std::int64_t male_as_female = 0;
  double female_as_male_ratio = 0.0;
  double male_as_female_ratio = 0.0;
  std::int64_t background_false_positives = 0;
  std::int64_t missed_objects = 0;
};

inline ConfusionSummary detection_confusion_summary(const DetectionConfusion& c) {
  using CC = ConfusionClass;
  ConfusionSummary s;
  s.correct = c.at(CC::Male, CC::Male) + c.at(CC::Female, CC::Female);
  s.female_as_male = c.at(CC::Female, CC::Male);
  s.male_as_female = c.at(CC::Male, CC::Female);
  s.matched_objects = s.correct + s.female_as_male + s.male_as_female;
  auto ratio = [](std::int64_t num, std::int64_t den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  s.accuracy = ratio(s.correct, s.matched_objects);
  s.female_as_male_ratio =
      ratio(s.female_as_male, s.female_as_male + c.at(CC::Female, CC::Female));
  s.male_as_female_ratio =
      ratio(s.male_as_female, s.male_as_female + c.at(CC::Male, CC::Male));
  s.background_false_positives =
      c.at(CC::Background, CC::Male) + c.at(CC::Background, CC::Female);
  s.missed_objects = c.at(CC::Male, CC::Background) + c.at(CC::Female, CC::Background);
  return s;
}

inline ConfusionSummary detection_confusion_summary(const EvalReport& report) {
  return detection_confusion_summary(report.confusion);
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& l : r.per_label) {
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& p : l.curve) {
      curve.push_back({{"recall", p.recall},
                       {"precision", p.precision},
                       {"threshold", p.threshold}});
    }
    labels[std::string(to_string(l.label))] = {{"ap", l.ap},
                                               {"num_ground_truth", l.num_ground_truth},
                                               {"num_predictions", l.num_predictions},
                                               {"pr_curve", std::move(curve)}};
  }
  nlohmann::json matrix = nlohmann::json::array();
  for (const auto& row : r.confusion.counts) matrix.push_back(row);
  const auto s = detection_confusion_summary(r.confusion);
  return {
      {"iou_threshold", r.iou_threshold},
      {"map", r.map},
      {"labels", std::move(labels)},
      {"confusion",
       {{"order", {"male", "female", "background"}},
        {"rows", "truth"},
        {"columns", "prediction"},
        {"matrix", std::move(matrix)}}},
      {"summary",
       {{"matched_objects", s.matched_objects},
        {"accuracy", s.accuracy},
        {"female_as_male", s.female_as_male},
        {"male_as_female", s.male_as_female},
        {"female_as_male_ratio", s.female_as_male_ratio},
        {"male_as_female_ratio", s.male_as_female_ratio},
        {"background_false_positives", s.background_false_positives},
        {"missed_objects", s.missed_objects}}},
      {"totals",
       {{"images", r.num_images},
        {"objects", r.num_objects},
        {"predictions", r.num_predictions}}},
  };
}

}  // namespace cricket_sort
