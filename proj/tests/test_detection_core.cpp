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

#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <vector>

#include "cricket_sort/cricket_sort.hpp"
#include "grid_iou_oracle.hpp"
#include "test_support.hpp"

namespace cricket_sort {
namespace {

using testing::read_fixture;

using testing::grid_iou;
using testing::lattice_boxes;
using testing::scaled;

TEST(Iou, CornerExampleIsOneSeventh) {
  EXPECT_NEAR(iou(CornerBox{0, 0, 2, 2}, CornerBox{1, 1, 3, 3}), 1.0 / 7.0, 1e-15);
  EXPECT_NEAR(grid_iou({0, 0, 2, 2}, {1, 1, 3, 3}, 3), 1.0 / 7.0, 1e-15);
}

TEST(Iou, IdentityAndDisjoint) {
  NormBBox a{0.4, 0.4, 0.2, 0.3};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, NormBBox{0.9, 0.9, 0.1, 0.1}), 0.0);
  // Touching edges share no area.
  EXPECT_DOUBLE_EQ(iou(CornerBox{0, 0, 1, 1}, CornerBox{1, 0, 2, 1}), 0.0);
}

TEST(Iou, ZeroAreaIsRejected) {
  EXPECT_THROW(iou(CornerBox{0, 0, 0, 1}, CornerBox{0, 0, 1, 1}), InvalidGeometry);
}

TEST(Iou, MatchesGridCountingOnSixBySixLattice) {
  const int n = 6;
  const auto boxes = lattice_boxes(n);
  ASSERT_EQ(boxes.size(), 441u);
  std::size_t checked = 0;
  for (const auto& a : boxes) {
    for (const auto& b : boxes) {
      const double expected = grid_iou(a, b, n);
      const double got = iou(scaled(a, n), scaled(b, n));
      ASSERT_NEAR(got, expected, 1e-12) << a.x0 << a.y0 << a.x1 << a.y1 << " vs " << b.x0
                                        << b.y0 << b.x1 << b.y1;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 441u * 441u);
}

TEST(Iou, SymmetricBoundedTranslationInvariant) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> pos(0.0, 5.0), size(0.05, 3.0), shift(-10.0, 10.0);
  for (int i = 0; i < 5000; ++i) {
    const double ax = pos(gen), ay = pos(gen), bx = pos(gen), by = pos(gen);
    CornerBox a{ax, ay, ax + size(gen), ay + size(gen)};
    CornerBox b{bx, by, bx + size(gen), by + size(gen)};
    const double v = iou(a, b);
    EXPECT_DOUBLE_EQ(v, iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    const double dx = shift(gen), dy = shift(gen);
    CornerBox a2{a.x0 + dx, a.y0 + dy, a.x1 + dx, a.y1 + dy};
    CornerBox b2{b.x0 + dx, b.y0 + dy, b.x1 + dx, b.y1 + dy};
    EXPECT_NEAR(iou(a2, b2), v, 1e-9);
  }
}

TEST(Geometry, ClampsPartiallyOutsideBoxes) {
  const auto c = to_corners({0.05, 0.5, 0.2, 0.2});
  EXPECT_DOUBLE_EQ(c.x0, 0.0);
  EXPECT_NEAR(c.x1, 0.15, 1e-15);
  EXPECT_TRUE(validation_error({0.05, 0.5, 0.2, 0.2}).empty());
}

TEST(Geometry, RejectsInvalidBoxes) {
  EXPECT_EQ(validation_error({0.5, 0.5, 1.5, 0.1}), "width out of range");
  EXPECT_EQ(validation_error({0.5, 0.5, 0.1, 0.0}), "height out of range");
  EXPECT_EQ(validation_error({1.2, 0.5, 0.1, 0.1}), "center x out of range");
  EXPECT_FALSE(validation_error({std::nan(""), 0.5, 0.1, 0.1}).empty());
  EXPECT_THROW(validate(NormBBox{0.5, 0.5, -0.1, 0.1}), InvalidGeometry);
  EXPECT_THROW(validate(ImageGeometry{0, 480}), InvalidGeometry);
}

TEST(Geometry, ToPixelsExamples) {
  const ImageGeometry g;
  auto p = to_pixels({0.5, 0.5, 0.5, 0.5}, g);
  EXPECT_DOUBLE_EQ(p.cx, 240);
  EXPECT_DOUBLE_EQ(p.cy, 240);
  EXPECT_DOUBLE_EQ(p.w, 240);
  EXPECT_DOUBLE_EQ(p.h, 240);
  p = to_pixels({0.25, 0.75, 0.1, 0.1}, g);
  EXPECT_DOUBLE_EQ(p.cx, 120);
  EXPECT_DOUBLE_EQ(p.cy, 360);
  EXPECT_NEAR(p.w, 48, 1e-12);
  EXPECT_NEAR(p.h, 48, 1e-12);
}

TEST(Geometry, PixelRoundTrip) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  const ImageGeometry g{640, 352};
  for (int i = 0; i < 2000; ++i) {
    NormBBox b{u(gen), u(gen), u(gen), u(gen)};
    const auto back = to_normalized(to_pixels(b, g), g);
    EXPECT_NEAR(back.cx, b.cx, 1e-9);
    EXPECT_NEAR(back.cy, b.cy, 1e-9);
    EXPECT_NEAR(back.w, b.w, 1e-9);
    EXPECT_NEAR(back.h, b.h, 1e-9);
  }
}

TEST(Labels, DefaultMapAndOverride) {
  LabelMap m;
  EXPECT_EQ(m.label_of(0), SexLabel::Female);
  EXPECT_EQ(m.label_of(1), SexLabel::Male);
  EXPECT_FALSE(m.label_of(2).has_value());
  LabelMap swapped({{0, SexLabel::Male}, {1, SexLabel::Female}});
  EXPECT_EQ(swapped.code_of(SexLabel::Male), 0);
  EXPECT_THROW(LabelMap({{0, SexLabel::Male}, {1, SexLabel::Male}}), ContentError);
  EXPECT_EQ(parse_sex("F"), SexLabel::Female);
  EXPECT_EQ(parse_sex("Male"), SexLabel::Male);
  EXPECT_FALSE(parse_sex("x").has_value());
}

TEST(AnnotationParse, SingleLine) {
  const auto boxes = parse_annotation_file("1 0.5 0.5 0.2 0.1");
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0].label, SexLabel::Male);
  EXPECT_EQ(boxes[0].bbox, (NormBBox{0.5, 0.5, 0.2, 0.1}));
}

TEST(AnnotationParse, EmptyAndBlankLines) {
  EXPECT_TRUE(parse_annotation_file("").empty());
  EXPECT_EQ(parse_annotation_file("\n0 0.1 0.1 0.1 0.1\n\n  \n1 0.2 0.2 0.1 0.1\r\n").size(), 2u);
}

TEST(AnnotationParse, ReportsLineNumbers) {
  try {
    parse_annotation_file("0 0.5 0.5 1.5 0.1");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("width out of range"), std::string::npos);
  }
  try {
    parse_annotation_file("0 0.5 0.5 0.1 0.1\n\n7 0.5 0.5 0.1 0.1\n");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_annotation_file("0 0.5 0.5 0.1"), FormatError);
  EXPECT_THROW(parse_annotation_file("0 0.5 abc 0.1 0.1"), FormatError);
  EXPECT_THROW(parse_annotation_file("male 0.5 0.5 0.1 0.1"), FormatError);
}

TEST(AnnotationParse, LabelMapOverride) {
  LabelMap swapped({{0, SexLabel::Male}, {1, SexLabel::Female}});
  EXPECT_EQ(parse_annotation_file("0 0.5 0.5 0.1 0.1", swapped)[0].label, SexLabel::Male);
}

TEST(PredictionParse, ConfidenceColumn) {
  const auto p = parse_prediction_file("0 0.5 0.5 0.2 0.2 0.875\n");
  ASSERT_EQ(p.size(), 1u);
  EXPECT_DOUBLE_EQ(p[0].confidence, 0.875);
  EXPECT_THROW(parse_prediction_file("0 0.5 0.5 0.2 0.2 1.5"), FormatError);
  EXPECT_THROW(parse_prediction_file("0 0.5 0.5 0.2 0.2"), FormatError);
}

NormBBox random_box(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> c(0.0, 1.0), s(1e-4, 1.0);
  while (true) {
    NormBBox b{c(gen), c(gen), s(gen), s(gen)};
    if (validation_error(b).empty()) return b;
  }
}

TEST(AnnotationParse, SerializeRoundTripIsExact) {
  std::mt19937_64 gen(11);
  LabelMap swapped({{4, SexLabel::Male}, {9, SexLabel::Female}});
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<GroundTruthBox> boxes;
    std::vector<Detection> preds;
    const int n = static_cast<int>(gen() % 8);
    for (int i = 0; i < n; ++i) {
      const SexLabel label = gen() % 2 ? SexLabel::Male : SexLabel::Female;
      boxes.push_back({random_box(gen), label});
      preds.push_back({random_box(gen), label, std::uniform_real_distribution<double>(0, 1)(gen)});
    }
    EXPECT_EQ(parse_annotation_file(serialize_annotations(boxes)), boxes);
    EXPECT_EQ(parse_annotation_file(serialize_annotations(boxes, swapped), swapped), boxes);
    EXPECT_EQ(parse_prediction_file(serialize_predictions(preds)), preds);
  }
}

TEST(AnnotationParse, BundledEvalFixturesRoundTrip) {
  for (const char* stem : {"img_a", "img_b", "img_c"}) {
    const auto gt = parse_annotation_file(read_fixture(std::string("eval/gt/") + stem + ".txt"));
    EXPECT_FALSE(gt.empty());
    EXPECT_EQ(parse_annotation_file(serialize_annotations(gt)), gt);
    const auto pr = parse_prediction_file(read_fixture(std::string("eval/pred/") + stem + ".txt"));
    EXPECT_EQ(parse_prediction_file(serialize_predictions(pr)), pr);
  }
}

FrameObservations frame_with(std::vector<Detection> d) { return {0, 0, std::move(d)}; }

// Box whose leading edge sits at `lead_px` in a 480 px image.
NormBBox box_with_lead(double lead_px, double cx = 0.5) {
  return {cx, (lead_px - 30.0) / 480.0, 0.1, 60.0 / 480.0};
}

TEST(SortLine, DistanceExamples) {
  const ImageGeometry g;
  EXPECT_NEAR(distance_to_sort_line(box_with_lead(432), g, 480), 48, 1e-9);
  EXPECT_NEAR(distance_to_sort_line(box_with_lead(480), g, 480), 0, 1e-9);
  EXPECT_NEAR(distance_to_sort_line(box_with_lead(100), g, 480), 380, 1e-9);
  // Clamped to the image: the edge never passes the bottom.
  EXPECT_NEAR(distance_to_sort_line({0.5, 0.99, 0.1, 0.1}, g, 480), 0, 1e-9);
}

TEST(SelectTarget, NearestWins) {
  const ImageGeometry g;
  auto f = frame_with({{box_with_lead(144), SexLabel::Female, 0.9},
                       {box_with_lead(432), SexLabel::Male, 0.6}});
  auto t = select_target(f, g, 480);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->label, SexLabel::Male);
  EXPECT_FALSE(select_target(frame_with({}), g, 480));
}

TEST(SelectTarget, TiesByConfidenceThenOrder) {
  const ImageGeometry g;
  auto f = frame_with({{box_with_lead(400, 0.2), SexLabel::Male, 0.7},
                       {box_with_lead(400, 0.6), SexLabel::Female, 0.9}});
  EXPECT_EQ(select_target(f, g, 480)->label, SexLabel::Female);
  f = frame_with({{box_with_lead(400, 0.2), SexLabel::Male, 0.8},
                  {box_with_lead(400, 0.6), SexLabel::Female, 0.8}});
  EXPECT_EQ(select_target(f, g, 480)->label, SexLabel::Male);
}

TEST(SelectTarget, AlwaysReturnsAMember) {
  std::mt19937_64 gen(5);
  const ImageGeometry g;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<Detection> d;
    const int n = 1 + static_cast<int>(gen() % 5);
    for (int i = 0; i < n; ++i) {
      d.push_back({random_box(gen), gen() % 2 ? SexLabel::Male : SexLabel::Female,
                   static_cast<double>(gen() % 4) / 4.0});
    }
    auto f = frame_with(d);
    auto t = select_target(f, g, 480);
    ASSERT_TRUE(t);
    EXPECT_NE(std::find(d.begin(), d.end(), *t), d.end());
    for (const auto& other : d) {
      EXPECT_LE(distance_to_sort_line(t->bbox, g, 480), distance_to_sort_line(other.bbox, g, 480));
    }
  }
}

TEST(DetectionLog, ParsesAndRoundTrips) {
  for (const char* name : {"slow_female", "threshold_gated", "alternating"}) {
    std::istringstream in(read_fixture(std::string("logs/") + name + ".jsonl"));
    const auto frames = parse_detection_log(in);
    EXPECT_GE(frames.size(), 20u);
    std::istringstream again(serialize_detection_log(frames));
    EXPECT_EQ(parse_detection_log(again), frames);
  }
}

TEST(DetectionLog, EmptyInput) {
  std::istringstream in("");
  EXPECT_TRUE(parse_detection_log(in).empty());
}

TEST(DetectionLog, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      parse_detection_log(in);
    } catch (const FormatError& e) {
      return e.line();
    }
    return 0;
  };
  const std::string ok = R"({"frame_index":0,"timestamp_ms":0,"detections":[]})";
  EXPECT_EQ(line_of(ok + "\n{not json\n"), 2u);
  EXPECT_EQ(line_of(R"({"frame_index":0,"detections":[]})"), 1u);
  EXPECT_EQ(line_of(ok + "\n" +
                    R"({"frame_index":1,"timestamp_ms":0,"detections":[{"label":"cat","confidence":0.5,"cx":0.5,"cy":0.5,"w":0.1,"h":0.1}]})"),
            2u);

  std::istringstream backwards(ok + "\n" + R"({"frame_index":1,"timestamp_ms":300,"detections":[]})" +
                               "\n\n" + R"({"frame_index":2,"timestamp_ms":200,"detections":[]})");
  try {
    parse_detection_log(backwards);
    FAIL() << "expected OrderError";
  } catch (const OrderError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

}  // namespace
}  // namespace cricket_sort
