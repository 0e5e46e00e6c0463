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

// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if any
// of them fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "brute_force_ap.hpp"
#include "cricket_sort/cricket_sort.hpp"
#include "grid_iou_oracle.hpp"
#include "reference_controller.hpp"
#include "sim_scenarios.hpp"
#include "test_support.hpp"

namespace cs = cricket_sort;
namespace ct = cricket_sort::testing;

namespace {

// Pinned tolerances and budgets.
constexpr double kGlobalTol = 0.001;
constexpr double kPerExperimentTol = 0.01;
constexpr double kSpeedTol = 0.05;
constexpr double kMedianTol = 1e-9;
constexpr double kApTol = 1e-9;
constexpr double kIouTol = 1e-12;
constexpr double kInstantBudgetS = 1.0;
constexpr double kEvalBudgetS = 10.0;
constexpr double kControllerBudgetS = 30.0;
constexpr double kSimBudgetS = 120.0;
constexpr double kRoundTripBudgetS = 10.0;

// Collects failures for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    ok_ = ok_ && ok;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream msg;
    msg << what << ": got " << got << ", want " << want << " +/- " << tol;
    expect(std::abs(got - want) <= tol, msg.str());
  }
  void note(const std::string& text) { notes_.push_back(text); }
  bool ok() const { return ok_; }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  bool ok_ = true;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<void(Check&)> body;
};

// ---- 1 ---------------------------------------------------------------------

void global_metrics(Check& c) {
  const cs::SortConfusion m{36, 6, 6, 43};
  const auto r = cs::class_metrics(m);
  c.near(cs::sorting_accuracy(m), 0.868, kGlobalTol, "accuracy");
  c.near(r.male.precision.value, 0.857, kGlobalTol, "male precision");
  c.near(r.male.recall.value, 0.857, kGlobalTol, "male recall");
  c.near(r.male.f1.value, 0.857, kGlobalTol, "male f1");
  c.near(r.male.specificity.value, 0.878, kGlobalTol, "male specificity");
  c.near(r.female.precision.value, 0.878, kGlobalTol, "female precision");
  c.near(r.female.recall.value, 0.878, kGlobalTol, "female recall");
  c.near(r.female.f1.value, 0.878, kGlobalTol, "female f1");
  c.near(r.female.specificity.value, 0.857, kGlobalTol, "female specificity");
  c.expect(cs::parse_confusion_csv(ct::read_fixture("global_confusion.csv")) == m,
           "global fixture holds the printed counts");
}

// ---- 2 ---------------------------------------------------------------------

void per_experiment(Check& c) {
  struct Row {
    const char* fixture;
    cs::SortConfusion counts;
    double acc, prec, rec, f1;
  };
  const Row rows[] = {
      {"exp1_confusion.csv", {10, 2, 2, 9}, 0.83, 0.83, 0.83, 0.83},
      {"exp2_confusion.csv", {13, 1, 4, 11}, 0.83, 0.84, 0.83, 0.83},
      {"exp3_confusion.csv", {5, 0, 1, 11}, 0.94, 0.92, 0.96, 0.93},
      {"exp4_confusion.csv", {8, 1, 1, 13}, 0.91, 0.91, 0.91, 0.91},
  };
  for (const auto& row : rows) {
    const std::string tag = row.fixture;
    const auto counts = cs::parse_confusion_csv(ct::read_fixture(row.fixture));
    c.expect(counts == row.counts, tag + " counts");
    const auto r = cs::class_metrics(counts);
    c.near(r.accuracy, row.acc, kPerExperimentTol, tag + " accuracy");
    c.near(r.macro_precision, row.prec, kPerExperimentTol, tag + " precision");
    c.near(r.macro_recall, row.rec, kPerExperimentTol, tag + " recall");
    c.near(r.macro_f1, row.f1, kPerExperimentTol, tag + " f1");
  }
}

// ---- 3 ---------------------------------------------------------------------

double oracle_median(std::vector<double> v) {
  // Partial selection rather than a full sort.
  const std::size_t n = v.size(), mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (n % 2) return hi;
  return 0.5 * (*std::max_element(v.begin(), v.begin() + mid) + hi);
}

void speed_table(Check& c) {
  const auto rows = cs::parse_speeds_csv(ct::read_fixture("speeds.csv"));
  c.expect(rows.size() == 40, "40 speed rows");
  std::vector<cs::SpeedRecord> records;
  std::vector<double> male, female, wrong;
  for (const auto& r : rows) {
    const auto id = std::to_string(r.record.id);
    c.expect(r.tabulated_speed_mm_s.has_value(), "row " + id + " has a printed speed");
    if (r.tabulated_speed_mm_s) {
      c.near(75.0 / r.record.traversal_time_s, *r.tabulated_speed_mm_s, kSpeedTol, "row " + id);
      c.near(cs::speed_from_traversal(r.record.traversal_time_s), *r.tabulated_speed_mm_s,
             kSpeedTol, "library row " + id);
    }
    records.push_back(r.record);
    const double v = 75.0 / r.record.traversal_time_s;
    (r.record.sex == cs::SexLabel::Male ? male : female).push_back(v);
    if (r.record.sex != r.record.classified_as) wrong.push_back(v);
  }
  const auto s = cs::speed_summary(records);
  c.expect(s.female && s.male && s.misclassified, "all groups present");
  if (!(s.female && s.male && s.misclassified)) return;
  c.near(s.female->median, 18.75, kMedianTol, "female median");
  c.near(s.female->median, oracle_median(female), kMedianTol, "female median vs oracle");
  c.near(s.male->median, oracle_median(male), kMedianTol, "male median vs oracle");
  c.near(s.male->median, 37.5, kMedianTol, "male median");
  c.near(s.misclassified->median, oracle_median(wrong), kMedianTol, "misclassified vs oracle");
  c.near(s.misclassified->median, 93.75, kMedianTol, "misclassified median");
  const auto d = cs::median_discrepancies(s);
  c.near(d.at("male").at("published").get<double>(), 39.5, 0.0, "male figure value recorded");
  c.near(d.at("misclassified").at("published").get<double>(), 75.0, 0.0,
         "misclassified figure value recorded");
  c.near(d.at("female").at("published").get<double>(), 18.8, 0.0, "female figure value recorded");
}

// ---- 4 ---------------------------------------------------------------------

using Steps = std::vector<std::pair<double, int>>;

void check_steps(Check& c, const cs::StepSeries& s, const Steps& plotted, const std::string& tag) {
  for (const auto& [t, count] : plotted) {
    c.expect(s.value_at(t) == count, tag + " count " + std::to_string(count) + " at " +
                                         std::to_string(t));
    // Just before the step the count is one lower.
    c.expect(s.value_at(t - 0.005) == count - 1, tag + " before step " + std::to_string(count));
  }
  c.expect(s.final_count() == static_cast<std::int64_t>(plotted.size()), tag + " final count");
}

void arrivals(Check& c) {
  const auto e3 = cs::cumulative_arrivals(cs::parse_arrivals_csv(ct::read_fixture("exp3_arrivals.csv")));
  check_steps(c, e3.female,
              {{0.67, 1}, {4.38, 2}, {8.82, 3}, {10.10, 4}, {10.65, 5}, {12.00, 6}, {21.33, 7},
               {21.75, 8}, {22.75, 9}, {31.33, 10}},
              "exp3 female");
  check_steps(c, e3.male, {{3.02, 1}, {3.27, 2}, {19.65, 3}, {20.17, 4}, {21.42, 5}}, "exp3 male");

  const auto e4 = cs::cumulative_arrivals(cs::parse_arrivals_csv(ct::read_fixture("exp4_arrivals.csv")));
  check_steps(c, e4.female,
              {{3.75, 1}, {5.67, 2}, {6.33, 3}, {8.58, 4}, {8.67, 5}, {11.33, 6}, {19.00, 7},
               {19.42, 8}, {20.83, 9}, {22.50, 10}, {40.83, 11}, {50.00, 12}, {65.07, 13},
               {84.83, 14}, {109.75, 15}},
              "exp4 female");
  check_steps(c, e4.male,
              {{19.50, 1}, {22.30, 2}, {52.42, 3}, {71.50, 4}, {71.80, 5}, {72.17, 6},
               {107.28, 7}, {108.97, 8}, {108.98, 9}, {109.28, 10}},
              "exp4 male");
}

// ---- 5 ---------------------------------------------------------------------

void evaluation_math(Check& c) {
  const int n = 6;
  const auto boxes = ct::lattice_boxes(n);
  std::size_t bad = 0;
  for (const auto& a : boxes)
    for (const auto& b : boxes)
      bad += std::abs(cs::iou(ct::scaled(a, n), ct::scaled(b, n)) - ct::grid_iou(a, b, n)) > kIouTol;
  c.expect(boxes.size() == 441, "441 lattice boxes");
  c.expect(bad == 0, std::to_string(bad) + " lattice pairs disagree with cell counting");

  int compared = 0;
  std::size_t ap_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto scene = ct::random_scene(100003 + i);
    const auto report = ct::evaluate_scene(scene);
    if (!report) continue;
    for (cs::SexLabel label : cs::kAllLabels) {
      const auto* eval = report->find(label);
      if (!eval) continue;
      ap_bad += std::abs(eval->ap - ct::brute_force_ap(scene, label)) > kApTol;
      ++compared;
    }
  }
  c.expect(ap_bad == 0, std::to_string(ap_bad) + " AP values disagree with the threshold sweep");
  c.expect(compared > 500, "at least 500 labelled scenes compared");

  using CC = cs::ConfusionClass;
  for (int i = 0; i < 200; ++i) {
    const auto scene = ct::random_scene(900001 + i);
    std::size_t objects = 0;
    std::vector<std::vector<cs::Detection>> perfect;
    for (const auto& g : scene.gts) {
      objects += g.size();
      perfect.emplace_back();
      for (const auto& box : g) perfect.back().push_back({box.bbox, box.label, 1.0});
    }
    if (objects == 0) continue;
    const auto r = cs::map_at_50(perfect, scene.gts);
    c.near(r.map, 1.0, 0.0, "perfect detector mAP");
    std::int64_t off = 0;
    for (int t = 0; t < 3; ++t)
      for (int p = 0; p < 3; ++p) off += t == p ? 0 : r.confusion.counts[t][p];
    c.expect(off == 0, "perfect detector confusion is diagonal");
    c.expect(r.confusion.at(CC::Male, CC::Male) + r.confusion.at(CC::Female, CC::Female) ==
                 static_cast<std::int64_t>(objects),
             "perfect detector diagonal counts every object");
  }
}

// ---- 6 ---------------------------------------------------------------------

std::vector<cs::TimedCommand> read_timeline(const std::string& text) {
  std::vector<cs::TimedCommand> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    out.push_back({j.at("timestamp_ms").get<std::int64_t>(),
                   *cs::parse_arm_command(j.at("command").get<std::string>())});
  }
  return out;
}

void controller(Check& c) {
  ct::DfsStats stats;
  ct::dfs(cs::SortingController{}, ct::ReferenceController{}, 0, 12, stats);
  c.expect(stats.sequences == 531441, "all 3^12 sequences visited");
  c.expect(stats.violations == 0, std::to_string(stats.violations) + " conflicting windows");
  c.expect(stats.commands > 0, "some sequences command the arm");

  for (const char* name : {"slow_female", "threshold_gated", "alternating"}) {
    std::istringstream log(ct::read_fixture(std::string("logs/") + name + ".jsonl"));
    const auto got = cs::replay_log(cs::parse_detection_log(log), cs::ControllerConfig{});
    const auto want = read_timeline(ct::read_fixture(std::string("logs/") + name + ".expected.jsonl"));
    c.expect(got == want, std::string(name) + " timeline");
  }
}

// ---- 7 ---------------------------------------------------------------------

double mean_accuracy(const cs::StressPreset& p, const cs::ArmModel& arm) {
  double sum = 0.0;
  int runs = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    if (auto acc = cs::simulate_run(p, 500, {}, arm, {}, {}, seed).accuracy()) {
      sum += *acc;
      ++runs;
    }
  }
  return runs ? sum / runs : 0.0;
}

void simulator(Check& c) {
  for (const auto& p : cs::default_presets()) {
    const auto a = cs::to_json(cs::simulate_run(p, 25, {}, {}, {}, {}, 7)).dump();
    const auto b = cs::to_json(cs::simulate_run(p, 25, {}, {}, {}, {}, 7)).dump();
    c.expect(a == b, p.name + " repeated run is byte-identical");
  }

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = cs::simulate_agents(ct::paced_agents(seed, 30), ct::noiseless_detector(),
                                       cs::ArmModel{0}, {}, {}, seed);
    c.expect(r.returned() == 0 && r.accuracy() && *r.accuracy() == 1.0,
             "noiseless seed " + std::to_string(seed));
  }

  const auto base = *cs::find_preset("e3");
  std::vector<double> by_speed, by_arm;
  for (double scale : {1.0, 2.0, 4.0}) {
    auto p = base;
    p.speed_scale *= scale;
    by_speed.push_back(mean_accuracy(p, {}));
  }
  for (double ms : {0.0, 250.0, 1000.0}) by_arm.push_back(mean_accuracy(base, cs::ArmModel{ms}));
  auto fmt = [](const std::vector<double>& v) {
    std::ostringstream o;
    for (double x : v) o << x << ' ';
    return o.str();
  };
  c.note("mean accuracy by speed scale 1/2/4: " + fmt(by_speed));
  c.note("mean accuracy by arm latency 0/250/1000 ms: " + fmt(by_arm));
  c.expect(by_speed[0] > by_speed[1] && by_speed[1] > by_speed[2],
           "accuracy falls with speed scale: " + fmt(by_speed));
  c.expect(by_arm[0] > by_arm[1] && by_arm[1] > by_arm[2],
           "accuracy falls with arm latency: " + fmt(by_arm));

  const auto presets = cs::default_presets();
  const auto rows = cs::preset_calibration_report(presets, 25, 30);
  auto row = [&](const char* name) {
    return *std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.preset == name; });
  };
  const auto e1 = row("e1"), e3 = row("e3"), e4 = row("e4");
  for (const auto& r : rows) {
    std::ostringstream o;
    o << r.preset << ": median accuracy " << r.median_accuracy << ", median duration "
      << r.median_duration_min << " min";
    c.note(o.str());
  }
  c.expect(e1.median_accuracy >= 0.78 && e1.median_accuracy <= 0.90,
           "e1 median accuracy " + std::to_string(e1.median_accuracy));
  c.expect(e1.median_duration_min <= 15.0, "e1 duration " + std::to_string(e1.median_duration_min));
  c.expect(e3.median_accuracy >= 0.88 && e3.median_accuracy <= 0.98,
           "e3 median accuracy " + std::to_string(e3.median_accuracy));
  for (const auto& r : rows) {
    if (r.preset != "e4") {
      c.expect(e4.median_duration_min > r.median_duration_min, "e4 outlasts " + r.preset);
    }
  }
}

// ---- 8 ---------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = "'" + std::string(CRICKET_SORT_CLI) + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void round_trip(Check& c) {
  const auto dir = ct::scratch_dir("acceptance");
  auto q = [&](const char* name) { return "'" + (dir / name).string() + "'"; };
  for (const char* preset : {"e1", "e2", "e3", "e4"}) {
    const std::string sim = "simulate --preset " + std::string(preset) + " --n 25 --seed 5";
    c.expect(run_cli(sim + " --out " + q("sim.json") + " --emit-log " + q("frames.jsonl")) == 0,
             std::string(preset) + " simulate exits 0");
    c.expect(run_cli("replay --log " + q("frames.jsonl") + " --out " + q("t.jsonl")) == 0,
             std::string(preset) + " replay exits 0");
    std::vector<cs::TimedCommand> internal;
    const auto report = nlohmann::json::parse(ct::read_file((dir / "sim.json").string()));
    for (const auto& j : report.at("commands")) {
      internal.push_back({j.at("timestamp_ms").get<std::int64_t>(),
                          *cs::parse_arm_command(j.at("command").get<std::string>())});
    }
    const auto replayed = read_timeline(ct::read_file((dir / "t.jsonl").string()));
    c.expect(!internal.empty() && replayed == internal, std::string(preset) + " timelines agree");
  }

  for (const char* name : {"global_confusion.csv", "exp1_confusion.csv", "exp2_confusion.csv",
                           "exp3_confusion.csv", "exp4_confusion.csv"}) {
    const auto text = ct::read_fixture(name);
    c.expect(cs::serialize_confusion_csv(cs::parse_confusion_csv(text)) == text, name);
  }
  for (const char* name : {"exp3_arrivals.csv", "exp4_arrivals.csv"}) {
    const auto events = cs::parse_arrivals_csv(ct::read_fixture(name));
    const auto again = cs::parse_arrivals_csv(cs::serialize_arrivals_csv(events));
    bool same = again.size() == events.size();
    for (std::size_t i = 0; same && i < events.size(); ++i) {
      same = again[i].time_min == events[i].time_min && again[i].sex == events[i].sex;
    }
    c.expect(same, name);
  }
  {
    const auto rows = cs::parse_speeds_csv(ct::read_fixture("speeds.csv"));
    std::vector<cs::SpeedRecord> records;
    for (const auto& r : rows) records.push_back(r.record);
    bool same = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& a = rows[i].record;
      const auto& b = cs::kMeasuredCrossings[i];
      same = same && a.id == b.id && a.sex == b.sex && a.classified_as == b.classified_as &&
             a.traversal_time_s == b.time_s;
    }
    c.expect(same && rows.size() == cs::kMeasuredCrossings.size(), "speeds.csv");
  }
  for (const char* name : {"slow_female", "threshold_gated", "alternating"}) {
    std::istringstream log(ct::read_fixture(std::string("logs/") + name + ".jsonl"));
    const auto frames = cs::parse_detection_log(log);
    std::istringstream again(cs::serialize_detection_log(frames));
    c.expect(cs::parse_detection_log(again) == frames, std::string(name) + ".jsonl");
  }
  for (const char* stem : {"img_a", "img_b", "img_c"}) {
    const auto gt_text = ct::read_fixture(std::string("eval/gt/") + stem + ".txt");
    const auto gt = cs::parse_annotation_file(gt_text);
    c.expect(cs::parse_annotation_file(cs::serialize_annotations(gt)) == gt,
             std::string("gt ") + stem);
    const auto pred = cs::parse_prediction_file(ct::read_fixture(std::string("eval/pred/") + stem + ".txt"));
    c.expect(cs::parse_prediction_file(cs::serialize_predictions(pred)) == pred,
             std::string("pred ") + stem);
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "global sorting metrics", kInstantBudgetS, global_metrics},
      {2, "per-experiment macro metrics", kInstantBudgetS, per_experiment},
      {3, "speed table and medians", kInstantBudgetS, speed_table},
      {4, "cumulative arrival steps", kInstantBudgetS, arrivals},
      {5, "IoU and AP oracles, perfect detector", kEvalBudgetS, evaluation_math},
      {6, "exhaustive controller check and golden logs", kControllerBudgetS, controller},
      {7, "simulator determinism, limits, monotonicity, calibration", kSimBudgetS, simulator},
      {8, "emit-log/replay and fixture round-trips", kRoundTripBudgetS, round_trip},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > cr.budget_s) {
      check.expect(false, "took " + std::to_string(secs) + " s, budget " +
                              std::to_string(cr.budget_s) + " s");
    }
    std::printf("%s %d %s (%.2f s)\n", check.ok() ? "PASS" : "FAIL", cr.id, cr.title.c_str(), secs);
    for (const auto& n : check.notes()) std::printf("    %s\n", n.c_str());
    for (const auto& f : check.failures()) std::printf("    %s\n", f.c_str());
    failed += !check.ok();
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
