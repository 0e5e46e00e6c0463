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

// cricket_sort_cli: eval | replay | simulate | metrics | calibrate
//
// Exit codes: 0 success, 1 input content error, 2 input format error or bad
// command line. Every run writes <out>.manifest.json next to its output.

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cricket_sort/cricket_sort.hpp"

namespace fs = std::filesystem;
namespace cs = cricket_sort;
using nlohmann::json;

namespace {

struct InputDigest {
  std::string path;
  std::string sha256;
  std::size_t bytes = 0;
};

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

class Run {
 public:
  explicit Run(std::string subcommand)
      : subcommand_(std::move(subcommand)), start_(std::chrono::steady_clock::now()) {}

  std::string read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cs::ContentError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    inputs_.push_back({path, sha256_hex(text), text.size()});
    return text;
  }

  void warn(std::string message) {
    std::cerr << "warning: " << message << "\n";
    warnings_.push_back(std::move(message));
  }
  const std::vector<std::string>& warnings() const { return warnings_; }

  void write_manifest(const std::string& out, const cs::RunConfig& cfg,
                      std::optional<std::uint64_t> seed) const {
    json inputs = json::array();
    for (const auto& d : inputs_) {
      inputs.push_back({{"path", d.path}, {"sha256", d.sha256}, {"bytes", d.bytes}});
    }
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    json m = {{"subcommand", subcommand_},
              {"version", cs::kVersion},
              {"resolved_config", cs::to_json(cfg)},
              {"seed", seed ? json(*seed) : json()},
              {"inputs", std::move(inputs)},
              {"wall_clock_ms",
               std::chrono::duration<double, std::milli>(elapsed).count()}};
    write_file(out + ".manifest.json", m.dump(2) + "\n");
  }

  static void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw cs::ContentError("cannot write " + path);
    out << text;
    if (!out) throw cs::ContentError("write failed: " + path);
  }

 private:
  std::string subcommand_;
  std::chrono::steady_clock::time_point start_;
  std::vector<InputDigest> inputs_;
  std::vector<std::string> warnings_;
};

// Built-in defaults < SORTER_SEED < --config < explicit flags.
cs::RunConfig base_config(const std::string& config_path, Run& run) {
  cs::RunConfig cfg;
  if (const char* env = std::getenv("SORTER_SEED"); env && *env) {
    std::uint64_t seed = 0;
    if (!cs::detail::parse_number(std::string_view(env), seed)) {
      throw cs::FormatError(std::string("SORTER_SEED is not an unsigned integer: '") + env + "'");
    }
    cfg.simulation.seed = seed;
  }
  if (!config_path.empty()) {
    const std::string text = run.read(config_path);
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw cs::FormatError(config_path + ": invalid JSON: " + e.what());
    }
    cs::merge_config_document(doc, cfg);
  }
  return cfg;
}

void require_out(const cs::RunConfig& cfg) {
  if (cfg.outputs.out.empty()) throw cs::FormatError("--out is required");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Files with a .txt suffix by stem; classes.txt is a dataset index, not labels.
std::map<std::string, fs::path> label_files(const std::string& dir, const char* what) {
  if (dir.empty()) throw cs::FormatError(std::string("--") + what + " is required");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw cs::ContentError(std::string(what) + " not found: " + dir);
  std::map<std::string, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    if (entry.path().filename() == "classes.txt") continue;
    files[entry.path().stem().string()] = entry.path();
  }
  return files;
}

// ---------------------------------------------------------------------------

struct EvalFlags {
  std::string config, pred_dir, gt_dir, out, pr_csv;
  std::optional<double> iou;
};

int cmd_eval(const EvalFlags& f) {
  Run run("eval");
  cs::RunConfig cfg = base_config(f.config, run);
  if (!f.pred_dir.empty()) cfg.inputs.pred_dir = f.pred_dir;
  if (!f.gt_dir.empty()) cfg.inputs.gt_dir = f.gt_dir;
  if (f.iou) cfg.iou_threshold = *f.iou;
  if (!f.out.empty()) cfg.outputs.out = f.out;
  if (!f.pr_csv.empty()) cfg.outputs.pr_csv = f.pr_csv;
  cfg.validate();
  require_out(cfg);

  const auto gt_files = label_files(cfg.inputs.gt_dir, "gt-dir");
  const auto pred_files = label_files(cfg.inputs.pred_dir, "pred-dir");
  if (gt_files.empty()) throw cs::ContentError("no ground-truth files in " + cfg.inputs.gt_dir);

  std::vector<std::vector<cs::GroundTruthBox>> gts;
  std::vector<std::vector<cs::Detection>> preds;
  json images = json::array();
  for (const auto& [stem, path] : gt_files) {
    auto where = [&](const fs::path& p, const cs::FormatError& e) {
      return cs::FormatError(p.string() + ": " + e.what());
    };
    try {
      gts.push_back(cs::parse_annotation_file(run.read(path.string()), cfg.label_map));
    } catch (const cs::FormatError& e) {
      throw where(path, e);
    }
    if (auto it = pred_files.find(stem); it != pred_files.end()) {
      try {
        preds.push_back(cs::parse_prediction_file(run.read(it->second.string()), cfg.label_map));
      } catch (const cs::FormatError& e) {
        throw where(it->second, e);
      }
    } else {
      run.warn("no predictions for '" + stem + "', treated as empty");
      preds.emplace_back();
    }
    images.push_back(stem);
  }
  for (const auto& [stem, path] : pred_files) {
    if (!gt_files.count(stem)) run.warn("no ground truth for '" + stem + "', skipped");
  }

  const auto report = cs::evaluate_detections(preds, gts, cfg.iou_threshold);
  json j = cs::to_json(report);
  j["images"] = std::move(images);
  j["warnings"] = run.warnings();
  Run::write_file(cfg.outputs.out, dump(j));

  if (!cfg.outputs.pr_csv.empty()) {
    std::string csv = "label,threshold,recall,precision\n";
    for (const auto& l : report.per_label) {
      for (const auto& p : l.curve) {
        csv += std::string(cs::to_string(l.label)) + "," + cs::detail::format_number(p.threshold) +
               "," + cs::detail::format_number(p.recall) + "," +
               cs::detail::format_number(p.precision) + "\n";
      }
    }
    Run::write_file(cfg.outputs.pr_csv, csv);
  }
  run.write_manifest(cfg.outputs.out, cfg, std::nullopt);
  return 0;
}

// ---------------------------------------------------------------------------

struct ReplayFlags {
  std::string config, log, out;
};

std::string timeline_jsonl(const std::vector<cs::TimedCommand>& timeline) {
  std::string out;
  for (const auto& c : timeline) {
    nlohmann::ordered_json line = {{"timestamp_ms", c.timestamp_ms},
                                   {"command", std::string(cs::to_string(c.command))}};
    out += line.dump() + "\n";
  }
  return out;
}

int cmd_replay(const ReplayFlags& f) {
  Run run("replay");
  cs::RunConfig cfg = base_config(f.config, run);
  if (!f.log.empty()) cfg.inputs.log = f.log;
  if (!f.out.empty()) cfg.outputs.out = f.out;
  cfg.validate();
  require_out(cfg);
  if (cfg.inputs.log.empty()) throw cs::FormatError("--log is required");

  std::istringstream in(run.read(cfg.inputs.log));
  std::vector<cs::FrameObservations> frames;
  try {
    frames = cs::parse_detection_log(in);
  } catch (const cs::FormatError& e) {
    if (dynamic_cast<const cs::OrderError*>(&e)) throw cs::OrderError(cfg.inputs.log + ": " + e.what());
    throw cs::FormatError(cfg.inputs.log + ": " + e.what());
  }
  Run::write_file(cfg.outputs.out, timeline_jsonl(cs::replay_log(frames, cfg.controller)));
  run.write_manifest(cfg.outputs.out, cfg, std::nullopt);
  return 0;
}

// ---------------------------------------------------------------------------

struct SimulateFlags {
  std::string config, preset, out, emit_log;
  std::optional<int> n;
  std::optional<std::uint64_t> seed;
  std::optional<double> speed_scale, arm_ms;
};

cs::StressPreset resolve_preset(const std::string& name) {
  if (auto p = cs::find_preset(name)) return *p;
  std::string names;
  for (const auto& p : cs::default_presets()) names += (names.empty() ? "" : ", ") + p.name;
  throw cs::ContentError("unknown preset '" + name + "'; valid presets: " + names);
}

// Config echo for reports: everything except file locations, so a report does
// not change when only its path does.
json model_echo(const cs::RunConfig& cfg) {
  json j = cs::to_json(cfg);
  j.erase("inputs");
  j.erase("outputs");
  j.erase("evaluation");
  j.erase("label_map");
  return j;
}

int cmd_simulate(const SimulateFlags& f) {
  Run run("simulate");
  cs::RunConfig cfg = base_config(f.config, run);
  if (!f.preset.empty()) cfg.simulation.preset = f.preset;
  if (f.n) cfg.simulation.n = *f.n;
  if (f.seed) cfg.simulation.seed = *f.seed;
  if (f.speed_scale) cfg.simulation.speed_scale = *f.speed_scale;
  if (f.arm_ms) cfg.arm.travel_time_ms = *f.arm_ms;
  if (!f.out.empty()) cfg.outputs.out = f.out;
  if (!f.emit_log.empty()) cfg.outputs.emit_log = f.emit_log;
  cfg.validate();
  require_out(cfg);

  cs::StressPreset preset = resolve_preset(cfg.simulation.preset);
  preset.speed_scale *= cfg.simulation.speed_scale;
  const auto result = cs::simulate_run(preset, cfg.simulation.n, cfg.detector, cfg.arm,
                                       cfg.controller, cfg.bridge, cfg.simulation.seed);
  json j = cs::to_json(result);
  j["preset"] = preset.name;
  j["n"] = cfg.simulation.n;
  j["seed"] = cfg.simulation.seed;
  j["config"] = model_echo(cfg);
  Run::write_file(cfg.outputs.out, dump(j));
  if (!cfg.outputs.emit_log.empty()) {
    Run::write_file(cfg.outputs.emit_log, cs::serialize_detection_log(result.frames));
  }
  run.write_manifest(cfg.outputs.out, cfg, cfg.simulation.seed);
  return 0;
}

// ---------------------------------------------------------------------------

struct CalibrateFlags {
  std::string config, out;
  std::optional<int> n, runs;
};

int cmd_calibrate(const CalibrateFlags& f) {
  Run run("calibrate");
  cs::RunConfig cfg = base_config(f.config, run);
  if (f.n) cfg.simulation.n = *f.n;
  if (!f.out.empty()) cfg.outputs.out = f.out;
  cfg.validate();
  require_out(cfg);
  const int runs = f.runs.value_or(30);
  if (runs <= 0) throw cs::ContentError("--runs must be positive");

  const auto presets = cs::default_presets();
  json rows = json::array();
  for (const auto& r : cs::preset_calibration_report(presets, cfg.simulation.n, runs, cfg.detector,
                                                     cfg.arm, cfg.controller, cfg.bridge)) {
    rows.push_back({{"preset", r.preset},
                    {"runs", r.runs},
                    {"median_duration_min", r.median_duration_min},
                    {"median_accuracy", r.median_accuracy},
                    {"mean_accuracy", r.mean_accuracy}});
  }
  json j = {{"n", cfg.simulation.n}, {"runs", runs}, {"presets", std::move(rows)},
            {"config", model_echo(cfg)}};
  Run::write_file(cfg.outputs.out, dump(j));
  run.write_manifest(cfg.outputs.out, cfg, std::nullopt);
  return 0;
}

// ---------------------------------------------------------------------------

struct MetricsFlags {
  std::string config, confusion, arrivals, speeds, out, series_csv;
};

template <typename Parse>
auto parse_named(const std::string& path, const std::string& text, Parse parse) {
  try {
    return parse(text);
  } catch (const cs::FormatError& e) {
    throw cs::FormatError(path + ": " + e.what());
  }
}

int cmd_metrics(const MetricsFlags& f) {
  Run run("metrics");
  cs::RunConfig cfg = base_config(f.config, run);
  if (!f.confusion.empty()) cfg.inputs.confusion = f.confusion;
  if (!f.arrivals.empty()) cfg.inputs.arrivals = f.arrivals;
  if (!f.speeds.empty()) cfg.inputs.speeds = f.speeds;
  if (!f.out.empty()) cfg.outputs.out = f.out;
  if (!f.series_csv.empty()) cfg.outputs.series_csv = f.series_csv;
  cfg.validate();
  require_out(cfg);
  const auto& in = cfg.inputs;
  if (in.confusion.empty() && in.arrivals.empty() && in.speeds.empty()) {
    throw cs::FormatError("metrics needs at least one of --confusion, --arrivals, --speeds");
  }
  if (!cfg.outputs.series_csv.empty() && in.arrivals.empty()) {
    throw cs::FormatError("--series-csv needs --arrivals");
  }

  json j = json::object();
  if (!in.confusion.empty()) {
    const auto c = parse_named(in.confusion, run.read(in.confusion), cs::parse_confusion_csv);
    j["confusion"] = {{"counts", cs::to_json(c)}, {"metrics", cs::to_json(cs::class_metrics(c))}};
  }
  if (!in.arrivals.empty()) {
    const auto events = parse_named(in.arrivals, run.read(in.arrivals), cs::parse_arrivals_csv);
    const auto series = cs::cumulative_arrivals(events);
    j["arrivals"] = {{"events", events.size()}, {"series", cs::to_json(series)}};
    if (!cfg.outputs.series_csv.empty()) {
      std::string csv = "sex,time_min,count\n";
      for (auto [name, s] : {std::pair{"female", &series.female}, std::pair{"male", &series.male}}) {
        for (const auto& [t, count] : s->points()) {
          csv += std::string(name) + "," + cs::detail::format_number(t) + "," +
                 std::to_string(count) + "\n";
        }
      }
      Run::write_file(cfg.outputs.series_csv, csv);
    }
  }
  if (!in.speeds.empty()) {
    const auto rows = parse_named(in.speeds, run.read(in.speeds), [&](const std::string& t) {
      return cs::parse_speeds_csv(t, cfg.bridge.zone_length_mm);
    });
    std::vector<cs::SpeedRecord> records;
    json speed_check = nullptr;
    double max_delta = -1.0;
    for (const auto& r : rows) {
      records.push_back(r.record);
      if (r.tabulated_speed_mm_s) {
        max_delta = std::max(max_delta, std::abs(r.record.speed_mm_s - *r.tabulated_speed_mm_s));
      }
    }
    if (max_delta >= 0.0) speed_check = {{"max_abs_delta_mm_s", max_delta}};
    const auto summary = cs::speed_summary(records);
    j["speeds"] = {{"records", records.size()},
                   {"zone_length_mm", cfg.bridge.zone_length_mm},
                   {"tabulated_speed_check", std::move(speed_check)},
                   {"summary", cs::to_json(summary)},
                   {"median_discrepancies", cs::median_discrepancies(summary)}};
  }
  Run::write_file(cfg.outputs.out, dump(j));
  run.write_manifest(cfg.outputs.out, cfg, std::nullopt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cricket_sort: detection evaluation, sorting controller replay, bridge "
               "simulation and experiment metrics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cs::kVersion));

  EvalFlags ef;
  auto* eval = app.add_subcommand("eval", "score YOLO-format predictions against ground truth");
  eval->add_option("--pred-dir", ef.pred_dir, "prediction .txt files: label cx cy w h conf");
  eval->add_option("--gt-dir", ef.gt_dir, "ground-truth .txt files: label cx cy w h");
  eval->add_option("--iou", ef.iou, "IoU match threshold (default 0.5)");
  eval->add_option("--out", ef.out, "report JSON");
  eval->add_option("--pr-csv", ef.pr_csv, "optional precision-recall points CSV");
  eval->add_option("--config", ef.config, "JSON config or manifest");

  ReplayFlags rf;
  auto* replay = app.add_subcommand("replay", "run the sorting controller over a detection log");
  replay->add_option("--log", rf.log, "detection log JSONL");
  replay->add_option("--config", rf.config, "JSON config or manifest");
  replay->add_option("--out", rf.out, "command timeline JSONL");

  SimulateFlags sf;
  auto* simulate = app.add_subcommand("simulate", "simulate a bridge run under a stress preset");
  simulate->add_option("--preset", sf.preset, "e1, e2, e3 or e4");
  simulate->add_option("--n", sf.n, "number of crickets");
  simulate->add_option("--seed", sf.seed, "RNG seed");
  simulate->add_option("--speed-scale", sf.speed_scale, "multiplies sampled speeds");
  simulate->add_option("--arm-ms", sf.arm_ms, "arm travel time in ms");
  simulate->add_option("--out", sf.out, "report JSON");
  simulate->add_option("--emit-log", sf.emit_log, "write the synthesized detection log");
  simulate->add_option("--config", sf.config, "JSON config or manifest");

  CalibrateFlags cf;
  auto* calibrate = app.add_subcommand("calibrate", "seed sweep over all stress presets");
  calibrate->add_option("--n", cf.n, "crickets per run");
  calibrate->add_option("--runs", cf.runs, "seeds 0..runs-1 (default 30)");
  calibrate->add_option("--out", cf.out, "report JSON");
  calibrate->add_option("--config", cf.config, "JSON config or manifest");

  MetricsFlags mf;
  auto* metrics = app.add_subcommand("metrics", "sorting metrics, arrival series, speed summaries");
  metrics->add_option("--confusion", mf.confusion, "confusion CSV");
  metrics->add_option("--arrivals", mf.arrivals, "arrival events CSV");
  metrics->add_option("--speeds", mf.speeds, "traversal speed CSV");
  metrics->add_option("--out", mf.out, "report JSON");
  metrics->add_option("--series-csv", mf.series_csv, "optional cumulative series CSV");
  metrics->add_option("--config", mf.config, "JSON config or manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*eval) return cmd_eval(ef);
    if (*replay) return cmd_replay(rf);
    if (*simulate) return cmd_simulate(sf);
    if (*calibrate) return cmd_calibrate(cf);
    if (*metrics) return cmd_metrics(mf);
  } catch (const cs::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
