// Copyright 2026 The lckit Authors
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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lckit/archive.hpp"
#include "lckit/cot_labeler.hpp"
#include "lckit/errors.hpp"
#include "lckit/evaluation.hpp"
#include "lckit/predictors.hpp"
#include "lckit/safety_scenarios.hpp"
#include "lckit/scene_extraction.hpp"
#include "lckit/trajectory_data.hpp"

namespace fs = std::filesystem;
using namespace lckit;

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTransport = 3;

/// Deletes every registered output unless commit() is called, so a hard
/// failure never leaves partial files behind.
class OutputGuard
{
public:
  ~OutputGuard()
  {
    if (committed_) return;
    for (const auto & path : paths_) {
      std::error_code ec;
      fs::remove(path, ec);
    }
  }
  std::string track(const std::string & path)
  {
    paths_.push_back(path);
    return path;
  }
  void commit() { committed_ = true; }

private:
  std::vector<std::string> paths_;
  bool committed_{false};
};

struct RecordingPaths
{
  std::string tracks, tracks_meta, recording_meta;
};

/// Accepts either a directory holding highD triples (XX_tracks.csv plus
/// the matching XX_tracksMeta.csv / XX_recordingMeta.csv) or a direct path
/// to one *_tracks.csv file.
std::vector<RecordingPaths> resolve_inputs(const std::vector<std::string> & inputs)
{
  std::vector<RecordingPaths> out;
  auto add_prefix = [&](const fs::path & tracks) {
    auto stem = tracks.string();
    const std::string suffix = "_tracks.csv";
    if (stem.size() < suffix.size() || stem.substr(stem.size() - suffix.size()) != suffix) {
      throw ConfigError("expected a *_tracks.csv file: " + tracks.string());
    }
    const auto prefix = stem.substr(0, stem.size() - suffix.size());
    RecordingPaths paths{prefix + "_tracks.csv", prefix + "_tracksMeta.csv",
                         prefix + "_recordingMeta.csv"};
    for (const auto & p : {paths.tracks_meta, paths.recording_meta}) {
      if (!fs::exists(p)) throw ConfigError("missing sibling file " + p);
    }
    out.push_back(paths);
  };

  for (const auto & input : inputs) {
    if (fs::is_directory(input)) {
      std::vector<fs::path> found;
      for (const auto & entry : fs::directory_iterator(input)) {
        const auto name = entry.path().filename().string();
        if (name.size() > 11 && name.substr(name.size() - 11) == "_tracks.csv") {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      if (found.empty()) throw ConfigError("no *_tracks.csv files in " + input);
      for (const auto & p : found) add_prefix(p);
    } else {
      add_prefix(input);
    }
  }
  return out;
}

std::vector<Recording> load_recordings(const std::vector<std::string> & inputs)
{
  const auto paths = resolve_inputs(inputs);
  std::vector<std::future<Recording>> jobs;
  jobs.reserve(paths.size());
  for (const auto & p : paths) {
    jobs.push_back(std::async(std::launch::async, [p] {
      return load_recording_files(p.tracks, p.tracks_meta, p.recording_meta);
    }));
  }
  std::vector<Recording> recordings;
  recordings.reserve(jobs.size());
  for (auto & job : jobs) recordings.push_back(job.get());
  return recordings;
}

std::vector<ArchiveEntry> annotate_all(std::vector<SceneSnapshot> snapshots)
{
  std::vector<ArchiveEntry> entries;
  entries.reserve(snapshots.size());
  for (auto & snap : snapshots) {
    ArchiveEntry entry;
    entry.cot = annotate(snap);
    entry.snapshot = std::move(snap);
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<SceneSnapshot> snapshots_of(const std::vector<ArchiveEntry> & entries)
{
  std::vector<SceneSnapshot> snapshots;
  snapshots.reserve(entries.size());
  for (const auto & e : entries) snapshots.push_back(e.snapshot);
  return snapshots;
}

// ---- subcommand configs ----------------------------------------------------

struct BuildDatasetArgs
{
  std::vector<std::string> inputs;
  std::string plan_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> cadence;
  std::optional<double> lk_thin;
  std::string out_dir;
};

struct LabelArgs
{
  std::string snapshots;
  std::string out;
};

struct RenderArgs
{
  std::string snapshots;
  std::string mode{"train"};
  std::string out;
};

struct PredictArgs
{
  std::string snapshots;
  std::string backend{"rule_based"};
  std::string endpoint;
  std::string model;
  double timeout{60.0};
  int parallel{4};
  int retries{2};
  std::string out;
};

struct EvaluateArgs
{
  std::string predictions;
  std::string snapshots;
  std::string out_dir;
};

struct GenSafetyArgs
{
  std::string family{"all"};
  std::string out;
};

struct StatsArgs
{
  std::vector<std::string> inputs;
  std::optional<double> cadence;
  std::optional<double> lk_thin;
};

int run_build_dataset(const BuildDatasetArgs & args)
{
  auto plan = read_plan_file(args.plan_path);
  if (args.seed) plan.seed = *args.seed;
  if (args.cadence) plan.cadence_s = *args.cadence;
  if (args.lk_thin) plan.lk_thin_seconds = *args.lk_thin;

  const auto recordings = load_recordings(args.inputs);
  auto result = sample_dataset(recordings, plan);
  for (const auto & warning : result.warnings) std::cerr << "warning: " << warning << "\n";

  const auto entries = annotate_all(std::move(result.snapshots));

  fs::create_directories(args.out_dir);
  OutputGuard guard;
  const auto dir = fs::path(args.out_dir);
  write_snapshot_archive_file(guard.track((dir / "snapshots.jsonl").string()), entries);
  {
    std::ofstream train(guard.track((dir / "train.jsonl").string()), std::ios::binary);
    write_training_file(train, entries);
  }
  {
    std::ofstream meta(guard.track((dir / "metadata.jsonl").string()), std::ios::binary);
    write_metadata_file(meta, entries);
  }
  guard.commit();
  std::cerr << "wrote " << entries.size() << " samples to " << args.out_dir << "\n";
  return kExitOk;
}

int run_label(const LabelArgs & args)
{
  auto entries = read_snapshot_archive_file(args.snapshots);
  for (auto & entry : entries) entry.cot = annotate(entry.snapshot);
  OutputGuard guard;
  write_snapshot_archive_file(guard.track(args.out), entries);
  guard.commit();
  std::cerr << "labeled " << entries.size() << " snapshots\n";
  return kExitOk;
}

int run_render(const RenderArgs & args)
{
  const auto entries = read_snapshot_archive_file(args.snapshots);
  OutputGuard guard;
  std::ofstream out(guard.track(args.out), std::ios::binary);
  if (!out) throw ConfigError("cannot write " + args.out);
  if (args.mode == "train") {
    write_training_file(out, entries);
  } else {
    for (const auto & entry : entries) {
      const auto bundle = make_bundle(entry.snapshot, PromptMode::Inference);
      const nlohmann::json line{{"sample_id", entry.snapshot.sample_id},
                                {"text", assemble_llama_sample(bundle)}};
      out << line.dump() << "\n";
    }
  }
  guard.commit();
  std::cerr << "rendered " << entries.size() << " samples (" << args.mode << ")\n";
  return kExitOk;
}

int run_predict(const PredictArgs & args)
{
  PredictorConfig config;
  config.backend =
    args.backend == "remote" ? PredictorBackend::Remote : PredictorBackend::RuleBased;
  config.endpoint = args.endpoint;
  config.model_name = args.model;
  config.request_timeout_s = args.timeout;
  config.max_parallel_requests = args.parallel;
  config.retries = args.retries;
  if (const char * key = std::getenv("LCKIT_API_KEY")) config.api_key = key;
  config.validate();

  const auto entries = read_snapshot_archive_file(args.snapshots);
  const auto snapshots = snapshots_of(entries);

  const auto records = predict_batch(snapshots, config);

  // Individual failures are data; a remote batch with zero answers is an
  // outage and aborts without writing anything.
  if (config.backend == PredictorBackend::Remote && !records.empty()) {
    const bool total_outage = std::all_of(records.begin(), records.end(), [](const auto & r) {
      return !r.ok() && (r.failure_reason == "transport" || r.failure_reason == "timeout");
    });
    if (total_outage) {
      throw TransportError("all " + std::to_string(records.size()) +
                           " remote requests failed; check the endpoint");
    }
  }

  OutputGuard guard;
  write_predictions_file(guard.track(args.out), records);
  guard.commit();

  int failed = 0;
  for (const auto & r : records) failed += !r.ok();
  std::cerr << "predicted " << records.size() << " samples, " << failed << " failed\n";
  return kExitOk;
}

int run_evaluate(const EvaluateArgs & args)
{
  const auto entries = read_snapshot_archive_file(args.snapshots);
  const auto records = read_predictions_file(args.predictions);
  const auto report = build_report(snapshots_of(entries), records);

  fs::create_directories(args.out_dir);
  OutputGuard guard;
  const auto dir = fs::path(args.out_dir);
  auto write = [&](const char * name, ReportFormat format) {
    std::ofstream out(guard.track((dir / name).string()), std::ios::binary);
    if (!out) throw ConfigError(std::string("cannot write ") + name);
    out << emit_report(report, format);
  };
  write("report.txt", ReportFormat::TextTable);
  write("report.csv", ReportFormat::Csv);
  write("report.json", ReportFormat::Json);
  guard.commit();
  std::cerr << "evaluated " << report.total_samples << " samples ("
            << report.failed_intention << " failed)\n";
  return kExitOk;
}

int run_gen_safety(const GenSafetyArgs & args)
{
  std::vector<SceneSnapshot> snapshots;
  if (args.family == "all") {
    snapshots = generate_all_families();
  } else {
    snapshots = generate_family(default_family(scenario_family_from_string(args.family)));
  }
  const auto entries = annotate_all(std::move(snapshots));
  OutputGuard guard;
  write_snapshot_archive_file(guard.track(args.out), entries);
  guard.commit();
  std::cerr << "generated " << entries.size() << " safety snapshots\n";
  return kExitOk;
}

int run_stats(const StatsArgs & args)
{
  const auto recordings = load_recordings(args.inputs);
  StratificationPlan plan;
  if (args.cadence) plan.cadence_s = *args.cadence;
  if (args.lk_thin) plan.lk_thin_seconds = *args.lk_thin;
  const auto candidates = gather_candidates(recordings, plan);

  int tracks = 0, lc_tracks = 0, dropped = 0;
  for (const auto & rec : recordings) {
    tracks += static_cast<int>(rec.segments.size());
    dropped += rec.dropped_tracks;
    for (const auto & seg : rec.segments) lc_tracks += !detect_lane_changes(seg).empty();
  }
  std::cout << "recordings: " << recordings.size() << "\n";
  std::cout << "tracks: " << tracks << " (" << lc_tracks << " LC, " << (tracks - lc_tracks)
            << " LK, " << dropped << " dropped)\n";
  std::cout << "candidates:\n";
  for (const auto & [stratum, refs] : candidates) {
    std::cout << stratum << ": " << refs.size() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"lane-change dataset, prediction and evaluation toolchain"};
  app.require_subcommand(1);

  BuildDatasetArgs build_args;
  auto * build = app.add_subcommand(
    "build-dataset", "extract stratified samples and emit archive + training files");
  build->add_option("--input", build_args.inputs, "recording directory or *_tracks.csv")
    ->required()
    ->check(CLI::ExistingPath);
  build->add_option("--plan", build_args.plan_path, "stratification plan (json)")
    ->required()
    ->check(CLI::ExistingFile);
  build->add_option("--seed", build_args.seed, "override the plan's seed");
  build->add_option("--cadence", build_args.cadence, "override the grid spacing (s)");
  build->add_option("--lk-thin", build_args.lk_thin, "override LK thinning interval (s)");
  build->add_option("--out", build_args.out_dir, "output directory")->required();

  LabelArgs label_args;
  auto * label = app.add_subcommand("label", "(re)apply the rule annotations to an archive");
  label->add_option("--snapshots", label_args.snapshots, "snapshot archive")
    ->required()
    ->check(CLI::ExistingFile);
  label->add_option("--out", label_args.out, "output archive")->required();

  RenderArgs render_args;
  auto * render = app.add_subcommand("render", "render Llama-format samples from an archive");
  render->add_option("--snapshots", render_args.snapshots, "snapshot archive")
    ->required()
    ->check(CLI::ExistingFile);
  render->add_option("--mode", render_args.mode, "train or inference")
    ->check(CLI::IsMember({"train", "inference"}));
  render->add_option("--out", render_args.out, "output jsonl")->required();

  PredictArgs predict_args;
  auto * predict_cmd = app.add_subcommand("predict", "run a predictor over an archive");
  predict_cmd->add_option("--snapshots", predict_args.snapshots, "snapshot archive")
    ->required()
    ->check(CLI::ExistingFile);
  predict_cmd->add_option("--backend", predict_args.backend, "rule_based or remote")
    ->check(CLI::IsMember({"rule_based", "remote"}));
  predict_cmd->add_option("--endpoint", predict_args.endpoint, "chat-completions URL");
  predict_cmd->add_option("--model", predict_args.model, "remote model name");
  predict_cmd->add_option("--timeout", predict_args.timeout, "request timeout (s)");
  predict_cmd->add_option("--parallel", predict_args.parallel, "max in-flight requests");
  predict_cmd->add_option("--retries", predict_args.retries, "retries per request");
  predict_cmd->add_option("--out", predict_args.out, "predictions jsonl")->required();

  EvaluateArgs eval_args;
  auto * evaluate = app.add_subcommand("evaluate", "score predictions against an archive");
  evaluate->add_option("--predictions", eval_args.predictions, "predictions jsonl")
    ->required()
    ->check(CLI::ExistingFile);
  evaluate->add_option("--snapshots", eval_args.snapshots, "snapshot archive")
    ->required()
    ->check(CLI::ExistingFile);
  evaluate->add_option("--out", eval_args.out_dir, "report directory")->required();

  GenSafetyArgs safety_args;
  auto * safety = app.add_subcommand("gen-safety", "generate safety-critical scenario grids");
  safety->add_option("--family", safety_args.family,
                     "left_front_braking, right_front_braking, left_rear_accelerating, "
                     "right_rear_accelerating or all");
  safety->add_option("--out", safety_args.out, "output archive")->required();

  StatsArgs stats_args;
  auto * stats = app.add_subcommand("stats", "report per-stratum candidate counts");
  stats->add_option("--input", stats_args.inputs, "recording directory or *_tracks.csv")
    ->required()
    ->check(CLI::ExistingPath);
  stats->add_option("--cadence", stats_args.cadence, "grid spacing (s)");
  stats->add_option("--lk-thin", stats_args.lk_thin, "LK thinning interval (s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);  // prints the message or help text
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (build->parsed()) return run_build_dataset(build_args);
    if (label->parsed()) return run_label(label_args);
    if (render->parsed()) return run_render(render_args);
    if (predict_cmd->parsed()) return run_predict(predict_args);
    if (evaluate->parsed()) return run_evaluate(eval_args);
    if (safety->parsed()) return run_gen_safety(safety_args);
    if (stats->parsed()) return run_stats(stats_args);
  } catch (const TransportError & e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const ConfigError & e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error & e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
