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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lckit/archive.hpp"
#include "lckit/cot_labeler.hpp"
#include "lckit/errors.hpp"
#include "lckit/evaluation.hpp"
#include "lckit/predictors.hpp"
#include "lckit/prompt_codec.hpp"
#include "lckit/safety_scenarios.hpp"
#include "lckit/scene_extraction.hpp"
#include "lckit/trajectory_data.hpp"

namespace py = pybind11;
using namespace lckit;

PYBIND11_MODULE(_lckit, m)
{
  m.doc() = "lane-change dataset, prediction and evaluation toolchain";

  py::register_exception<Error>(m, "LckitError");

  py::enum_<VehicleClass>(m, "VehicleClass")
    .value("Car", VehicleClass::Car)
    .value("Truck", VehicleClass::Truck);
  py::enum_<DrivingDirection>(m, "DrivingDirection")
    .value("Upper", DrivingDirection::Upper)
    .value("Lower", DrivingDirection::Lower);
  py::enum_<LanePosition>(m, "LanePosition")
    .value("Leftmost", LanePosition::Leftmost)
    .value("Middle", LanePosition::Middle)
    .value("Rightmost", LanePosition::Rightmost);
  py::enum_<Intention>(m, "Intention")
    .value("KeepLane", Intention::KeepLane)
    .value("LeftLaneChange", Intention::LeftLaneChange)
    .value("RightLaneChange", Intention::RightLaneChange);
  py::enum_<TBucket>(m, "TBucket")
    .value("LK", TBucket::LK)
    .value("T01", TBucket::T01)
    .value("T12", TBucket::T12)
    .value("T23", TBucket::T23)
    .value("T34", TBucket::T34);
  py::enum_<SlotDirection>(m, "SlotDirection")
    .value("Ahead", SlotDirection::Ahead)
    .value("LeftFront", SlotDirection::LeftFront)
    .value("RightFront", SlotDirection::RightFront)
    .value("LeftSide", SlotDirection::LeftSide)
    .value("RightSide", SlotDirection::RightSide)
    .value("Rear", SlotDirection::Rear)
    .value("LeftRear", SlotDirection::LeftRear)
    .value("RightRear", SlotDirection::RightRear);
  py::enum_<Feature>(m, "Feature")
    .value("SignificantLateralMovement", Feature::SignificantLateralMovement)
    .value("HighLongitudinalAcceleration", Feature::HighLongitudinalAcceleration)
    .value("SignificantDeceleration", Feature::SignificantDeceleration)
    .value("AheadFree", Feature::AheadFree)
    .value("AheadBlocked", Feature::AheadBlocked)
    .value("LeftFrontFree", Feature::LeftFrontFree)
    .value("LeftFrontBlocked", Feature::LeftFrontBlocked)
    .value("RightFrontFree", Feature::RightFrontFree)
    .value("RightFrontBlocked", Feature::RightFrontBlocked)
    .value("TruckAheadWithin100m", Feature::TruckAheadWithin100m)
    .value("TargetIsTruck", Feature::TargetIsTruck);
  py::enum_<Behavior>(m, "Behavior")
    .value("LeftOvertake", Behavior::LeftOvertake)
    .value("LeftToFastLane", Behavior::LeftToFastLane)
    .value("IrregularLeft", Behavior::IrregularLeft)
    .value("RightOvertake", Behavior::RightOvertake)
    .value("RightToSlowLane", Behavior::RightToSlowLane)
    .value("IrregularRight", Behavior::IrregularRight)
    .value("FollowingKeep", Behavior::FollowingKeep)
    .value("NormalKeep", Behavior::NormalKeep);
  py::enum_<PromptMode>(m, "PromptMode")
    .value("Training", PromptMode::Training)
    .value("Inference", PromptMode::Inference);
  py::enum_<ParseStatus>(m, "ParseStatus")
    .value("Ok", ParseStatus::Ok)
    .value("Failed", ParseStatus::Failed);
  py::enum_<ScenarioFamilyName>(m, "ScenarioFamilyName")
    .value("LeftFrontBraking", ScenarioFamilyName::LeftFrontBraking)
    .value("RightFrontBraking", ScenarioFamilyName::RightFrontBraking)
    .value("LeftRearAccelerating", ScenarioFamilyName::LeftRearAccelerating)
    .value("RightRearAccelerating", ScenarioFamilyName::RightRearAccelerating);

  py::class_<Point2d>(m, "Point2d")
    .def(py::init<>())
    .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
    .def_readwrite("x", &Point2d::x)
    .def_readwrite("y", &Point2d::y)
    .def("__repr__", [](const Point2d & p) {
      return "Point2d(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
    });

  py::class_<CanonicalState>(m, "CanonicalState")
    .def(py::init<>())
    .def_readwrite("x", &CanonicalState::x)
    .def_readwrite("y", &CanonicalState::y)
    .def_readwrite("speed", &CanonicalState::speed)
    .def_readwrite("lateral_velocity", &CanonicalState::lateral_velocity)
    .def_readwrite("longitudinal_acceleration", &CanonicalState::longitudinal_acceleration);

  py::class_<NeighborInfo>(m, "NeighborInfo")
    .def(py::init<>())
    .def_readwrite("vehicle_class", &NeighborInfo::vehicle_class)
    .def_readwrite("speed", &NeighborInfo::speed)
    .def_readwrite("relative_x", &NeighborInfo::relative_x)
    .def_readwrite("relative_y", &NeighborInfo::relative_y);

  py::class_<MapSummary>(m, "MapSummary")
    .def(py::init<>())
    .def_readwrite("lane_count", &MapSummary::lane_count)
    .def_readwrite("lane_position", &MapSummary::lane_position)
    .def_readwrite("lane_width", &MapSummary::lane_width);

  py::class_<SceneSnapshot>(m, "SceneSnapshot")
    .def(py::init<>())
    .def_readwrite("sample_id", &SceneSnapshot::sample_id)
    .def_readwrite("target_class", &SceneSnapshot::target_class)
    .def_readwrite("map", &SceneSnapshot::map)
    .def_readwrite("history", &SceneSnapshot::history)
    .def_readwrite("gt_intention", &SceneSnapshot::gt_intention)
    .def_readwrite("gt_trajectory", &SceneSnapshot::gt_trajectory)
    .def_readwrite("t_bucket", &SceneSnapshot::t_bucket)
    .def_readwrite("advanced_prediction_time", &SceneSnapshot::advanced_prediction_time)
    .def_readwrite("synthetic_gt", &SceneSnapshot::synthetic_gt)
    .def("neighbor",
         [](const SceneSnapshot & s, SlotDirection d) { return s.neighbors[d]; })
    .def("set_neighbor",
         [](SceneSnapshot & s, SlotDirection d, const std::optional<NeighborInfo> & info) {
           s.neighbors[d] = info;
         });

  py::class_<CotAnnotation>(m, "CotAnnotation")
    .def(py::init<>())
    .def_readwrite("features", &CotAnnotation::features)
    .def_readwrite("behavior", &CotAnnotation::behavior);

  py::class_<PredictionRecord>(m, "PredictionRecord")
    .def(py::init<>())
    .def_readwrite("sample_id", &PredictionRecord::sample_id)
    .def_readwrite("parse_status", &PredictionRecord::parse_status)
    .def_readwrite("failure_reason", &PredictionRecord::failure_reason)
    .def_readwrite("intention", &PredictionRecord::intention)
    .def_readwrite("trajectory", &PredictionRecord::trajectory)
    .def_readwrite("features", &PredictionRecord::features)
    .def_readwrite("behavior", &PredictionRecord::behavior)
    .def_readwrite("explanation", &PredictionRecord::explanation)
    .def_readwrite("raw_text", &PredictionRecord::raw_text)
    .def("ok", &PredictionRecord::ok);

  py::class_<RecordingMeta>(m, "RecordingMeta")
    .def_readonly("recording_id", &RecordingMeta::recording_id)
    .def_readonly("frame_rate", &RecordingMeta::frame_rate)
    .def_readonly("upper_lane_markings", &RecordingMeta::upper_lane_markings)
    .def_readonly("lower_lane_markings", &RecordingMeta::lower_lane_markings);

  py::class_<Recording>(m, "Recording")
    .def_readonly("meta", &Recording::meta)
    .def_readonly("dropped_tracks", &Recording::dropped_tracks)
    .def("track_count", [](const Recording & r) { return r.segments.size(); });

  py::class_<StratificationPlan>(m, "StratificationPlan")
    .def(py::init<>())
    .def_readwrite("lk", &StratificationPlan::lk)
    .def_readwrite("llc", &StratificationPlan::llc)
    .def_readwrite("rlc", &StratificationPlan::rlc)
    .def_readwrite("seed", &StratificationPlan::seed)
    .def_readwrite("cadence_s", &StratificationPlan::cadence_s)
    .def_readwrite("lk_thin_seconds", &StratificationPlan::lk_thin_seconds);

  py::class_<ClassMetrics>(m, "ClassMetrics")
    .def_readonly("precision", &ClassMetrics::precision)
    .def_readonly("recall", &ClassMetrics::recall)
    .def_readonly("f1", &ClassMetrics::f1);

  py::class_<IntentionMetrics>(m, "IntentionMetrics")
    .def_readonly("lk", &IntentionMetrics::lk)
    .def_readonly("llc", &IntentionMetrics::llc)
    .def_readonly("rlc", &IntentionMetrics::rlc)
    .def_readonly("macro", &IntentionMetrics::macro)
    .def_readonly("support", &IntentionMetrics::support);

  py::class_<EvalReport>(m, "EvalReport")
    .def_readonly("per_bucket", &EvalReport::per_bucket)
    .def_readonly("overall", &EvalReport::overall)
    .def_readonly("bucket_mean_macro", &EvalReport::bucket_mean_macro)
    .def_readonly("rmse_lateral", &EvalReport::rmse_lateral)
    .def_readonly("rmse_longitudinal", &EvalReport::rmse_longitudinal)
    .def_readonly("rmse_support", &EvalReport::rmse_support)
    .def_readonly("cot_mean", &EvalReport::cot_mean)
    .def_readonly("cot_distribution", &EvalReport::cot_distribution)
    .def_readonly("cot_support", &EvalReport::cot_support)
    .def_readonly("failed_intention", &EvalReport::failed_intention)
    .def_readonly("failed_trajectory", &EvalReport::failed_trajectory)
    .def_readonly("evaluated_samples", &EvalReport::evaluated_samples)
    .def_readonly("total_samples", &EvalReport::total_samples)
    .def_readonly("sample_counts", &EvalReport::sample_counts);

  py::class_<ArchiveEntry>(m, "ArchiveEntry")
    .def(py::init<>())
    .def_readwrite("snapshot", &ArchiveEntry::snapshot)
    .def_readwrite("cot", &ArchiveEntry::cot);

  py::class_<ScenarioFamily>(m, "ScenarioFamily")
    .def_readwrite("name", &ScenarioFamily::name)
    .def_readwrite("speed_grid", &ScenarioFamily::speed_grid)
    .def_readwrite("distance_grid", &ScenarioFamily::distance_grid)
    .def_readwrite("lc_direction", &ScenarioFamily::lc_direction)
    .def_readwrite("probe_slot", &ScenarioFamily::probe_slot);

  // trajectory-data
  m.def("load_recording", &load_recording_files, py::arg("tracks_path"),
        py::arg("tracks_meta_path"), py::arg("recording_meta_path"),
        "Parse a highD-format recording from its three CSV files.");

  // scene-extraction
  m.def("advanced_prediction_time", &advanced_prediction_time, py::arg("lc_frame"),
        py::arg("current_frame"), py::arg("frame_rate"));
  m.def("bucket_for", &bucket_for, py::arg("t_seconds"));
  m.def(
    "sample_dataset",
    [](const std::vector<Recording> & recordings, const StratificationPlan & plan) {
      auto result = sample_dataset(recordings, plan);
      return py::make_tuple(result.snapshots, result.warnings);
    },
    py::arg("recordings"), py::arg("plan"),
    "Stratified, seed-deterministic sampling; returns (snapshots, warnings).");
  m.def(
    "candidate_counts",
    [](const std::vector<Recording> & recordings, const StratificationPlan & plan) {
      std::map<std::string, size_t> counts;
      for (const auto & [name, refs] : gather_candidates(recordings, plan)) {
        counts[name] = refs.size();
      }
      return counts;
    },
    py::arg("recordings"), py::arg("plan"));

  // cot-labeler
  m.def("label_notable_features", &label_notable_features, py::arg("snapshot"));
  m.def("classify_potential_behavior", &classify_potential_behavior, py::arg("snapshot"),
        py::arg("features"));
  m.def("annotate", &annotate, py::arg("snapshot"));

  // prompt-codec
  m.def("system_message", [] { return system_message(); });
  m.def("render_user_message", &render_user_message, py::arg("snapshot"),
        py::arg("mode") = PromptMode::Training);
  m.def("render_answer", &render_answer, py::arg("annotation"), py::arg("intention"),
        py::arg("trajectory"));
  m.def(
    "make_llama_sample",
    [](const SceneSnapshot & snapshot, PromptMode mode) {
      return assemble_llama_sample(make_bundle(snapshot, mode));
    },
    py::arg("snapshot"), py::arg("mode") = PromptMode::Training);
  m.def("parse_prediction", &parse_prediction, py::arg("output_text"));

  // predictors
  m.def("rule_based_predict", &rule_based_predict, py::arg("snapshot"));
  m.def("kinematic_trajectory", &kinematic_trajectory, py::arg("snapshot"), py::arg("intention"));

  // evaluation
  m.def("intention_metrics", &intention_metrics, py::arg("pairs"));
  m.def("trajectory_rmse", &trajectory_rmse, py::arg("pairs"), py::arg("horizon_s"));
  m.def("cot_score", &cot_score, py::arg("gt"), py::arg("pred_features"), py::arg("pred_behavior"));
  m.def("build_report", &build_report, py::arg("snapshots"), py::arg("records"));
  m.def(
    "emit_report",
    [](const EvalReport & report, const std::string & format) {
      if (format == "text") return emit_report(report, ReportFormat::TextTable);
      if (format == "csv") return emit_report(report, ReportFormat::Csv);
      if (format == "json") return emit_report(report, ReportFormat::Json);
      throw ConfigError("format must be text, csv or json");
    },
    py::arg("report"), py::arg("format") = "text");

  // safety-scenarios
  py::class_<TargetProfile>(m, "TargetProfile")
    .def(py::init<>())
    .def_readwrite("speed_kmh", &TargetProfile::speed_kmh)
    .def_readwrite("vehicle_class", &TargetProfile::vehicle_class);

  m.def("default_family", &default_family, py::arg("name"));
  m.def("generate_family", &generate_family, py::arg("family"),
        py::arg("target_profile") = TargetProfile{});
  m.def("generate_all_families", &generate_all_families,
        py::arg("target_profile") = TargetProfile{});

  // archives
  m.def("read_snapshot_archive", &read_snapshot_archive_file, py::arg("path"));
  m.def("write_snapshot_archive", &write_snapshot_archive_file, py::arg("path"),
        py::arg("entries"));
  m.def("read_predictions", &read_predictions_file, py::arg("path"));
  m.def("write_predictions", &write_predictions_file, py::arg("path"), py::arg("records"));
  m.def("parse_plan", &parse_plan, py::arg("text"));
  m.def("read_plan_file", &read_plan_file, py::arg("path"));

  m.attr("__version__") = "0.1.0";
  m.attr("HISTORY_POINTS") = kHistoryPoints;
  m.attr("TRAJECTORY_POINTS") = kTrajectoryPoints;
}
