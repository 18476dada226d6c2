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

#include "lckit/archive.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lckit/cot_labeler.hpp"
#include "lckit/errors.hpp"

namespace lckit
{

namespace
{

using nlohmann::json;

json state_to_json(const CanonicalState & s)
{
  return json{{"x", s.x},
              {"y", s.y},
              {"speed", s.speed},
              {"lateral_velocity", s.lateral_velocity},
              {"longitudinal_acceleration", s.longitudinal_acceleration}};
}

CanonicalState state_from_json(const json & j)
{
  return CanonicalState{j.at("x").get<double>(), j.at("y").get<double>(),
                        j.at("speed").get<double>(), j.at("lateral_velocity").get<double>(),
                        j.at("longitudinal_acceleration").get<double>()};
}

json neighbors_to_json(const NeighborSlots & neighbors)
{
  json out = json::object();
  for (int s = 0; s < kNumSlots; ++s) {
    const auto dir = static_cast<SlotDirection>(s);
    const auto & occupant = neighbors[dir];
    if (!occupant) {
      out[to_string(dir)] = nullptr;
    } else {
      out[to_string(dir)] = json{{"vehicle_class", to_string(occupant->vehicle_class)},
                                 {"speed", occupant->speed},
                                 {"relative_x", occupant->relative_x},
                                 {"relative_y", occupant->relative_y}};
    }
  }
  return out;
}

NeighborSlots neighbors_from_json(const json & j)
{
  NeighborSlots neighbors;
  for (int s = 0; s < kNumSlots; ++s) {
    const auto dir = static_cast<SlotDirection>(s);
    const auto it = j.find(to_string(dir));
    if (it == j.end() || it->is_null()) continue;
    NeighborInfo info;
    info.vehicle_class = vehicle_class_from_string(it->at("vehicle_class").get<std::string>());
    info.speed = it->at("speed").get<double>();
    info.relative_x = it->at("relative_x").get<double>();
    info.relative_y = it->at("relative_y").get<double>();
    neighbors[dir] = info;
  }
  return neighbors;
}

json points_to_json(const std::array<Point2d, kTrajectoryPoints> & points)
{
  json out = json::array();
  for (const auto & p : points) out.push_back(json::array({p.x, p.y}));
  return out;
}

std::array<Point2d, kTrajectoryPoints> points_from_json(const json & j)
{
  if (!j.is_array() || j.size() != kTrajectoryPoints) {
    throw IntegrityError("trajectory must contain exactly " +
                         std::to_string(kTrajectoryPoints) + " points");
  }
  std::array<Point2d, kTrajectoryPoints> points{};
  for (size_t i = 0; i < points.size(); ++i) {
    points[i] = Point2d{j.at(i).at(0).get<double>(), j.at(i).at(1).get<double>()};
  }
  return points;
}

json cot_to_json(const CotAnnotation & cot)
{
  json features = json::array();
  for (auto f : cot.features) features.push_back(to_string(f));
  return json{{"features", features}, {"behavior", to_string(cot.behavior)}};
}

CotAnnotation cot_from_json(const json & j)
{
  CotAnnotation cot;
  for (const auto & f : j.at("features")) cot.features.insert(feature_from_string(f));
  cot.behavior = behavior_from_string(j.at("behavior").get<std::string>());
  return cot;
}

template <typename Entry, typename ToJson>
void write_jsonl(std::ostream & out, const std::vector<Entry> & entries, ToJson && to)
{
  for (const auto & entry : entries) out << to(entry).dump() << "\n";
}

template <typename Entry, typename FromJson>
std::vector<Entry> read_jsonl(std::istream & in, FromJson && from)
{
  std::vector<Entry> entries;
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    try {
      entries.push_back(from(json::parse(line)));
    } catch (const json::exception & e) {
      throw ParseError("line " + std::to_string(row) + ": " + e.what());
    }
  }
  return entries;
}

std::ofstream open_out(const std::string & path)
{
  std::ofstream out(path, std::ios::binary);  // binary: byte-identical output
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  return in;
}

}  // namespace

json to_json(const ArchiveEntry & entry)
{
  const auto & snap = entry.snapshot;
  json history = json::array();
  for (const auto & s : snap.history) history.push_back(state_to_json(s));

  json j{{"sample_id", snap.sample_id},
         {"target_class", to_string(snap.target_class)},
         {"map",
          {{"lane_count", snap.map.lane_count},
           {"lane_position", to_string(snap.map.lane_position)},
           {"lane_width", snap.map.lane_width}}},
         {"history", history},
         {"neighbors", neighbors_to_json(snap.neighbors)},
         {"gt_intention", static_cast<int>(snap.gt_intention)},
         {"gt_trajectory", points_to_json(snap.gt_trajectory)},
         {"t_bucket", to_string(snap.t_bucket)},
         {"synthetic_gt", snap.synthetic_gt}};
  if (snap.advanced_prediction_time) {
    j["advanced_prediction_time"] = *snap.advanced_prediction_time;
  }
  if (entry.cot) j["cot"] = cot_to_json(*entry.cot);
  return j;
}

ArchiveEntry archive_entry_from_json(const json & j)
{
  ArchiveEntry entry;
  auto & snap = entry.snapshot;
  snap.sample_id = j.at("sample_id").get<std::string>();
  snap.target_class = vehicle_class_from_string(j.at("target_class").get<std::string>());
  const auto & map = j.at("map");
  snap.map.lane_count = map.at("lane_count").get<int>();
  snap.map.lane_position = lane_position_from_string(map.at("lane_position").get<std::string>());
  snap.map.lane_width = map.at("lane_width").get<double>();

  const auto & history = j.at("history");
  if (!history.is_array() || history.size() != kHistoryPoints) {
    throw IntegrityError("history must contain exactly " + std::to_string(kHistoryPoints) +
                         " states");
  }
  for (size_t i = 0; i < snap.history.size(); ++i) snap.history[i] = state_from_json(history.at(i));

  snap.neighbors = neighbors_from_json(j.at("neighbors"));
  const int intention = j.at("gt_intention").get<int>();
  if (intention < 0 || intention > 2) {
    throw IntegrityError("gt_intention must be 0, 1 or 2");
  }
  snap.gt_intention = static_cast<Intention>(intention);
  snap.gt_trajectory = points_from_json(j.at("gt_trajectory"));
  snap.t_bucket = t_bucket_from_string(j.at("t_bucket").get<std::string>());
  if (j.contains("advanced_prediction_time") && !j.at("advanced_prediction_time").is_null()) {
    snap.advanced_prediction_time = j.at("advanced_prediction_time").get<double>();
  }
  snap.synthetic_gt = j.value("synthetic_gt", false);
  if (j.contains("cot")) entry.cot = cot_from_json(j.at("cot"));
  return entry;
}

json to_json(const PredictionRecord & record)
{
  json j{{"sample_id", record.sample_id},
         {"parse_status", record.ok() ? "ok" : "failed"}};
  if (record.ok()) {
    j["intention"] = static_cast<int>(record.intention);
    j["trajectory"] = points_to_json(record.trajectory);
    json features = json::array();
    for (auto f : record.features) features.push_back(to_string(f));
    j["features"] = features;
    j["behavior"] = to_string(record.behavior);
    if (!record.explanation.empty()) j["explanation"] = record.explanation;
  } else {
    j["failure_reason"] = record.failure_reason;
    j["raw_text"] = record.raw_text;
  }
  return j;
}

PredictionRecord prediction_from_json(const json & j)
{
  PredictionRecord record;
  record.sample_id = j.at("sample_id").get<std::string>();
  const auto status = j.at("parse_status").get<std::string>();
  if (status == "ok") {
    record.parse_status = ParseStatus::Ok;
    record.intention = static_cast<Intention>(j.at("intention").get<int>());
    record.trajectory = points_from_json(j.at("trajectory"));
    for (const auto & f : j.at("features")) record.features.insert(feature_from_string(f));
    record.behavior = behavior_from_string(j.at("behavior").get<std::string>());
    record.explanation = j.value("explanation", "");
  } else if (status == "failed") {
    record.parse_status = ParseStatus::Failed;
    record.failure_reason = j.value("failure_reason", "");
    record.raw_text = j.value("raw_text", "");
  } else {
    throw ParseError("unknown parse_status '" + status + "'");
  }
  return record;
}

void write_snapshot_archive(std::ostream & out, const std::vector<ArchiveEntry> & entries)
{
  write_jsonl(out, entries, [](const ArchiveEntry & e) { return to_json(e); });
}

std::vector<ArchiveEntry> read_snapshot_archive(std::istream & in)
{
  return read_jsonl<ArchiveEntry>(in, [](const json & j) { return archive_entry_from_json(j); });
}

void write_snapshot_archive_file(const std::string & path,
                                 const std::vector<ArchiveEntry> & entries)
{
  auto out = open_out(path);
  write_snapshot_archive(out, entries);
}

std::vector<ArchiveEntry> read_snapshot_archive_file(const std::string & path)
{
  auto in = open_in(path);
  return read_snapshot_archive(in);
}

void write_predictions(std::ostream & out, const std::vector<PredictionRecord> & records)
{
  write_jsonl(out, records, [](const PredictionRecord & r) { return to_json(r); });
}

std::vector<PredictionRecord> read_predictions(std::istream & in)
{
  return read_jsonl<PredictionRecord>(in, [](const json & j) { return prediction_from_json(j); });
}

void write_predictions_file(const std::string & path,
                            const std::vector<PredictionRecord> & records)
{
  auto out = open_out(path);
  write_predictions(out, records);
}

std::vector<PredictionRecord> read_predictions_file(const std::string & path)
{
  auto in = open_in(path);
  return read_predictions(in);
}

void write_training_file(std::ostream & out, const std::vector<ArchiveEntry> & entries)
{
  for (const auto & entry : entries) {
    PromptBundle bundle;
    bundle.system_message = system_message();
    bundle.user_message = render_user_message(entry.snapshot, PromptMode::Training);
    const auto annotation = entry.cot ? *entry.cot : annotate(entry.snapshot);
    bundle.answer =
      render_answer(annotation, entry.snapshot.gt_intention, entry.snapshot.gt_trajectory);
    json j{{"sample_id", entry.snapshot.sample_id}, {"text", assemble_llama_sample(bundle)}};
    out << j.dump() << "\n";
  }
}

void write_metadata_file(std::ostream & out, const std::vector<ArchiveEntry> & entries)
{
  for (const auto & entry : entries) {
    const auto & snap = entry.snapshot;
    json j{{"sample_id", snap.sample_id},
           {"gt_intention", static_cast<int>(snap.gt_intention)},
           {"t_bucket", to_string(snap.t_bucket)},
           {"gt_trajectory", points_to_json(snap.gt_trajectory)}};
    if (snap.advanced_prediction_time) {
      j["advanced_prediction_time"] = *snap.advanced_prediction_time;
    }
    if (entry.cot) j["cot"] = cot_to_json(*entry.cot);
    out << j.dump() << "\n";
  }
}

namespace
{

StratificationPlan plan_from_json(const json & j)
{
  StratificationPlan plan;
  if (!j.contains("seed")) throw ConfigError("plan: 'seed' is required");
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.cadence_s = j.value("cadence_s", kStepSeconds);
  if (plan.cadence_s <= 0) throw ConfigError("plan: cadence_s must be > 0");
  plan.lk_thin_seconds = j.value("lk_thin_seconds", 4.0);
  if (plan.lk_thin_seconds <= 0) throw ConfigError("plan: lk_thin_seconds must be > 0");

  const auto & counts = j.at("counts");
  plan.lk = counts.value("LK", 0);
  auto read_family = [&](const char * name, std::map<TBucket, int> & into) {
    if (!counts.contains(name)) return;
    for (const auto & [key, value] : counts.at(name).items()) {
      const auto bucket = t_bucket_from_string(key);
      if (bucket == TBucket::LK) throw ConfigError("plan: LC families use buckets T01..T34");
      into[bucket] = value.get<int>();
    }
  };
  read_family("LLC", plan.llc);
  read_family("RLC", plan.rlc);

  if (plan.lk < 0) throw ConfigError("plan: counts must be non-negative");
  for (const auto & [b, n] : plan.llc) {
    if (n < 0) throw ConfigError("plan: counts must be non-negative");
  }
  for (const auto & [b, n] : plan.rlc) {
    if (n < 0) throw ConfigError("plan: counts must be non-negative");
  }
  return plan;
}

}  // namespace

StratificationPlan parse_plan(const std::string & text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception & e) {
    throw ConfigError(std::string("cannot parse plan: ") + e.what());
  }
  try {
    return plan_from_json(j);
  } catch (const json::exception & e) {
    throw ConfigError(std::string("invalid plan: ") + e.what());
  }
}

StratificationPlan read_plan_file(const std::string & path)
{
  auto in = open_in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_plan(buffer.str());
}

}  // namespace lckit
