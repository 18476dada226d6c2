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

#include "lckit/trajectory_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "lckit/errors.hpp"

namespace lckit
{

namespace
{

std::vector<std::string> split(const std::string & line, char sep)
{
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string strip(std::string s)
{
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ')) s.pop_back();
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  return s;
}

double parse_double(const std::string & cell, const std::string & file, long row)
{
  double value = 0.0;
  const char * begin = cell.data();
  const char * end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ParseError(file + " row " + std::to_string(row) + ": cannot parse '" + cell +
                     "' as a number");
  }
  return value;
}

std::int64_t parse_int(const std::string & cell, const std::string & file, long row)
{
  std::int64_t value = 0;
  const char * begin = cell.data();
  const char * end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(file + " row " + std::to_string(row) + ": cannot parse '" + cell +
                     "' as an integer");
  }
  return value;
}

/// Header row -> column index map, checking the required columns exist.
std::unordered_map<std::string, int> read_header(
  std::istream & in, const std::string & file, const std::vector<std::string> & required)
{
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(file + ": empty input, header row expected");
  auto cells = split(strip(line), ',');
  std::unordered_map<std::string, int> idx;
  for (int i = 0; i < static_cast<int>(cells.size()); ++i) idx.emplace(strip(cells[i]), i);
  for (const auto & col : required) {
    if (!idx.count(col)) throw SchemaError(file + ": missing required column '" + col + "'");
  }
  return idx;
}

std::vector<double> parse_markings(const std::string & cell, const std::string & file, long row)
{
  std::vector<double> values;
  for (const auto & part : split(cell, ';')) values.push_back(parse_double(strip(part), file, row));
  if (values.size() < 2) {
    throw IntegrityError(file + " row " + std::to_string(row) +
                         ": lane markings need at least two values");
  }
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] <= values[i - 1]) {
      throw IntegrityError(file + " row " + std::to_string(row) +
                           ": lane markings must be strictly monotonic");
    }
  }
  return values;
}

struct TrackMetaRow
{
  VehicleClass vehicle_class;
  DrivingDirection direction;
};

}  // namespace

const TrackFrame & TrackSegment::at_frame(std::int64_t frame_number) const
{
  return frames.at(static_cast<size_t>(frame_number - first_frame()));
}

Recording load_recording(
  std::istream & tracks_source, std::istream & tracks_meta_source,
  std::istream & recording_meta_source)
{
  Recording rec;

  {  // recordingMeta: single data row
    auto idx = read_header(recording_meta_source, "recordingMeta",
                           {"id", "frameRate", "upperLaneMarkings", "lowerLaneMarkings"});
    std::string line;
    if (!std::getline(recording_meta_source, line) || strip(line).empty()) {
      throw IntegrityError("recordingMeta: no data row");
    }
    auto cells = split(strip(line), ',');
    auto cell = [&](const char * name) -> std::string {
      int i = idx.at(name);
      if (i >= static_cast<int>(cells.size()))
        throw ParseError(std::string("recordingMeta row 2: missing value for ") + name);
      return strip(cells[i]);
    };
    rec.meta.recording_id = cell("id");
    rec.meta.frame_rate = parse_double(cell("frameRate"), "recordingMeta", 2);
    if (!(rec.meta.frame_rate > 0)) throw IntegrityError("recordingMeta: frameRate must be > 0");
    rec.meta.upper_lane_markings = parse_markings(cell("upperLaneMarkings"), "recordingMeta", 2);
    rec.meta.lower_lane_markings = parse_markings(cell("lowerLaneMarkings"), "recordingMeta", 2);
  }

  std::map<std::int64_t, TrackMetaRow> meta_rows;
  {  // tracksMeta
    auto idx = read_header(tracks_meta_source, "tracksMeta", {"id", "class", "drivingDirection"});
    std::string line;
    long row = 1;
    while (std::getline(tracks_meta_source, line)) {
      ++row;
      auto stripped = strip(line);
      if (stripped.empty()) continue;
      auto cells = split(stripped, ',');
      auto cell = [&](const char * name) -> std::string {
        int i = idx.at(name);
        if (i >= static_cast<int>(cells.size())) {
          throw ParseError("tracksMeta row " + std::to_string(row) +
                           ": missing value for column '" + std::string(name) + "'");
        }
        return strip(cells[i]);
      };
      auto id = parse_int(cell("id"), "tracksMeta", row);
      TrackMetaRow m{};
      m.vehicle_class = vehicle_class_from_string(cell("class"));
      auto dir = parse_int(cell("drivingDirection"), "tracksMeta", row);
      if (dir != 1 && dir != 2) {
        throw IntegrityError("tracksMeta row " + std::to_string(row) +
                             ": drivingDirection must be 1 (upper) or 2 (lower)");
      }
      m.direction = dir == 1 ? DrivingDirection::Upper : DrivingDirection::Lower;
      if (!meta_rows.emplace(id, m).second) {
        throw IntegrityError("tracksMeta row " + std::to_string(row) + ": duplicate track id " +
                             std::to_string(id));
      }
    }
  }

  std::map<std::int64_t, TrackSegment> tracks;
  {  // tracks
    const std::vector<std::string> required{"frame",     "id",        "x",
                                            "y",         "width",     "height",
                                            "xVelocity", "yVelocity", "xAcceleration",
                                            "yAcceleration", "laneId"};
    auto idx = read_header(tracks_source, "tracks", required);
    std::string line;
    long row = 1;
    while (std::getline(tracks_source, line)) {
      ++row;
      auto stripped = strip(line);
      if (stripped.empty()) continue;
      auto cells = split(stripped, ',');
      auto cell = [&](const char * name) -> std::string {
        int i = idx.at(name);
        if (i >= static_cast<int>(cells.size())) {
          throw ParseError("tracks row " + std::to_string(row) + ": missing value for column '" +
                           std::string(name) + "'");
        }
        return strip(cells[i]);
      };
      auto id = parse_int(cell("id"), "tracks", row);
      auto meta_it = meta_rows.find(id);
      if (meta_it == meta_rows.end()) {
        throw IntegrityError("tracks row " + std::to_string(row) + ": track " +
                             std::to_string(id) + " has no tracksMeta entry");
      }
      auto & seg = tracks[id];
      if (seg.frames.empty()) {
        seg.track_id = id;
        seg.vehicle_class = meta_it->second.vehicle_class;
        seg.driving_direction = meta_it->second.direction;
        // highD bounding boxes: "width" extends along x (vehicle length),
        // "height" along y (vehicle width).
        seg.length = parse_double(cell("width"), "tracks", row);
        seg.width = parse_double(cell("height"), "tracks", row);
      }
      TrackFrame f{};
      f.frame = parse_int(cell("frame"), "tracks", row);
      f.x = parse_double(cell("x"), "tracks", row);
      // Flip the image-down y axis once at ingestion; downstream code sees
      // "driver's left is up" for lower-direction travel.
      f.y = -parse_double(cell("y"), "tracks", row);
      f.x_velocity = parse_double(cell("xVelocity"), "tracks", row);
      f.y_velocity = -parse_double(cell("yVelocity"), "tracks", row);
      f.x_acceleration = parse_double(cell("xAcceleration"), "tracks", row);
      f.y_acceleration = -parse_double(cell("yAcceleration"), "tracks", row);
      f.lane_id = static_cast<int>(parse_int(cell("laneId"), "tracks", row));
      seg.frames.push_back(f);
    }
  }

  for (auto & [id, seg] : tracks) {
    std::sort(seg.frames.begin(), seg.frames.end(),
              [](const TrackFrame & a, const TrackFrame & b) { return a.frame < b.frame; });
    for (size_t i = 1; i < seg.frames.size(); ++i) {
      if (seg.frames[i].frame == seg.frames[i - 1].frame) {
        throw IntegrityError("track " + std::to_string(id) + ": duplicate frame " +
                             std::to_string(seg.frames[i].frame));
      }
      if (seg.frames[i].frame != seg.frames[i - 1].frame + 1) {
        throw IntegrityError("track " + std::to_string(id) + ": gap in frame indices between " +
                             std::to_string(seg.frames[i - 1].frame) + " and " +
                             std::to_string(seg.frames[i].frame));
      }
    }
  }

  for (const auto & [id, m] : meta_rows) {
    if (!tracks.count(id)) {
      throw IntegrityError("tracksMeta lists track " + std::to_string(id) +
                           " but the tracks file has no frames for it");
    }
  }

  // Mainline lanes only: drop tracks that ever leave the marking-derived
  // lane range of their direction (on-/off-ramps).
  for (auto & [id, seg] : tracks) {
    const int lo = rec.meta.first_lane_id(seg.driving_direction);
    const int hi = rec.meta.last_lane_id(seg.driving_direction);
    const bool mainline = std::all_of(
      seg.frames.begin(), seg.frames.end(),
      [&](const TrackFrame & f) { return f.lane_id >= lo && f.lane_id <= hi; });
    if (mainline) {
      rec.segments.push_back(std::move(seg));
    } else {
      ++rec.dropped_tracks;
    }
  }

  return rec;
}

Recording load_recording_files(
  const std::string & tracks_path, const std::string & tracks_meta_path,
  const std::string & recording_meta_path)
{
  std::ifstream tracks(tracks_path);
  if (!tracks) throw ConfigError("cannot open " + tracks_path);
  std::ifstream tracks_meta(tracks_meta_path);
  if (!tracks_meta) throw ConfigError("cannot open " + tracks_meta_path);
  std::ifstream rec_meta(recording_meta_path);
  if (!rec_meta) throw ConfigError("cannot open " + recording_meta_path);
  return load_recording(tracks, tracks_meta, rec_meta);
}

CanonicalState canonicalize_frame(
  const TrackFrame & frame, const Anchor & anchor, DrivingDirection anchor_direction)
{
  const double mirror = anchor_direction == DrivingDirection::Upper ? -1.0 : 1.0;
  CanonicalState s{};
  s.x = mirror * (frame.x - anchor.x);
  s.y = mirror * (frame.y - anchor.y);
  s.speed = 3.6 * std::hypot(frame.x_velocity, frame.y_velocity);
  s.lateral_velocity = 3.6 * mirror * frame.y_velocity;
  s.longitudinal_acceleration = mirror * frame.x_acceleration;
  return s;
}

std::vector<CanonicalState> canonicalize(
  const TrackSegment & segment, const Anchor & anchor, DrivingDirection anchor_direction)
{
  std::vector<CanonicalState> out;
  out.reserve(segment.frames.size());
  for (const auto & f : segment.frames) out.push_back(canonicalize_frame(f, anchor, anchor_direction));
  return out;
}

int lane_index_from_left(int lane_id, const RecordingMeta & meta, DrivingDirection direction)
{
  const int lo = meta.first_lane_id(direction);
  const int hi = meta.last_lane_id(direction);
  if (lane_id < lo || lane_id > hi) {
    throw InvalidLaneError("lane id " + std::to_string(lane_id) + " outside the " +
                           to_string(direction) + " direction's range [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "]");
  }
  // Lower lanes count up from the median (driver's left), upper lanes down.
  return direction == DrivingDirection::Lower ? lane_id - lo : hi - lane_id;
}

std::pair<LanePosition, int> lane_position(
  int lane_id, const RecordingMeta & meta, DrivingDirection direction)
{
  const int count = meta.lane_count(direction);
  const int idx = lane_index_from_left(lane_id, meta, direction);
  if (count == 1) return {LanePosition::Rightmost, count};
  if (idx == 0) return {LanePosition::Leftmost, count};
  if (idx == count - 1) return {LanePosition::Rightmost, count};
  return {LanePosition::Middle, count};
}

double lane_width(int lane_id, const RecordingMeta & meta, DrivingDirection direction)
{
  const auto & markings = direction == DrivingDirection::Upper ? meta.upper_lane_markings
                                                               : meta.lower_lane_markings;
  const int band = lane_id - meta.first_lane_id(direction);
  if (band < 0 || band + 1 >= static_cast<int>(markings.size())) return 3.5;
  const double w = markings[band + 1] - markings[band];
  return w > 0.0 ? w : 3.5;
}

}  // namespace lckit
