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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lckit/types.hpp"

namespace lckit
{

/// Per-recording metadata: frame rate and the lane markings of both roadways.
/// Markings are lateral positions in the recording's raw frame, strictly
/// monotonic, at least two per direction (lanes per direction = markings - 1).
struct RecordingMeta
{
  std::string recording_id;
  double frame_rate{25.0};  // Hz
  std::vector<double> upper_lane_markings;
  std::vector<double> lower_lane_markings;

  int upper_lane_count() const { return static_cast<int>(upper_lane_markings.size()) - 1; }
  int lower_lane_count() const { return static_cast<int>(lower_lane_markings.size()) - 1; }
  int lane_count(DrivingDirection d) const
  {
    return d == DrivingDirection::Upper ? upper_lane_count() : lower_lane_count();
  }

  // highD lane numbering: id 1 lies above the upper roadway, the upper lanes
  // are 2..N_u, one id is skipped for the median, the lower lanes are
  // N_u+2..N_u+N_l (N_u, N_l = number of markings per direction).
  int first_lane_id(DrivingDirection d) const
  {
    return d == DrivingDirection::Upper ? 2
                                        : static_cast<int>(upper_lane_markings.size()) + 2;
  }
  int last_lane_id(DrivingDirection d) const
  {
    return first_lane_id(d) + lane_count(d) - 1;
  }
};

struct TrackFrame
{
  std::int64_t frame{0};
  double x{0.0};
  double y{0.0};  // stored driver-up: the CSV value is negated at load
  double x_velocity{0.0};
  double y_velocity{0.0};
  double x_acceleration{0.0};
  double y_acceleration{0.0};
  int lane_id{0};
};

/// One vehicle's gap-free time series within a recording.
struct TrackSegment
{
  std::int64_t track_id{0};
  VehicleClass vehicle_class{VehicleClass::Car};
  DrivingDirection driving_direction{DrivingDirection::Lower};
  std::vector<TrackFrame> frames;
  double width{0.0};   // m, lateral extent
  double length{0.0};  // m, longitudinal extent

  std::int64_t first_frame() const { return frames.front().frame; }
  std::int64_t last_frame() const { return frames.back().frame; }
  /// Frame lookup by index; valid because frame numbers are gap-free.
  const TrackFrame & at_frame(std::int64_t frame_number) const;
  bool has_frame(std::int64_t frame_number) const
  {
    return !frames.empty() && frame_number >= first_frame() && frame_number <= last_frame();
  }
};

struct Recording
{
  RecordingMeta meta;
  std::vector<TrackSegment> segments;
  int dropped_tracks{0};  // tracks discarded for off-mainline lane ids
};

/// Parse a highD-format recording from its three CSV streams.
/// Required columns: tracks frame,id,x,y,width,height,xVelocity,yVelocity,
/// xAcceleration,yAcceleration,laneId; tracksMeta id,class,drivingDirection;
/// recordingMeta id,frameRate,upperLaneMarkings,lowerLaneMarkings.
/// Throws SchemaError, ParseError or IntegrityError.
Recording load_recording(
  std::istream & tracks_source, std::istream & tracks_meta_source,
  std::istream & recording_meta_source);

/// Convenience wrapper over file paths.
Recording load_recording_files(
  const std::string & tracks_path, const std::string & tracks_meta_path,
  const std::string & recording_meta_path);

struct Anchor
{
  double x{0.0};
  double y{0.0};
};

/// Translate a segment into the target-centric frame: the anchor maps to
/// (0,0), heading becomes +x and the driver's left +y. Upper-direction
/// anchors mirror both axes; speeds come out in km/h.
std::vector<CanonicalState> canonicalize(
  const TrackSegment & segment, const Anchor & anchor, DrivingDirection anchor_direction);

/// Canonicalize a single frame.
CanonicalState canonicalize_frame(
  const TrackFrame & frame, const Anchor & anchor, DrivingDirection anchor_direction);

/// Classify a lane id as leftmost/middle/rightmost from the driver's
/// perspective and return the direction's lane count.
/// Throws InvalidLaneError for ids outside the direction's range.
std::pair<LanePosition, int> lane_position(
  int lane_id, const RecordingMeta & meta, DrivingDirection direction);

/// 0 = leftmost lane of the direction, lane_count-1 = rightmost.
int lane_index_from_left(int lane_id, const RecordingMeta & meta, DrivingDirection direction);

/// Width of the given lane from its bounding markings; 3.5 m when degenerate.
double lane_width(int lane_id, const RecordingMeta & meta, DrivingDirection direction);

}  // namespace lckit
