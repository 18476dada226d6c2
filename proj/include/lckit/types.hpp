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

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>

namespace lckit
{

enum class VehicleClass { Car, Truck };
enum class DrivingDirection { Upper, Lower };
enum class LanePosition { Leftmost, Middle, Rightmost };

/// Intention codes: 0 keep lane, 1 left lane change, 2 right lane change.
enum class Intention : int { KeepLane = 0, LeftLaneChange = 1, RightLaneChange = 2 };

/// Advanced-prediction-time buckets; LC samples fall in [0,1], (1,2], (2,3] or (3,4] s.
enum class TBucket { LK, T01, T12, T23, T34 };

/// The eight neighbor slots around the target vehicle.
enum class SlotDirection : int {
  Ahead = 0,
  LeftFront,
  RightFront,
  LeftSide,
  RightSide,
  Rear,
  LeftRear,
  RightRear
};
inline constexpr int kNumSlots = 8;

enum class Feature {
  SignificantLateralMovement,
  HighLongitudinalAcceleration,
  SignificantDeceleration,
  AheadFree,
  AheadBlocked,
  LeftFrontFree,
  LeftFrontBlocked,
  RightFrontFree,
  RightFrontBlocked,
  TruckAheadWithin100m,
  TargetIsTruck
};
using FeatureSet = std::set<Feature>;

enum class Behavior {
  LeftOvertake,
  LeftToFastLane,
  IrregularLeft,
  RightOvertake,
  RightToSlowLane,
  IrregularRight,
  FollowingKeep,
  NormalKeep
};

struct Point2d
{
  double x{0.0};
  double y{0.0};
  bool operator==(const Point2d &) const = default;
};

/// Target-centric state: x forward (m), y to the driver's left (m),
/// speed and lateral velocity in km/h, longitudinal acceleration in m/s^2.
struct CanonicalState
{
  double x{0.0};
  double y{0.0};
  double speed{0.0};
  double lateral_velocity{0.0};
  double longitudinal_acceleration{0.0};
  bool operator==(const CanonicalState &) const = default;
};

struct NeighborInfo
{
  VehicleClass vehicle_class{VehicleClass::Car};
  double speed{0.0};       // km/h
  double relative_x{0.0};  // m, canonical frame
  double relative_y{0.0};  // m, canonical frame
  bool operator==(const NeighborInfo &) const = default;
};

struct NeighborSlots
{
  std::array<std::optional<NeighborInfo>, kNumSlots> slots{};

  std::optional<NeighborInfo> & operator[](SlotDirection d) { return slots[static_cast<int>(d)]; }
  const std::optional<NeighborInfo> & operator[](SlotDirection d) const
  {
    return slots[static_cast<int>(d)];
  }
  bool operator==(const NeighborSlots &) const = default;
};

struct MapSummary
{
  int lane_count{0};
  LanePosition lane_position{LanePosition::Middle};
  double lane_width{3.5};  // m, width of the target's current lane
  bool operator==(const MapSummary &) const = default;
};

inline constexpr int kHistoryPoints = 5;     // -2.0 .. 0.0 s at 0.5 s
inline constexpr int kTrajectoryPoints = 8;  // +0.5 .. +4.0 s at 0.5 s
inline constexpr double kStepSeconds = 0.5;
inline constexpr double kHorizonSeconds = 4.0;

/// One sample: everything a predictor sees plus the ground truth.
struct SceneSnapshot
{
  std::string sample_id;
  VehicleClass target_class{VehicleClass::Car};
  MapSummary map;
  std::array<CanonicalState, kHistoryPoints> history{};
  NeighborSlots neighbors;
  Intention gt_intention{Intention::KeepLane};
  std::array<Point2d, kTrajectoryPoints> gt_trajectory{};
  TBucket t_bucket{TBucket::LK};
  std::optional<double> advanced_prediction_time;  // s, LC samples only
  bool synthetic_gt{false};  // safety scenarios: future is fabricated, skip RMSE

  bool operator==(const SceneSnapshot &) const = default;
};

struct CotAnnotation
{
  FeatureSet features;
  Behavior behavior{Behavior::NormalKeep};
  bool operator==(const CotAnnotation &) const = default;
};

// Stable string forms used in archives, prompts and reports.
std::string to_string(VehicleClass c);
std::string to_string(DrivingDirection d);
std::string to_string(LanePosition p);
std::string to_string(TBucket b);
std::string to_string(SlotDirection s);
std::string to_string(Feature f);
std::string to_string(Behavior b);

VehicleClass vehicle_class_from_string(const std::string & s);
LanePosition lane_position_from_string(const std::string & s);
TBucket t_bucket_from_string(const std::string & s);
Feature feature_from_string(const std::string & s);
Behavior behavior_from_string(const std::string & s);

/// Which intention family a behavior explains (left/right/keep).
Intention behavior_family(Behavior b);

}  // namespace lckit
