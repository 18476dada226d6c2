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

#include "lckit/types.hpp"

#include "lckit/errors.hpp"

namespace lckit
{

std::string to_string(VehicleClass c)
{
  return c == VehicleClass::Car ? "car" : "truck";
}

std::string to_string(DrivingDirection d)
{
  return d == DrivingDirection::Upper ? "upper" : "lower";
}

std::string to_string(LanePosition p)
{
  switch (p) {
    case LanePosition::Leftmost: return "leftmost";
    case LanePosition::Middle: return "middle";
    case LanePosition::Rightmost: return "rightmost";
  }
  return "middle";
}

std::string to_string(TBucket b)
{
  switch (b) {
    case TBucket::LK: return "LK";
    case TBucket::T01: return "T01";
    case TBucket::T12: return "T12";
    case TBucket::T23: return "T23";
    case TBucket::T34: return "T34";
  }
  return "LK";
}

std::string to_string(SlotDirection s)
{
  switch (s) {
    case SlotDirection::Ahead: return "ahead";
    case SlotDirection::LeftFront: return "left_front";
    case SlotDirection::RightFront: return "right_front";
    case SlotDirection::LeftSide: return "left_side";
    case SlotDirection::RightSide: return "right_side";
    case SlotDirection::Rear: return "rear";
    case SlotDirection::LeftRear: return "left_rear";
    case SlotDirection::RightRear: return "right_rear";
  }
  return "ahead";
}

std::string to_string(Feature f)
{
  switch (f) {
    case Feature::SignificantLateralMovement: return "significant_lateral_movement";
    case Feature::HighLongitudinalAcceleration: return "high_longitudinal_acceleration";
    case Feature::SignificantDeceleration: return "significant_deceleration";
    case Feature::AheadFree: return "ahead_free";
    case Feature::AheadBlocked: return "ahead_blocked";
    case Feature::LeftFrontFree: return "left_front_free";
    case Feature::LeftFrontBlocked: return "left_front_blocked";
    case Feature::RightFrontFree: return "right_front_free";
    case Feature::RightFrontBlocked: return "right_front_blocked";
    case Feature::TruckAheadWithin100m: return "truck_ahead_within_100m";
    case Feature::TargetIsTruck: return "target_is_truck";
  }
  return "ahead_free";
}

std::string to_string(Behavior b)
{
  switch (b) {
    case Behavior::LeftOvertake: return "left_overtake";
    case Behavior::LeftToFastLane: return "left_to_fast_lane";
    case Behavior::IrregularLeft: return "irregular_left";
    case Behavior::RightOvertake: return "right_overtake";
    case Behavior::RightToSlowLane: return "right_to_slow_lane";
    case Behavior::IrregularRight: return "irregular_right";
    case Behavior::FollowingKeep: return "following_keep";
    case Behavior::NormalKeep: return "normal_keep";
  }
  return "normal_keep";
}

VehicleClass vehicle_class_from_string(const std::string & s)
{
  if (s == "car" || s == "Car") return VehicleClass::Car;
  if (s == "truck" || s == "Truck") return VehicleClass::Truck;
  throw ParseError("unknown vehicle class '" + s + "'");
}

LanePosition lane_position_from_string(const std::string & s)
{
  if (s == "leftmost") return LanePosition::Leftmost;
  if (s == "middle") return LanePosition::Middle;
  if (s == "rightmost") return LanePosition::Rightmost;
  throw ParseError("unknown lane position '" + s + "'");
}

TBucket t_bucket_from_string(const std::string & s)
{
  if (s == "LK") return TBucket::LK;
  if (s == "T01") return TBucket::T01;
  if (s == "T12") return TBucket::T12;
  if (s == "T23") return TBucket::T23;
  if (s == "T34") return TBucket::T34;
  throw ParseError("unknown T bucket '" + s + "'");
}

Feature feature_from_string(const std::string & s)
{
  for (auto f :
       {Feature::SignificantLateralMovement, Feature::HighLongitudinalAcceleration,
        Feature::SignificantDeceleration, Feature::AheadFree, Feature::AheadBlocked,
        Feature::LeftFrontFree, Feature::LeftFrontBlocked, Feature::RightFrontFree,
        Feature::RightFrontBlocked, Feature::TruckAheadWithin100m, Feature::TargetIsTruck}) {
    if (to_string(f) == s) return f;
  }
  throw ParseError("unknown feature '" + s + "'");
}

Behavior behavior_from_string(const std::string & s)
{
  for (auto b : {Behavior::LeftOvertake, Behavior::LeftToFastLane, Behavior::IrregularLeft,
                 Behavior::RightOvertake, Behavior::RightToSlowLane, Behavior::IrregularRight,
                 Behavior::FollowingKeep, Behavior::NormalKeep}) {
    if (to_string(b) == s) return b;
  }
  throw ParseError("unknown behavior '" + s + "'");
}

Intention behavior_family(Behavior b)
{
  switch (b) {
    case Behavior::LeftOvertake:
    case Behavior::LeftToFastLane:
    case Behavior::IrregularLeft:
      return Intention::LeftLaneChange;
    case Behavior::RightOvertake:
    case Behavior::RightToSlowLane:
    case Behavior::IrregularRight:
      return Intention::RightLaneChange;
    case Behavior::FollowingKeep:
    case Behavior::NormalKeep:
      return Intention::KeepLane;
  }
  return Intention::KeepLane;
}

}  // namespace lckit
