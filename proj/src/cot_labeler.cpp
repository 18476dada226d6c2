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

#include "lckit/cot_labeler.hpp"

#include <cmath>

namespace lckit
{

namespace
{

void label_relative_speed(const std::optional<NeighborInfo> & occupant, double target_speed,
                          Feature free_feature, Feature blocked_feature, FeatureSet & features)
{
  if (!occupant) return;
  // Faster than the target means free; equal or slower means blocked.
  features.insert(occupant->speed > target_speed ? free_feature : blocked_feature);
}

}  // namespace

FeatureSet label_notable_features(const SceneSnapshot & snapshot)
{
  FeatureSet features;
  const auto & now = snapshot.history.back();

  if (std::abs(now.lateral_velocity) > kLateralMovementKmh) {
    features.insert(Feature::SignificantLateralMovement);
  }
  if (now.longitudinal_acceleration > kLongitudinalAccelMps2) {
    features.insert(Feature::HighLongitudinalAcceleration);
  }
  if (now.longitudinal_acceleration < -kLongitudinalAccelMps2) {
    features.insert(Feature::SignificantDeceleration);
  }

  label_relative_speed(snapshot.neighbors[SlotDirection::Ahead], now.speed, Feature::AheadFree,
                       Feature::AheadBlocked, features);
  label_relative_speed(snapshot.neighbors[SlotDirection::LeftFront], now.speed,
                       Feature::LeftFrontFree, Feature::LeftFrontBlocked, features);
  label_relative_speed(snapshot.neighbors[SlotDirection::RightFront], now.speed,
                       Feature::RightFrontFree, Feature::RightFrontBlocked, features);

  const auto & ahead = snapshot.neighbors[SlotDirection::Ahead];
  if (ahead && ahead->vehicle_class == VehicleClass::Truck &&
      ahead->relative_x <= kTruckAheadDistanceM) {
    features.insert(Feature::TruckAheadWithin100m);
  }

  // A truck changing to the right lane is notable in itself (trucks belong
  // in the right lane); only the RLC family uses it.
  if (snapshot.gt_intention == Intention::RightLaneChange &&
      snapshot.target_class == VehicleClass::Truck) {
    features.insert(Feature::TargetIsTruck);
  }
  return features;
}

Behavior classify_potential_behavior(const SceneSnapshot & snapshot, const FeatureSet & features)
{
  const bool ahead_blocked = features.count(Feature::AheadBlocked) > 0;
  const auto position = snapshot.map.lane_position;

  switch (snapshot.gt_intention) {
    case Intention::LeftLaneChange:
      if (ahead_blocked &&
          (position == LanePosition::Rightmost || position == LanePosition::Middle)) {
        return Behavior::LeftOvertake;
      }
      if (features.count(Feature::HighLongitudinalAcceleration)) return Behavior::LeftToFastLane;
      return Behavior::IrregularLeft;

    case Intention::RightLaneChange:
      if (ahead_blocked &&
          (position == LanePosition::Leftmost || position == LanePosition::Middle)) {
        return Behavior::RightOvertake;
      }
      if (features.count(Feature::SignificantDeceleration) ||
          snapshot.target_class == VehicleClass::Truck) {
        return Behavior::RightToSlowLane;
      }
      return Behavior::IrregularRight;

    case Intention::KeepLane:
    default:
      return ahead_blocked ? Behavior::FollowingKeep : Behavior::NormalKeep;
  }
}

CotAnnotation annotate(const SceneSnapshot & snapshot)
{
  CotAnnotation annotation;
  annotation.features = label_notable_features(snapshot);
  annotation.behavior = classify_potential_behavior(snapshot, annotation.features);
  return annotation;
}

}  // namespace lckit
