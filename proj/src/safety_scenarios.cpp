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

#include "lckit/safety_scenarios.hpp"

#include <cstdio>

#include "lckit/errors.hpp"
#include "lckit/predictors.hpp"

namespace lckit
{

namespace
{

constexpr double kSceneLaneWidth = 3.5;  // m, synthetic 3-lane roadway

std::vector<double> arithmetic_grid(double from, double to, double step)
{
  std::vector<double> values;
  for (double v = from; v <= to + 1e-9; v += step) values.push_back(v);
  return values;
}

bool is_front_slot(SlotDirection s)
{
  return s == SlotDirection::LeftFront || s == SlotDirection::RightFront;
}

bool is_left_slot(SlotDirection s)
{
  return s == SlotDirection::LeftFront || s == SlotDirection::LeftRear;
}

}  // namespace

std::string to_string(ScenarioFamilyName n)
{
  switch (n) {
    case ScenarioFamilyName::LeftFrontBraking: return "left_front_braking";
    case ScenarioFamilyName::RightFrontBraking: return "right_front_braking";
    case ScenarioFamilyName::LeftRearAccelerating: return "left_rear_accelerating";
    case ScenarioFamilyName::RightRearAccelerating: return "right_rear_accelerating";
  }
  return "left_front_braking";
}

ScenarioFamilyName scenario_family_from_string(const std::string & s)
{
  for (auto n : {ScenarioFamilyName::LeftFrontBraking, ScenarioFamilyName::RightFrontBraking,
                 ScenarioFamilyName::LeftRearAccelerating,
                 ScenarioFamilyName::RightRearAccelerating}) {
    if (to_string(n) == s) return n;
  }
  throw ConfigError("unknown scenario family '" + s + "'");
}

ScenarioFamily default_family(ScenarioFamilyName name)
{
  ScenarioFamily family;
  family.name = name;
  family.distance_grid = arithmetic_grid(10.0, 100.0, 10.0);
  const bool braking = name == ScenarioFamilyName::LeftFrontBraking ||
                       name == ScenarioFamilyName::RightFrontBraking;
  family.speed_grid = braking ? arithmetic_grid(0.0, 50.0, 10.0)
                              : arithmetic_grid(100.0, 150.0, 10.0);
  switch (name) {
    case ScenarioFamilyName::LeftFrontBraking:
      family.lc_direction = Intention::LeftLaneChange;
      family.probe_slot = SlotDirection::LeftFront;
      break;
    case ScenarioFamilyName::RightFrontBraking:
      family.lc_direction = Intention::RightLaneChange;
      family.probe_slot = SlotDirection::RightFront;
      break;
    case ScenarioFamilyName::LeftRearAccelerating:
      family.lc_direction = Intention::LeftLaneChange;
      family.probe_slot = SlotDirection::LeftRear;
      break;
    case ScenarioFamilyName::RightRearAccelerating:
      family.lc_direction = Intention::RightLaneChange;
      family.probe_slot = SlotDirection::RightRear;
      break;
  }
  return family;
}

std::vector<SceneSnapshot> generate_family(const ScenarioFamily & family,
                                           const TargetProfile & target_profile)
{
  if (family.speed_grid.empty() || family.distance_grid.empty()) {
    throw ConfigError("scenario family '" + to_string(family.name) + "' has an empty grid");
  }

  const double v = target_profile.speed_kmh / 3.6;  // m/s

  std::vector<SceneSnapshot> snapshots;
  snapshots.reserve(family.speed_grid.size() * family.distance_grid.size());
  for (double speed : family.speed_grid) {
    for (double distance : family.distance_grid) {
      SceneSnapshot snap;
      char id[96];
      std::snprintf(id, sizeof(id), "safety-%s-v%03d-d%03d", to_string(family.name).c_str(),
                    static_cast<int>(speed), static_cast<int>(distance));
      snap.sample_id = id;
      snap.target_class = target_profile.vehicle_class;
      snap.map = MapSummary{3, LanePosition::Middle, kSceneLaneWidth};

      // Constant-velocity backfill; no fabricated maneuver history.
      for (int i = 0; i < kHistoryPoints; ++i) {
        const double t = (i - (kHistoryPoints - 1)) * kStepSeconds;
        snap.history[i] = CanonicalState{v * t, 0.0, target_profile.speed_kmh, 0.0, 0.0};
      }

      NeighborInfo probe;
      probe.vehicle_class = VehicleClass::Car;
      probe.speed = speed;
      probe.relative_x = is_front_slot(family.probe_slot) ? distance : -distance;
      probe.relative_y = is_left_slot(family.probe_slot) ? kSceneLaneWidth : -kSceneLaneWidth;
      snap.neighbors[family.probe_slot] = probe;

      snap.gt_intention = family.lc_direction;
      snap.advanced_prediction_time = 0.0;
      snap.t_bucket = TBucket::T01;
      snap.synthetic_gt = true;
      snap.gt_trajectory = kinematic_trajectory(snap, family.lc_direction);
      snapshots.push_back(std::move(snap));
    }
  }
  return snapshots;
}

std::vector<SceneSnapshot> generate_all_families(const TargetProfile & target_profile)
{
  std::vector<SceneSnapshot> all;
  for (auto name : {ScenarioFamilyName::LeftFrontBraking, ScenarioFamilyName::RightFrontBraking,
                    ScenarioFamilyName::LeftRearAccelerating,
                    ScenarioFamilyName::RightRearAccelerating}) {
    auto family = generate_family(default_family(name), target_profile);
    all.insert(all.end(), family.begin(), family.end());
  }
  return all;
}

}  // namespace lckit
