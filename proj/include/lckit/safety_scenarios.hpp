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

#include <string>
#include <vector>

#include "lckit/types.hpp"

namespace lckit
{

enum class ScenarioFamilyName {
  LeftFrontBraking,
  RightFrontBraking,
  LeftRearAccelerating,
  RightRearAccelerating
};

std::string to_string(ScenarioFamilyName n);
ScenarioFamilyName scenario_family_from_string(const std::string & s);

/// One out-of-distribution probe grid: a single vehicle placed in a fixed
/// slot while the target performs the stated lane change.
struct ScenarioFamily
{
  ScenarioFamilyName name{ScenarioFamilyName::LeftFrontBraking};
  std::vector<double> speed_grid;     // km/h
  std::vector<double> distance_grid;  // m
  Intention lc_direction{Intention::LeftLaneChange};
  SlotDirection probe_slot{SlotDirection::LeftFront};
};

struct TargetProfile
{
  double speed_kmh{120.0};
  VehicleClass vehicle_class{VehicleClass::Car};
};

/// The published grid for a family: braking probes sweep 0..50 km/h,
/// accelerating probes 100..150 km/h, both over 10..100 m (60 cells).
ScenarioFamily default_family(ScenarioFamilyName name);

/// One snapshot per (speed, distance) cell: 3-lane scene, target mid-lane at
/// the profile speed with constant-velocity history, the probe alone in the
/// family's slot. Ground truth is marked synthetic.
/// Throws ConfigError on an empty grid.
std::vector<SceneSnapshot> generate_family(const ScenarioFamily & family,
                                           const TargetProfile & target_profile = {});

/// All four families back to back (240 snapshots).
std::vector<SceneSnapshot> generate_all_families(const TargetProfile & target_profile = {});

}  // namespace lckit
