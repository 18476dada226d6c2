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

#include "lckit/types.hpp"

namespace lckit
{

// Rule thresholds. Velocity/acceleration comparisons are strict, the truck
// distance is inclusive.
inline constexpr double kLateralMovementKmh = 1.5;
inline constexpr double kLongitudinalAccelMps2 = 0.4;
inline constexpr double kTruckAheadDistanceM = 100.0;

/// Deterministic notable-feature rules over a snapshot.
FeatureSet label_notable_features(const SceneSnapshot & snapshot);

/// Map a snapshot and its features onto one of the eight potential-behavior
/// categories of the snapshot's intention family (first match wins).
Behavior classify_potential_behavior(const SceneSnapshot & snapshot, const FeatureSet & features);

/// label_notable_features + classify_potential_behavior in one step.
CotAnnotation annotate(const SceneSnapshot & snapshot);

}  // namespace lckit
