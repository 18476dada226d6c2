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
#include <string>
#include <vector>

#include "lckit/prompt_codec.hpp"
#include "lckit/types.hpp"

namespace lckit
{

enum class PredictorBackend { RuleBased, Remote };

struct PredictorConfig
{
  PredictorBackend backend{PredictorBackend::RuleBased};
  std::string endpoint;    // chat-completions URL, remote only
  std::string model_name;  // remote only
  std::string api_key;     // optional bearer token
  double request_timeout_s{60.0};
  int max_parallel_requests{1};
  int retries{2};
  double retry_backoff_s{0.25};  // base for exponential backoff
  double temperature{0.0};

  void validate() const;  // throws ConfigError
};

/// Constant-acceleration longitudinal extrapolation; lane changes ease
/// laterally along a quintic that reaches one lane width at +4 s with zero
/// end slope.
std::array<Point2d, kTrajectoryPoints> kinematic_trajectory(const SceneSnapshot & snapshot,
                                                            Intention intention);

/// Deterministic baseline: intention from a documented feature heuristic,
/// behavior from the rule labeler, trajectory from kinematics. Always ok.
PredictionRecord rule_based_predict(const SceneSnapshot & snapshot);

/// Dispatch one snapshot to the configured backend.
PredictionRecord predict(const SceneSnapshot & snapshot, const PredictorConfig & config);

/// Predict a whole batch; exactly one record per snapshot, in input order.
/// Remote calls run on a pool of at most max_parallel_requests workers.
std::vector<PredictionRecord> predict_batch(const std::vector<SceneSnapshot> & snapshots,
                                            const PredictorConfig & config);

}  // namespace lckit
