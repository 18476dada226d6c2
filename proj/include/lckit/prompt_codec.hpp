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
#include <optional>
#include <string>

#include "lckit/types.hpp"

namespace lckit
{

struct PromptBundle
{
  std::string system_message;
  std::string user_message;
  std::optional<std::string> answer;  // present for training samples
};

enum class PromptMode { Training, Inference };

enum class ParseStatus { Ok, Failed };

/// Structured form of a predictor's output. On a failed parse the raw text
/// is kept for audit and `failure_reason` names the first missing element.
struct PredictionRecord
{
  std::string sample_id;
  ParseStatus parse_status{ParseStatus::Failed};
  std::string failure_reason;
  Intention intention{Intention::KeepLane};
  std::array<Point2d, kTrajectoryPoints> trajectory{};
  FeatureSet features;
  Behavior behavior{Behavior::NormalKeep};
  std::string explanation;
  std::string raw_text;

  bool ok() const { return parse_status == ParseStatus::Ok; }
};

/// The fixed system message shared by every sample.
const std::string & system_message();

/// Fixed two-decimal rendering with '.' as the decimal separator and no
/// negative zero; every number in prompts and answers goes through this.
std::string format_fixed2(double value);

/// Describe a snapshot: map, target state with 2 s history, then all eight
/// neighbor slots (empty ones as "no vehicle"). Inference mode appends the
/// explanation request.
std::string render_user_message(const SceneSnapshot & snapshot,
                                PromptMode mode = PromptMode::Training);

/// The template answer: notable features, potential behavior, intention,
/// then the eight trajectory points. parse_prediction inverts it exactly.
std::string render_answer(const CotAnnotation & annotation, Intention intention,
                          const std::array<Point2d, kTrajectoryPoints> & trajectory);

PromptBundle make_bundle(const SceneSnapshot & snapshot, PromptMode mode);

/// Flatten a bundle into the Llama-2 chat form:
///   <s>[INST] <<SYS>>\n{system}\n<</SYS>>\n\n{user} [/INST] {answer} </s>
/// Inference bundles (no answer) stop after "[/INST] ".
std::string assemble_llama_sample(const PromptBundle & bundle);

/// Recover the structured prediction from arbitrary output text. Total:
/// never throws; missing mandatory elements yield a failed record naming
/// the first one.
PredictionRecord parse_prediction(const std::string & output_text);

}  // namespace lckit
