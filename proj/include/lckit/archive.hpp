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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lckit/prompt_codec.hpp"
#include "lckit/scene_extraction.hpp"
#include "lckit/types.hpp"

namespace lckit
{

/// A snapshot with its optional rule annotation, as stored in the archive.
struct ArchiveEntry
{
  SceneSnapshot snapshot;
  std::optional<CotAnnotation> cot;
  bool operator==(const ArchiveEntry &) const = default;
};

// JSON-lines archives: one object per line.
void write_snapshot_archive(std::ostream & out, const std::vector<ArchiveEntry> & entries);
std::vector<ArchiveEntry> read_snapshot_archive(std::istream & in);
void write_snapshot_archive_file(const std::string & path,
                                 const std::vector<ArchiveEntry> & entries);
std::vector<ArchiveEntry> read_snapshot_archive_file(const std::string & path);

void write_predictions(std::ostream & out, const std::vector<PredictionRecord> & records);
std::vector<PredictionRecord> read_predictions(std::istream & in);
void write_predictions_file(const std::string & path,
                            const std::vector<PredictionRecord> & records);
std::vector<PredictionRecord> read_predictions_file(const std::string & path);

/// Training archive: {"sample_id", "text"} per line, Llama-2 chat format.
void write_training_file(std::ostream & out, const std::vector<ArchiveEntry> & entries);

/// Ground-truth metadata parallel to the training file, for evaluation.
void write_metadata_file(std::ostream & out, const std::vector<ArchiveEntry> & entries);

/// Parse a stratification plan config:
/// {"seed": 7, "counts": {"LK": 48, "LLC": {"T01": 12, ...}, "RLC": {...}},
///  "lk_thin_seconds": 4.0}. Throws ConfigError.
StratificationPlan parse_plan(const std::string & text);
StratificationPlan read_plan_file(const std::string & path);

}  // namespace lckit
