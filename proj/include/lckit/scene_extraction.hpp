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
#include <map>
#include <string>
#include <vector>

#include "lckit/trajectory_data.hpp"
#include "lckit/types.hpp"

namespace lckit
{

enum class LaneChangeDirection { Left, Right };

struct LaneChangeEvent
{
  std::int64_t track_id{0};
  std::int64_t lc_frame{0};  // first frame carrying the new lane id
  LaneChangeDirection direction{LaneChangeDirection::Left};
};

/// One event per lane-id transition, in frame order. Direction follows the
/// sign of the canonical lateral displacement across the transition.
std::vector<LaneChangeEvent> detect_lane_changes(const TrackSegment & segment);

/// T = (lc_frame - current_frame) / frame_rate, in seconds.
/// Throws OrderingError when lc_frame < current_frame.
double advanced_prediction_time(
  std::int64_t lc_frame, std::int64_t current_frame, double frame_rate);

/// Bucket for an advanced prediction time; edges are [0,1],(1,2],(2,3],(3,4].
/// Throws OrderingError outside [0,4].
TBucket bucket_for(double t_seconds);

/// Fill the eight neighbor slots around `target` at `current_frame` from the
/// co-temporal vehicles in `others`. Same lane feeds ahead/rear, the
/// immediately adjacent lanes feed the left_*/right_* slots, anything two or
/// more lanes away is ignored. |dx| within the mean vehicle length means
/// "side"; the nearest |dx| wins each slot.
NeighborSlots assign_neighbors(
  const TrackSegment & target, std::int64_t current_frame,
  const std::vector<const TrackSegment *> & others, const RecordingMeta & meta);

/// Materialize one sample at `current_frame` of `target`: 4 history steps
/// and 8 future steps on the cadence grid (0.5 s by default, snapped to the
/// nearest frame), neighbors, map summary, ground truth.
/// Throws WindowError when the frame lacks history or future.
SceneSnapshot build_snapshot(
  const TrackSegment & target, std::int64_t current_frame, const Recording & recording,
  double cadence_s = kStepSeconds);

/// Requested sample counts per stratum plus sampling knobs. The cadence
/// (grid step) and LK thinning interval are configurable but default to the
/// values the snapshot format is built around; evaluation's 1-4 s horizons
/// assume the default cadence.
struct StratificationPlan
{
  int lk{0};
  std::map<TBucket, int> llc;  // per bucket T01..T34
  std::map<TBucket, int> rlc;
  std::uint64_t seed{0};
  double cadence_s{kStepSeconds};  // grid spacing for history/future points
  double lk_thin_seconds{4.0};     // one LK candidate per track per interval

  int requested(Intention intention, TBucket bucket) const;
  int total_requested() const;
};

/// Stratum key used in reports and warnings: "LK", "LLC/T01", ...
std::string stratum_name(Intention intention, TBucket bucket);

struct CandidateRef
{
  int recording_index{0};
  int segment_index{0};
  std::int64_t frame{0};
  Intention intention{Intention::KeepLane};
  TBucket bucket{TBucket::LK};
};

/// Every sampleable (track, frame) pair across the recordings, grouped by
/// stratum, in deterministic (recording, track, frame) order.
std::map<std::string, std::vector<CandidateRef>> gather_candidates(
  const std::vector<Recording> & recordings, const StratificationPlan & plan);

struct SampleResult
{
  std::vector<SceneSnapshot> snapshots;
  std::vector<std::string> warnings;  // stratum shortfalls
};

/// Draw the plan's counts per stratum without replacement, uniformly and
/// deterministically for a fixed seed (mt19937_64 + rejection sampling; see
/// README). Short strata are taken whole and reported as warnings.
SampleResult sample_dataset(const std::vector<Recording> & recordings,
                            const StratificationPlan & plan);

}  // namespace lckit
