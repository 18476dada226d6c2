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

#include "lckit/scene_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "lckit/errors.hpp"

namespace lckit
{

namespace
{

/// Frame offset of grid step k (k = -4..0 history, 1..8 future), snapped to
/// the nearest frame for odd frame rates.
std::int64_t grid_offset(int k, double frame_rate, double cadence_s)
{
  return std::llround(k * frame_rate * cadence_s);
}

double canonical_lateral_delta(const TrackSegment & segment, size_t i)
{
  const double mirror = segment.driving_direction == DrivingDirection::Upper ? -1.0 : 1.0;
  return mirror * (segment.frames[i].y - segment.frames[i - 1].y);
}

std::string make_sample_id(const std::string & recording_id, std::int64_t track_id,
                           std::int64_t frame)
{
  char buf[96];
  std::snprintf(buf, sizeof(buf), "r%s-t%04lld-f%06lld", recording_id.c_str(),
                static_cast<long long>(track_id), static_cast<long long>(frame));
  return buf;
}

/// Uniform draw in [0, n) with rejection sampling; unlike
/// std::uniform_int_distribution the result is identical on every platform.
std::uint64_t bounded_draw(std::mt19937_64 & rng, std::uint64_t n)
{
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

constexpr std::uint64_t kStratumSeedStride = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::vector<LaneChangeEvent> detect_lane_changes(const TrackSegment & segment)
{
  std::vector<LaneChangeEvent> events;
  for (size_t i = 1; i < segment.frames.size(); ++i) {
    if (segment.frames[i].lane_id == segment.frames[i - 1].lane_id) continue;
    LaneChangeEvent e{};
    e.track_id = segment.track_id;
    e.lc_frame = segment.frames[i].frame;
    e.direction = canonical_lateral_delta(segment, i) > 0.0 ? LaneChangeDirection::Left
                                                            : LaneChangeDirection::Right;
    events.push_back(e);
  }
  return events;
}

double advanced_prediction_time(
  std::int64_t lc_frame, std::int64_t current_frame, double frame_rate)
{
  if (lc_frame < current_frame) {
    throw OrderingError("lane change frame " + std::to_string(lc_frame) +
                        " precedes current frame " + std::to_string(current_frame));
  }
  return static_cast<double>(lc_frame - current_frame) / frame_rate;
}

TBucket bucket_for(double t_seconds)
{
  // Edges: [0,1], (1,2], (2,3], (3,4].
  if (t_seconds < 0.0 || t_seconds > kHorizonSeconds) {
    throw OrderingError("advanced prediction time " + std::to_string(t_seconds) +
                        " outside [0, 4] s");
  }
  if (t_seconds <= 1.0) return TBucket::T01;
  if (t_seconds <= 2.0) return TBucket::T12;
  if (t_seconds <= 3.0) return TBucket::T23;
  return TBucket::T34;
}

NeighborSlots assign_neighbors(
  const TrackSegment & target, std::int64_t current_frame,
  const std::vector<const TrackSegment *> & others, const RecordingMeta & meta)
{
  NeighborSlots slots;
  const auto & target_frame = target.at_frame(current_frame);
  const Anchor anchor{target_frame.x, target_frame.y};
  const int target_idx =
    lane_index_from_left(target_frame.lane_id, meta, target.driving_direction);

  std::array<double, kNumSlots> best_abs_dx{};
  best_abs_dx.fill(std::numeric_limits<double>::infinity());

  for (const auto * other : others) {
    if (other == nullptr || other->track_id == target.track_id) continue;
    if (other->driving_direction != target.driving_direction) continue;
    if (!other->has_frame(current_frame)) continue;

    const auto & frame = other->at_frame(current_frame);
    int other_idx = 0;
    try {
      other_idx = lane_index_from_left(frame.lane_id, meta, other->driving_direction);
    } catch (const InvalidLaneError &) {
      continue;  // momentarily off the mainline
    }
    const int lanes_left = target_idx - other_idx;  // +1: immediately left
    if (std::abs(lanes_left) >= 2) continue;

    const auto rel = canonicalize_frame(frame, anchor, target.driving_direction);
    const double overlap = (target.length + other->length) / 2.0;

    std::optional<SlotDirection> slot;
    if (std::abs(rel.x) <= overlap) {  // side band
      if (lanes_left == 1) slot = SlotDirection::LeftSide;
      if (lanes_left == -1) slot = SlotDirection::RightSide;
    } else if (rel.x > overlap) {  // front band
      if (lanes_left == 1) slot = SlotDirection::LeftFront;
      else if (lanes_left == -1) slot = SlotDirection::RightFront;
      else slot = SlotDirection::Ahead;
    } else {  // rear band
      if (lanes_left == 1) slot = SlotDirection::LeftRear;
      else if (lanes_left == -1) slot = SlotDirection::RightRear;
      else slot = SlotDirection::Rear;
    }
    if (!slot) continue;

    const int s = static_cast<int>(*slot);
    if (std::abs(rel.x) < best_abs_dx[s]) {
      best_abs_dx[s] = std::abs(rel.x);
      slots.slots[s] = NeighborInfo{other->vehicle_class, rel.speed, rel.x, rel.y};
    }
  }
  return slots;
}

SceneSnapshot build_snapshot(
  const TrackSegment & target, std::int64_t current_frame, const Recording & recording,
  double cadence_s)
{
  if (!(cadence_s > 0.0)) throw ConfigError("cadence must be > 0");
  const double rate = recording.meta.frame_rate;
  const std::int64_t earliest =
    current_frame + grid_offset(-kHistoryPoints + 1, rate, cadence_s);
  const std::int64_t latest = current_frame + grid_offset(kTrajectoryPoints, rate, cadence_s);
  if (!target.has_frame(current_frame) || !target.has_frame(earliest) ||
      !target.has_frame(latest)) {
    throw WindowError("track " + std::to_string(target.track_id) + " frame " +
                      std::to_string(current_frame) + ": needs 2 s of history and 4 s of future");
  }

  const auto & now = target.at_frame(current_frame);
  const Anchor anchor{now.x, now.y};
  const auto direction = target.driving_direction;

  SceneSnapshot snap;
  snap.sample_id = make_sample_id(recording.meta.recording_id, target.track_id, current_frame);
  snap.target_class = target.vehicle_class;

  auto [position, count] = lane_position(now.lane_id, recording.meta, direction);
  snap.map = MapSummary{count, position, lane_width(now.lane_id, recording.meta, direction)};

  for (int k = -kHistoryPoints + 1; k <= 0; ++k) {
    const auto & f = target.at_frame(current_frame + grid_offset(k, rate, cadence_s));
    snap.history[k + kHistoryPoints - 1] = canonicalize_frame(f, anchor, direction);
  }
  for (int k = 1; k <= kTrajectoryPoints; ++k) {
    const auto & f = target.at_frame(current_frame + grid_offset(k, rate, cadence_s));
    const auto c = canonicalize_frame(f, anchor, direction);
    snap.gt_trajectory[k - 1] = Point2d{c.x, c.y};
  }

  std::vector<const TrackSegment *> others;
  others.reserve(recording.segments.size());
  for (const auto & seg : recording.segments) others.push_back(&seg);
  snap.neighbors = assign_neighbors(target, current_frame, others, recording.meta);

  snap.gt_intention = Intention::KeepLane;
  snap.t_bucket = TBucket::LK;
  for (const auto & event : detect_lane_changes(target)) {
    if (event.lc_frame < current_frame) continue;
    const double t = advanced_prediction_time(event.lc_frame, current_frame, rate);
    if (t > kHorizonSeconds) break;  // next maneuver is beyond the horizon
    snap.gt_intention = event.direction == LaneChangeDirection::Left
                          ? Intention::LeftLaneChange
                          : Intention::RightLaneChange;
    snap.advanced_prediction_time = t;
    snap.t_bucket = bucket_for(t);
    break;
  }
  return snap;
}

int StratificationPlan::requested(Intention intention, TBucket bucket) const
{
  if (intention == Intention::KeepLane) return lk;
  const auto & per_bucket = intention == Intention::LeftLaneChange ? llc : rlc;
  auto it = per_bucket.find(bucket);
  return it == per_bucket.end() ? 0 : it->second;
}

int StratificationPlan::total_requested() const
{
  int total = lk;
  for (const auto & [b, n] : llc) total += n;
  for (const auto & [b, n] : rlc) total += n;
  return total;
}

std::string stratum_name(Intention intention, TBucket bucket)
{
  if (intention == Intention::KeepLane) return "LK";
  const std::string family = intention == Intention::LeftLaneChange ? "LLC" : "RLC";
  return family + "/" + to_string(bucket);
}

namespace
{

const std::array<TBucket, 4> kLcBuckets{TBucket::T01, TBucket::T12, TBucket::T23, TBucket::T34};

/// Fixed stratum iteration order; sampling and reporting both follow it.
std::vector<std::pair<Intention, TBucket>> stratum_order()
{
  std::vector<std::pair<Intention, TBucket>> order;
  order.emplace_back(Intention::KeepLane, TBucket::LK);
  for (auto b : kLcBuckets) order.emplace_back(Intention::LeftLaneChange, b);
  for (auto b : kLcBuckets) order.emplace_back(Intention::RightLaneChange, b);
  return order;
}

}  // namespace

std::map<std::string, std::vector<CandidateRef>> gather_candidates(
  const std::vector<Recording> & recordings, const StratificationPlan & plan)
{
  std::map<std::string, std::vector<CandidateRef>> candidates;
  for (const auto & [intention, bucket] : stratum_order()) {
    candidates[stratum_name(intention, bucket)];  // stable set of keys
  }

  for (int r = 0; r < static_cast<int>(recordings.size()); ++r) {
    const auto & rec = recordings[r];
    const double rate = rec.meta.frame_rate;
    const std::int64_t history_span = -grid_offset(-kHistoryPoints + 1, rate, plan.cadence_s);
    const std::int64_t future_span = grid_offset(kTrajectoryPoints, rate, plan.cadence_s);
    const std::int64_t lk_stride =
      std::max<std::int64_t>(1, std::llround(plan.lk_thin_seconds * rate));

    for (int s = 0; s < static_cast<int>(rec.segments.size()); ++s) {
      const auto & seg = rec.segments[s];
      const std::int64_t first_valid = seg.first_frame() + history_span;
      const std::int64_t last_valid = seg.last_frame() - future_span;
      if (first_valid > last_valid) continue;

      const auto events = detect_lane_changes(seg);
      if (events.empty()) {
        for (std::int64_t f = first_valid; f <= last_valid; f += lk_stride) {
          candidates["LK"].push_back(
            CandidateRef{r, s, f, Intention::KeepLane, TBucket::LK});
        }
        continue;
      }
      for (std::int64_t f = first_valid; f <= last_valid; ++f) {
        auto next = std::find_if(events.begin(), events.end(),
                                 [&](const LaneChangeEvent & e) { return e.lc_frame >= f; });
        if (next == events.end()) continue;
        const double t = advanced_prediction_time(next->lc_frame, f, rate);
        if (t > kHorizonSeconds) continue;
        const auto intention = next->direction == LaneChangeDirection::Left
                                 ? Intention::LeftLaneChange
                                 : Intention::RightLaneChange;
        const auto bucket = bucket_for(t);
        candidates[stratum_name(intention, bucket)].push_back(
          CandidateRef{r, s, f, intention, bucket});
      }
    }
  }
  return candidates;
}

SampleResult sample_dataset(const std::vector<Recording> & recordings,
                            const StratificationPlan & plan)
{
  auto candidates = gather_candidates(recordings, plan);

  SampleResult result;
  std::uint64_t stratum_index = 0;
  for (const auto & [intention, bucket] : stratum_order()) {
    const auto name = stratum_name(intention, bucket);
    auto & pool = candidates[name];
    const int requested = plan.requested(intention, bucket);
    const std::uint64_t stratum_seed = plan.seed + stratum_index * kStratumSeedStride;
    ++stratum_index;

    if (requested <= 0) continue;
    if (static_cast<int>(pool.size()) < requested) {
      result.warnings.push_back(name + ": requested " + std::to_string(requested) +
                                " but only " + std::to_string(pool.size()) +
                                " candidates available");
    }

    std::vector<size_t> picked;
    const size_t n = pool.size();
    const size_t k = std::min<size_t>(requested, n);
    if (k == n) {
      picked.resize(n);
      for (size_t i = 0; i < n; ++i) picked[i] = i;
    } else {
      std::mt19937_64 rng(stratum_seed);
      std::vector<size_t> indices(n);
      for (size_t i = 0; i < n; ++i) indices[i] = i;
      for (size_t i = 0; i < k; ++i) {  // partial Fisher-Yates
        const size_t j = i + static_cast<size_t>(bounded_draw(rng, n - i));
        std::swap(indices[i], indices[j]);
      }
      picked.assign(indices.begin(), indices.begin() + k);
      std::sort(picked.begin(), picked.end());
    }

    for (size_t i : picked) {
      const auto & ref = pool[i];
      const auto & rec = recordings[ref.recording_index];
      result.snapshots.push_back(
        build_snapshot(rec.segments[ref.segment_index], ref.frame, rec, plan.cadence_s));
    }
  }
  return result;
}

}  // namespace lckit
