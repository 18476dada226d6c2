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
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lckit/prompt_codec.hpp"
#include "lckit/types.hpp"

namespace lckit
{

struct ClassMetrics
{
  double precision{0.0};
  double recall{0.0};
  double f1{0.0};
  bool operator==(const ClassMetrics &) const = default;
};

/// Per-class and macro-averaged precision/recall/F1 over one set of pairs.
struct IntentionMetrics
{
  ClassMetrics lk, llc, rlc;
  ClassMetrics macro;  // unweighted arithmetic mean over the three classes
  int support{0};      // pairs evaluated
  bool operator==(const IntentionMetrics &) const = default;

  const ClassMetrics & for_class(Intention c) const
  {
    switch (c) {
      case Intention::LeftLaneChange: return llc;
      case Intention::RightLaneChange: return rlc;
      default: return lk;
    }
  }
};

/// P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R); zero denominators give 0.
/// Throws EmptyInputError on no pairs.
IntentionMetrics intention_metrics(const std::vector<std::pair<Intention, Intention>> & pairs);

/// Per-axis sqrt(mean squared error) at the single grid point matching the
/// horizon (1, 2, 3 or 4 s). Returns {lateral, longitudinal} in meters.
std::pair<double, double> trajectory_rmse(
  const std::vector<std::pair<std::array<Point2d, kTrajectoryPoints>,
                              std::array<Point2d, kTrajectoryPoints>>> & pairs,
  double horizon_s);

/// Interpretability rubric: 100 minus 10 per feature error/omission/addition
/// minus 50 for a behavior error, floored at 0.
int cot_score(const CotAnnotation & gt, const FeatureSet & pred_features, Behavior pred_behavior);

inline constexpr std::array<double, 4> kRmseHorizons{1.0, 2.0, 3.0, 4.0};

struct EvalReport
{
  // Intention task. Each LC bucket is evaluated together with the full LK
  // set (the LK row repeats per bucket); `overall` pools every sample once.
  std::map<TBucket, IntentionMetrics> per_bucket;  // T01..T34
  IntentionMetrics overall;
  ClassMetrics bucket_mean_macro;  // mean of the four buckets' macro rows

  // Trajectory task, indexed by kRmseHorizons.
  std::array<double, 4> rmse_lateral{};
  std::array<double, 4> rmse_longitudinal{};
  int rmse_support{0};

  // CoT reasoning.
  double cot_mean{0.0};
  std::map<int, int> cot_distribution;  // score -> count
  int cot_support{0};

  // Failed-case accounting (unparseable outputs, excluded from all metrics).
  int failed_intention{0};
  int failed_trajectory{0};

  int evaluated_samples{0};
  int total_samples{0};
  std::map<std::string, int> sample_counts;  // per stratum

  bool operator==(const EvalReport &) const = default;
};

/// Join predictions to snapshots on sample_id and compute every metric.
/// Failed records are counted, never scored. Throws JoinError on duplicate
/// or unmatched ids and EmptyInputError on an empty join.
EvalReport build_report(const std::vector<SceneSnapshot> & snapshots,
                        const std::vector<PredictionRecord> & records);

enum class ReportFormat { TextTable, Csv, Json };

/// Serialize a report: the text table mirrors the intention table layout
/// (classes x T buckets), csv and json are lossless.
std::string emit_report(const EvalReport & report, ReportFormat format);

/// Inverse of emit_report(..., Json).
EvalReport report_from_json(const std::string & text);

}  // namespace lckit
