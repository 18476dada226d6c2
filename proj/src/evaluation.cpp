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

#include "lckit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "lckit/cot_labeler.hpp"
#include "lckit/errors.hpp"
#include "lckit/scene_extraction.hpp"

namespace lckit
{

namespace
{

using nlohmann::json;

constexpr std::array<TBucket, 4> kLcBuckets{TBucket::T01, TBucket::T12, TBucket::T23,
                                            TBucket::T34};
constexpr std::array<Intention, 3> kClasses{Intention::KeepLane, Intention::LeftLaneChange,
                                            Intention::RightLaneChange};

double ratio(double numerator, double denominator)
{
  return denominator > 0.0 ? numerator / denominator : 0.0;
}

std::string pct(double fraction)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

std::string fixed3(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

/// Shortest round-trip decimal form, for the lossless csv/json emitters.
std::string lossless(double v)
{
  return json(v).dump();
}

std::string pad(const std::string & s, size_t width)
{
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string rstrip(const std::string & s)
{
  auto end = s.find_last_not_of(' ');
  return end == std::string::npos ? "" : s.substr(0, end + 1);
}

const char * bucket_title(TBucket b)
{
  switch (b) {
    case TBucket::T01: return "T in [0,1]";
    case TBucket::T12: return "T in (1,2]";
    case TBucket::T23: return "T in (2,3]";
    case TBucket::T34: return "T in (3,4]";
    default: return "";
  }
}

json to_json(const ClassMetrics & m)
{
  return json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

ClassMetrics class_metrics_from_json(const json & j)
{
  return ClassMetrics{j.at("precision").get<double>(), j.at("recall").get<double>(),
                      j.at("f1").get<double>()};
}

json to_json(const IntentionMetrics & m)
{
  return json{{"LK", to_json(m.lk)},       {"LLC", to_json(m.llc)}, {"RLC", to_json(m.rlc)},
              {"macro", to_json(m.macro)}, {"support", m.support}};
}

IntentionMetrics intention_metrics_from_json(const json & j)
{
  IntentionMetrics m;
  m.lk = class_metrics_from_json(j.at("LK"));
  m.llc = class_metrics_from_json(j.at("LLC"));
  m.rlc = class_metrics_from_json(j.at("RLC"));
  m.macro = class_metrics_from_json(j.at("macro"));
  m.support = j.at("support").get<int>();
  return m;
}

}  // namespace

IntentionMetrics intention_metrics(const std::vector<std::pair<Intention, Intention>> & pairs)
{
  if (pairs.empty()) throw EmptyInputError("intention_metrics: no (gt, pred) pairs");

  IntentionMetrics out;
  out.support = static_cast<int>(pairs.size());
  for (auto cls : kClasses) {
    double tp = 0, fp = 0, fn = 0;
    for (const auto & [gt, pred] : pairs) {
      if (gt == cls && pred == cls) ++tp;
      else if (gt != cls && pred == cls) ++fp;
      else if (gt == cls) ++fn;
    }
    ClassMetrics m;
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    switch (cls) {
      case Intention::KeepLane: out.lk = m; break;
      case Intention::LeftLaneChange: out.llc = m; break;
      case Intention::RightLaneChange: out.rlc = m; break;
    }
  }
  out.macro.precision = (out.lk.precision + out.llc.precision + out.rlc.precision) / 3.0;
  out.macro.recall = (out.lk.recall + out.llc.recall + out.rlc.recall) / 3.0;
  out.macro.f1 = (out.lk.f1 + out.llc.f1 + out.rlc.f1) / 3.0;
  return out;
}

std::pair<double, double> trajectory_rmse(
  const std::vector<std::pair<std::array<Point2d, kTrajectoryPoints>,
                              std::array<Point2d, kTrajectoryPoints>>> & pairs,
  double horizon_s)
{
  const auto it = std::find(kRmseHorizons.begin(), kRmseHorizons.end(), horizon_s);
  if (it == kRmseHorizons.end()) {
    throw ConfigError("trajectory_rmse: horizon must be 1, 2, 3 or 4 s");
  }
  if (pairs.empty()) throw EmptyInputError("trajectory_rmse: no trajectory pairs");

  const size_t idx = static_cast<size_t>(std::lround(horizon_s / kStepSeconds)) - 1;
  double lat_sq = 0.0, lon_sq = 0.0;
  for (const auto & [gt, pred] : pairs) {
    const double dy = pred[idx].y - gt[idx].y;
    const double dx = pred[idx].x - gt[idx].x;
    lat_sq += dy * dy;
    lon_sq += dx * dx;
  }
  const double n = static_cast<double>(pairs.size());
  return {std::sqrt(lat_sq / n), std::sqrt(lon_sq / n)};
}

int cot_score(const CotAnnotation & gt, const FeatureSet & pred_features, Behavior pred_behavior)
{
  int mismatches = 0;
  for (auto f : gt.features) mismatches += pred_features.count(f) == 0;
  for (auto f : pred_features) mismatches += gt.features.count(f) == 0;
  int score = 100 - 10 * mismatches - (pred_behavior != gt.behavior ? 50 : 0);
  return std::max(0, score);
}

EvalReport build_report(const std::vector<SceneSnapshot> & snapshots,
                        const std::vector<PredictionRecord> & records)
{
  if (records.empty()) throw EmptyInputError("build_report: no prediction records");

  std::unordered_map<std::string, const SceneSnapshot *> by_id;
  by_id.reserve(snapshots.size());
  for (const auto & snap : snapshots) {
    if (!by_id.emplace(snap.sample_id, &snap).second) {
      throw JoinError("duplicate sample_id in snapshots: " + snap.sample_id);
    }
  }

  EvalReport report;
  report.total_samples = static_cast<int>(records.size());

  std::vector<std::pair<Intention, Intention>> lk_pairs;
  std::map<TBucket, std::vector<std::pair<Intention, Intention>>> lc_pairs;
  std::vector<std::pair<Intention, Intention>> all_pairs;
  std::array<double, 4> lat_sq{}, lon_sq{};
  double cot_total = 0.0;

  std::unordered_map<std::string, int> seen;
  for (const auto & record : records) {
    const auto it = by_id.find(record.sample_id);
    if (it == by_id.end()) {
      throw JoinError("prediction for unknown sample_id: " + record.sample_id);
    }
    if (++seen[record.sample_id] > 1) {
      throw JoinError("duplicate sample_id in predictions: " + record.sample_id);
    }
    const auto & snap = *it->second;
    ++report.sample_counts[stratum_name(snap.gt_intention, snap.t_bucket)];

    if (!record.ok()) {
      ++report.failed_intention;
      ++report.failed_trajectory;
      continue;
    }
    ++report.evaluated_samples;

    const std::pair<Intention, Intention> pair{snap.gt_intention, record.intention};
    all_pairs.push_back(pair);
    if (snap.t_bucket == TBucket::LK) lk_pairs.push_back(pair);
    else lc_pairs[snap.t_bucket].push_back(pair);

    if (!snap.synthetic_gt) {
      ++report.rmse_support;
      for (size_t h = 0; h < kRmseHorizons.size(); ++h) {
        const size_t idx = static_cast<size_t>(std::lround(kRmseHorizons[h] / kStepSeconds)) - 1;
        const double dy = record.trajectory[idx].y - snap.gt_trajectory[idx].y;
        const double dx = record.trajectory[idx].x - snap.gt_trajectory[idx].x;
        lat_sq[h] += dy * dy;
        lon_sq[h] += dx * dx;
      }
    }

    const auto gt_annotation = annotate(snap);
    const int score = cot_score(gt_annotation, record.features, record.behavior);
    cot_total += score;
    ++report.cot_distribution[score];
    ++report.cot_support;
  }

  // Each LC bucket is scored together with the whole LK set, mirroring how
  // the intention table repeats its LK row per T interval.
  for (auto bucket : kLcBuckets) {
    auto pairs = lk_pairs;
    const auto & lc = lc_pairs[bucket];
    pairs.insert(pairs.end(), lc.begin(), lc.end());
    report.per_bucket[bucket] = pairs.empty() ? IntentionMetrics{} : intention_metrics(pairs);
  }
  if (!all_pairs.empty()) report.overall = intention_metrics(all_pairs);

  int populated = 0;
  for (auto bucket : kLcBuckets) {
    const auto & m = report.per_bucket[bucket];
    if (m.support == 0) continue;
    ++populated;
    report.bucket_mean_macro.precision += m.macro.precision;
    report.bucket_mean_macro.recall += m.macro.recall;
    report.bucket_mean_macro.f1 += m.macro.f1;
  }
  if (populated > 0) {
    report.bucket_mean_macro.precision /= populated;
    report.bucket_mean_macro.recall /= populated;
    report.bucket_mean_macro.f1 /= populated;
  }

  if (report.rmse_support > 0) {
    for (size_t h = 0; h < kRmseHorizons.size(); ++h) {
      report.rmse_lateral[h] = std::sqrt(lat_sq[h] / report.rmse_support);
      report.rmse_longitudinal[h] = std::sqrt(lon_sq[h] / report.rmse_support);
    }
  }
  if (report.cot_support > 0) report.cot_mean = cot_total / report.cot_support;
  return report;
}

namespace
{

std::string render_text_table(const EvalReport & report)
{
  constexpr size_t kNameWidth = 12;
  constexpr size_t kColWidth = 7;
  std::ostringstream out;

  out << "Intention prediction (%)\n";
  std::string header1(kNameWidth, ' ');
  std::string header2 = pad("Class", kNameWidth);
  for (auto bucket : kLcBuckets) {
    header1 += pad(bucket_title(bucket), 3 * kColWidth);
    header2 += pad("P", kColWidth) + pad("R", kColWidth) + pad("F1", kColWidth);
  }
  header1 += pad("Avg. (T in [0,4])", 3 * kColWidth);
  header2 += pad("P", kColWidth) + pad("R", kColWidth) + pad("F1", kColWidth);
  out << rstrip(header1) << "\n" << rstrip(header2) << "\n";

  auto metric_cells = [&](const ClassMetrics & m) {
    return pad(pct(m.precision), kColWidth) + pad(pct(m.recall), kColWidth) +
           pad(pct(m.f1), kColWidth);
  };
  auto row = [&](const std::string & name, auto select) {
    std::string line = pad(name, kNameWidth);
    for (auto bucket : kLcBuckets) line += metric_cells(select(report.per_bucket.at(bucket)));
    line += metric_cells(select(report.overall));
    out << rstrip(line) << "\n";
  };
  row("LK", [](const IntentionMetrics & m) { return m.lk; });
  row("LLC", [](const IntentionMetrics & m) { return m.llc; });
  row("RLC", [](const IntentionMetrics & m) { return m.rlc; });
  row("Macro avg.", [](const IntentionMetrics & m) { return m.macro; });

  out << "\nBucket-mean macro (%): P " << pct(report.bucket_mean_macro.precision) << "  R "
      << pct(report.bucket_mean_macro.recall) << "  F1 " << pct(report.bucket_mean_macro.f1)
      << "\n";

  out << "\nTrajectory RMSE (m), over " << report.rmse_support << " samples\n";
  out << "Horizon  Lateral  Longitudinal\n";
  for (size_t h = 0; h < kRmseHorizons.size(); ++h) {
    out << pad(std::to_string(static_cast<int>(kRmseHorizons[h])) + " s", 9)
        << pad(fixed3(report.rmse_lateral[h]), 9) << fixed3(report.rmse_longitudinal[h]) << "\n";
  }

  out << "\nCoT reasoning\n";
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", report.cot_mean);
    out << "Mean score: " << buf << " over " << report.cot_support << " samples\n";
  }
  out << "Distribution:";
  bool first = true;
  for (auto it = report.cot_distribution.rbegin(); it != report.cot_distribution.rend(); ++it) {
    out << (first ? " " : ", ") << it->first << " x " << it->second;
    first = false;
  }
  out << "\n";

  out << "\nFailed cases: intention " << report.failed_intention << ", trajectory "
      << report.failed_trajectory << "\n";

  out << "\nSamples: total " << report.total_samples << ", evaluated "
      << report.evaluated_samples << "\n";
  for (const auto & [stratum, count] : report.sample_counts) {
    out << stratum << ": " << count << "\n";
  }
  return out.str();
}

std::string render_csv(const EvalReport & report)
{
  std::ostringstream out;
  out << "section,key,class,metric,value\n";
  auto class_rows = [&](const std::string & key, const std::string & cls,
                        const ClassMetrics & m) {
    out << "intention," << key << "," << cls << ",precision," << lossless(m.precision) << "\n";
    out << "intention," << key << "," << cls << ",recall," << lossless(m.recall) << "\n";
    out << "intention," << key << "," << cls << ",f1," << lossless(m.f1) << "\n";
  };
  auto metrics_rows = [&](const std::string & key, const IntentionMetrics & m) {
    class_rows(key, "LK", m.lk);
    class_rows(key, "LLC", m.llc);
    class_rows(key, "RLC", m.rlc);
    class_rows(key, "macro", m.macro);
    out << "intention," << key << ",,support," << m.support << "\n";
  };
  for (const auto & [bucket, m] : report.per_bucket) metrics_rows(to_string(bucket), m);
  metrics_rows("overall", report.overall);
  class_rows("bucket_mean", "macro", report.bucket_mean_macro);

  for (size_t h = 0; h < kRmseHorizons.size(); ++h) {
    out << "trajectory," << lossless(kRmseHorizons[h]) << ",,rmse_lat,"
        << lossless(report.rmse_lateral[h]) << "\n";
    out << "trajectory," << lossless(kRmseHorizons[h]) << ",,rmse_lon,"
        << lossless(report.rmse_longitudinal[h]) << "\n";
  }
  out << "trajectory,,,support," << report.rmse_support << "\n";

  out << "cot,,,mean," << lossless(report.cot_mean) << "\n";
  out << "cot,,,support," << report.cot_support << "\n";
  for (const auto & [score, count] : report.cot_distribution) {
    out << "cot," << score << ",,count," << count << "\n";
  }

  out << "failed,intention,,count," << report.failed_intention << "\n";
  out << "failed,trajectory,,count," << report.failed_trajectory << "\n";

  out << "samples,total,,count," << report.total_samples << "\n";
  out << "samples,evaluated,,count," << report.evaluated_samples << "\n";
  for (const auto & [stratum, count] : report.sample_counts) {
    out << "samples," << stratum << ",,count," << count << "\n";
  }
  return out.str();
}

json render_json(const EvalReport & report)
{
  json per_bucket = json::object();
  for (const auto & [bucket, m] : report.per_bucket) per_bucket[to_string(bucket)] = to_json(m);

  json distribution = json::object();
  for (const auto & [score, count] : report.cot_distribution) {
    distribution[std::to_string(score)] = count;
  }
  json strata = json::object();
  for (const auto & [stratum, count] : report.sample_counts) strata[stratum] = count;

  return json{
    {"intention",
     {{"per_bucket", per_bucket},
      {"overall", to_json(report.overall)},
      {"bucket_mean_macro", to_json(report.bucket_mean_macro)}}},
    {"trajectory",
     {{"horizons_s", kRmseHorizons},
      {"rmse_lateral", report.rmse_lateral},
      {"rmse_longitudinal", report.rmse_longitudinal},
      {"support", report.rmse_support}}},
    {"cot",
     {{"mean", report.cot_mean}, {"distribution", distribution}, {"support", report.cot_support}}},
    {"failed_cases",
     {{"intention", report.failed_intention}, {"trajectory", report.failed_trajectory}}},
    {"samples",
     {{"total", report.total_samples},
      {"evaluated", report.evaluated_samples},
      {"per_stratum", strata}}}};
}

}  // namespace

std::string emit_report(const EvalReport & report, ReportFormat format)
{
  switch (format) {
    case ReportFormat::TextTable: return render_text_table(report);
    case ReportFormat::Csv: return render_csv(report);
    case ReportFormat::Json: return render_json(report).dump(2) + "\n";
  }
  return "";
}

EvalReport report_from_json(const std::string & text)
{
  const auto j = json::parse(text);
  EvalReport report;

  const auto & intention = j.at("intention");
  for (const auto & [key, value] : intention.at("per_bucket").items()) {
    report.per_bucket[t_bucket_from_string(key)] = intention_metrics_from_json(value);
  }
  report.overall = intention_metrics_from_json(intention.at("overall"));
  report.bucket_mean_macro = class_metrics_from_json(intention.at("bucket_mean_macro"));

  const auto & trajectory = j.at("trajectory");
  for (size_t h = 0; h < kRmseHorizons.size(); ++h) {
    report.rmse_lateral[h] = trajectory.at("rmse_lateral").at(h).get<double>();
    report.rmse_longitudinal[h] = trajectory.at("rmse_longitudinal").at(h).get<double>();
  }
  report.rmse_support = trajectory.at("support").get<int>();

  const auto & cot = j.at("cot");
  report.cot_mean = cot.at("mean").get<double>();
  report.cot_support = cot.at("support").get<int>();
  for (const auto & [key, value] : cot.at("distribution").items()) {
    report.cot_distribution[std::stoi(key)] = value.get<int>();
  }

  report.failed_intention = j.at("failed_cases").at("intention").get<int>();
  report.failed_trajectory = j.at("failed_cases").at("trajectory").get<int>();

  const auto & samples = j.at("samples");
  report.total_samples = samples.at("total").get<int>();
  report.evaluated_samples = samples.at("evaluated").get<int>();
  for (const auto & [key, value] : samples.at("per_stratum").items()) {
    report.sample_counts[key] = value.get<int>();
  }
  return report;
}

}  // namespace lckit
