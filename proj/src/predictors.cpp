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

#include "lckit/predictors.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lckit/cot_labeler.hpp"
#include "lckit/errors.hpp"

namespace lckit
{

namespace
{

using nlohmann::json;

/// Quintic ease: zero slope and curvature at both ends, monotone on [0,1].
double quintic_ease(double tau)
{
  return ((6.0 * tau - 15.0) * tau + 10.0) * tau * tau * tau;
}

Intention heuristic_intention(const SceneSnapshot & snapshot, const FeatureSet & features)
{
  const auto position = snapshot.map.lane_position;
  const bool ahead_blocked = features.count(Feature::AheadBlocked) > 0;
  if (features.count(Feature::LeftFrontFree) && ahead_blocked &&
      position != LanePosition::Leftmost) {
    return Intention::LeftLaneChange;
  }
  const bool slow_down = snapshot.target_class == VehicleClass::Truck ||
                         features.count(Feature::SignificantDeceleration) > 0;
  if (slow_down && position != LanePosition::Rightmost) {
    return Intention::RightLaneChange;
  }
  return Intention::KeepLane;
}

struct ParsedUrl
{
  std::string base;  // scheme://host[:port]
  std::string path;  // /v1/chat/completions
};

ParsedUrl split_endpoint(const std::string & endpoint)
{
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint must include a scheme: " + endpoint);
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

struct RemoteOutcome
{
  bool ok{false};
  bool timed_out{false};
  std::string content;
};

RemoteOutcome remote_call_once(const PromptBundle & bundle, const PredictorConfig & config)
{
  const auto url = split_endpoint(config.endpoint);
  httplib::Client client(url.base);
  const auto timeout_s = std::max(0.001, config.request_timeout_s);
  const auto seconds = static_cast<time_t>(timeout_s);
  const auto usec = static_cast<time_t>((timeout_s - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, usec);
  client.set_read_timeout(seconds, usec);
  client.set_write_timeout(seconds, usec);
  if (!config.api_key.empty()) client.set_bearer_token_auth(config.api_key);

  json body{
    {"model", config.model_name},
    {"messages",
     {{{"role", "system"}, {"content", bundle.system_message}},
      {{"role", "user"}, {"content", bundle.user_message}}}},
    {"temperature", config.temperature},
  };

  const auto start = std::chrono::steady_clock::now();
  auto result = client.Post(url.path, body.dump(), "application/json");
  const double elapsed =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RemoteOutcome outcome;
  if (!result) {
    outcome.timed_out = result.error() == httplib::Error::ConnectionTimeout ||
                        elapsed >= 0.9 * timeout_s;
    return outcome;
  }
  if (result->status != 200) return outcome;
  try {
    const auto parsed = json::parse(result->body);
    outcome.content = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    outcome.ok = true;
  } catch (const json::exception &) {
    outcome.ok = false;  // malformed envelope counts as a transport failure
  }
  return outcome;
}

PredictionRecord remote_predict(const SceneSnapshot & snapshot, const PredictorConfig & config)
{
  const auto bundle = make_bundle(snapshot, PromptMode::Inference);

  thread_local std::mt19937 jitter_rng{std::random_device{}()};
  std::uniform_real_distribution<double> jitter(0.5, 1.5);

  RemoteOutcome outcome;
  for (int attempt = 0; attempt <= config.retries; ++attempt) {
    if (attempt > 0) {
      const double backoff =
        config.retry_backoff_s * std::pow(2.0, attempt - 1) * jitter(jitter_rng);
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
    }
    outcome = remote_call_once(bundle, config);
    if (outcome.ok) break;
  }

  if (!outcome.ok) {
    PredictionRecord record;
    record.sample_id = snapshot.sample_id;
    record.parse_status = ParseStatus::Failed;
    record.failure_reason = outcome.timed_out ? "timeout" : "transport";
    return record;
  }
  auto record = parse_prediction(outcome.content);
  record.sample_id = snapshot.sample_id;
  return record;
}

}  // namespace

void PredictorConfig::validate() const
{
  if (backend == PredictorBackend::Remote) {
    if (endpoint.empty()) throw ConfigError("remote backend requires an endpoint");
    if (model_name.empty()) throw ConfigError("remote backend requires a model name");
  }
  if (max_parallel_requests < 1) throw ConfigError("max_parallel_requests must be >= 1");
  if (retries < 0) throw ConfigError("retries must be >= 0");
  if (!(request_timeout_s > 0)) throw ConfigError("request_timeout must be > 0");
}

std::array<Point2d, kTrajectoryPoints> kinematic_trajectory(const SceneSnapshot & snapshot,
                                                            Intention intention)
{
  const auto & now = snapshot.history.back();
  const double v0 = now.speed / 3.6;  // km/h -> m/s
  const double accel = now.longitudinal_acceleration;
  const double lane_w = snapshot.map.lane_width > 0.0 ? snapshot.map.lane_width : 3.5;
  const double lateral_target = intention == Intention::LeftLaneChange    ? lane_w
                                : intention == Intention::RightLaneChange ? -lane_w
                                                                          : 0.0;

  std::array<Point2d, kTrajectoryPoints> points{};
  for (int i = 0; i < kTrajectoryPoints; ++i) {
    const double t = (i + 1) * kStepSeconds;
    points[i].x = v0 * t + 0.5 * accel * t * t;
    points[i].y = lateral_target * quintic_ease(t / kHorizonSeconds);
  }
  return points;
}

PredictionRecord rule_based_predict(const SceneSnapshot & snapshot)
{
  // The heuristic sees only gt-free features (the truck rule of the labeler
  // keys on the ground-truth intention, which a predictor does not have).
  SceneSnapshot neutral = snapshot;
  neutral.gt_intention = Intention::KeepLane;
  const auto base_features = label_notable_features(neutral);

  const auto intention = heuristic_intention(snapshot, base_features);

  SceneSnapshot predicted = snapshot;
  predicted.gt_intention = intention;
  const auto annotation = annotate(predicted);

  PredictionRecord record;
  record.sample_id = snapshot.sample_id;
  record.parse_status = ParseStatus::Ok;
  record.intention = intention;
  record.features = annotation.features;
  record.behavior = annotation.behavior;
  record.trajectory = kinematic_trajectory(snapshot, intention);
  return record;
}

PredictionRecord predict(const SceneSnapshot & snapshot, const PredictorConfig & config)
{
  config.validate();
  if (config.backend == PredictorBackend::RuleBased) return rule_based_predict(snapshot);
  return remote_predict(snapshot, config);
}

std::vector<PredictionRecord> predict_batch(const std::vector<SceneSnapshot> & snapshots,
                                            const PredictorConfig & config)
{
  config.validate();
  std::vector<PredictionRecord> records(snapshots.size());
  if (snapshots.empty()) return records;

  if (config.backend == PredictorBackend::RuleBased) {
    for (size_t i = 0; i < snapshots.size(); ++i) records[i] = rule_based_predict(snapshots[i]);
    return records;
  }

  const int workers =
    std::min<int>(config.max_parallel_requests, static_cast<int>(snapshots.size()));
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= snapshots.size()) break;
        records[i] = remote_predict(snapshots[i], config);
      }
    });
  }
  for (auto & t : pool) t.join();
  return records;
}

}  // namespace lckit
