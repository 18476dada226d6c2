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

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include "lckit/cot_labeler.hpp"
#include "lckit/errors.hpp"
#include "lckit/predictors.hpp"
#include "support/synthetic.hpp"

using namespace lckit;
using nlohmann::json;

namespace
{

SceneSnapshot plain_snapshot()
{
  SceneSnapshot snap;
  snap.sample_id = "p0";
  snap.target_class = VehicleClass::Car;
  snap.map = MapSummary{3, LanePosition::Middle, 4.0};
  for (int i = 0; i < kHistoryPoints; ++i) {
    const double t = (i - 4) * kStepSeconds;
    snap.history[i] = CanonicalState{20.0 * t, 0.0, 72.0, 0.0, 0.0};
  }
  return snap;
}

/// Minimal chat-completions stub with a per-request hook.
class StubServer
{
public:
  using Responder = std::function<std::string(const json & request, int request_index)>;

  explicit StubServer(Responder responder) : responder_(std::move(responder))
  {
    server_.Post("/v1/chat/completions", [this](const httplib::Request & req,
                                                httplib::Response & res) {
      const int index = counter_.fetch_add(1);
      const int now = ++in_flight_;
      int peak = peak_in_flight_.load();
      while (now > peak && !peak_in_flight_.compare_exchange_weak(peak, now)) {
      }
      if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
      const auto parsed = json::parse(req.body);
      if (fail_first_ > index) {
        res.status = 500;
        res.set_content("overloaded", "text/plain");
      } else {
        const json body{{"choices", {{{"message", {{"content", responder_(parsed, index)}}}}}}};
        res.set_content(body.dump(), "application/json");
      }
      --in_flight_;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer()
  {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const
  {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }
  int requests() const { return counter_.load(); }
  int peak_in_flight() const { return peak_in_flight_.load(); }
  void set_delay_ms(int ms) { delay_ms_ = ms; }
  void fail_first(int n) { fail_first_ = n; }

private:
  httplib::Server server_;
  std::thread thread_;
  Responder responder_;
  std::atomic<int> counter_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_in_flight_{0};
  int delay_ms_{0};
  int fail_first_{0};
  int port_{0};
};

PredictorConfig remote_config(const std::string & endpoint)
{
  PredictorConfig config;
  config.backend = PredictorBackend::Remote;
  config.endpoint = endpoint;
  config.model_name = "stub-model";
  config.request_timeout_s = 5.0;
  config.max_parallel_requests = 2;
  config.retries = 1;
  config.retry_backoff_s = 0.01;
  return config;
}

}  // namespace

TEST_CASE("constant-velocity keep-lane trajectory is a straight 10 m grid")
{
  const auto points = kinematic_trajectory(plain_snapshot(), Intention::KeepLane);
  for (int i = 0; i < kTrajectoryPoints; ++i) {
    CHECK(points[i].x == doctest::Approx(10.0 * (i + 1)).epsilon(1e-12));
    CHECK(points[i].y == 0.0);
  }
}

TEST_CASE("constant acceleration follows x(t) = v t + a t^2 / 2 at all grid times")
{
  auto snap = plain_snapshot();
  for (auto & h : snap.history) h.longitudinal_acceleration = 1.0;
  const auto points = kinematic_trajectory(snap, Intention::KeepLane);
  for (int i = 0; i < kTrajectoryPoints; ++i) {
    const double t = 0.5 * (i + 1);
    CHECK(points[i].x == doctest::Approx(20.0 * t + 0.5 * t * t).epsilon(1e-12));
  }
}

TEST_CASE("a left lane change eases onto +one lane width with zero end slope")
{
  const auto points = kinematic_trajectory(plain_snapshot(), Intention::LeftLaneChange);
  // Closed-form quintic 6u^5 - 15u^4 + 10u^3 against each grid time.
  for (int i = 0; i < kTrajectoryPoints; ++i) {
    const double u = 0.5 * (i + 1) / 4.0;
    const double s = ((6.0 * u - 15.0) * u + 10.0) * u * u * u;
    CHECK(points[i].y == doctest::Approx(4.0 * s).epsilon(1e-12));
  }
  CHECK(points[7].y == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(points[0].y > 0.0);
  CHECK(points[0].y < 0.2);
  for (int i = 1; i < kTrajectoryPoints; ++i) {
    CHECK(points[i].y > points[i - 1].y);  // monotone
  }
  // Zero end slope: the last half-second adds almost nothing laterally.
  CHECK(points[7].y - points[6].y < 0.1);

  const auto right = kinematic_trajectory(plain_snapshot(), Intention::RightLaneChange);
  CHECK(right[7].y == doctest::Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("a degenerate lane width falls back to 3.5 m")
{
  auto snap = plain_snapshot();
  snap.map.lane_width = 0.0;
  const auto points = kinematic_trajectory(snap, Intention::LeftLaneChange);
  CHECK(points[7].y == doctest::Approx(3.5));
}

TEST_CASE("rule-based intention follows the documented heuristic truth table")
{
  SUBCASE("blocked ahead with a free left front in a middle lane goes left")
  {
    auto snap = plain_snapshot();
    snap.neighbors[SlotDirection::Ahead] = NeighborInfo{VehicleClass::Car, 50.0, 30.0, 0.0};
    snap.neighbors[SlotDirection::LeftFront] = NeighborInfo{VehicleClass::Car, 100.0, 40.0, 4.0};
    const auto record = rule_based_predict(snap);
    REQUIRE(record.ok());
    CHECK(record.intention == Intention::LeftLaneChange);
    CHECK(behavior_family(record.behavior) == Intention::LeftLaneChange);
  }

  SUBCASE("no neighbors, a car at steady speed keeps its lane on a straight line")
  {
    const auto record = rule_based_predict(plain_snapshot());
    REQUIRE(record.ok());
    CHECK(record.intention == Intention::KeepLane);
    CHECK(record.behavior == Behavior::NormalKeep);
    for (int i = 0; i < kTrajectoryPoints; ++i) {
      CHECK(record.trajectory[i].x == doctest::Approx(10.0 * (i + 1)));
      CHECK(record.trajectory[i].y == 0.0);
    }
  }

  SUBCASE("a truck in the middle lane with a free lane ahead moves right")
  {
    auto snap = plain_snapshot();
    snap.target_class = VehicleClass::Truck;
    snap.neighbors[SlotDirection::Ahead] = NeighborInfo{VehicleClass::Car, 150.0, 60.0, 0.0};
    const auto record = rule_based_predict(snap);
    CHECK(record.intention == Intention::RightLaneChange);
    CHECK(record.behavior == Behavior::RightToSlowLane);
  }

  SUBCASE("randomized snapshots agree with an independent heuristic transcription")
  {
    std::mt19937_64 rng(55);
    for (int i = 0; i < 3000; ++i) {
      const auto snap = testing::random_snapshot(rng);
      const auto record = rule_based_predict(snap);
      REQUIRE(record.ok());

      // Oracle: gt-free features, then the documented rule order.
      auto neutral = snap;
      neutral.gt_intention = Intention::KeepLane;
      const auto features = label_notable_features(neutral);
      Intention expected = Intention::KeepLane;
      if (features.count(Feature::LeftFrontFree) && features.count(Feature::AheadBlocked) &&
          snap.map.lane_position != LanePosition::Leftmost) {
        expected = Intention::LeftLaneChange;
      } else if ((snap.target_class == VehicleClass::Truck ||
                  features.count(Feature::SignificantDeceleration)) &&
                 snap.map.lane_position != LanePosition::Rightmost) {
        expected = Intention::RightLaneChange;
      }
      CHECK(record.intention == expected);
      CHECK(behavior_family(record.behavior) == record.intention);
    }
  }
}

TEST_CASE("rule-based prediction is deterministic")
{
  std::mt19937_64 rng(66);
  const auto snap = testing::random_snapshot(rng);
  const auto a = rule_based_predict(snap);
  const auto b = rule_based_predict(snap);
  CHECK(a.intention == b.intention);
  CHECK(a.behavior == b.behavior);
  CHECK(a.features == b.features);
  CHECK(a.trajectory == b.trajectory);
}

TEST_CASE("a rule-based batch returns one ok record per snapshot in input order")
{
  std::mt19937_64 rng(88);
  std::vector<SceneSnapshot> snapshots;
  for (int i = 0; i < 25; ++i) {
    auto snap = testing::random_snapshot(rng);
    snap.sample_id = "b" + std::to_string(i);
    snapshots.push_back(snap);
  }
  PredictorConfig config;  // rule_based defaults
  const auto records = predict_batch(snapshots, config);
  REQUIRE(records.size() == snapshots.size());
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].sample_id == snapshots[i].sample_id);
    CHECK(records[i].ok());
  }
}

TEST_CASE("remote predictions round-trip through a stub server")
{
  std::mt19937_64 rng(99);
  const auto triple = testing::random_triple(rng);
  const auto golden = render_answer(triple.annotation, triple.intention, triple.trajectory);

  StubServer stub([&](const json & request, int) {
    CHECK(request.at("model") == "stub-model");
    CHECK(request.at("temperature") == 0.0);
    REQUIRE(request.at("messages").size() == 2);
    CHECK(request.at("messages").at(0).at("role") == "system");
    CHECK(request.at("messages").at(1).at("role") == "user");
    const std::string user = request.at("messages").at(1).at("content");
    CHECK(user.find("Please also explain") != std::string::npos);
    return golden;
  });

  const auto record = predict(plain_snapshot(), remote_config(stub.endpoint()));
  REQUIRE(record.ok());
  CHECK(record.sample_id == "p0");
  CHECK(record.intention == triple.intention);
  CHECK(record.behavior == triple.annotation.behavior);
  CHECK(record.features == triple.annotation.features);
  CHECK(record.trajectory == triple.trajectory);
}

TEST_CASE("garbage responses fail that sample and the batch carries on")
{
  std::mt19937_64 rng(111);
  const auto triple = testing::random_triple(rng);
  const auto golden = render_answer(triple.annotation, triple.intention, triple.trajectory);

  StubServer stub([&](const json &, int index) {
    return index % 3 == 1 ? "%%% not a prediction %%%" : golden;
  });

  std::vector<SceneSnapshot> snapshots;
  for (int i = 0; i < 9; ++i) {
    auto snap = plain_snapshot();
    snap.sample_id = "g" + std::to_string(i);
    snapshots.push_back(snap);
  }
  auto config = remote_config(stub.endpoint());
  config.retries = 0;
  config.max_parallel_requests = 1;  // keep the index<->sample mapping stable
  const auto records = predict_batch(snapshots, config);
  REQUIRE(records.size() == 9);
  int failed = 0;
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].sample_id == snapshots[i].sample_id);
    failed += !records[i].ok();
    if (!records[i].ok()) {
      CHECK(records[i].failure_reason == "intention not found");
      CHECK(records[i].raw_text == "%%% not a prediction %%%");
    }
  }
  CHECK(failed == 3);
}

TEST_CASE("no more than max_parallel_requests calls are in flight at once")
{
  StubServer stub([&](const json &, int) {
    return std::string("Notable features: none.\nPotential behavior: normal keep lane.\n"
                       "Intention: 0 (keep lane).\nTrajectory: [(1.00, 0.00), (2.00, 0.00), "
                       "(3.00, 0.00), (4.00, 0.00), (5.00, 0.00), (6.00, 0.00), (7.00, 0.00), "
                       "(8.00, 0.00)].");
  });
  stub.set_delay_ms(40);

  std::vector<SceneSnapshot> snapshots;
  for (int i = 0; i < 12; ++i) {
    auto snap = plain_snapshot();
    snap.sample_id = "c" + std::to_string(i);
    snapshots.push_back(snap);
  }
  auto config = remote_config(stub.endpoint());
  config.max_parallel_requests = 3;
  const auto records = predict_batch(snapshots, config);
  CHECK(records.size() == 12);
  CHECK(stub.requests() == 12);
  CHECK(stub.peak_in_flight() <= 3);
  CHECK(stub.peak_in_flight() >= 2);  // the pool actually ran concurrently
  for (const auto & r : records) CHECK(r.ok());
}

TEST_CASE("server errors are retried with backoff until they succeed")
{
  std::mt19937_64 rng(123);
  const auto triple = testing::random_triple(rng);
  const auto golden = render_answer(triple.annotation, triple.intention, triple.trajectory);
  StubServer stub([&](const json &, int) { return golden; });
  stub.fail_first(2);

  auto config = remote_config(stub.endpoint());
  config.retries = 3;
  const auto record = predict(plain_snapshot(), config);
  REQUIRE(record.ok());
  CHECK(stub.requests() == 3);  // two 500s, then success
}

TEST_CASE("a timed-out request fails with 'timeout'")
{
  StubServer stub([&](const json &, int) { return "late"; });
  stub.set_delay_ms(1500);
  auto config = remote_config(stub.endpoint());
  config.request_timeout_s = 0.2;
  config.retries = 0;
  const auto record = predict(plain_snapshot(), config);
  CHECK_FALSE(record.ok());
  CHECK(record.failure_reason == "timeout");
}

TEST_CASE("an unreachable endpoint fails with 'transport' after retries")
{
  auto config = remote_config("http://127.0.0.1:9/v1/chat/completions");  // discard port
  config.retries = 1;
  config.request_timeout_s = 0.5;
  const auto record = predict(plain_snapshot(), config);
  CHECK_FALSE(record.ok());
  CHECK(record.failure_reason == "transport");
}

TEST_CASE("config validation names the problem")
{
  PredictorConfig config;
  config.backend = PredictorBackend::Remote;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.endpoint = "http://localhost:1/v1/chat/completions";
  CHECK_THROWS_AS(config.validate(), ConfigError);  // still no model
  config.model_name = "m";
  CHECK_NOTHROW(config.validate());
  config.max_parallel_requests = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}
