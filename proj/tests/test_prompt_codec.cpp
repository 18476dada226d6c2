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

#include <fstream>
#include <sstream>

#include <doctest.h>

#include "lckit/cot_labeler.hpp"
#include "lckit/prompt_codec.hpp"
#include "support/synthetic.hpp"

using namespace lckit;

namespace
{

std::string read_golden(const std::string & name)
{
  const std::string path = std::string(LCKIT_SOURCE_DIR) + "/tests/golden/" + name;
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing golden file ", path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

size_t count_occurrences(const std::string & text, const std::string & needle)
{
  size_t count = 0;
  for (size_t at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) {
    ++count;
  }
  return count;
}

/// The frozen snapshot behind the golden files.
SceneSnapshot golden_snapshot()
{
  SceneSnapshot snap;
  snap.sample_id = "r1-t0042-f000230";
  snap.target_class = VehicleClass::Car;
  snap.map = MapSummary{3, LanePosition::Rightmost, 3.75};
  for (int i = 0; i < kHistoryPoints; ++i) {
    const double t = (i - 4) * kStepSeconds;
    snap.history[i] = CanonicalState{30.0 * t, 0.05 * (i % 2), 108.0, 0.6, 0.1};
  }
  snap.neighbors[SlotDirection::Ahead] = NeighborInfo{VehicleClass::Truck, 85.0, 45.3, 0.1};
  snap.neighbors[SlotDirection::LeftFront] = NeighborInfo{VehicleClass::Car, 126.5, 32.5, 3.8};
  snap.neighbors[SlotDirection::LeftRear] = NeighborInfo{VehicleClass::Car, 110.0, -18.75, 3.7};
  snap.gt_intention = Intention::LeftLaneChange;
  snap.advanced_prediction_time = 1.8;
  snap.t_bucket = TBucket::T12;
  for (int i = 0; i < kTrajectoryPoints; ++i) {
    const double t = (i + 1) * kStepSeconds;
    snap.gt_trajectory[i] =
      Point2d{std::round(30.0 * t * 100.0) / 100.0,
              std::round(3.75 * t / 4.0 * t / 4.0 * 100.0) / 100.0};
  }
  return snap;
}

std::string prose(std::mt19937_64 & rng, size_t length)
{
  static const std::array<const char *, 12> words{
    "the",      "vehicle", "appears",  "to",     "slow",  "down",
    "slightly", "before",  "merging",  "again",  "while", "traffic"};
  std::string text;
  while (text.size() < length) {
    text += words[rng() % words.size()];
    text += rng() % 7 == 0 ? ".\n" : " ";
  }
  return text.substr(0, length);
}

}  // namespace

TEST_CASE("format_fixed2 uses a dot, two decimals and no negative zero")
{
  CHECK(format_fixed2(1.5) == "1.50");
  CHECK(format_fixed2(-3.14159) == "-3.14");
  CHECK(format_fixed2(-0.0001) == "0.00");
  CHECK(format_fixed2(0.0) == "0.00");
  CHECK(format_fixed2(27.78 * 3.6) == "100.01");
}

TEST_CASE("empty slots render as eight 'no vehicle' lines")
{
  auto snap = golden_snapshot();
  snap.neighbors = NeighborSlots{};
  const auto text = render_user_message(snap);
  CHECK(count_occurrences(text, "no vehicle") == 8);
  for (const char * name : {"ahead", "left front", "right front", "left side", "right side",
                            "rear", "left rear", "right rear"}) {
    CHECK(text.find(std::string("- ") + name + ":") != std::string::npos);
  }
}

TEST_CASE("an internal speed of 27.78 m/s renders as 100.01 km/h")
{
  auto snap = golden_snapshot();
  for (auto & h : snap.history) h.speed = 27.78 * 3.6;
  const auto text = render_user_message(snap);
  CHECK(text.find("traveling at 100.01 km/h") != std::string::npos);
}

TEST_CASE("the user message matches its golden file byte for byte")
{
  const auto want = read_golden("user_message.txt");
  CHECK(render_user_message(golden_snapshot()) == want);
  CHECK(render_user_message(golden_snapshot()) == want);  // re-render: deterministic
}

TEST_CASE("the training sample matches its golden file byte for byte")
{
  const auto bundle = make_bundle(golden_snapshot(), PromptMode::Training);
  CHECK(assemble_llama_sample(bundle) == read_golden("training_sample.txt"));
}

TEST_CASE("the inference form ends at [/INST] with a single trailing space")
{
  const auto bundle = make_bundle(golden_snapshot(), PromptMode::Inference);
  CHECK_FALSE(bundle.answer.has_value());
  const auto text = assemble_llama_sample(bundle);
  REQUIRE(text.size() > 8);
  CHECK(text.substr(text.size() - 8) == "[/INST] ");
  CHECK(text.find("Please also explain") != std::string::npos);
  CHECK(text.find("</s>") == std::string::npos);
}

TEST_CASE("a training sample contains exactly one [INST] and one [/INST]")
{
  const auto text = assemble_llama_sample(make_bundle(golden_snapshot(), PromptMode::Training));
  CHECK(count_occurrences(text, "[INST]") == 1);
  CHECK(count_occurrences(text, "[/INST]") == 1);
  CHECK(text.rfind("<s>", 0) == 0);
  CHECK(text.substr(text.size() - 5) == " </s>");
  CHECK(count_occurrences(text, "<<SYS>>") == 1);
  CHECK(count_occurrences(text, "<</SYS>>") == 1);
}

TEST_CASE("features are verbalized before the behavior in answer order")
{
  CotAnnotation annotation;
  annotation.features = {Feature::AheadBlocked, Feature::TruckAheadWithin100m};
  annotation.behavior = Behavior::LeftOvertake;
  const auto text =
    render_answer(annotation, Intention::LeftLaneChange, golden_snapshot().gt_trajectory);
  const auto blocked_at = text.find("the lane ahead is blocked");
  const auto truck_at = text.find("there is a truck ahead within 100 meters");
  const auto behavior_at = text.find("change to the left lane for overtaking");
  REQUIRE(blocked_at != std::string::npos);
  REQUIRE(truck_at != std::string::npos);
  REQUIRE(behavior_at != std::string::npos);
  CHECK(blocked_at < behavior_at);
  CHECK(truck_at < behavior_at);
}

TEST_CASE("a keep-lane answer with no features names the intention and eight points")
{
  CotAnnotation annotation;
  annotation.behavior = Behavior::NormalKeep;
  std::array<Point2d, kTrajectoryPoints> straight{};
  for (int i = 0; i < kTrajectoryPoints; ++i) straight[i] = Point2d{10.0 * (i + 1), 0.0};
  const auto text = render_answer(annotation, Intention::KeepLane, straight);
  CHECK(text.find("Notable features: none.") != std::string::npos);
  CHECK(text.find("keep lane") != std::string::npos);
  CHECK(count_occurrences(text, ", 0.00)") == 8);

  const auto record = parse_prediction(text);
  REQUIRE(record.ok());
  CHECK(record.intention == Intention::KeepLane);
  CHECK(record.behavior == Behavior::NormalKeep);
  CHECK(record.features.empty());
}

TEST_CASE("parse_prediction inverts render_answer exactly")
{
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const auto triple = testing::random_triple(rng);
    const auto text = render_answer(triple.annotation, triple.intention, triple.trajectory);
    const auto record = parse_prediction(text);
    REQUIRE_MESSAGE(record.ok(), "failed on: ", text, " reason: ", record.failure_reason);
    CHECK(record.intention == triple.intention);
    CHECK(record.behavior == triple.annotation.behavior);
    CHECK(record.features == triple.annotation.features);
    for (int k = 0; k < kTrajectoryPoints; ++k) {
      CHECK(record.trajectory[k].x == triple.trajectory[k].x);
      CHECK(record.trajectory[k].y == triple.trajectory[k].y);
    }
    CHECK(record.explanation.empty());
  }
}

TEST_CASE("an empty output fails with 'intention not found'")
{
  const auto record = parse_prediction("");
  CHECK_FALSE(record.ok());
  CHECK(record.failure_reason == "intention not found");
  CHECK(record.raw_text == "");
}

TEST_CASE("seven trajectory points name the trajectory as the missing element")
{
  CotAnnotation annotation;
  annotation.behavior = Behavior::LeftOvertake;
  annotation.features = {Feature::AheadBlocked};
  auto text = render_answer(annotation, Intention::LeftLaneChange, golden_snapshot().gt_trajectory);
  const auto last_pair = text.rfind(", (");
  REQUIRE(last_pair != std::string::npos);
  text = text.substr(0, last_pair) + "].";
  const auto record = parse_prediction(text);
  CHECK_FALSE(record.ok());
  CHECK(record.failure_reason == "trajectory: expected 8 points, found 7");
}

TEST_CASE("deleting each mandatory element names that element")
{
  CotAnnotation annotation;
  annotation.behavior = Behavior::LeftOvertake;  // no intention phrase inside
  annotation.features = {Feature::AheadBlocked};
  const auto full =
    render_answer(annotation, Intention::LeftLaneChange, golden_snapshot().gt_trajectory);
  auto drop_line = [&](const std::string & starts_with) {
    std::istringstream in(full);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind(starts_with, 0) == 0) continue;
      out << line << "\n";
    }
    return out.str();
  };

  SUBCASE("intention line")
  {
    const auto record = parse_prediction(drop_line("Intention:"));
    CHECK_FALSE(record.ok());
    CHECK(record.failure_reason == "intention not found");
    CHECK(record.raw_text == drop_line("Intention:"));
  }
  SUBCASE("behavior line")
  {
    const auto record = parse_prediction(drop_line("Potential behavior:"));
    CHECK_FALSE(record.ok());
    CHECK(record.failure_reason == "potential behavior not found");
  }
  SUBCASE("trajectory line")
  {
    const auto record = parse_prediction(drop_line("Trajectory:"));
    CHECK_FALSE(record.ok());
    CHECK(record.failure_reason == "trajectory: expected 8 points, found 0");
  }
}

TEST_CASE("surrounding prose does not disturb the structured fields")
{
  std::mt19937_64 rng(123);
  for (int i = 0; i < 50; ++i) {
    const auto triple = testing::random_triple(rng);
    const auto core = render_answer(triple.annotation, triple.intention, triple.trajectory);
    const auto text = prose(rng, 1 + rng() % 500) + "\n" + core + "\n" + prose(rng, 1 + rng() % 500);
    const auto record = parse_prediction(text);
    REQUIRE_MESSAGE(record.ok(), record.failure_reason);
    CHECK(record.intention == triple.intention);
    CHECK(record.behavior == triple.annotation.behavior);
    CHECK(record.features == triple.annotation.features);
    CHECK(record.trajectory[7].x == triple.trajectory[7].x);
  }
}

TEST_CASE("the free-text explanation after the trajectory is captured")
{
  CotAnnotation annotation;
  annotation.behavior = Behavior::LeftOvertake;
  annotation.features = {Feature::AheadBlocked};
  const auto core =
    render_answer(annotation, Intention::LeftLaneChange, golden_snapshot().gt_trajectory);
  const std::string closing = "This maneuver gains a clear speed advantage.";
  const auto record = parse_prediction(core + "\n" + closing);
  REQUIRE(record.ok());
  CHECK(record.explanation == closing);
}

TEST_CASE("comma decimals are rejected, not misread")
{
  const std::string text =
    "Notable features: none.\n"
    "Potential behavior: normal keep lane.\n"
    "Intention: 0 (keep lane).\n"
    "Trajectory: [(1,50, 0,00), (3,00, 0,00), (4,50, 0,00), (6,00, 0,00), (7,50, 0,00), "
    "(9,00, 0,00), (10,50, 0,00), (12,00, 0,00)].";
  const auto record = parse_prediction(text);
  CHECK_FALSE(record.ok());
  CHECK(record.failure_reason == "trajectory: expected 8 points, found 0");
}

TEST_CASE("the behavior sentence cannot be mistaken for the intention")
{
  // "irregular left lane change" contains the phrase "left lane change";
  // the labelled intention line must win.
  CotAnnotation annotation;
  annotation.behavior = Behavior::IrregularLeft;
  std::array<Point2d, kTrajectoryPoints> traj{};
  for (int i = 0; i < kTrajectoryPoints; ++i) traj[i] = Point2d{5.0 * (i + 1), 0.5 * (i + 1)};
  const auto text = render_answer(annotation, Intention::LeftLaneChange, traj);
  const auto record = parse_prediction(text);
  REQUIRE(record.ok());
  CHECK(record.intention == Intention::LeftLaneChange);
  CHECK(record.behavior == Behavior::IrregularLeft);

  // Same behavior but a deviant intention digit: the digit wins.
  auto twisted = text;
  const auto at = twisted.find("Intention: 1 (left lane change)");
  REQUIRE(at != std::string::npos);
  twisted.replace(at, std::string("Intention: 1 (left lane change)").size(),
                  "Intention: 2 (right lane change)");
  const auto deviant = parse_prediction(twisted);
  REQUIRE(deviant.ok());
  CHECK(deviant.intention == Intention::RightLaneChange);
}

TEST_CASE("prompts for equal snapshots are byte-equal")
{
  std::mt19937_64 rng(321);
  const auto snap = testing::random_snapshot(rng);
  const auto copy = snap;
  CHECK(render_user_message(snap) == render_user_message(copy));
  CHECK(render_user_message(snap, PromptMode::Inference) ==
        render_user_message(copy, PromptMode::Inference));
}
