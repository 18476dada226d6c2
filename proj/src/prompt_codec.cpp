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

#include "lckit/prompt_codec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <vector>

#include "lckit/cot_labeler.hpp"

namespace lckit
{

namespace
{

constexpr const char * kExplanationRequest = "Please also explain the reasons for your prediction.";

const char * intention_phrase(Intention i)
{
  switch (i) {
    case Intention::LeftLaneChange: return "left lane change";
    case Intention::RightLaneChange: return "right lane change";
    default: return "keep lane";
  }
}

const char * feature_phrase(Feature f)
{
  switch (f) {
    case Feature::SignificantLateralMovement:
      return "the target vehicle shows significant lateral movement";
    case Feature::HighLongitudinalAcceleration:
      return "the target vehicle shows high longitudinal acceleration";
    case Feature::SignificantDeceleration:
      return "the target vehicle shows significant deceleration";
    case Feature::AheadFree: return "the lane ahead is free";
    case Feature::AheadBlocked: return "the lane ahead is blocked";
    case Feature::LeftFrontFree: return "the left front is free";
    case Feature::LeftFrontBlocked: return "the left front is blocked";
    case Feature::RightFrontFree: return "the right front is free";
    case Feature::RightFrontBlocked: return "the right front is blocked";
    case Feature::TruckAheadWithin100m: return "there is a truck ahead within 100 meters";
    case Feature::TargetIsTruck: return "the target vehicle is a truck";
  }
  return "";
}

const char * behavior_phrase(Behavior b)
{
  switch (b) {
    case Behavior::LeftOvertake: return "change to the left lane for overtaking";
    case Behavior::LeftToFastLane: return "change left to the fast lane";
    case Behavior::IrregularLeft: return "irregular left lane change";
    case Behavior::RightOvertake: return "change to the right lane for overtaking";
    case Behavior::RightToSlowLane: return "change right to the slow lane";
    case Behavior::IrregularRight: return "irregular right lane change";
    case Behavior::FollowingKeep: return "following and keep lane";
    case Behavior::NormalKeep: return "normal keep lane";
  }
  return "";
}

constexpr std::array<Feature, 11> kAllFeatures{
  Feature::SignificantLateralMovement, Feature::HighLongitudinalAcceleration,
  Feature::SignificantDeceleration,    Feature::AheadFree,
  Feature::AheadBlocked,               Feature::LeftFrontFree,
  Feature::LeftFrontBlocked,           Feature::RightFrontFree,
  Feature::RightFrontBlocked,          Feature::TruckAheadWithin100m,
  Feature::TargetIsTruck};

constexpr std::array<Behavior, 8> kAllBehaviors{
  Behavior::LeftOvertake,  Behavior::LeftToFastLane, Behavior::IrregularLeft,
  Behavior::RightOvertake, Behavior::RightToSlowLane, Behavior::IrregularRight,
  Behavior::FollowingKeep, Behavior::NormalKeep};

std::string lowercase(const std::string & s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string render_point(const Point2d & p)
{
  return "(" + format_fixed2(p.x) + ", " + format_fixed2(p.y) + ")";
}

std::string article_for(VehicleClass c)
{
  return c == VehicleClass::Car ? "a car" : "a truck";
}

// ---- parsing helpers -------------------------------------------------------

bool is_digit(char c) { return c >= '0' && c <= '9'; }

/// Parse "(number, number)" starting at `pos` ('(' expected); numbers use '.'
/// decimals only. Returns the position one past ')' on success.
std::optional<std::pair<Point2d, size_t>> parse_pair(const std::string & text, size_t pos)
{
  auto skip_ws = [&](size_t p) {
    while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
    return p;
  };
  auto parse_number = [&](size_t p) -> std::optional<std::pair<double, size_t>> {
    p = skip_ws(p);
    size_t start = p;
    if (p < text.size() && (text[p] == '-' || text[p] == '+')) ++p;
    size_t digits_begin = p;
    while (p < text.size() && is_digit(text[p])) ++p;
    if (p == digits_begin) return std::nullopt;
    if (p < text.size() && text[p] == '.') {
      ++p;
      size_t frac_begin = p;
      while (p < text.size() && is_digit(text[p])) ++p;
      if (p == frac_begin) return std::nullopt;
    }
    std::string token = text.substr(start, p - start);
    if (!token.empty() && token.front() == '+') token.erase(token.begin());
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
    return std::pair{value, p};
  };

  if (pos >= text.size() || text[pos] != '(') return std::nullopt;
  auto first = parse_number(pos + 1);
  if (!first) return std::nullopt;
  size_t p = skip_ws(first->second);
  if (p >= text.size() || text[p] != ',') return std::nullopt;
  auto second = parse_number(p + 1);
  if (!second) return std::nullopt;
  p = skip_ws(second->second);
  if (p >= text.size() || text[p] != ')') return std::nullopt;
  return std::pair{Point2d{first->first, second->first}, p + 1};
}

std::vector<Point2d> scan_pairs(const std::string & text, size_t from, size_t to)
{
  std::vector<Point2d> points;
  for (size_t pos = from; pos < to && pos < text.size();) {
    if (text[pos] != '(') {
      ++pos;
      continue;
    }
    if (auto parsed = parse_pair(text, pos)) {
      points.push_back(parsed->first);
      pos = parsed->second;
    } else {
      ++pos;
    }
  }
  return points;
}

/// A standalone 0/1/2: not attached to surrounding digits or a decimal tail.
bool standalone_code_at(const std::string & text, size_t pos)
{
  const char c = text[pos];
  if (c != '0' && c != '1' && c != '2') return false;
  if (pos > 0 && (is_digit(text[pos - 1]) || text[pos - 1] == '.' || text[pos - 1] == '-')) {
    return false;
  }
  if (pos + 1 < text.size()) {
    const char next = text[pos + 1];
    if (is_digit(next)) return false;
    if (next == '.' && pos + 2 < text.size() && is_digit(text[pos + 2])) return false;
  }
  return true;
}

std::optional<Intention> intention_at(const std::string & lower, size_t pos)
{
  // Phrase check before the bare digit so "keep lane (0)" reads as a phrase.
  for (auto i : {Intention::LeftLaneChange, Intention::RightLaneChange, Intention::KeepLane}) {
    const std::string phrase = intention_phrase(i);
    if (lower.compare(pos, phrase.size(), phrase) == 0) return i;
  }
  if (standalone_code_at(lower, pos)) {
    return static_cast<Intention>(lower[pos] - '0');
  }
  return std::nullopt;
}

std::optional<Intention> find_intention(const std::string & lower)
{
  // Labelled form first: a code or phrase shortly after the word "intention".
  constexpr size_t kWindow = 80;
  for (size_t at = lower.find("intention"); at != std::string::npos;
       at = lower.find("intention", at + 1)) {
    const size_t begin = at + 9;
    const size_t end = std::min(lower.size(), begin + kWindow);
    for (size_t p = begin; p < end; ++p) {
      if (auto i = intention_at(lower, p)) return i;
    }
  }
  // Fallback: the last bare phrase anywhere (behavior sentences may contain
  // earlier ones, the final statement wins).
  std::optional<Intention> found;
  size_t best = 0;
  for (auto i : {Intention::KeepLane, Intention::LeftLaneChange, Intention::RightLaneChange}) {
    const size_t at = lower.rfind(intention_phrase(i));
    if (at != std::string::npos && (!found || at > best)) {
      found = i;
      best = at;
    }
  }
  return found;
}

std::optional<Behavior> earliest_behavior(const std::string & lower, size_t from, size_t to)
{
  std::optional<Behavior> found;
  size_t best = std::string::npos;
  for (auto b : kAllBehaviors) {
    const size_t at = lower.find(behavior_phrase(b), from);
    if (at != std::string::npos && at < to && at < best) {
      best = at;
      found = b;
    }
  }
  return found;
}

std::optional<Behavior> find_behavior(const std::string & lower)
{
  const size_t label = lower.find("potential behavior");
  if (label != std::string::npos) {
    if (auto b = earliest_behavior(lower, label, label + 150)) return b;
  }
  return earliest_behavior(lower, 0, lower.size());
}

std::string trim(const std::string & s)
{
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_fixed2(double value)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 2);
  std::string s(buf, ptr);
  if (s == "-0.00") s = "0.00";
  return s;
}

const std::string & system_message()
{
  static const std::string message =
    "You are a prediction model integrated into an autonomous driving system. Given a "
    "description of the current highway scenario, predict the lane change intention of the "
    "target vehicle and its trajectory over the next four seconds. All positions are given in "
    "a coordinate system centered on the target vehicle's current position: the x axis points "
    "in its direction of travel and the y axis points to its left. Distances are in meters and "
    "speeds in km/h. First list the notable features of the scenario, then the potential "
    "behavior of the target vehicle, then the lane change intention (0 for keep lane, 1 for "
    "left lane change, 2 for right lane change), and finally the trajectory as eight (x, y) "
    "points at 0.5 second intervals.";
  return message;
}

std::string render_user_message(const SceneSnapshot & snapshot, PromptMode mode)
{
  std::ostringstream out;
  out << "Map information: The road has " << snapshot.map.lane_count
      << " lanes in the direction of travel. The target vehicle is in the "
      << to_string(snapshot.map.lane_position) << " lane.\n";

  const auto & now = snapshot.history.back();
  out << "Target vehicle: " << (snapshot.target_class == VehicleClass::Car ? "A car" : "A truck")
      << " traveling at " << format_fixed2(now.speed)
      << " km/h. Trajectory over the past two seconds: [";
  for (int i = 0; i < kHistoryPoints; ++i) {
    if (i) out << ", ";
    out << render_point(Point2d{snapshot.history[i].x, snapshot.history[i].y});
  }
  out << "].\n";

  out << "Surrounding vehicles:";
  for (int s = 0; s < kNumSlots; ++s) {
    const auto dir = static_cast<SlotDirection>(s);
    auto name = to_string(dir);
    std::replace(name.begin(), name.end(), '_', ' ');
    out << "\n- " << name << ": ";
    const auto & occupant = snapshot.neighbors[dir];
    if (!occupant) {
      out << "no vehicle.";
    } else {
      out << article_for(occupant->vehicle_class) << ", speed " << format_fixed2(occupant->speed)
          << " km/h, longitudinal " << format_fixed2(occupant->relative_x) << " m, lateral "
          << format_fixed2(occupant->relative_y) << " m.";
    }
  }

  if (mode == PromptMode::Inference) out << "\n" << kExplanationRequest;
  return out.str();
}

std::string render_answer(const CotAnnotation & annotation, Intention intention,
                          const std::array<Point2d, kTrajectoryPoints> & trajectory)
{
  std::ostringstream out;
  out << "Notable features: ";
  if (annotation.features.empty()) {
    out << "none";
  } else {
    bool first = true;
    for (auto f : kAllFeatures) {
      if (!annotation.features.count(f)) continue;
      if (!first) out << "; ";
      out << feature_phrase(f);
      first = false;
    }
  }
  out << ".\n";
  out << "Potential behavior: " << behavior_phrase(annotation.behavior) << ".\n";
  out << "Intention: " << static_cast<int>(intention) << " (" << intention_phrase(intention)
      << ").\n";
  out << "Trajectory: [";
  for (int i = 0; i < kTrajectoryPoints; ++i) {
    if (i) out << ", ";
    out << render_point(trajectory[i]);
  }
  out << "].";
  return out.str();
}

PromptBundle make_bundle(const SceneSnapshot & snapshot, PromptMode mode)
{
  PromptBundle bundle;
  bundle.system_message = system_message();
  bundle.user_message = render_user_message(snapshot, mode);
  if (mode == PromptMode::Training) {
    bundle.answer =
      render_answer(annotate(snapshot), snapshot.gt_intention, snapshot.gt_trajectory);
  }
  return bundle;
}

std::string assemble_llama_sample(const PromptBundle & bundle)
{
  std::string text = "<s>[INST] <<SYS>>\n" + bundle.system_message + "\n<</SYS>>\n\n" +
                     bundle.user_message + " [/INST] ";
  if (bundle.answer) text += *bundle.answer + " </s>";
  return text;
}

PredictionRecord parse_prediction(const std::string & output_text)
{
  PredictionRecord record;
  record.raw_text = output_text;
  const std::string lower = lowercase(output_text);

  auto fail = [&](const std::string & reason) {
    record.parse_status = ParseStatus::Failed;
    record.failure_reason = reason;
    return record;
  };

  const auto intention = find_intention(lower);
  if (!intention) return fail("intention not found");

  const auto behavior = find_behavior(lower);
  if (!behavior) return fail("potential behavior not found");

  // Trajectory: decimal pairs after the first "trajectory" marker, bounded
  // by its bracket (or line) so prose around the answer cannot interfere.
  std::vector<Point2d> points;
  size_t explanation_from = std::string::npos;
  const size_t marker = lower.find("trajectory");
  if (marker != std::string::npos) {
    const size_t after = marker + 10;
    const size_t bracket = lower.find('[', after);
    if (bracket != std::string::npos && bracket - after <= 40) {
      size_t close = lower.find(']', bracket);
      if (close == std::string::npos) close = lower.size();
      points = scan_pairs(output_text, bracket, close);
      explanation_from = std::min(lower.size(), close + 1);
      if (explanation_from < lower.size() && lower[explanation_from] == '.') ++explanation_from;
    } else {
      size_t eol = lower.find('\n', after);
      if (eol == std::string::npos) eol = lower.size();
      points = scan_pairs(output_text, after, eol);
      explanation_from = eol;
    }
  } else {
    points = scan_pairs(output_text, 0, output_text.size());
  }
  if (points.size() != kTrajectoryPoints) {
    return fail("trajectory: expected " + std::to_string(kTrajectoryPoints) + " points, found " +
                std::to_string(points.size()));
  }

  record.parse_status = ParseStatus::Ok;
  record.intention = *intention;
  record.behavior = *behavior;
  std::copy(points.begin(), points.end(), record.trajectory.begin());
  for (auto f : kAllFeatures) {
    if (lower.find(feature_phrase(f)) != std::string::npos) record.features.insert(f);
  }
  if (explanation_from != std::string::npos && explanation_from < output_text.size()) {
    record.explanation = trim(output_text.substr(explanation_from));
  }
  record.raw_text.clear();  // kept only for failed parses
  return record;
}

}  // namespace lckit
