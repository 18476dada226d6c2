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
//
// End-to-end checks of the command-line surface: exit codes, output files,
// idempotence. Each case drives the real binary through std::system.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "lckit/archive.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
using namespace lckit;

namespace
{

struct CliResult
{
  int exit_code;
  std::string output;  // stdout only
};

CliResult run_cli(const std::string & args)
{
  const auto out_path = fs::path("cli_stdout.log");
  const std::string command =
    std::string(LCKIT_CLI_PATH) + " " + args + " >" + out_path.string() + " 2>cli_stderr.log";
  const int status = std::system(command.c_str());
  std::ifstream in(out_path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, buffer.str()};
}

std::string read_file(const fs::path & path)
{
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const fs::path & workdir()
{
  static const fs::path dir = [] {
    fs::path d = "cli_tmp";
    fs::remove_all(d);
    fs::create_directories(d);
    testing::write_fixture_files((d / "fixture").string());
    std::ofstream plan(d / "plan.json");
    plan << R"({"seed": 31, "counts": {"LK": 6,
      "LLC": {"T12": 3}, "RLC": {"T23": 3}}})";
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("stats reports the fixture's track split and candidate counts")
{
  const auto result = run_cli("stats --input " + (workdir() / "fixture").string());
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("recordings: 1") != std::string::npos);
  CHECK(result.output.find("tracks: 32 (12 LC, 20 LK, 0 dropped)") != std::string::npos);
  CHECK(result.output.find("LK: ") != std::string::npos);
  CHECK(result.output.find("LLC/T01: ") != std::string::npos);

  // The known construction: 20 LK tracks, one candidate per 4 s window.
  std::istringstream lines(result.output);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("LK: ", 0) == 0) {
      CHECK(std::stoi(line.substr(4)) == 80);
    }
  }
}

TEST_CASE("the full pipeline runs through the CLI with working exit codes")
{
  const auto & dir = workdir();
  const auto out = dir / "out";

  SUBCASE("build-dataset writes the three artifacts")
  {
    const auto result = run_cli("build-dataset --input " + (dir / "fixture").string() +
                                " --plan " + (dir / "plan.json").string() + " --out " +
                                out.string());
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(out / "snapshots.jsonl"));
    CHECK(fs::exists(out / "train.jsonl"));
    CHECK(fs::exists(out / "metadata.jsonl"));
    const auto entries = read_snapshot_archive_file((out / "snapshots.jsonl").string());
    CHECK(entries.size() == 12);
    for (const auto & entry : entries) CHECK(entry.cot.has_value());
  }

  SUBCASE("label is idempotent on an already-annotated archive")
  {
    REQUIRE(run_cli("build-dataset --input " + (dir / "fixture").string() + " --plan " +
                    (dir / "plan.json").string() + " --out " + out.string())
              .exit_code == 0);
    const auto relabeled = dir / "relabeled.jsonl";
    CHECK(run_cli("label --snapshots " + (out / "snapshots.jsonl").string() + " --out " +
                  relabeled.string())
            .exit_code == 0);
    CHECK(read_file(out / "snapshots.jsonl") == read_file(relabeled));
  }

  SUBCASE("render emits inference prompts that stop at [/INST]")
  {
    REQUIRE(run_cli("build-dataset --input " + (dir / "fixture").string() + " --plan " +
                    (dir / "plan.json").string() + " --out " + out.string())
              .exit_code == 0);
    const auto rendered = dir / "prompts.jsonl";
    CHECK(run_cli("render --snapshots " + (out / "snapshots.jsonl").string() +
                  " --mode inference --out " + rendered.string())
            .exit_code == 0);
    const auto text = read_file(rendered);
    CHECK(text.find("[/INST] \"") != std::string::npos);  // json-escaped trailing space
    CHECK(text.find("</s>") == std::string::npos);
    CHECK(text.find("Please also explain") != std::string::npos);
  }

  SUBCASE("predict + evaluate produce reports; reruns are byte-identical")
  {
    REQUIRE(run_cli("build-dataset --input " + (dir / "fixture").string() + " --plan " +
                    (dir / "plan.json").string() + " --out " + out.string())
              .exit_code == 0);
    const auto predictions = dir / "predictions.jsonl";
    CHECK(run_cli("predict --snapshots " + (out / "snapshots.jsonl").string() +
                  " --backend rule_based --out " + predictions.string())
            .exit_code == 0);
    CHECK(run_cli("evaluate --predictions " + predictions.string() + " --snapshots " +
                  (out / "snapshots.jsonl").string() + " --out " + (dir / "report").string())
            .exit_code == 0);
    CHECK(fs::exists(dir / "report" / "report.txt"));
    CHECK(fs::exists(dir / "report" / "report.csv"));
    CHECK(fs::exists(dir / "report" / "report.json"));

    const auto out2 = dir / "out2";
    REQUIRE(run_cli("build-dataset --input " + (dir / "fixture").string() + " --plan " +
                    (dir / "plan.json").string() + " --out " + out2.string())
              .exit_code == 0);
    CHECK(read_file(out / "train.jsonl") == read_file(out2 / "train.jsonl"));
  }
}

TEST_CASE("gen-safety writes one archive line per grid cell")
{
  const auto & dir = workdir();
  const auto all = dir / "safety_all.jsonl";
  CHECK(run_cli("gen-safety --family all --out " + all.string()).exit_code == 0);
  CHECK(read_snapshot_archive_file(all.string()).size() == 240);

  const auto one = dir / "safety_one.jsonl";
  CHECK(run_cli("gen-safety --family left_front_braking --out " + one.string()).exit_code == 0);
  CHECK(read_snapshot_archive_file(one.string()).size() == 60);

  CHECK(run_cli("gen-safety --family bogus --out " + (dir / "x.jsonl").string()).exit_code == 1);
}

TEST_CASE("usage, data and transport failures map to exit codes 1, 2 and 3")
{
  const auto & dir = workdir();

  SUBCASE("missing required flags and files are usage errors")
  {
    CHECK(run_cli("build-dataset").exit_code == 1);
    CHECK(run_cli("evaluate --predictions missing.jsonl --snapshots missing.jsonl --out x")
            .exit_code == 1);
    CHECK(run_cli("nonsense-command").exit_code == 1);
    CHECK(run_cli("predict --snapshots " + (dir / "plan.json").string() +
                  " --backend remote --out x.jsonl")
            .exit_code == 1);  // remote without endpoint/model
  }

  SUBCASE("corrupt data exits 2 and leaves no partial outputs")
  {
    const auto bad = dir / "bad.jsonl";
    std::ofstream(bad) << "{\"sample_id\": \"x\"}\n";  // not a snapshot
    const auto target = dir / "bad_out.jsonl";
    CHECK(run_cli("label --snapshots " + bad.string() + " --out " + target.string())
            .exit_code == 2);
    CHECK_FALSE(fs::exists(target));

    // A prediction for an unknown sample id is a join (data) error.
    REQUIRE(run_cli("build-dataset --input " + (dir / "fixture").string() + " --plan " +
                    (dir / "plan.json").string() + " --out " + (dir / "out3").string())
              .exit_code == 0);
    const auto stray = dir / "stray_predictions.jsonl";
    std::ofstream(stray) << R"({"sample_id":"ghost","parse_status":"failed",)"
                         << R"("failure_reason":"intention not found","raw_text":""})"
                         << "\n";
    CHECK(run_cli("evaluate --predictions " + stray.string() + " --snapshots " +
                  (dir / "out3" / "snapshots.jsonl").string() + " --out " +
                  (dir / "report3").string())
            .exit_code == 2);
  }

  SUBCASE("a complete remote outage exits 3 and writes nothing")
  {
    REQUIRE(run_cli("build-dataset --input " + (dir / "fixture").string() + " --plan " +
                    (dir / "plan.json").string() + " --out " + (dir / "out4").string())
              .exit_code == 0);
    const auto predictions = dir / "failed_predictions.jsonl";
    const auto result =
      run_cli("predict --snapshots " + (dir / "out4" / "snapshots.jsonl").string() +
              " --backend remote --endpoint http://127.0.0.1:9/v1/chat/completions "
              "--model stub --timeout 0.2 --retries 0 --parallel 4 --out " +
              predictions.string());
    CHECK(result.exit_code == 3);
    CHECK_FALSE(fs::exists(predictions));
  }
}
