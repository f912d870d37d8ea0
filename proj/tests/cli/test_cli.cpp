// Copyright 2026 The Shapeprog Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <doctest.h>

#include "shapeprog/fixtures.hpp"
#include "shapeprog/metrics.hpp"

#include <json.hpp>

using namespace shapeprog;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

/// Runs the CLI with `args`, capturing stdout; stderr goes to `err.txt` in the work dir.
/// `env` is prepended as shell variable assignments.
Run cli(const fs::path& work, const std::string& args, const std::string& env = "") {
  const std::string cmd = "cd '" + work.string() + "' && " + env + " '" SHAPEPROG_CLI "' " + args + " 2>err.txt";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path workdir(const std::string& name) {
  auto dir = fs::path(SHAPEPROG_BINARY_DIR) / "cli_work" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST_CASE("eval at zero reproduces the rest meshes") {
  const auto dir = workdir("rest");
  REQUIRE(cli(dir, "fixtures -o fx").code == 0);
  REQUIRE(cli(dir, "build fx/chair/manifest.json -o chair.json").code == 0);
  put(dir / "chair.prog", fixtures::scenario("chair_widen").ground_truth);
  const auto g = build_graph(fixtures::chair());
  for (const std::string graph : {"chair.json", "fixture:chair"}) {
    fs::remove_all(dir / "out");
    auto r = cli(dir, "eval " + graph + " chair.prog --set x=0 -o out");
    REQUIRE(r.code == 0);
    for (int i = 0; i < g.size(); ++i) {
      const auto& n = g.node(i);
      CHECK(std::hash<std::string>{}(slurp(dir / "out" / (n.id + ".obj"))) ==
            std::hash<std::string>{}(format_obj(n.mesh, n.id)));
    }
  }
  // A non-zero setting moves something.
  REQUIRE(cli(dir, "eval fixture:chair chair.prog --set x=0.5 -o moved").code == 0);
  CHECK(slurp(dir / "moved" / "leg_fl.obj") != slurp(dir / "out" / "leg_fl.obj"));
}

TEST_CASE("edit on the chair reproduces the golden program") {
  const auto dir = workdir("edit");
  auto r = cli(dir, "edit fixture:chair --request \"widen the chair\" --provider mock -o chair.prog "
                    "--bundle bundle.json --explain");
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "chair.prog") == slurp(fs::path(SHAPEPROG_SOURCE_DIR) / "fixtures/golden/chair_widen.prog"));
  CHECK(r.out.find("round 1") != std::string::npos);
  CHECK(slurp(dir / "chair.prog.report") == r.out);
  auto bundle = nlohmann::json::parse(slurp(dir / "bundle.json"));
  CHECK(bundle.at("transcript").size() == 20);
  CHECK(bundle.at("type_hints").at("leg_fl") == "translate");

  // Program to stdout when no output is given.
  r = cli(dir, "edit fixture:chair --request \"widen the chair\"");
  CHECK(r.code == 0);
  CHECK(r.out == slurp(dir / "chair.prog"));
}

TEST_CASE("metrics of a program against itself") {
  const auto dir = workdir("metrics");
  put(dir / "gt.prog", fixtures::scenario("table_widen").ground_truth);
  auto r = cli(dir, "metrics fixture:table gt.prog gt.prog --label self --csv m.csv");
  REQUIRE(r.code == 0);
  CHECK(r.out == "label,j_prog,d_geo,pct_rel\nself,1.000000,0.000000,100.0000\n");
  REQUIRE(cli(dir, "metrics fixture:table gt.prog gt.prog --label again --csv m.csv").code == 0);
  CHECK(slurp(dir / "m.csv") == "label,j_prog,d_geo,pct_rel\nself,1.000000,0.000000,100.0000\n"
                                "again,1.000000,0.000000,100.0000\n");
}

TEST_CASE("sweep, compose, requests and procedural") {
  const auto dir = workdir("misc");
  put(dir / "chair.prog", fixtures::scenario("chair_widen").ground_truth);
  auto r = cli(dir, "sweep fixture:chair chair.prog --param x --frames 4 -o frames");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "frames/frame_0003.obj"));
  CHECK(slurp(dir / "frames/frame_0000.obj") != slurp(dir / "frames/frame_0003.obj"));

  r = cli(dir, "compose chair.prog chair.prog");
  REQUIRE(r.code == 0);
  CHECK(parse_program(r.out).params.size() == 2);

  r = cli(dir, "requests fixture:chair");
  CHECK(r.code == 0);
  CHECK(r.out == "widen the seat\nmake the back taller\nlengthen the legs\n");

  r = cli(dir, "procedural fixture:chair -o proc.prog");
  REQUIRE(r.code == 0);
  CHECK(load_program(dir / "proc.prog").params.size() == 3);
}

TEST_CASE("exit codes") {
  const auto dir = workdir("codes");
  put(dir / "chair.prog", fixtures::scenario("chair_widen").ground_truth);
  CHECK(cli(dir, "").code == 2);
  CHECK(cli(dir, "--help").code == 0);
  CHECK(cli(dir, "eval fixture:chair chair.prog --set q=1 -o out").code == 2);
  CHECK(cli(dir, "eval fixture:chair chair.prog --set x=wide -o out").code == 2);
  CHECK(cli(dir, "eval missing.json chair.prog -o out").code == 2);
  CHECK(cli(dir, "eval fixture:spaceship chair.prog -o out").code == 2);
  put(dir / "bad.prog", "op translate nowhere x {dir=1 0 0}\n");
  CHECK(cli(dir, "eval fixture:chair bad.prog -o out").code == 2);
  put(dir / "garbled.prog", "op translate seat (x {dir=1 0 0}\n");
  CHECK(cli(dir, "eval fixture:chair garbled.prog -o out").code == 2);
  CHECK(cli(dir, "edit fixture:chair --request \"paint it red\"").code == 4);
  CHECK(cli(dir, "edit fixture:chair --request x --votes 4").code == 2);
  ::unsetenv("SHAPEPROG_LLM_ENDPOINT");
  CHECK(cli(dir, "edit fixture:chair --request \"widen the chair\" --provider remote").code == 4);
  // Without relation-breaking edits the shelf stalls on its shelves.
  auto r = cli(dir, "edit fixture:shelf --request \"widen the shelf and push the back away\" --no-breaking -o s.prog");
  CHECK(r.code == 3);
  CHECK(slurp(dir / "err.txt").find("shelf_top") != std::string::npos);
  CHECK(fs::exists(dir / "s.prog"));
}

TEST_CASE("config file and environment overrides") {
  const auto dir = workdir("config");
  put(dir / "cfg.json", R"({"votes": 1, "mock_root": "/nonexistent"})");
  // Config mock root is used, then overridden by the environment.
  CHECK(cli(dir, "edit fixture:chair --request \"widen the chair\" --config cfg.json").code == 4);
  const std::string root = std::string(SHAPEPROG_SOURCE_DIR) + "/fixtures/mock";
  auto r = cli(dir, "edit fixture:chair --request \"widen the chair\" --config cfg.json --bundle b.json -o c.prog",
               "SHAPEPROG_MOCK_ROOT='" + root + "'");
  REQUIRE(r.code == 0);
  // One vote per workflow: 1 seed + 1 hints + 2 validity.
  CHECK(nlohmann::json::parse(slurp(dir / "b.json")).at("transcript").size() == 4);
  put(dir / "broken.json", "{votes: ");
  CHECK(cli(dir, "edit fixture:chair --request x --config broken.json").code == 2);
  CHECK(cli(dir, "metrics fixture:chair x y", "SHAPEPROG_N_SAMPLES=lots").code == 2);
  // SHAPEPROG_CONFIG stands in for --config.
  CHECK(cli(dir, "edit fixture:chair --request \"widen the chair\"", "SHAPEPROG_CONFIG=cfg.json").code == 4);
}
