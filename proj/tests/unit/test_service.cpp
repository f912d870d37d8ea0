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

#include <algorithm>
#include <future>
#include <thread>

#include <doctest.h>

#include "shapeprog/fixtures.hpp"
#include "shapeprog/service.hpp"

// After Eigen, see provider.cpp.
#include <httplib.h>
#include <json.hpp>

using namespace shapeprog;
using nlohmann::json;

namespace {

std::filesystem::path mock_root() { return std::filesystem::path(SHAPEPROG_SOURCE_DIR) / "fixtures/mock"; }

/// Service on an ephemeral port, served from a background thread.
struct Running {
  Service service;
  int port = 0;
  std::thread thread;
  httplib::Client client;

  explicit Running(ServiceConfig cfg)
      : service(std::move(cfg)), port(service.bind("127.0.0.1", 0)), client("127.0.0.1", port) {
    thread = std::thread([this] { service.run(); });
    service.wait_until_ready();
    client.set_read_timeout(60, 0);
  }
  ~Running() {
    service.stop();
    thread.join();
  }

  httplib::Result post(const std::string& path, const json& body) {
    return client.Post(path, body.dump(), "application/json");
  }
  std::string session(const std::string& fixture) {
    auto r = post("/session", {{"fixture", fixture}});
    REQUIRE(r);
    REQUIRE(r->status == 200);
    return json::parse(r->body).at("id");
  }
};

ServiceConfig mock_config() {
  ServiceConfig c;
  c.mock_root = mock_root();
  return c;
}

/// Blocks every completion until released.
class GatedProvider : public Provider {
 public:
  explicit GatedProvider(std::shared_future<void> gate, std::shared_ptr<Provider> inner)
      : gate_(std::move(gate)), inner_(std::move(inner)) {}
  std::string complete(const CompletionRequest& r) override {
    gate_.wait();
    return inner_->complete(r);
  }

 private:
  std::shared_future<void> gate_;
  std::shared_ptr<Provider> inner_;
};

class FailingProvider : public Provider {
 public:
  std::string complete(const CompletionRequest&) override { throw ProviderUnavailable("offline"); }
};

std::vector<float> rest_vertices(const ShapeGraph& g, int part) {
  std::vector<float> out;
  for (const auto& v : g.node(part).mesh.vertices)
    for (int a = 0; a < 3; ++a) out.push_back(static_cast<float>(v[a]));
  return out;
}

}  // namespace

TEST_CASE("eval frame round trip and malformed frames") {
  const auto g = build_graph(fixtures::chair());
  auto d = evaluate(parse_program(fixtures::scenario("chair_widen").ground_truth), g, {{"x", 0.5}});
  auto bytes = encode_eval_frame(d);
  CHECK(bytes.substr(0, 4) == "SPEV");
  auto parts = decode_eval_frame(bytes);
  REQUIRE(parts.size() == d.parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    CHECK(parts[i].part == static_cast<std::uint32_t>(d.parts[i].part));
    CHECK(parts[i].vertices.size() == 3 * d.parts[i].vertices.size());
    CHECK(parts[i].cage[3 * 7 + 2] == static_cast<float>(d.parts[i].cage(7, 2)));
  }
  // Little-endian layout independent of the host.
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  CHECK(static_cast<unsigned char>(bytes[8]) == d.parts.size());
  CHECK_THROWS_AS(decode_eval_frame("nope"), std::invalid_argument);
  CHECK_THROWS_AS(decode_eval_frame(bytes.substr(0, bytes.size() - 1)), std::invalid_argument);
  CHECK_THROWS_AS(decode_eval_frame(bytes + "x"), std::invalid_argument);
}

TEST_CASE("sessions, eval at rest and error codes") {
  Running srv(mock_config());
  auto r = srv.post("/session", {{"fixture", "chair"}});
  REQUIRE(r);
  REQUIRE(r->status == 200);
  auto body = json::parse(r->body);
  const std::string id = body.at("id");
  CHECK(body.at("graph").at("parts").size() == 6);
  CHECK(body.at("graph").at("parts").at(1).at("name") == "front left leg");

  const auto g = build_graph(fixtures::chair());
  r = srv.post("/session/" + id + "/eval", json::object());
  REQUIRE(r->status == 200);
  auto parts = decode_eval_frame(r->body);
  REQUIRE(parts.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(parts[static_cast<std::size_t>(i)].vertices == rest_vertices(g, i));

  CHECK(srv.post("/session/nope/eval", json::object())->status == 404);
  CHECK(srv.client.Get("/session/nope/program")->status == 404);
  CHECK(srv.client.Post("/session", "{not json", "application/json")->status == 422);
  CHECK(srv.post("/session", {{"fixture", "spaceship"}})->status == 422);
  CHECK(srv.post("/session", json::object())->status == 422);
  CHECK(srv.post("/session/" + id + "/request", json::object())->status == 422);
  CHECK(srv.post("/session/" + id + "/request", {{"text", "widen the chair"}, {"votes", 4}})->status == 422);
  CHECK(srv.post("/session/" + id + "/request", {{"text", "widen the chair"}, {"provider", "psychic"}})->status == 422);
  CHECK(srv.post("/session/" + id + "/eval", {{"params", {{"x", 0.5}}}})->status == 422);  // no program yet
  CHECK(srv.client.Get("/session/" + id + "/request")->status == 404);

  // Graph uploads round-trip.
  r = srv.post("/session", {{"graph", serialize_graph(g)}});
  REQUIRE(r->status == 200);
  CHECK(json::parse(r->body).at("graph").at("relations").size() == g.edges.size());
}

TEST_CASE("request installs the inferred program") {
  Running srv(mock_config());
  const auto id = srv.session("chair");
  auto r = srv.post("/session/" + id + "/request", {{"text", "widen the chair"}, {"wait", true}});
  REQUIRE(r);
  REQUIRE(r->status == 200);
  auto body = json::parse(r->body);
  const std::string golden = fixtures::scenario("chair_widen").ground_truth;
  CHECK(body.at("program") == golden);
  CHECK(body.at("program_id") == "p1");
  CHECK(body.at("bundle").at("type_hints").at("leg_fl") == "translate");
  CHECK(body.at("bundle").at("relation_validity").at("refl_z_leg") == true);
  CHECK(srv.client.Get("/session/" + id + "/program")->body == golden);
  CHECK(srv.client.Get("/session/" + id + "/report")->body.find("round") != std::string::npos);
  CHECK(srv.client.Get("/session/" + id + "/request")->status == 200);

  // Eval bytes match direct evaluation and repeat exactly.
  const auto g = build_graph(fixtures::chair());
  auto direct = encode_eval_frame(evaluate(parse_program(golden), g, {{"x", 0.4}}));
  auto a = srv.post("/session/" + id + "/eval", {{"params", {{"x", 0.4}}}});
  auto b = srv.post("/session/" + id + "/eval", {{"params", {{"x", 0.4}}}});
  REQUIRE(a->status == 200);
  CHECK(a->body == direct);
  CHECK(a->body == b->body);
  CHECK(a->has_header("X-Compute-Micros"));
  CHECK(srv.post("/session/" + id + "/eval", {{"params", {{"y", 0.4}}}})->status == 422);
  CHECK(srv.post("/session/" + id + "/eval", {{"params", {{"x", "wide"}}}})->status == 422);

  // Stacking the same program again merges parameters.
  r = srv.post("/session/" + id + "/compose", {{"program", "p1"}});
  REQUIRE(r->status == 200);
  body = json::parse(r->body);
  REQUIRE(body.at("params").size() == 2);
  CHECK(body.at("params").at(1).at("name") == "x_2");
  CHECK(srv.client.Get("/session/" + id + "/program")->body == body.at("program").get<std::string>());
  CHECK(srv.post("/session/" + id + "/compose", {{"program", "p9"}})->status == 422);
  CHECK(srv.post("/session/" + id + "/compose", {{"text", "op translate nothing x {dir=1 0 0}"}})->status == 422);
  r = srv.post("/session/" + id + "/compose",
               {{"text", "param y [0, 1]\nop translate back y {dir=0 0 1}\n"}});
  REQUIRE(r->status == 200);
  CHECK(json::parse(r->body).at("params").size() == 3);
  auto info = json::parse(srv.client.Get("/session/" + id)->body);
  CHECK(info.at("history").size() == 3);
  CHECK(info.at("state").at("x_2") == 0.0);
}

TEST_CASE("one job per session, eval stays available, provider failures are 502") {
  std::promise<void> release;
  std::shared_future<void> gate = release.get_future().share();
  ServiceConfig cfg;
  auto mock = std::make_shared<MockProvider>(mock_root());
  cfg.providers = [&](std::string_view kind) -> std::shared_ptr<Provider> {
    if (kind == "mock") return std::make_shared<GatedProvider>(gate, mock);
    if (kind == "down") return std::make_shared<FailingProvider>();
    throw ProviderUnavailable("no such provider");
  };
  Running srv(cfg);
  const auto id = srv.session("chair");
  const auto other = srv.session("chair");

  auto r = srv.post("/session/" + id + "/request", {{"text", "widen the chair"}});
  REQUIRE(r->status == 202);
  CHECK(srv.post("/session/" + id + "/request", {{"text", "widen the chair"}})->status == 409);
  CHECK(srv.client.Get("/session/" + id + "/request")->status == 202);
  // The in-flight job blocks neither eval here nor other sessions.
  CHECK(srv.post("/session/" + id + "/eval", json::object())->status == 200);
  CHECK(srv.post("/session/" + other + "/request", {{"text", "widen the chair"}, {"provider", "down"}, {"wait", true}})
            ->status == 502);
  CHECK(srv.post("/session/" + other + "/request", {{"text", "widen the chair"}, {"provider", "x"}})->status == 502);

  auto before = srv.post("/session/" + other + "/eval", json::object())->body;
  release.set_value();
  int status = 202;
  for (int k = 0; k < 600 && status == 202; ++k) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
    status = srv.client.Get("/session/" + id + "/request")->status;
  }
  CHECK(status == 200);
  CHECK(srv.client.Get("/session/" + id + "/program")->body == fixtures::scenario("chair_widen").ground_truth);
  // Sessions are isolated.
  CHECK(srv.post("/session/" + other + "/eval", json::object())->body == before);
  CHECK(srv.client.Get("/session/" + other + "/program")->body.empty());
  CHECK(json::parse(srv.client.Get("/session/" + other + "/request")->body).at("status") == "failed");
}

TEST_CASE("remote provider without configuration is a 502") {
  ::unsetenv("SHAPEPROG_LLM_ENDPOINT");
  Running srv(mock_config());
  const auto id = srv.session("table");
  auto r = srv.post("/session/" + id + "/request", {{"text", "make the table wider"}, {"provider", "remote"}});
  CHECK(r->status == 502);
}

TEST_CASE("eval latency on the 50-part fixture") {
  Running srv(mock_config());
  const auto id = srv.session("rails50");
  auto r = srv.post("/session/" + id + "/compose", {{"text", fixtures::scenario("rails_widen").ground_truth}});
  REQUIRE(r->status == 200);
  std::vector<long> micros;
  for (int k = 0; k < 41; ++k) {
    auto e = srv.post("/session/" + id + "/eval", {{"params", {{"x", 0.025 * k}}}});
    REQUIRE(e->status == 200);
    micros.push_back(std::stol(e->get_header_value("X-Compute-Micros")));
  }
  std::nth_element(micros.begin(), micros.begin() + 20, micros.end());
  MESSAGE("median server-side eval: " << micros[20] << " us");
  CHECK(micros[20] < 10000);
}
