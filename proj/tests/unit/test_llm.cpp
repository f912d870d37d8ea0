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

#include <atomic>
#include <mutex>
#include <random>
#include <thread>

#include <doctest.h>

#include "shapeprog/fixtures.hpp"
#include "shapeprog/llm.hpp"

// After Eigen, see provider.cpp.
#include <httplib.h>
#include <json.hpp>

using namespace shapeprog;

namespace {

const ShapeGraph& graph_of(const std::string& name) {
  static std::map<std::string, ShapeGraph> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, build_graph(fixtures::by_name(name))).first;
  return it->second;
}

std::filesystem::path mock_root() { return std::filesystem::path(SHAPEPROG_SOURCE_DIR) / "fixtures/mock"; }

/// Answers from a callback and records every request.
class ScriptedProvider : public Provider {
 public:
  explicit ScriptedProvider(std::function<std::string(const CompletionRequest&)> f) : f_(std::move(f)) {}
  std::string complete(const CompletionRequest& req) override {
    {
      std::lock_guard lock(m_);
      seen_.push_back(req);
    }
    return f_(req);
  }
  std::vector<CompletionRequest> seen() {
    std::lock_guard lock(m_);
    return seen_;
  }

 private:
  std::function<std::string(const CompletionRequest&)> f_;
  std::mutex m_;
  std::vector<CompletionRequest> seen_;
};

bool same_program(const EditProgram& a, const EditProgram& b) {
  if (a.params != b.params || a.ops.size() != b.ops.size()) return false;
  for (std::size_t k = 0; k < a.ops.size(); ++k) {
    const auto &p = a.ops[k], &q = b.ops[k];
    if (p.kind != q.kind || !(p.operand == q.operand)) return false;
    if ((p.axis - q.axis).norm() > 1e-12 || (p.origin - q.origin).norm() > 1e-12) return false;
    if (!probably_equal(p.amount, q.amount, a.ranges(), 32, 1e-9)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("request slugs and mock transcript lookup") {
  CHECK(request_slug("Widen the  chair!") == "widen_the_chair");
  CHECK(request_slug("  make it 2x taller ") == "make_it_2x_taller");
  MockProvider mock(mock_root());
  CompletionRequest r;
  r.shape = "chair";
  r.request = "make only the back legs longer";
  r.workflow = Workflow::kValidity;
  r.key = "refl_z_leg";
  CHECK(mock.transcript_path(r).filename() == "validity_refl_z_leg.txt");
  r.key = "refl_x_leg";
  CHECK(mock.transcript_path(r).filename() == "validity.txt");
  r.workflow = Workflow::kRequests;
  CHECK(mock.transcript_path(r) == mock_root() / "chair" / "requests.txt");

  r.workflow = Workflow::kSeed;
  r.request = "widen the chair";
  std::vector<std::string> first;
  for (int s = 0; s < 7; ++s) {
    r.sample = s;
    first.push_back(mock.complete(r));
    CHECK(mock.complete(r) == first.back());
  }
  CHECK(first[5] == first[0]);  // five responses, cycled
  CHECK(first[1] != first[0]);

  r.request = "paint it blue";
  CHECK_THROWS_AS(mock.complete(r), ProviderUnavailable);
}

TEST_CASE("prompts embed parts, request and toggleable blocks") {
  const auto& g = graph_of("chair");
  CHECK(prompt_template_version() == "1");
  CHECK_NOTHROW(prompt_template("one_shot"));
  CHECK_THROWS(prompt_template("nope"));
  const RelationEdge& rel = g.edges[static_cast<std::size_t>(g.find_relation("refl_z_leg"))];
  for (auto w : {Workflow::kSeed, Workflow::kHints, Workflow::kValidity, Workflow::kRequests,
                 Workflow::kVariations}) {
    CAPTURE(workflow_name(w));
    const std::string base(workflow_name(w));
    auto full = render_prompt(w, g, "widen the chair", &rel);
    CHECK(full.find("{{") == std::string::npos);
    CHECK(full.find("- front left leg (id leg_fl)") != std::string::npos);
    CHECK(full.find(prompt_template(base + "_examples")) != std::string::npos);
    CHECK(full.find(prompt_template(base + "_cot")) != std::string::npos);
    CHECK(full.find(prompt_template(base + "_reminders")) != std::string::npos);
    if (w != Workflow::kRequests) CHECK(full.find("widen the chair") != std::string::npos);
    if (w == Workflow::kValidity)
      CHECK(full.find("front left leg with back left leg") != std::string::npos);

    PromptOptions off;
    off.chain_of_thought = false;
    auto no_cot = render_prompt(w, g, "widen the chair", &rel, off);
    CHECK(no_cot.find(prompt_template(base + "_cot")) == std::string::npos);
    CHECK(no_cot.find(prompt_template(base + "_examples")) != std::string::npos);
    off = {};
    off.in_context_examples = false;
    CHECK(render_prompt(w, g, "x", &rel, off).find(prompt_template(base + "_examples")) == std::string::npos);
    off = {};
    off.reminders = false;
    CHECK(render_prompt(w, g, "x", &rel, off).find(prompt_template(base + "_reminders")) == std::string::npos);
  }
}

TEST_CASE("seed grammar") {
  const auto& g = graph_of("chair");
  const auto& seat = g.node(g.find_part("seat")).cage.rest;

  auto s = parse_seed_response("reasoning first\nseed: scale seat axis=x origin=center\n", g);
  REQUIRE(s);
  CHECK(print_program(s->program) == "param x [0, 1]\nop scale seat x {origin=0 0.5625 0; axis=1 0 0}\n");

  s = parse_seed_response("seed: translate leg_fl dir=-x range=0.25 amount=2*x", g);
  REQUIRE(s);
  CHECK(s->program.params.front().hi == 0.25);
  CHECK(s->program.ops.front().axis == Vec3(-1, 0, 0));
  CHECK(format_op(s->program.ops.front()) == "op translate leg_fl 2*x {dir=-1 0 0}");

  s = parse_seed_response("seed: scale seat.face3 axis=y origin=bottom", g);
  REQUIRE(s);
  CHECK(s->program.ops.front().operand == Operand::FeatureOf("seat", Feature::kFace, 3));
  CHECK((s->program.ops.front().origin - face_center(seat, 2)).norm() < 1e-12);

  s = parse_seed_response("seed: rotate back axis=x origin=edge0 range=1", g);
  REQUIRE(s);
  CHECK((s->program.ops.front().origin - edge_midpoint(g.node(g.find_part("back")).cage.rest, 0)).norm() < 1e-12);

  s = parse_seed_response("seed: shear back normal=y dir=z origin=bottom", g);
  REQUIRE(s);
  CHECK(s->program.ops.front().normal == Vec3(0, 1, 0));

  s = parse_seed_response("seed: translate leg_fl dir=x range=1\nseed: translate leg_fr dir=-x", g);
  REQUIRE(s);
  CHECK(s->program.ops.size() == 2);
  CHECK(s->program.params.size() == 1);

  // Default range follows the first op.
  s = parse_seed_response("seed: rotate back axis=x origin=edge0", g);
  REQUIRE(s);
  CHECK(s->program.params.front().hi == doctest::Approx(1.5707963267948966));

  for (const char* bad : {
           "no answer here",
           "seed: stretch seat sideways",
           "seed: scale chair axis=x",
           "seed: scale seat",                    // no axis
           "seed: translate seat axis=x",         // translate takes dir
           "seed: translate seat dir=q",
           "seed: translate seat dir=x dir=y",    // duplicate key
           "seed: translate seat dir=x amount=y",  // other parameter
           "seed: translate seat dir=x amount=(x",
           "seed: translate seat dir=x range=-1",
           "seed: scale seat axis=x origin=middle",
           "seed: shear back normal=y dir=y",     // dir along the normal
           "seed: count seat",
           "seed: translate seat dir=x\nseed: bogus",  // one bad line spoils the response
       }) {
    CAPTURE(bad);
    CHECK_FALSE(parse_seed_response(bad, g));
  }
}

TEST_CASE("hint, validity and request grammars") {
  const auto& g = graph_of("chair");
  auto h = parse_hint_response("The legs follow.\nhint leg_fl: translate\nhint back: Scale\nhint seat: none", g);
  REQUIRE(h);
  CHECK(h->size() == 2);
  CHECK(h->at("leg_fl") == HintKind::kTranslate);
  CHECK(h->at("back") == HintKind::kScale);
  CHECK(parse_hint_response("hints: none", g)->empty());
  CHECK_FALSE(parse_hint_response("nothing", g));
  CHECK_FALSE(parse_hint_response("hint table: translate", g));
  CHECK_FALSE(parse_hint_response("hint back: shear", g));
  CHECK_FALSE(parse_hint_response("hint back: scale\nhint back: rotate", g));
  CHECK_FALSE(parse_hint_response("hint back scale", g));

  CHECK(parse_validity_response("thinking\nvalid: yes") == true);
  CHECK(parse_validity_response("valid: NO") == false);
  CHECK(parse_validity_response("valid: no\nvalid: no") == false);
  CHECK_FALSE(parse_validity_response("valid: maybe"));
  CHECK_FALSE(parse_validity_response("valid: yes\nvalid: no"));
  CHECK_FALSE(parse_validity_response("yes"));

  CHECK(parse_request_lines("intro\nrequest: a\nrequest: b\nrequest: a\nrequest:\n") ==
        std::vector<std::string>{"a", "b"});
}

TEST_CASE("modal answer equals any strict majority") {
  CHECK(modal_answer({"a"}) == "a");
  CHECK(modal_answer({"b", "a", "a"}) == "a");
  CHECK(modal_answer({"b", "a"}) == "b");  // tie to the earliest
  CHECK_THROWS(modal_answer({}));
  std::mt19937 rng(17);
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1)); };
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + 2 * pick(0, 5);
    const int majority = pick(n / 2 + 1, n);
    std::vector<std::string> votes(static_cast<std::size_t>(majority), "win");
    while (static_cast<int>(votes.size()) < n) votes.push_back("other" + std::to_string(pick(0, 2)));
    std::shuffle(votes.begin(), votes.end(), rng);
    CHECK(modal_answer(votes) == "win");
  }
}

TEST_CASE("infer on the chair widening transcript") {
  const auto& g = graph_of("chair");
  MockProvider mock(mock_root());
  auto b = infer("widen the chair", g, mock);

  REQUIRE_FALSE(b.seed_error);
  REQUIRE(b.seeds.ops.size() == 1);
  const auto& seed = b.seeds.ops.front();
  CHECK(seed.kind == OpKind::kScale);
  CHECK(seed.operand == Operand::Part("seat"));
  CHECK(seed.axis == Vec3(1, 0, 0));
  CHECK(b.votes.at("seed").size() == 2);
  int valid_seed_votes = 0;
  for (const auto& [answer, n] : b.votes.at("seed")) valid_seed_votes += n;
  CHECK(valid_seed_votes == 4);  // one malformed response dropped
  CHECK(b.votes.at("seed").at(print_program(b.seeds)) == 3);

  CHECK(b.relation_validity.size() == 2);
  for (const auto& [id, valid] : b.relation_validity) CHECK_MESSAGE(valid, id);
  for (const char* leg : {"leg_fl", "leg_fr", "leg_bl", "leg_br"}) CHECK(b.type_hints.at(leg) == HintKind::kTranslate);
  CHECK(b.type_hints.count("back") == 0);
  CHECK(b.votes.at("hint:back").at("scale") == 2);

  // Seed and hints five times each, then one validity prompt per symmetry relation.
  REQUIRE(b.transcript.size() == 20);
  int unparsed = 0;
  for (const auto& t : b.transcript) {
    CHECK_FALSE(t.prompt.empty());
    unparsed += t.parsed ? 0 : 1;
  }
  CHECK(unparsed == 1);
  CHECK(b.transcript[2].response.find("stretch seat sideways") != std::string::npos);
  CHECK_FALSE(b.transcript[2].parsed);
}

TEST_CASE("single vote is used verbatim at temperature zero") {
  const auto& g = graph_of("chair");
  ScriptedProvider p([](const CompletionRequest& r) -> std::string {
    switch (r.workflow) {
      case Workflow::kSeed: return "seed: scale seat axis=z origin=top";
      case Workflow::kHints: return "hint back: rotate";
      default: return "valid: no";
    }
  });
  InferOptions one;
  one.n_votes = 1;
  auto b = infer("anything", g, p, one);
  CHECK(format_op(b.seeds.ops.front()) == "op scale seat x {origin=0 0.625 0; axis=0 0 1}");
  CHECK(b.type_hints == HintMap{{"back", HintKind::kRotate}});
  CHECK_FALSE(b.relation_validity.at("refl_x_leg"));
  for (const auto& r : p.seen()) CHECK(r.temperature == 0.0);

  one.n_votes = 4;
  CHECK_THROWS_AS(infer("anything", g, p, one), std::invalid_argument);
  one.n_votes = 0;
  CHECK_THROWS_AS(infer("anything", g, p, one), std::invalid_argument);
}

TEST_CASE("every provider call is in the transcript") {
  const auto& g = graph_of("table");
  std::atomic<int> calls{0};
  ScriptedProvider p([&](const CompletionRequest& r) -> std::string {
    ++calls;
    return r.workflow == Workflow::kSeed ? "seed: scale top axis=x" : "hints: none\nvalid: yes";
  });
  for (int votes : {1, 3, 5, 7}) {
    calls = 0;
    InferOptions o;
    o.n_votes = votes;
    auto b = infer("make the table wider", g, p, o);
    CHECK(static_cast<int>(b.transcript.size()) == calls.load());
    CHECK(calls.load() == votes * (2 + 3));
  }
}

TEST_CASE("back legs only disables the front-back mirror") {
  const auto& g = graph_of("chair");
  MockProvider mock(mock_root());
  auto b = infer("make only the back legs longer", g, mock);
  CHECK_FALSE(b.relation_validity.at("refl_z_leg"));
  CHECK(b.relation_validity.at("refl_x_leg"));
  CHECK(b.votes.at("valid:refl_z_leg").at("no") == 4);
  CHECK(b.type_hints.empty());

  auto applied = apply_bundle(b, g);
  CHECK(applied.disabled == std::set<std::string, std::less<>>{"refl_z_leg"});
  CHECK_FALSE(applied.view.edges[static_cast<std::size_t>(g.find_relation("refl_z_leg"))].enabled);

  auto out = run_edit("make only the back legs longer", g, mock);
  CHECK(ops_on_part(out.result.program, "leg_br").size() == 1);
  CHECK(ops_on_part(out.result.program, "leg_fl").empty());
  CHECK(ops_on_part(out.result.program, "leg_fr").empty());
  CHECK(out.result.relation_state.count("refl_z_leg") == 0);
}

TEST_CASE("apply_bundle forwards hints and keeps an all-valid view") {
  const auto& g = graph_of("chair");
  InferenceBundle b;
  b.seeds = parse_program("param x [0, 1]\nop scale seat x {origin=0 0.5625 0; axis=1 0 0}\n");
  for (const auto& e : g.edges)
    if (e.is_symmetry()) b.relation_validity[e.id] = true;
  b.type_hints["back"] = HintKind::kScale;
  auto a = apply_bundle(b, g);
  CHECK(a.disabled.empty());
  CHECK(serialize_graph(a.view) == serialize_graph(g));
  CHECK(a.seeds == b.seeds);
  auto cands = enumerate_candidates(g, g.find_part("back"), a.hints.at("back"));
  REQUIRE_FALSE(cands.empty());
  for (const auto& c : cands) CHECK((c.op.kind == OpKind::kScale || c.op.kind == OpKind::kShear));
}

TEST_CASE("all-malformed responses fall back and surface the seed error") {
  const auto& g = graph_of("chair");
  ScriptedProvider p([](const CompletionRequest&) { return std::string("I am not sure."); });
  auto b = infer("widen the chair", g, p);
  REQUIRE(b.seed_error);
  CHECK(b.type_hints.empty());
  for (const auto& [id, valid] : b.relation_validity) CHECK(valid);
  CHECK(b.relation_validity.size() == 2);
  CHECK(b.warnings.size() == 3);
  CHECK_THROWS_AS(run_edit("widen the chair", g, p), AllResponsesMalformed);
}

TEST_CASE("provider failures propagate as typed errors") {
  const auto& g = graph_of("chair");
  ScriptedProvider p([](const CompletionRequest& r) -> std::string {
    if (r.workflow == Workflow::kValidity && r.sample == 3) throw ProviderUnavailable("down");
    return "valid: yes";
  });
  CHECK_THROWS_AS(infer("widen the chair", g, p), ProviderUnavailable);
  InferOptions serial;
  serial.parallel = false;
  CHECK_THROWS_AS(infer("widen the chair", g, p, serial), ProviderUnavailable);
}

TEST_CASE("mock pipeline is deterministic and parallel-safe") {
  const auto& g = graph_of("chair");
  MockProvider mock(mock_root());
  InferOptions serial;
  serial.parallel = false;
  auto a = run_edit("widen the chair", g, mock);
  auto b = run_edit("widen the chair", g, mock, serial);
  CHECK(print_program(a.result.program) == print_program(b.result.program));
  CHECK(format_report(a.result) == format_report(b.result));
  CHECK(a.bundle.votes == b.bundle.votes);
  REQUIRE(a.bundle.transcript.size() == b.bundle.transcript.size());
  for (std::size_t k = 0; k < a.bundle.transcript.size(); ++k)
    CHECK(a.bundle.transcript[k].response == b.bundle.transcript[k].response);
  CHECK(print_program(a.result.program) == fixtures::scenario("chair_widen").ground_truth);
}

TEST_CASE("scenario transcripts reproduce the reference programs") {
  MockProvider mock(mock_root());
  for (const auto& sc : fixtures::scenarios()) {
    CAPTURE(sc.name);
    const auto& g = graph_of(sc.fixture);
    auto out = run_edit(sc.request, g, mock);
    CHECK(same_program(parse_program(sc.seeds), out.bundle.seeds));
    CHECK(same_program(parse_program(sc.ground_truth), out.result.program));
    CHECK(out.result.stalled.empty());
  }
}

TEST_CASE("request generation and stacked programs") {
  const auto& g = graph_of("chair");
  MockProvider mock(mock_root());
  auto reqs = generate_requests(g, mock, RequestMode::kProcedural);
  CHECK(reqs == std::vector<std::string>{"widen the seat", "make the back taller", "lengthen the legs"});

  std::vector<std::string> used;
  auto stacked = build_procedural(g, mock, {}, {}, &used);
  CHECK(used == reqs);
  CHECK(stacked.param_names() == std::vector<std::string>{"x", "x_2", "x_3"});
  CHECK_NOTHROW(validate(stacked, g));
  // Each slider drives only its own request's edits.
  auto widen = run_edit("widen the seat", g, mock).result.program;
  ParamAssignment sigma = stacked.zeros();
  sigma["x"] = 0.5;
  ParamAssignment sigma1 = widen.zeros();
  sigma1["x"] = 0.5;
  auto c1 = ProgramEvaluator(g, stacked).cages(sigma);
  auto c2 = ProgramEvaluator(g, widen).cages(sigma1);
  for (std::size_t i = 0; i < c1.size(); ++i) CHECK((c1[i] - c2[i]).cwiseAbs().maxCoeff() < 1e-12);
  std::set<std::string> edited;
  for (const auto& op : stacked.ops)
    for (const auto& n : free_params(op.amount))
      if (n == "x_3") edited.insert(op.operand.name);
  CHECK(edited == std::set<std::string>{"leg_fl", "leg_fr", "leg_bl", "leg_br"});

  auto vars = generate_requests(g, mock, RequestMode::kVariations, "widen the chair");
  CHECK(vars.size() >= 2);
  CHECK(std::set<std::string>(vars.begin(), vars.end()).size() == vars.size());

  ScriptedProvider empty([](const CompletionRequest&) { return std::string(); });
  std::vector<std::string> warnings;
  CHECK(generate_requests(g, empty, RequestMode::kProcedural, {}, &warnings).empty());
  CHECK(warnings.size() == 1);
}

TEST_CASE("http provider speaks chat-completion JSON") {
  httplib::Server server;
  std::mutex m;
  nlohmann::json last_body;
  std::string last_auth;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(m);
      last_body = nlohmann::json::parse(req.body);
      last_auth = req.get_header_value("Authorization");
    }
    nlohmann::json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "valid: yes"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  server.Post("/fail", [](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content("boom", "text/plain");
  });
  server.Post("/garbage", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"choices\": []}", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  struct StopGuard {
    httplib::Server& s;
    std::thread& t;
    ~StopGuard() {
      s.stop();
      if (t.joinable()) t.join();
    }
  } guard{server, t};
  server.wait_until_ready();
  const std::string base = "http://127.0.0.1:" + std::to_string(port);

  HttpProvider ok(base + "/v1/chat/completions", "test-model", "secret", 5.0);
  CompletionRequest r;
  r.prompt = "hello";
  r.temperature = 0.7;
  r.seed = 3;
  CHECK(ok.complete(r) == "valid: yes");
  {
    std::lock_guard lock(m);
    CHECK(last_body.at("model") == "test-model");
    CHECK(last_body.at("messages").at(0).at("content") == "hello");
    CHECK(last_body.at("temperature") == 0.7);
    CHECK(last_body.at("seed") == 3);
    CHECK(last_auth == "Bearer secret");
  }
  // Concurrent calls through infer.
  const auto& g = graph_of("chair");
  InferenceBundle b;
  REQUIRE_NOTHROW(b = infer("widen the chair", g, ok));
  CHECK(b.seed_error);  // every response is a validity answer
  CHECK(b.relation_validity.at("refl_x_leg"));

  HttpProvider fail(base + "/fail", "m", "", 5.0);
  CHECK_THROWS_AS(fail.complete(r), ProviderError);
  HttpProvider garbage(base + "/garbage", "m", "", 5.0);
  CHECK_THROWS_AS(garbage.complete(r), ProviderError);
  server.stop();
  t.join();

  HttpProvider down(base + "/v1/chat/completions", "m", "", 1.0);
  CHECK_THROWS_AS(down.complete(r), ProviderUnavailable);
  CHECK_THROWS_AS(HttpProvider("https://example.com/v1", "m", ""), ProviderUnavailable);
  CHECK_THROWS_AS(HttpProvider("http://:80/x", "m", ""), ProviderUnavailable);

  ::unsetenv("SHAPEPROG_LLM_ENDPOINT");
  CHECK_THROWS_AS(HttpProvider::FromEnvironment(), ProviderUnavailable);
  ::setenv("SHAPEPROG_LLM_ENDPOINT", "http://localhost:9/v1", 1);
  CHECK(HttpProvider::FromEnvironment() != nullptr);
  ::unsetenv("SHAPEPROG_LLM_ENDPOINT");
}
