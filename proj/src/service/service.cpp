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
#include <bit>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <thread>

#include "shapeprog/fixtures.hpp"
#include "shapeprog/service.hpp"

// After Eigen, see provider.cpp.
#include <httplib.h>
#include <json.hpp>

namespace shapeprog {

using nlohmann::json;

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
}
void put_f32(std::string& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

std::uint32_t get_u32(std::string_view b, std::size_t& pos) {
  if (pos + 4 > b.size()) throw std::invalid_argument("eval frame truncated");
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[pos + k])) << (8 * k);
  pos += 4;
  return v;
}
float get_f32(std::string_view b, std::size_t& pos) { return std::bit_cast<float>(get_u32(b, pos)); }

}  // namespace

std::string encode_eval_frame(const DeformedShape& d) {
  std::size_t size = 12;
  for (const auto& p : d.parts) size += 12 + 4 * (24 + 3 * p.vertices.size());
  std::string out;
  out.reserve(size);
  out.append(kEvalFrameMagic, 4);
  put_u32(out, kEvalFrameVersion);
  put_u32(out, static_cast<std::uint32_t>(d.parts.size()));
  for (const auto& p : d.parts) {
    put_u32(out, static_cast<std::uint32_t>(p.part));
    put_u32(out, static_cast<std::uint32_t>(p.instance));
    put_u32(out, static_cast<std::uint32_t>(p.vertices.size()));
    for (int c = 0; c < 8; ++c)
      for (int a = 0; a < 3; ++a) put_f32(out, p.cage(c, a));
    for (const auto& v : p.vertices)
      for (int a = 0; a < 3; ++a) put_f32(out, v[a]);
  }
  return out;
}

std::vector<DecodedPart> decode_eval_frame(std::string_view bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kEvalFrameMagic, 4) != 0)
    throw std::invalid_argument("not an eval frame");
  std::size_t pos = 4;
  if (get_u32(bytes, pos) != kEvalFrameVersion) throw std::invalid_argument("unsupported eval frame version");
  const std::uint32_t n = get_u32(bytes, pos);
  std::vector<DecodedPart> out;
  for (std::uint32_t i = 0; i < n; ++i) {
    DecodedPart p;
    p.part = get_u32(bytes, pos);
    p.instance = get_u32(bytes, pos);
    const std::uint32_t nv = get_u32(bytes, pos);
    if ((bytes.size() - pos) / 4 < 24 + 3 * static_cast<std::size_t>(nv)) throw std::invalid_argument("eval frame truncated");
    for (int k = 0; k < 24; ++k) p.cage.push_back(get_f32(bytes, pos));
    p.vertices.reserve(3 * static_cast<std::size_t>(nv));
    for (std::size_t k = 0; k < 3 * static_cast<std::size_t>(nv); ++k) p.vertices.push_back(get_f32(bytes, pos));
    out.push_back(std::move(p));
  }
  if (pos != bytes.size()) throw std::invalid_argument("trailing bytes after eval frame");
  return out;
}

namespace {

class HttpError : public std::runtime_error {
 public:
  HttpError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

json params_json(const EditProgram& p) {
  json out = json::array();
  for (const auto& c : p.params) out.push_back({{"name", c.name}, {"lo", c.lo}, {"hi", c.hi}});
  return out;
}

json graph_summary(const ShapeGraph& g) {
  json parts = json::array();
  for (int i = 0; i < g.size(); ++i) {
    const auto& n = g.node(i);
    parts.push_back({{"index", i},
                     {"id", n.id},
                     {"label", n.label},
                     {"phrase", n.phrase},
                     {"name", n.display_name()},
                     {"vertices", n.mesh.vertices.size()}});
  }
  json rels = json::array();
  for (const auto& e : g.edges) {
    json ids = json::array();
    for (int p : e.parts()) ids.push_back(g.node(p).id);
    rels.push_back({{"id", e.id}, {"kind", e.kind_name()}, {"parts", ids}, {"enabled", e.enabled}});
  }
  return {{"name", g.name}, {"diag", g.diag}, {"parts", parts}, {"relations", rels}};
}

json bundle_summary(const InferenceBundle& b) {
  json hints = json::object();
  for (const auto& [part, h] : b.type_hints) hints[part] = std::string(hint_keyword(h));
  json validity = json::object();
  for (const auto& [id, v] : b.relation_validity) validity[id] = v;
  return {{"seeds", print_program(b.seeds)},
          {"relation_validity", validity},
          {"type_hints", hints},
          {"votes", b.votes},
          {"warnings", b.warnings}};
}

struct StoredProgram {
  std::string id;
  std::string request;
  EditProgram program;
};

struct Session {
  std::string id;
  std::shared_ptr<const ShapeGraph> graph;

  // Program state; eval takes it shared, installation exclusive.
  mutable std::shared_mutex mu;
  std::vector<StoredProgram> programs;
  EditProgram active;
  std::shared_ptr<const ProgramEvaluator> evaluator;
  ParamAssignment state;
  json history = json::array();
  std::string report;

  // Serializes read-modify-write of the active program.
  std::mutex install_mu;

  // At most one inference job.
  std::mutex job_mu;
  std::condition_variable job_done;
  bool job_running = false;
  int job_counter = 0;
  int job_status = 0;  // HTTP status of the finished job
  json job_result;
  std::thread worker;

  void install(EditProgram p, json event) {
    auto ev = std::make_shared<const ProgramEvaluator>(*graph, p);
    std::unique_lock lock(mu);
    active = std::move(p);
    evaluator = std::move(ev);
    state = active.zeros();
    history.push_back(std::move(event));
  }
};

json error_body(const std::string& what) { return {{"error", what}}; }

}  // namespace

struct Service::Impl {
  ServiceConfig cfg;
  httplib::Server server;
  std::mutex sessions_mu;
  std::map<std::string, std::shared_ptr<Session>, std::less<>> sessions;
  std::atomic<int> session_counter{0};

  explicit Impl(ServiceConfig c) : cfg(std::move(c)) {
    if (!cfg.providers) {
      auto root = cfg.mock_root;
      cfg.providers = [root](std::string_view kind) -> std::shared_ptr<Provider> {
        if (kind == "mock") return std::make_shared<MockProvider>(root);
        if (kind == "remote") return std::shared_ptr<Provider>(HttpProvider::FromEnvironment());
        throw HttpError(422, "unknown provider '" + std::string(kind) + "'");
      };
    }
    routes();
  }

  ~Impl() {
    server.stop();
    std::vector<std::shared_ptr<Session>> all;
    {
      std::lock_guard lock(sessions_mu);
      for (auto& [id, s] : sessions) all.push_back(s);
    }
    for (auto& s : all)
      if (s->worker.joinable()) s->worker.join();
  }

  std::shared_ptr<Session> find(const std::string& id) {
    std::lock_guard lock(sessions_mu);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw HttpError(404, "unknown session '" + id + "'");
    return it->second;
  }

  static json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
      auto j = json::parse(req.body);
      if (!j.is_object()) throw HttpError(422, "request body must be a JSON object");
      return j;
    } catch (const json::exception& e) {
      throw HttpError(422, std::string("malformed JSON: ") + e.what());
    }
  }

  template <class F>
  httplib::Server::Handler wrap(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        res.status = e.status();
        res.set_content(error_body(e.what()).dump(), "application/json");
      } catch (const ProviderError& e) {
        res.status = 502;
        res.set_content(error_body(e.what()).dump(), "application/json");
      } catch (const json::exception& e) {
        res.status = 422;
        res.set_content(error_body(e.what()).dump(), "application/json");
      } catch (const std::exception& e) {
        res.status = 422;
        res.set_content(error_body(e.what()).dump(), "application/json");
      }
    };
  }

  void routes() {
    server.Post("/session", wrap([this](const httplib::Request& req, httplib::Response& res) {
      create_session(req, res);
    }));
    server.Get(R"(/session/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto s = find(req.matches[1]);
      std::shared_lock lock(s->mu);
      json programs = json::array();
      for (const auto& p : s->programs) programs.push_back({{"id", p.id}, {"request", p.request}});
      json body = {{"id", s->id},
                   {"graph", graph_summary(*s->graph)},
                   {"params", params_json(s->active)},
                   {"state", s->state},
                   {"programs", programs},
                   {"history", s->history}};
      res.set_content(body.dump(), "application/json");
    }));
    server.Post(R"(/session/([^/]+)/request)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      start_request(req, res);
    }));
    server.Get(R"(/session/([^/]+)/request)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto s = find(req.matches[1]);
      std::lock_guard lock(s->job_mu);
      if (s->job_running) {
        res.status = 202;
        res.set_content(json{{"status", "running"}, {"job", s->job_counter}}.dump(), "application/json");
      } else if (s->job_counter == 0) {
        throw HttpError(404, "no request submitted");
      } else {
        res.status = s->job_status;
        res.set_content(s->job_result.dump(), "application/json");
      }
    }));
    server.Post(R"(/session/([^/]+)/eval)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      eval(req, res);
    }));
    server.Post(R"(/session/([^/]+)/compose)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      compose_program(req, res);
    }));
    server.Get(R"(/session/([^/]+)/program)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto s = find(req.matches[1]);
      std::shared_lock lock(s->mu);
      res.set_content(print_program(s->active), "text/plain");
    }));
    server.Get(R"(/session/([^/]+)/report)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      auto s = find(req.matches[1]);
      std::shared_lock lock(s->mu);
      res.set_content(s->report, "text/plain");
    }));
  }

  void create_session(const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    ShapeGraph g;
    if (body.contains("fixture")) {
      g = build_graph(fixtures::by_name(body.at("fixture").get<std::string>()));
    } else if (body.contains("manifest")) {
      g = build_graph(load_manifest(body.at("manifest").get<std::string>()));
    } else if (body.contains("graph")) {
      const auto& jg = body.at("graph");
      g = parse_graph(jg.is_string() ? jg.get<std::string>() : jg.dump());
    } else {
      throw HttpError(422, "expected one of fixture, manifest or graph");
    }
    auto s = std::make_shared<Session>();
    s->id = "s" + std::to_string(++session_counter);
    s->graph = std::make_shared<const ShapeGraph>(std::move(g));
    s->evaluator = std::make_shared<const ProgramEvaluator>(*s->graph, s->active);
    {
      std::lock_guard lock(sessions_mu);
      sessions.emplace(s->id, s);
    }
    res.set_content(json{{"id", s->id}, {"graph", graph_summary(*s->graph)}}.dump(), "application/json");
  }

  void start_request(const httplib::Request& req, httplib::Response& res) {
    auto s = find(req.matches[1]);
    auto body = parse_body(req);
    if (!body.contains("text") || !body.at("text").is_string() || body.at("text").get<std::string>().empty())
      throw HttpError(422, "missing request text");
    const std::string text = body.at("text").get<std::string>();
    InferOptions iopts = cfg.infer;
    if (body.contains("votes")) iopts.n_votes = body.at("votes").get<int>();
    if (iopts.n_votes < 1 || iopts.n_votes % 2 == 0) throw HttpError(422, "votes must be a positive odd number");
    PropagateOptions popts = cfg.propagate;
    if (body.contains("use_nhbd")) popts.use_nhbd = body.at("use_nhbd").get<bool>();
    if (body.contains("use_breaking")) popts.use_breaking = body.at("use_breaking").get<bool>();
    const bool wait = body.value("wait", false);
    auto provider = cfg.providers(body.value("provider", std::string("mock")));

    int job = 0;
    {
      std::lock_guard lock(s->job_mu);
      if (s->job_running) throw HttpError(409, "a request is already in progress");
      if (s->worker.joinable()) s->worker.join();
      s->job_running = true;
      job = ++s->job_counter;
      s->worker = std::thread([s, text, iopts, popts, provider, job] { run_job(s, text, iopts, popts, provider, job); });
    }
    if (!wait) {
      res.status = 202;
      res.set_content(json{{"status", "running"}, {"job", job}}.dump(), "application/json");
      return;
    }
    std::unique_lock lock(s->job_mu);
    s->job_done.wait(lock, [&] { return !s->job_running || s->job_counter != job; });
    res.status = s->job_status;
    res.set_content(s->job_result.dump(), "application/json");
  }

  static void run_job(const std::shared_ptr<Session>& s, const std::string& text, const InferOptions& iopts,
                      const PropagateOptions& popts, const std::shared_ptr<Provider>& provider, int job) {
    json result;
    int status = 200;
    try {
      auto out = run_edit(text, *s->graph, *provider, iopts, popts);
      std::string pid;
      {
        std::unique_lock lock(s->mu);
        pid = "p" + std::to_string(s->programs.size() + 1);
        s->programs.push_back({pid, text, out.result.program});
        s->report = format_report(out.result);
      }
      json states = json::object();
      for (const auto& [id, ok] : out.result.relation_state) states[id] = ok;
      result = {{"status", "done"},
                {"job", job},
                {"program_id", pid},
                {"program", print_program(out.result.program)},
                {"params", params_json(out.result.program)},
                {"bundle", bundle_summary(out.bundle)},
                {"stalled", out.result.stalled},
                {"relation_state", states},
                {"warnings", out.result.warnings}};
      std::lock_guard install(s->install_mu);
      s->install(out.result.program, {{"event", "request"}, {"text", text}, {"program_id", pid}});
    } catch (const ProviderError& e) {
      status = 502;
      result = {{"status", "failed"}, {"job", job}, {"error", e.what()}};
    } catch (const std::exception& e) {
      status = 422;
      result = {{"status", "failed"}, {"job", job}, {"error", e.what()}};
    }
    std::lock_guard lock(s->job_mu);
    s->job_result = std::move(result);
    s->job_status = status;
    s->job_running = false;
    s->job_done.notify_all();
  }

  void eval(const httplib::Request& req, httplib::Response& res) {
    auto s = find(req.matches[1]);
    auto body = parse_body(req);
    std::shared_ptr<const ProgramEvaluator> ev;
    {
      std::shared_lock lock(s->mu);
      ev = s->evaluator;
    }
    const auto t0 = std::chrono::steady_clock::now();
    ParamAssignment sigma = ev->program().zeros();
    if (body.contains("params")) {
      const auto& jp = body.at("params");
      if (!jp.is_object()) throw HttpError(422, "params must be an object");
      for (const auto& [name, value] : jp.items()) {
        if (!ev->program().find_param(name)) throw HttpError(422, "unknown parameter '" + name + "'");
        if (!value.is_number()) throw HttpError(422, "parameter '" + name + "' is not a number");
        sigma[name] = value.get<double>();
      }
    }
    auto frame = encode_eval_frame(ev->evaluate(sigma));
    const auto micros =
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0).count();
    res.set_header("X-Compute-Micros", std::to_string(micros));
    res.set_content(std::move(frame), "application/octet-stream");
  }

  void compose_program(const httplib::Request& req, httplib::Response& res) {
    auto s = find(req.matches[1]);
    auto body = parse_body(req);
    EditProgram extra;
    std::string source;
    {
      std::shared_lock lock(s->mu);
      if (body.contains("program")) {
        source = body.at("program").get<std::string>();
        auto it = std::find_if(s->programs.begin(), s->programs.end(),
                               [&](const StoredProgram& p) { return p.id == source; });
        if (it == s->programs.end()) throw HttpError(422, "unknown program '" + source + "'");
        extra = it->program;
      }
    }
    if (!body.contains("program")) {
      if (!body.contains("text")) throw HttpError(422, "expected program or text");
      extra = parse_program(body.at("text").get<std::string>());
      validate(extra, *s->graph);
      source = "text";
    }
    std::lock_guard install(s->install_mu);
    EditProgram stacked;
    {
      std::shared_lock lock(s->mu);
      stacked = compose(s->active, extra);
    }
    validate(stacked, *s->graph);
    s->install(stacked, {{"event", "compose"}, {"source", source}});
    res.set_content(json{{"program", print_program(stacked)}, {"params", params_json(stacked)}}.dump(),
                    "application/json");
  }
};

Service::Service(ServiceConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}
Service::~Service() = default;

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}
void Service::run() { impl_->server.listen_after_bind(); }
void Service::stop() { impl_->server.stop(); }
void Service::wait_until_ready() { impl_->server.wait_until_ready(); }

}  // namespace shapeprog
