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
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "shapeprog/fixtures.hpp"
#include "shapeprog/llm.hpp"
#include "shapeprog/metrics.hpp"
#include "shapeprog/service.hpp"

#include <json.hpp>

using namespace shapeprog;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitStalled = 3;
constexpr int kExitProvider = 4;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  ShapeOptions shape;
  ToleranceDefaults tau;
  int n_samples = 16;
  int votes = 5;
  double temperature = 0.7;
  std::string mock_root = SHAPEPROG_DEFAULT_MOCK_ROOT;
  std::string endpoint;
  std::string model = "gpt-4";
  std::string api_key;
};

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

double env_number(const char* name, double fallback) {
  auto v = env(name);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return d;
  } catch (const std::exception&) {
    throw InputError(std::string(name) + " is not a number: '" + *v + "'");
  }
}

/// Config file (JSON) first, then environment overrides.
Config load_config(const std::string& path_flag) {
  Config c;
  std::string path = path_flag.empty() ? env("SHAPEPROG_CONFIG").value_or("") : path_flag;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read config " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InputError("config " + path + ": " + e.what());
    }
    c.shape.relation_tol_frac = j.value("relation_tol_frac", c.shape.relation_tol_frac);
    c.shape.contact_frac = j.value("contact_frac", c.shape.contact_frac);
    if (j.contains("tau")) {
      const auto& t = j.at("tau");
      c.tau.translate_frac = t.value("translate_frac", c.tau.translate_frac);
      c.tau.scale = t.value("scale", c.tau.scale);
      c.tau.rotate = t.value("rotate", c.tau.rotate);
    }
    c.n_samples = j.value("n_samples", c.n_samples);
    c.votes = j.value("votes", c.votes);
    c.temperature = j.value("temperature", c.temperature);
    c.mock_root = j.value("mock_root", c.mock_root);
    if (j.contains("provider")) {
      const auto& p = j.at("provider");
      c.endpoint = p.value("endpoint", c.endpoint);
      c.model = p.value("model", c.model);
      c.api_key = p.value("api_key", c.api_key);
    }
  }
  c.shape.relation_tol_frac = env_number("SHAPEPROG_RELATION_TOL_FRAC", c.shape.relation_tol_frac);
  c.shape.contact_frac = env_number("SHAPEPROG_CONTACT_FRAC", c.shape.contact_frac);
  c.tau.translate_frac = env_number("SHAPEPROG_TAU_TRANSLATE_FRAC", c.tau.translate_frac);
  c.tau.scale = env_number("SHAPEPROG_TAU_SCALE", c.tau.scale);
  c.tau.rotate = env_number("SHAPEPROG_TAU_ROTATE", c.tau.rotate);
  c.n_samples = static_cast<int>(env_number("SHAPEPROG_N_SAMPLES", c.n_samples));
  c.votes = static_cast<int>(env_number("SHAPEPROG_VOTES", c.votes));
  c.mock_root = env("SHAPEPROG_MOCK_ROOT").value_or(c.mock_root);
  c.endpoint = env("SHAPEPROG_LLM_ENDPOINT").value_or(c.endpoint);
  c.model = env("SHAPEPROG_LLM_MODEL").value_or(c.model);
  c.api_key = env("SHAPEPROG_LLM_API_KEY").value_or(c.api_key);
  if (c.n_samples < 1) throw InputError("n_samples must be positive");
  return c;
}

/// `fixture:<name>` builds a synthetic fixture; anything else is a graph file.
ShapeGraph load_graph_arg(const std::string& arg, const Config& c) {
  const std::string prefix = "fixture:";
  if (arg.rfind(prefix, 0) == 0) return build_graph(fixtures::by_name(arg.substr(prefix.size())), c.shape);
  if (!std::filesystem::exists(arg)) throw InputError("no such graph file: " + arg);
  return load_graph(arg);
}

EditProgram load_program_arg(const std::string& path) {
  if (!std::filesystem::exists(path)) throw InputError("no such program file: " + path);
  return load_program(path);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

ParamAssignment parse_sets(const std::vector<std::string>& sets, const EditProgram& p) {
  ParamAssignment sigma = p.zeros();
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw InputError("--set expects name=value, got '" + s + "'");
    std::string name = s.substr(0, eq);
    if (!p.find_param(name)) throw InputError("unknown parameter '" + name + "'");
    try {
      std::size_t used = 0;
      sigma[name] = std::stod(s.substr(eq + 1), &used);
      if (used != s.size() - eq - 1) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw InputError("bad value in --set '" + s + "'");
    }
  }
  return sigma;
}

std::shared_ptr<Provider> make_provider(const std::string& kind, const Config& c) {
  if (kind == "mock") return std::make_shared<MockProvider>(c.mock_root);
  if (kind == "remote") {
    if (c.endpoint.empty()) throw ProviderUnavailable("no endpoint configured (SHAPEPROG_LLM_ENDPOINT)");
    return std::make_shared<HttpProvider>(c.endpoint, c.model, c.api_key);
  }
  throw InputError("unknown provider '" + kind + "'");
}

InferOptions infer_options(const Config& c, int votes) {
  InferOptions o;
  o.n_votes = votes > 0 ? votes : c.votes;
  o.temperature = c.temperature;
  o.tau = c.tau;
  return o;
}

nlohmann::json bundle_json(const InferenceBundle& b) {
  nlohmann::json hints = nlohmann::json::object();
  for (const auto& [part, h] : b.type_hints) hints[part] = std::string(hint_keyword(h));
  nlohmann::json validity = nlohmann::json::object();
  for (const auto& [id, v] : b.relation_validity) validity[id] = v;
  nlohmann::json transcript = nlohmann::json::array();
  for (const auto& t : b.transcript)
    transcript.push_back({{"workflow", std::string(workflow_name(t.workflow))},
                          {"key", t.key},
                          {"sample", t.sample},
                          {"prompt", t.prompt},
                          {"response", t.response},
                          {"parsed", t.parsed}});
  return {{"seeds", print_program(b.seeds)},
          {"relation_validity", validity},
          {"type_hints", hints},
          {"votes", b.votes},
          {"warnings", b.warnings},
          {"transcript", transcript}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric shape editing: part graphs, edit programs and constraint propagation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (default: $SHAPEPROG_CONFIG)");

  // build
  auto* build = app.add_subcommand("build", "Build a part graph from a mesh manifest");
  std::string manifest, graph_out;
  build->add_option("manifest", manifest, "manifest.json")->required();
  build->add_option("-o,--output", graph_out, "graph file")->required();

  // edit
  auto* edit = app.add_subcommand("edit", "Turn a request into an edit program");
  std::string graph_arg, request, provider_kind = "mock", prog_out, bundle_out;
  int votes = 0;
  bool explain = false, no_nhbd = false, no_breaking = false;
  edit->add_option("graph", graph_arg, "graph file or fixture:<name>")->required();
  edit->add_option("--request", request, "edit request")->required();
  edit->add_option("--provider", provider_kind, "mock | remote")->check(CLI::IsMember({"mock", "remote"}));
  edit->add_option("--votes", votes, "samples per workflow (odd)");
  edit->add_option("-o,--output", prog_out, "program file (default stdout)");
  edit->add_option("--bundle", bundle_out, "write votes, hints and transcript as JSON");
  edit->add_flag("--explain", explain, "print the solver report");
  edit->add_flag("--no-nhbd", no_nhbd, "disable neighbor-derived candidates");
  edit->add_flag("--no-breaking", no_breaking, "stall instead of admitting relation-breaking edits");

  // eval
  auto* evalc = app.add_subcommand("eval", "Evaluate a program to mesh files");
  std::string prog_arg, out_dir;
  std::vector<std::string> sets;
  bool merged = false;
  evalc->add_option("graph", graph_arg)->required();
  evalc->add_option("program", prog_arg)->required();
  evalc->add_option("--set", sets, "name=value (repeatable)");
  evalc->add_option("-o,--output", out_dir, "output directory")->required();
  evalc->add_flag("--merged", merged, "one shape.obj instead of one file per part");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Write a mesh sequence along one parameter");
  std::string sweep_param;
  int frames = 30;
  sweep->add_option("graph", graph_arg)->required();
  sweep->add_option("program", prog_arg)->required();
  sweep->add_option("--param", sweep_param)->required();
  sweep->add_option("--frames", frames)->check(CLI::Range(2, 100000));
  sweep->add_option("--set", sets, "values of the other parameters");
  sweep->add_option("-o,--output", out_dir)->required();

  // compose
  auto* composec = app.add_subcommand("compose", "Stack two programs");
  std::string prog_a, prog_b;
  composec->add_option("first", prog_a)->required();
  composec->add_option("second", prog_b)->required();
  composec->add_option("-o,--output", prog_out);

  // metrics
  auto* metricsc = app.add_subcommand("metrics", "Compare a program with a reference");
  std::string gt_arg, csv_out, label;
  metricsc->add_option("graph", graph_arg)->required();
  metricsc->add_option("program", prog_arg)->required();
  metricsc->add_option("reference", gt_arg)->required();
  metricsc->add_option("--csv", csv_out, "append the row to a CSV file");
  metricsc->add_option("--label", label);

  // requests / procedural
  auto* requests = app.add_subcommand("requests", "Ask the provider for edit requests");
  std::string variations_of;
  requests->add_option("graph", graph_arg)->required();
  requests->add_option("--variations", variations_of, "vary this request instead of proposing new ones");
  requests->add_option("--provider", provider_kind)->check(CLI::IsMember({"mock", "remote"}));
  auto* procedural = app.add_subcommand("procedural", "Build a stacked multi-slider program");
  procedural->add_option("graph", graph_arg)->required();
  procedural->add_option("--provider", provider_kind)->check(CLI::IsMember({"mock", "remote"}));
  procedural->add_option("--votes", votes);
  procedural->add_option("-o,--output", prog_out);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port);
  serve->add_option("--host", host);

  // fixtures
  auto* fixturesc = app.add_subcommand("fixtures", "Write the synthetic fixtures and scenarios");
  fixturesc->add_option("-o,--output", out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    const Config cfg = load_config(config_path);

    if (*build) {
      if (!std::filesystem::exists(manifest)) throw InputError("no such manifest: " + manifest);
      auto g = build_graph(load_manifest(manifest), cfg.shape);
      save_graph(graph_out, g);
      std::cerr << g.name << ": " << g.size() << " parts, " << g.edges.size() << " relations\n";
      for (const auto& w : g.warnings) std::cerr << "warning: " << w << "\n";
      return kExitOk;
    }

    if (*edit) {
      auto g = load_graph_arg(graph_arg, cfg);
      auto provider = make_provider(provider_kind, cfg);
      PropagateOptions popts;
      popts.use_nhbd = !no_nhbd;
      popts.use_breaking = !no_breaking;
      popts.n_samples = cfg.n_samples;
      auto out = run_edit(request, g, *provider, infer_options(cfg, votes), popts);
      const std::string report = format_report(out.result);
      write_text(prog_out, print_program(out.result.program));
      if (!prog_out.empty() && prog_out != "-") write_text(prog_out + ".report", report);
      if (!bundle_out.empty()) write_text(bundle_out, bundle_json(out.bundle).dump(2) + "\n");
      if (explain) (prog_out.empty() ? std::cerr : std::cout) << report;
      for (const auto& w : out.bundle.warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& w : out.result.warnings) std::cerr << "warning: " << w << "\n";
      if (!out.result.stalled.empty()) {
        std::cerr << "stalled parts:";
        for (const auto& s : out.result.stalled) std::cerr << " " << s;
        std::cerr << "\n";
        return kExitStalled;
      }
      return kExitOk;
    }

    if (*evalc) {
      auto g = load_graph_arg(graph_arg, cfg);
      auto p = load_program_arg(prog_arg);
      validate(p, g);
      auto d = evaluate(p, g, parse_sets(sets, p));
      for (const auto& w : d.warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& f : export_meshes(d, g, out_dir, merged)) std::cout << f.string() << "\n";
      return kExitOk;
    }

    if (*sweep) {
      auto g = load_graph_arg(graph_arg, cfg);
      auto p = load_program_arg(prog_arg);
      validate(p, g);
      const ControlParam* c = p.find_param(sweep_param);
      if (!c) throw InputError("unknown parameter '" + sweep_param + "'");
      auto sigma = parse_sets(sets, p);
      ProgramEvaluator ev(g, p);
      std::filesystem::create_directories(out_dir);
      for (int f = 0; f < frames; ++f) {
        sigma[c->name] = c->lo + (c->hi - c->lo) * f / (frames - 1);
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04d.obj", f);
        const auto path = std::filesystem::path(out_dir) / name;
        write_obj(path, deformed_mesh(ev.evaluate(sigma), g), g.name);
        std::cout << path.string() << "\n";
      }
      return kExitOk;
    }

    if (*composec) {
      write_text(prog_out, print_program(compose(load_program_arg(prog_a), load_program_arg(prog_b))));
      return kExitOk;
    }

    if (*metricsc) {
      auto g = load_graph_arg(graph_arg, cfg);
      MetricOptions mo;
      mo.n_samples = cfg.n_samples;
      MetricRow row{label.empty() ? prog_arg : label,
                    evaluate_metrics(load_program_arg(prog_arg), load_program_arg(gt_arg), g, mo)};
      std::cout << metrics_csv_header() << "\n" << metrics_csv_row(row) << "\n";
      if (!csv_out.empty()) {
        const bool fresh = !std::filesystem::exists(csv_out);
        std::ofstream out(csv_out, std::ios::app);
        if (!out) throw InputError("cannot write " + csv_out);
        if (fresh) out << metrics_csv_header() << "\n";
        out << metrics_csv_row(row) << "\n";
      }
      return kExitOk;
    }

    if (*requests) {
      auto g = load_graph_arg(graph_arg, cfg);
      auto provider = make_provider(provider_kind, cfg);
      std::vector<std::string> warnings;
      auto list = variations_of.empty()
                      ? generate_requests(g, *provider, RequestMode::kProcedural, {}, &warnings)
                      : generate_requests(g, *provider, RequestMode::kVariations, variations_of, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& r : list) std::cout << r << "\n";
      return kExitOk;
    }

    if (*procedural) {
      auto g = load_graph_arg(graph_arg, cfg);
      auto provider = make_provider(provider_kind, cfg);
      PropagateOptions popts;
      popts.n_samples = cfg.n_samples;
      std::vector<std::string> used;
      auto p = build_procedural(g, *provider, infer_options(cfg, votes), popts, &used);
      for (std::size_t k = 0; k < used.size(); ++k)
        std::cerr << p.params[std::min(k, p.params.size() - 1)].name << ": " << used[k] << "\n";
      write_text(prog_out, print_program(p));
      return kExitOk;
    }

    if (*serve) {
      ServiceConfig sc;
      sc.mock_root = cfg.mock_root;
      sc.infer = infer_options(cfg, 0);
      sc.propagate.n_samples = cfg.n_samples;
      const std::string endpoint = cfg.endpoint, model = cfg.model, key = cfg.api_key;
      const std::string mock_root = cfg.mock_root;
      sc.providers = [=](std::string_view kind) -> std::shared_ptr<Provider> {
        if (kind == "mock") return std::make_shared<MockProvider>(mock_root);
        if (kind == "remote") {
          if (endpoint.empty()) throw ProviderUnavailable("no endpoint configured (SHAPEPROG_LLM_ENDPOINT)");
          return std::make_shared<HttpProvider>(endpoint, model, key);
        }
        throw ProviderUnavailable("unknown provider '" + std::string(kind) + "'");
      };
      Service service(sc);
      const int bound = service.bind(host, port);
      if (bound < 0) throw InputError("cannot bind " + host + ":" + std::to_string(port));
      std::cerr << "listening on http://" << host << ":" << bound << "\n";
      service.run();
      return kExitOk;
    }

    if (*fixturesc) {
      const std::filesystem::path root(out_dir);
      for (const auto& name : fixtures::names()) fixtures::write_manifest(fixtures::by_name(name), root / name);
      fixtures::write_manifest(fixtures::rails50(), root / "rails50");
      std::filesystem::create_directories(root / "scenarios");
      for (const auto& sc : fixtures::scenarios()) {
        write_text((root / "scenarios" / (sc.name + ".seed.prog")).string(), sc.seeds);
        write_text((root / "scenarios" / (sc.name + ".truth.prog")).string(), sc.ground_truth);
        write_text((root / "scenarios" / (sc.name + ".request.txt")).string(), sc.request + "\n");
      }
      std::cout << root.string() << "\n";
      return kExitOk;
    }
  } catch (const AllResponsesMalformed& e) {
    std::cerr << "provider error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const ProviderError& e) {
    std::cerr << "provider error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const PropagationStalled& e) {
    std::cerr << "solver stalled: " << e.what() << "\n";
    return kExitStalled;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    // Remaining failures are bad inputs: unreadable files, unknown parts,
    // malformed graphs or manifests.
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
