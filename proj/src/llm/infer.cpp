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
#include <future>

#include "shapeprog/llm.hpp"

namespace shapeprog {

namespace {

constexpr std::size_t kMaxInFlight = 8;

/// Runs every request, at most kMaxInFlight at a time when parallel, and
/// returns the responses in request order. The first provider error (in
/// request order) is rethrown after all calls have finished.
std::vector<std::string> run_all(Provider& provider, const std::vector<CompletionRequest>& reqs,
                                 bool parallel) {
  std::vector<std::string> out(reqs.size());
  if (!parallel) {
    for (std::size_t k = 0; k < reqs.size(); ++k) out[k] = provider.complete(reqs[k]);
    return out;
  }
  std::vector<std::exception_ptr> errors(reqs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < reqs.size(); k = next++) {
      try {
        out[k] = provider.complete(reqs[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::future<void>> workers;
  for (std::size_t w = 0; w < std::min(kMaxInFlight, reqs.size()); ++w)
    workers.push_back(std::async(std::launch::async, worker));
  for (auto& f : workers) f.get();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace

InferenceBundle infer(std::string_view request, const ShapeGraph& g, Provider& provider,
                      const InferOptions& opts) {
  if (opts.n_votes < 1 || opts.n_votes % 2 == 0)
    throw std::invalid_argument("n_votes must be a positive odd number");
  const double temperature = opts.n_votes == 1 ? 0.0 : opts.temperature;

  std::vector<CompletionRequest> reqs;
  auto add = [&](Workflow w, const RelationEdge* rel) {
    const std::string prompt = render_prompt(w, g, request, rel, opts.prompts);
    for (int s = 0; s < opts.n_votes; ++s) {
      CompletionRequest r;
      r.workflow = w;
      r.shape = g.name;
      r.request = std::string(request);
      r.key = rel ? rel->id : std::string();
      r.sample = s;
      r.prompt = prompt;
      r.temperature = temperature;
      r.seed = static_cast<std::uint64_t>(s);
      reqs.push_back(std::move(r));
    }
  };
  add(Workflow::kSeed, nullptr);
  add(Workflow::kHints, nullptr);
  for (const auto& e : g.edges)
    if (e.enabled && e.is_symmetry()) add(Workflow::kValidity, &e);

  const auto responses = run_all(provider, reqs, opts.parallel);

  InferenceBundle b;
  std::vector<std::string> seed_answers;
  std::map<std::string, EditProgram> seed_programs;
  std::vector<HintMap> hint_answers;
  std::map<std::string, std::vector<std::string>, std::less<>> validity_answers;
  for (std::size_t k = 0; k < reqs.size(); ++k) {
    const auto& r = reqs[k];
    TranscriptEntry t{r.workflow, r.key, r.sample, r.prompt, responses[k], false};
    switch (r.workflow) {
      case Workflow::kSeed:
        if (auto s = parse_seed_response(responses[k], g, opts.tau)) {
          auto key = print_program(s->program);
          seed_programs.emplace(key, s->program);
          seed_answers.push_back(std::move(key));
          t.parsed = true;
        }
        break;
      case Workflow::kHints:
        if (auto h = parse_hint_response(responses[k], g)) {
          hint_answers.push_back(std::move(*h));
          t.parsed = true;
        }
        break;
      case Workflow::kValidity:
        if (auto v = parse_validity_response(responses[k])) {
          validity_answers[r.key].push_back(*v ? "yes" : "no");
          t.parsed = true;
        }
        break;
      default:
        break;
    }
    b.transcript.push_back(std::move(t));
  }

  if (seed_answers.empty()) {
    b.seed_error = "no seed response could be parsed";
  } else {
    for (const auto& a : seed_answers) ++b.votes["seed"][a];
    b.seeds = seed_programs.at(modal_answer(seed_answers));
  }

  if (hint_answers.empty()) {
    b.warnings.push_back("no type-hint response could be parsed; using no hints");
  } else {
    for (int i = 0; i < g.size(); ++i) {
      const auto& id = g.node(i).id;
      std::vector<std::string> answers;
      for (const auto& h : hint_answers) {
        auto it = h.find(id);
        answers.emplace_back(it == h.end() ? "none" : hint_keyword(it->second));
      }
      for (const auto& a : answers) ++b.votes["hint:" + id][a];
      auto winner = modal_answer(answers);
      if (winner != "none") b.type_hints[id] = *hint_from_keyword(winner);
    }
  }

  for (const auto& e : g.edges) {
    if (!e.enabled || !e.is_symmetry()) continue;
    auto it = validity_answers.find(e.id);
    if (it == validity_answers.end()) {
      b.warnings.push_back("no validity response for " + e.id + " could be parsed; keeping it");
      b.relation_validity[e.id] = true;
      continue;
    }
    for (const auto& a : it->second) ++b.votes["valid:" + e.id][a];
    b.relation_validity[e.id] = modal_answer(it->second) == "yes";
  }
  return b;
}

AppliedBundle apply_bundle(const InferenceBundle& b, const ShapeGraph& g) {
  AppliedBundle out;
  out.seeds = b.seeds;
  out.hints = b.type_hints;
  for (const auto& [id, valid] : b.relation_validity)
    if (!valid) out.disabled.insert(id);
  out.view = out.disabled.empty() ? g : g.with_disabled(out.disabled);
  return out;
}

std::vector<std::string> generate_requests(const ShapeGraph& g, Provider& provider, RequestMode mode,
                                           std::string_view base_request,
                                           std::vector<std::string>* warnings) {
  CompletionRequest r;
  r.workflow = mode == RequestMode::kProcedural ? Workflow::kRequests : Workflow::kVariations;
  r.shape = g.name;
  r.request = std::string(base_request);
  r.prompt = render_prompt(r.workflow, g, base_request, nullptr);
  r.seed = 0;
  auto out = parse_request_lines(provider.complete(r));
  if (out.empty() && warnings) warnings->push_back("provider returned no requests");
  return out;
}

EditOutcome run_edit(std::string_view request, const ShapeGraph& g, Provider& provider,
                     const InferOptions& iopts, PropagateOptions popts) {
  EditOutcome out;
  out.bundle = infer(request, g, provider, iopts);
  if (out.bundle.seed_error) throw AllResponsesMalformed(*out.bundle.seed_error);
  auto applied = apply_bundle(out.bundle, g);
  for (const auto& [part, hint] : applied.hints) popts.hints.emplace(part, hint);
  popts.disabled.insert(applied.disabled.begin(), applied.disabled.end());
  out.result = propagate(g, applied.seeds, popts);
  return out;
}

EditProgram build_procedural(const ShapeGraph& g, Provider& provider, const InferOptions& iopts,
                             const PropagateOptions& popts, std::vector<std::string>* requests) {
  auto reqs = generate_requests(g, provider, RequestMode::kProcedural);
  if (requests) *requests = reqs;
  EditProgram stacked;
  for (const auto& r : reqs) stacked = compose(stacked, run_edit(r, g, provider, iopts, popts).result.program);
  return stacked;
}

}  // namespace shapeprog
