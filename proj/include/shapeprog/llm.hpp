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

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shapeprog/aep.hpp"

namespace shapeprog {

enum class Workflow { kSeed, kHints, kValidity, kRequests, kVariations };
std::string_view workflow_name(Workflow w);

struct CompletionRequest {
  Workflow workflow = Workflow::kSeed;
  std::string shape;    // graph name, keys mock transcripts
  std::string request;  // user text; empty for request generation
  std::string key;      // relation id for validity prompts
  int sample = 0;       // vote index
  std::string prompt;
  double temperature = 0.0;
  std::optional<std::uint64_t> seed;
};

class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ProviderUnavailable : public ProviderError {
 public:
  using ProviderError::ProviderError;
};
/// No seed response parsed; raised by run_edit, recorded by infer.
class AllResponsesMalformed : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

/// Chat-completion backend. Implementations must allow concurrent calls.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const CompletionRequest& req) = 0;
};

/// Replays transcript files:
///   <root>/<shape>/<request-slug>/<workflow>.txt
///   <root>/<shape>/<request-slug>/validity_<relation>.txt  (else validity.txt)
///   <root>/<shape>/requests.txt
/// A file holds one or more responses separated by lines of "=====";
/// vote k reads response k modulo their count.
class MockProvider : public Provider {
 public:
  explicit MockProvider(std::filesystem::path root) : root_(std::move(root)) {}
  std::string complete(const CompletionRequest& req) override;
  std::filesystem::path transcript_path(const CompletionRequest& req) const;

 private:
  std::filesystem::path root_;
};

/// OpenAI-style `POST <endpoint>` with {model, messages, temperature, seed};
/// reads choices[0].message.content. Plain http only.
class HttpProvider : public Provider {
 public:
  HttpProvider(std::string endpoint, std::string model, std::string api_key,
               double timeout_seconds = 60.0);
  /// SHAPEPROG_LLM_ENDPOINT, SHAPEPROG_LLM_MODEL, SHAPEPROG_LLM_API_KEY.
  static std::unique_ptr<HttpProvider> FromEnvironment();
  std::string complete(const CompletionRequest& req) override;

 private:
  std::string host_;
  int port_ = 80;
  std::string path_;
  std::string model_;
  std::string api_key_;
  double timeout_;
};

/// Lowercase alphanumerics joined by '_'.
std::string request_slug(std::string_view request);

struct PromptOptions {
  bool chain_of_thought = true;
  bool in_context_examples = true;
  bool reminders = true;
};

/// Verbal part list: "- front left leg (id leg_fl)".
std::string describe_parts(const ShapeGraph& g);
std::string describe_relation(const ShapeGraph& g, const RelationEdge& e);
/// Raw template asset by name, e.g. "seed" or "seed_cot".
std::string_view prompt_template(std::string_view name);
std::string_view prompt_template_version();
std::string render_prompt(Workflow w, const ShapeGraph& g, std::string_view request,
                          const RelationEdge* relation, const PromptOptions& opts = {});

/// Response grammar, one answer per line anywhere in the text:
///   seed: <kind> <operand> [dir=..] [axis=..] [normal=..] [origin=..]
///         [amount=<expr in x>] [range=<hi>]
///   hint <part>: translate|rotate|scale|none
///   valid: yes|no
///   request: <text>
/// Directions: x y z -x -y -z (world) or u v w -u -v -w (part frame).
/// Origins: center, left right bottom top front back, faceN, edgeN, cornerN.
struct SeedAnswer {
  EditProgram program;  // single parameter x
};
std::optional<SeedAnswer> parse_seed_response(std::string_view text, const ShapeGraph& g,
                                              const ToleranceDefaults& tau = {});
std::optional<HintMap> parse_hint_response(std::string_view text, const ShapeGraph& g);
std::optional<bool> parse_validity_response(std::string_view text);
std::vector<std::string> parse_request_lines(std::string_view text);

/// Winner of a tally: highest count, ties to the earliest-seen answer.
std::string modal_answer(const std::vector<std::string>& answers_in_order);

struct TranscriptEntry {
  Workflow workflow = Workflow::kSeed;
  std::string key;
  int sample = 0;
  std::string prompt;
  std::string response;
  bool parsed = false;
};

struct InferenceBundle {
  EditProgram seeds;
  std::map<std::string, bool, std::less<>> relation_validity;
  HintMap type_hints;
  std::map<std::string, std::map<std::string, int>> votes;
  std::vector<TranscriptEntry> transcript;
  std::optional<std::string> seed_error;  // set when every seed response was malformed
  std::vector<std::string> warnings;
};

struct InferOptions {
  int n_votes = 5;
  double temperature = 0.7;  // used when n_votes > 1
  PromptOptions prompts;
  ToleranceDefaults tau;  // slider range when a seed gives none
  bool parallel = true;
};

/// Three workflows (seed, hints, one validity prompt per symmetry
/// relation), each sampled n_votes times and majority-voted.
InferenceBundle infer(std::string_view request, const ShapeGraph& g, Provider& provider,
                      const InferOptions& opts = {});

struct AppliedBundle {
  EditProgram seeds;
  ShapeGraph view;
  HintMap hints;
  std::set<std::string, std::less<>> disabled;
};
AppliedBundle apply_bundle(const InferenceBundle& b, const ShapeGraph& g);

enum class RequestMode { kProcedural, kVariations };
std::vector<std::string> generate_requests(const ShapeGraph& g, Provider& provider, RequestMode mode,
                                           std::string_view base_request = {},
                                           std::vector<std::string>* warnings = nullptr);

struct EditOutcome {
  InferenceBundle bundle;
  PropagationResult result;
};
/// infer -> apply_bundle -> propagate.
EditOutcome run_edit(std::string_view request, const ShapeGraph& g, Provider& provider,
                     const InferOptions& iopts = {}, PropagateOptions popts = {});

/// Requests from the provider, each solved and stacked with compose.
EditProgram build_procedural(const ShapeGraph& g, Provider& provider, const InferOptions& iopts = {},
                             const PropagateOptions& popts = {},
                             std::vector<std::string>* requests = nullptr);

}  // namespace shapeprog
