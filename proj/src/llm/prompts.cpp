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

#include <cmath>
#include <sstream>
#include <utility>

#include "shapeprog/llm.hpp"

namespace shapeprog {

namespace {

struct Asset {
  std::string_view name;
  std::string_view text;
};

constexpr Asset kAssets[] = {
#include "prompt_assets.inc"
};

void replace_all(std::string& s, std::string_view key, std::string_view value) {
  for (std::size_t pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size()))
    s.replace(pos, key.size(), value);
}

std::string join_names(const ShapeGraph& g, const std::vector<int>& parts) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k > 0) out += k + 1 == parts.size() ? " and " : ", ";
    out += g.node(parts[k]).display_name();
  }
  return out;
}

}  // namespace

std::string_view workflow_name(Workflow w) {
  switch (w) {
    case Workflow::kSeed: return "seed";
    case Workflow::kHints: return "hints";
    case Workflow::kValidity: return "validity";
    case Workflow::kRequests: return "requests";
    case Workflow::kVariations: return "variations";
  }
  return "seed";
}

std::string_view prompt_template(std::string_view name) {
  for (const auto& a : kAssets)
    if (a.name == name) return a.text;
  throw std::out_of_range("no prompt template '" + std::string(name) + "'");
}

std::string_view prompt_template_version() { return prompt_template("version"); }

std::string describe_parts(const ShapeGraph& g) {
  std::ostringstream os;
  for (int i = 0; i < g.size(); ++i) os << "- " << g.node(i).display_name() << " (id " << g.node(i).id << ")\n";
  return os.str();
}

std::string describe_relation(const ShapeGraph& g, const RelationEdge& e) {
  std::ostringstream os;
  os << e.id << ": ";
  if (e.is_symmetry()) {
    const auto& s = e.symmetry();
    if (s.type == SymmetryType::kReflection) {
      os << "mirror symmetry pairing ";
      for (std::size_t k = 0; k < s.pairs.size(); ++k) {
        if (k > 0) os << (k + 1 == s.pairs.size() ? " and " : ", ");
        os << g.node(s.pairs[k].a).display_name() << " with " << g.node(s.pairs[k].b).display_name();
      }
      int axis = 0;
      s.normal.cwiseAbs().maxCoeff(&axis);
      if (std::abs(s.normal[axis]) > 1.0 - 1e-9) os << " across a plane normal to " << "xyz"[axis];
    } else {
      os << e.kind_name() << " symmetry among " << join_names(g, s.members);
    }
  } else {
    const auto& a = e.attachment();
    os << "attachment between " << g.node(a.a).display_name() << " and " << g.node(a.b).display_name();
  }
  return os.str();
}

std::string render_prompt(Workflow w, const ShapeGraph& g, std::string_view request,
                          const RelationEdge* relation, const PromptOptions& opts) {
  const std::string base(workflow_name(w));
  std::string out(prompt_template(base));
  auto block = [&](bool on, const char* suffix) {
    return on ? std::string(prompt_template(base + suffix)) : std::string();
  };
  std::string relations;
  for (const auto& e : g.edges)
    if (e.enabled) relations += "- " + describe_relation(g, e) + "\n";
  // Blocks first so their own placeholders are filled below.
  replace_all(out, "{{examples}}", block(opts.in_context_examples, "_examples"));
  replace_all(out, "{{cot}}", block(opts.chain_of_thought, "_cot"));
  replace_all(out, "{{reminders}}", block(opts.reminders, "_reminders"));
  replace_all(out, "{{shape}}", g.name);
  replace_all(out, "{{parts}}", describe_parts(g));
  replace_all(out, "{{relations}}", relations);
  replace_all(out, "{{relation}}", relation ? describe_relation(g, *relation) : std::string());
  replace_all(out, "{{request}}", request);
  return out;
}

}  // namespace shapeprog
