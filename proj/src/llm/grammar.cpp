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
#include <cctype>
#include <charconv>
#include <sstream>

#include "shapeprog/llm.hpp"

namespace shapeprog {

namespace {

std::string_view trim(std::string_view s) {
  auto blank = [](char c) { return std::isspace(static_cast<unsigned char>(c)) || c == '`' || c == '*'; };
  while (!s.empty() && blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && blank(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    auto nl = text.find('\n');
    out.push_back(trim(text.substr(0, nl)));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Remainder of `line` after a case-insensitive `prefix`, if it starts with it.
std::optional<std::string_view> after_prefix(std::string_view line, std::string_view prefix) {
  if (line.size() < prefix.size() || lower(line.substr(0, prefix.size())) != prefix) return std::nullopt;
  return trim(line.substr(prefix.size()));
}

std::vector<std::string> tokens(std::string_view s) {
  std::istringstream is{std::string(s)};
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

std::optional<int> indexed(std::string_view s, std::string_view word, int count) {
  if (s.substr(0, word.size()) != word) return std::nullopt;
  s.remove_prefix(word.size());
  int k = -1;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), k);
  if (ec != std::errc() || ptr != s.data() + s.size() || k < 0 || k >= count) return std::nullopt;
  return k;
}

std::optional<Vec3> direction(std::string_view s, const Hexahedron& cage) {
  double sign = 1.0;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    sign = s.front() == '-' ? -1.0 : 1.0;
    s.remove_prefix(1);
  }
  if (s.size() != 1) return std::nullopt;
  const std::string_view world = "xyz", local = "uvw";
  Vec3 v;
  if (auto k = world.find(s[0]); k != std::string_view::npos)
    v = sign * Vec3::Unit(static_cast<int>(k));
  else if (auto k = local.find(s[0]); k != std::string_view::npos)
    v = sign * cage.axes.col(static_cast<int>(k)).normalized();
  else
    return std::nullopt;
  return Vec3(v + Vec3::Zero());  // -0 -> 0 so printed programs stay canonical
}

std::optional<Vec3> origin_point(std::string_view s, const Hexahedron& cage) {
  const CageCorners& c = cage.rest;
  if (s == "center") return cage_center(c);
  if (auto k = indexed(s, "face", 6)) return face_center(c, *k);
  if (auto k = indexed(s, "edge", 12)) return edge_midpoint(c, *k);
  if (auto k = indexed(s, "corner", 8)) return cage.corner(*k);
  static const std::pair<std::string_view, Vec3> words[] = {
      {"left", -Vec3::UnitX()},  {"right", Vec3::UnitX()}, {"bottom", -Vec3::UnitY()},
      {"top", Vec3::UnitY()},    {"front", -Vec3::UnitZ()}, {"back", Vec3::UnitZ()}};
  for (const auto& [word, dir] : words) {
    if (s != word) continue;
    // Face whose outward offset points most along the named world direction.
    const Vec3 m = cage_center(c);
    int best = 0;
    double best_dot = -1e300;
    for (int f = 0; f < 6; ++f) {
      Vec3 d = face_center(c, f) - m;
      double dot = d.norm() > 0 ? d.normalized().dot(dir) : -1e300;
      if (dot > best_dot) {
        best_dot = dot;
        best = f;
      }
    }
    return face_center(c, best);
  }
  return std::nullopt;
}

std::optional<Operand> operand_of(std::string_view s, const ShapeGraph& g) {
  if (!s.empty() && s.front() == '@') {
    std::string id(s.substr(1));
    if (g.find_relation(id) < 0) return std::nullopt;
    return Operand::Relation(id);
  }
  auto dot = s.find('.');
  std::string id(s.substr(0, dot));
  if (g.find_part(id) < 0) return std::nullopt;
  if (dot == std::string_view::npos) return Operand::Part(id);
  auto feat = s.substr(dot + 1);
  if (auto k = indexed(feat, "face", 6)) return Operand::FeatureOf(id, Feature::kFace, *k);
  if (auto k = indexed(feat, "edge", 12)) return Operand::FeatureOf(id, Feature::kEdge, *k);
  if (auto k = indexed(feat, "corner", 8)) return Operand::FeatureOf(id, Feature::kCorner, *k);
  return std::nullopt;
}

struct SeedLine {
  EditOp op;
  std::optional<double> range;
};

std::optional<SeedLine> parse_seed_line(std::string_view body, const ShapeGraph& g) {
  auto t = tokens(body);
  if (t.size() < 2) return std::nullopt;
  auto kind = op_from_keyword(lower(t[0]));
  auto operand = operand_of(t[1], g);
  if (!kind || !operand) return std::nullopt;
  SeedLine out;
  out.op.kind = *kind;
  out.op.operand = *operand;
  out.op.amount = SymExpr::Param("x");
  if (is_group_op(*kind) != operand->relation) return std::nullopt;

  std::map<std::string, std::string, std::less<>> keys;
  for (std::size_t k = 2; k < t.size(); ++k) {
    auto eq = t[k].find('=');
    if (eq == std::string::npos || eq == 0) return std::nullopt;
    if (!keys.emplace(lower(t[k].substr(0, eq)), t[k].substr(eq + 1)).second) return std::nullopt;
  }
  const Hexahedron* cage = operand->relation ? nullptr : &g.node(g.find_part(operand->name)).cage;
  std::optional<Vec3> dir, axis, normal, origin;
  for (const auto& [key, value] : keys) {
    if (key == "amount") {
      try {
        out.op.amount = parse_expr(value);
      } catch (const std::exception&) {
        return std::nullopt;
      }
      for (const auto& n : free_params(out.op.amount))
        if (n != "x") return std::nullopt;
    } else if (key == "range") {
      double r = 0.0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), r);
      if (ec != std::errc() || ptr != value.data() + value.size() || !(r > 0.0)) return std::nullopt;
      out.range = r;
    } else if (!cage) {
      return std::nullopt;
    } else if (key == "dir" && (dir = direction(value, *cage))) {
    } else if (key == "axis" && (axis = direction(value, *cage))) {
    } else if (key == "normal" && (normal = direction(value, *cage))) {
    } else if (key == "origin" && (origin = origin_point(value, *cage))) {
    } else {
      return std::nullopt;
    }
  }
  const Vec3 center = cage ? cage_center(cage->rest) : Vec3::Zero();
  switch (*kind) {
    case OpKind::kTranslate:
      if (!dir || axis || normal || origin) return std::nullopt;
      out.op.axis = *dir;
      break;
    case OpKind::kScale:
    case OpKind::kRotate:
      if (!axis || dir || normal) return std::nullopt;
      out.op.axis = *axis;
      out.op.origin = origin.value_or(center);
      break;
    case OpKind::kShear:
      if (!dir || !normal || axis || std::abs(dir->dot(*normal)) > 1e-9) return std::nullopt;
      out.op.axis = *dir;
      out.op.normal = *normal;
      out.op.origin = origin.value_or(center);
      break;
    case OpKind::kSymGroupCount:
    case OpKind::kSymGroupSpacing:
      break;
  }
  return out;
}

}  // namespace

std::optional<SeedAnswer> parse_seed_response(std::string_view text, const ShapeGraph& g,
                                              const ToleranceDefaults& tau) {
  std::vector<SeedLine> seeds;
  for (auto line : lines_of(text)) {
    auto body = after_prefix(line, "seed:");
    if (!body) continue;
    auto s = parse_seed_line(*body, g);
    if (!s) return std::nullopt;
    seeds.push_back(std::move(*s));
  }
  if (seeds.empty()) return std::nullopt;
  SeedAnswer out;
  double hi = seeds.front().range.value_or(0.0);
  for (const auto& s : seeds)
    if (s.range && hi == 0.0) hi = *s.range;
  if (hi == 0.0) hi = default_tau(seeds.front().op, g, tau);
  out.program.params.push_back({"x", 0.0, hi});
  for (auto& s : seeds) out.program.ops.push_back(std::move(s.op));
  try {
    validate(out.program, g);
  } catch (const DslError&) {
    return std::nullopt;
  }
  return out;
}

std::optional<HintMap> parse_hint_response(std::string_view text, const ShapeGraph& g) {
  HintMap out;
  std::set<std::string, std::less<>> seen;
  bool explicit_none = false;
  for (auto line : lines_of(text)) {
    if (auto rest = after_prefix(line, "hints:")) {
      if (lower(*rest) != "none") return std::nullopt;
      explicit_none = true;
      continue;
    }
    auto body = after_prefix(line, "hint ");
    if (!body) continue;
    auto colon = body->find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    std::string part(trim(body->substr(0, colon)));
    std::string kind = lower(trim(body->substr(colon + 1)));
    if (g.find_part(part) < 0 || !seen.insert(part).second) return std::nullopt;
    if (kind == "none") continue;
    auto h = hint_from_keyword(kind);
    if (!h) return std::nullopt;
    out[part] = *h;
  }
  if (seen.empty() && !explicit_none) return std::nullopt;
  if (explicit_none && !out.empty()) return std::nullopt;
  return out;
}

std::optional<bool> parse_validity_response(std::string_view text) {
  std::optional<bool> out;
  for (auto line : lines_of(text)) {
    auto body = after_prefix(line, "valid:");
    if (!body) continue;
    auto v = lower(*body);
    bool value;
    if (v == "yes")
      value = true;
    else if (v == "no")
      value = false;
    else
      return std::nullopt;
    if (out && *out != value) return std::nullopt;
    out = value;
  }
  return out;
}

std::vector<std::string> parse_request_lines(std::string_view text) {
  std::vector<std::string> out;
  for (auto line : lines_of(text)) {
    auto body = after_prefix(line, "request:");
    if (!body || body->empty()) continue;
    std::string r(*body);
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(std::move(r));
  }
  return out;
}

std::string modal_answer(const std::vector<std::string>& answers_in_order) {
  if (answers_in_order.empty()) throw std::invalid_argument("modal_answer: no answers");
  std::map<std::string, int, std::less<>> count;
  for (const auto& a : answers_in_order) ++count[a];
  const std::string* best = &answers_in_order.front();
  for (const auto& a : answers_in_order)
    if (count[a] > count[*best]) best = &a;
  return *best;
}

}  // namespace shapeprog
