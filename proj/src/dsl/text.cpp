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

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "shapeprog/dsl.hpp"

namespace shapeprog {

std::string_view op_keyword(OpKind k) {
  switch (k) {
    case OpKind::kTranslate: return "translate";
    case OpKind::kScale: return "scale";
    case OpKind::kRotate: return "rotate";
    case OpKind::kShear: return "shear";
    case OpKind::kSymGroupCount: return "count";
    case OpKind::kSymGroupSpacing: return "spacing";
  }
  return "";
}

std::optional<OpKind> op_from_keyword(std::string_view s) {
  for (OpKind k : {OpKind::kTranslate, OpKind::kScale, OpKind::kRotate, OpKind::kShear,
                   OpKind::kSymGroupCount, OpKind::kSymGroupSpacing})
    if (op_keyword(k) == s) return k;
  return std::nullopt;
}

std::string Operand::text() const {
  if (relation) return "@" + name;
  switch (feature) {
    case Feature::kWhole: return name;
    case Feature::kFace: return name + ".face" + std::to_string(index);
    case Feature::kEdge: return name + ".edge" + std::to_string(index);
    case Feature::kCorner: return name + ".corner" + std::to_string(index);
  }
  return name;
}

std::vector<int> Operand::corners() const {
  switch (feature) {
    case Feature::kWhole: return {0, 1, 2, 3, 4, 5, 6, 7};
    case Feature::kFace: {
      auto f = face_corners(index);
      return {f.begin(), f.end()};
    }
    case Feature::kEdge: {
      auto e = edge_corners(index);
      return {e.begin(), e.end()};
    }
    case Feature::kCorner: return {index};
  }
  return {};
}

bool EditOp::operator==(const EditOp& o) const {
  if (kind != o.kind || !(operand == o.operand) || !(amount == o.amount)) return false;
  switch (kind) {
    case OpKind::kTranslate: return axis == o.axis;
    case OpKind::kScale:
    case OpKind::kRotate: return origin == o.origin && axis == o.axis;
    case OpKind::kShear: return origin == o.origin && axis == o.axis && normal == o.normal;
    default: return true;
  }
}

ParamRanges EditProgram::ranges() const {
  ParamRanges r;
  for (const auto& p : params) r[p.name] = {p.lo, p.hi};
  return r;
}

ParamAssignment EditProgram::zeros() const {
  ParamAssignment s;
  for (const auto& p : params) s[p.name] = 0.0;
  return s;
}

std::vector<std::string> EditProgram::param_names() const {
  std::vector<std::string> out;
  for (const auto& p : params) out.push_back(p.name);
  return out;
}

const ControlParam* EditProgram::find_param(std::string_view name) const {
  for (const auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

namespace {

std::string vec_text(const Vec3& v) {
  return format_number(v.x()) + " " + format_number(v.y()) + " " + format_number(v.z());
}

class LineParser {
 public:
  LineParser(std::string_view line, int line_no) : s_(line), line_(line_no) {}

  [[noreturn]] void fail(std::size_t pos, const std::string& msg) const {
    throw ParseError(line_, static_cast<int>(pos) + 1, msg);
  }
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  std::size_t pos() const { return pos_; }
  void set_pos(std::size_t p) { pos_ = p; }
  std::string_view rest() const { return s_.substr(pos_); }

  std::string_view word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '\t' && s_[pos_] != '{' &&
           s_[pos_] != '[' && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != ';' &&
           s_[pos_] != '}' && s_[pos_] != '=')
      ++pos_;
    if (start == pos_) fail(start, "expected a word");
    return s_.substr(start, pos_ - start);
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  double number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
                                s_[pos_] == '-' || s_[pos_] == '+' || s_[pos_] == '.' ||
                                s_[pos_] == 'e' || s_[pos_] == 'E'))
      ++pos_;
    double v = 0.0;
    auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (start == pos_ || res.ec != std::errc() || res.ptr != s_.data() + pos_)
      fail(start, "expected a number");
    return v;
  }

 private:
  std::string_view s_;
  int line_;
  std::size_t pos_ = 0;
};

Operand parse_operand(LineParser& lp, std::size_t& start) {
  lp.skip_ws();
  start = lp.pos();
  std::string_view w = lp.word();
  if (w[0] == '@') {
    std::string id(w.substr(1));
    if (id.empty()) lp.fail(start, "expected relation id after '@'");
    return Operand::Relation(id);
  }
  auto dot = w.find('.');
  std::string id(w.substr(0, dot));
  if (!is_valid_part_id(id)) lp.fail(start, "invalid part id '" + id + "'");
  if (dot == std::string_view::npos) return Operand::Part(id);
  std::string_view feat = w.substr(dot + 1);
  struct {
    const char* prefix;
    Feature f;
    int count;
  } kinds[3] = {{"face", Feature::kFace, kNumFaces},
                {"edge", Feature::kEdge, kNumEdges},
                {"corner", Feature::kCorner, kNumCorners}};
  for (const auto& k : kinds) {
    std::string_view pre(k.prefix);
    if (feat.substr(0, pre.size()) != pre) continue;
    std::string_view num = feat.substr(pre.size());
    int idx = -1;
    auto res = std::from_chars(num.data(), num.data() + num.size(), idx);
    if (num.empty() || res.ec != std::errc() || res.ptr != num.data() + num.size() || idx < 0 ||
        idx >= k.count)
      lp.fail(start + dot + 1, "bad feature index '" + std::string(feat) + "'");
    return Operand::FeatureOf(id, k.f, idx);
  }
  lp.fail(start + dot + 1, "unknown feature '" + std::string(feat) + "'");
}

EditOp parse_op(LineParser& lp, int line_no, const std::set<std::string, std::less<>>& declared) {
  EditOp op;
  lp.skip_ws();
  std::size_t kpos = lp.pos();
  auto kind = op_from_keyword(lp.word());
  if (!kind) lp.fail(kpos, "unknown op kind");
  op.kind = *kind;
  std::size_t opos = 0;
  op.operand = parse_operand(lp, opos);
  if (is_group_op(op.kind) != op.operand.relation)
    lp.fail(opos, is_group_op(op.kind) ? "group ops take a @relation operand"
                                       : "part ops take a part operand");

  lp.skip_ws();
  std::size_t apos = lp.pos();
  std::string_view rest = lp.rest();
  std::size_t brace = rest.find('{');
  std::string_view amount_text = rest.substr(0, brace);
  while (!amount_text.empty() && (amount_text.back() == ' ' || amount_text.back() == '\t'))
    amount_text.remove_suffix(1);
  if (amount_text.empty()) lp.fail(apos, "expected amount");
  op.amount = parse_expr(amount_text, line_no, static_cast<int>(apos));
  for (const auto& name : free_params(op.amount))
    if (!declared.count(name)) lp.fail(apos, "undeclared parameter '" + name + "'");
  lp.set_pos(apos + amount_text.size());

  std::set<std::string> required;
  switch (op.kind) {
    case OpKind::kTranslate: required = {"dir"}; break;
    case OpKind::kScale:
    case OpKind::kRotate: required = {"origin", "axis"}; break;
    case OpKind::kShear: required = {"origin", "normal", "dir"}; break;
    default: break;
  }
  std::set<std::string> seen;
  if (lp.peek('{')) {
    std::size_t bpos = lp.pos();
    if (required.empty()) lp.fail(bpos, "group ops take no parameters");
    lp.expect('{');
    while (true) {
      lp.skip_ws();
      std::size_t key_pos = lp.pos();
      std::string key(lp.word());
      if (!required.count(key)) lp.fail(key_pos, "unexpected parameter '" + key + "'");
      if (!seen.insert(key).second) lp.fail(key_pos, "duplicate parameter '" + key + "'");
      lp.expect('=');
      Vec3 v;
      for (int k = 0; k < 3; ++k) v[k] = lp.number();
      if (key == "origin")
        op.origin = v;
      else if (key == "normal")
        op.normal = v;
      else
        op.axis = v;
      if (lp.peek(';')) {
        lp.expect(';');
        continue;
      }
      lp.expect('}');
      break;
    }
  }
  for (const auto& r : required)
    if (!seen.count(r)) lp.fail(lp.pos(), "missing parameter '" + r + "'");
  if (!lp.at_end()) lp.fail(lp.pos(), "trailing text");
  return op;
}

}  // namespace

std::string format_op(const EditOp& op) {
  std::string s = "op ";
  s += op_keyword(op.kind);
  s += " " + op.operand.text() + " " + to_string(op.amount);
  switch (op.kind) {
    case OpKind::kTranslate: s += " {dir=" + vec_text(op.axis) + "}"; break;
    case OpKind::kScale:
    case OpKind::kRotate:
      s += " {origin=" + vec_text(op.origin) + "; axis=" + vec_text(op.axis) + "}";
      break;
    case OpKind::kShear:
      s += " {origin=" + vec_text(op.origin) + "; normal=" + vec_text(op.normal) +
           "; dir=" + vec_text(op.axis) + "}";
      break;
    default: break;
  }
  return s;
}

std::string print_program(const EditProgram& p) {
  std::string out;
  for (const auto& c : p.params)
    out += "param " + c.name + " [" + format_number(c.lo) + ", " + format_number(c.hi) + "]\n";
  for (const auto& op : p.ops) out += format_op(op) + "\n";
  return out;
}

EditProgram parse_program(std::string_view text) {
  EditProgram p;
  std::set<std::string, std::less<>> declared;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    start = end + 1;
    LineParser lp(line, line_no);
    if (lp.at_end() || lp.rest().front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    std::size_t kw_pos = lp.pos();
    std::string_view kw = lp.word();
    if (kw == "param") {
      lp.skip_ws();
      std::size_t npos = lp.pos();
      std::string name(lp.word());
      if (!is_valid_param_name(name)) lp.fail(npos, "invalid parameter name '" + name + "'");
      if (declared.count(name)) lp.fail(npos, "duplicate parameter '" + name + "'");
      lp.expect('[');
      double lo = lp.number();
      lp.expect(',');
      lp.skip_ws();
      std::size_t hpos = lp.pos();
      double hi = lp.number();
      lp.expect(']');
      if (!(hi >= lo)) lp.fail(hpos, "empty range");
      if (!lp.at_end()) lp.fail(lp.pos(), "trailing text");
      declared.insert(name);
      p.params.push_back({name, lo, hi});
    } else if (kw == "op") {
      p.ops.push_back(parse_op(lp, line_no, declared));
    } else {
      lp.fail(kw_pos, "expected 'param' or 'op'");
    }
    if (end == text.size()) break;
  }
  return p;
}

EditProgram load_program(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DslError("cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_program(ss.str());
}

void save_program(const std::filesystem::path& path, const EditProgram& p) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DslError("cannot write " + path.string());
  f << print_program(p);
}

void validate(const EditProgram& p, const ShapeGraph& g) {
  std::set<std::string, std::less<>> names;
  for (const auto& c : p.params) {
    if (!is_valid_param_name(c.name)) throw DslError("invalid parameter name '" + c.name + "'");
    if (!names.insert(c.name).second) throw DslError("duplicate parameter '" + c.name + "'");
    if (!(c.hi >= c.lo)) throw DslError("empty range for '" + c.name + "'");
  }
  for (const auto& op : p.ops) {
    for (const auto& n : free_params(op.amount))
      if (!names.count(n)) throw DslError("undeclared parameter '" + n + "'");
    if (op.operand.relation) {
      int r = g.find_relation(op.operand.name);
      if (r < 0) throw UnknownRelation(op.operand.name);
      const auto& e = g.edges[static_cast<std::size_t>(r)];
      if (!e.is_symmetry() || e.symmetry().type == SymmetryType::kReflection)
        throw DslError("relation '" + op.operand.name + "' is not a symmetry group");
      if (!is_group_op(op.kind)) throw DslError("part op on relation operand");
      continue;
    }
    if (is_group_op(op.kind)) throw DslError("group op on part operand");
    if (g.find_part(op.operand.name) < 0) throw UnknownPart(op.operand.name);
    auto unit = [&](const Vec3& v, const char* what) {
      if (std::abs(v.norm() - 1.0) > 1e-9)
        throw DslError(std::string(what) + " of '" + format_op(op) + "' is not unit length");
    };
    unit(op.axis, "direction");
    if (op.kind == OpKind::kShear) unit(op.normal, "normal");
  }
}

}  // namespace shapeprog
