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
#include <cmath>
#include <system_error>

#include "shapeprog/symbolic.hpp"

namespace shapeprog {

std::string format_number(double v) {
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  if (res.ec != std::errc()) {
    res = std::to_chars(buf, buf + sizeof(buf), v);
  }
  return std::string(buf, res.ptr);
}

bool is_valid_param_name(std::string_view name) {
  if (name.empty() || !(name[0] >= 'a' && name[0] <= 'z')) return false;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return name != "sin" && name != "cos" && name != "atan2";
}

namespace {

// Binding strength used by the printer; higher binds tighter.
enum Level { kAdditive = 1, kMultiplicative = 2, kUnary = 3, kAtom = 4 };

int level_of(const SymExpr& e) {
  using K = SymExpr::Kind;
  switch (e.kind()) {
    case K::kAdd:
    case K::kSub:
      return kAdditive;
    case K::kMul:
    case K::kDiv:
      return kMultiplicative;
    case K::kNeg:
      return kUnary;
    case K::kConstant:
      return std::signbit(e.value()) ? kUnary : kAtom;
    default:
      return kAtom;
  }
}

void print(const SymExpr& e, int min_level, std::string& out);

void print_wrapped(const SymExpr& e, int min_level, std::string& out) {
  if (level_of(e) < min_level) {
    out += '(';
    print(e, kAdditive, out);
    out += ')';
  } else {
    print(e, min_level, out);
  }
}

void print(const SymExpr& e, int /*min_level*/, std::string& out) {
  using K = SymExpr::Kind;
  switch (e.kind()) {
    case K::kConstant:
      out += format_number(e.value());
      return;
    case K::kParam:
      out += e.name();
      return;
    case K::kAdd:
    case K::kSub:
      print_wrapped(e.child(0), kAdditive, out);
      out += e.kind() == K::kAdd ? " + " : " - ";
      print_wrapped(e.child(1), kMultiplicative, out);
      return;
    case K::kMul:
    case K::kDiv:
      print_wrapped(e.child(0), kMultiplicative, out);
      out += e.kind() == K::kMul ? "*" : "/";
      print_wrapped(e.child(1), kUnary, out);
      return;
    case K::kNeg: {
      out += '-';
      SymExpr c = e.child(0);
      // "-2" would read back as a negative literal, so constants keep parens.
      if (c.is_constant()) {
        out += '(';
        print(c, kAdditive, out);
        out += ')';
      } else {
        print_wrapped(c, kAtom, out);
      }
      return;
    }
    case K::kSin:
    case K::kCos:
      out += e.kind() == K::kSin ? "sin(" : "cos(";
      print(e.child(0), kAdditive, out);
      out += ')';
      return;
    case K::kAtan2:
      out += "atan2(";
      print(e.child(0), kAdditive, out);
      out += ", ";
      print(e.child(1), kAdditive, out);
      out += ')';
      return;
  }
}

class ExprParser {
 public:
  ExprParser(std::string_view text, int line, int column_offset)
      : text_(text), line_(line), col0_(column_offset) {}

  SymExpr parse() {
    skip_ws();
    if (at_end()) fail("empty expression");
    SymExpr e = parse_sum();
    skip_ws();
    if (!at_end()) fail(std::string("unexpected '") + peek() + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_, col0_ + static_cast<int>(pos_) + 1, msg);
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip_ws() {
    while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  SymExpr parse_sum() {
    SymExpr lhs = parse_product();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      SymExpr rhs = parse_product();
      lhs = c == '+' ? lhs + rhs : lhs - rhs;
    }
  }

  SymExpr parse_product() {
    SymExpr lhs = parse_unary();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      SymExpr rhs = parse_unary();
      lhs = c == '*' ? lhs * rhs : lhs / rhs;
    }
  }

  SymExpr parse_unary() {
    skip_ws();
    if (at_end()) fail("expected operand");
    if (peek() == '-') {
      ++pos_;
      skip_ws();
      if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')
        return SymExpr(-parse_number());
      return -parse_unary();
    }
    return parse_primary();
  }

  double parse_number() {
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    double v = 0.0;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(res.ptr - first);
    return v;
  }

  SymExpr parse_primary() {
    skip_ws();
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return SymExpr(parse_number());
    if (c == '(') {
      ++pos_;
      SymExpr e = parse_sum();
      expect(')');
      return e;
    }
    if (c >= 'a' && c <= 'z') {
      std::size_t start = pos_;
      while (!at_end()) {
        char d = text_[pos_];
        if ((d >= 'a' && d <= 'z') || (d >= '0' && d <= '9') || d == '_')
          ++pos_;
        else
          break;
      }
      std::string ident(text_.substr(start, pos_ - start));
      if (ident == "sin" || ident == "cos" || ident == "atan2") {
        expect('(');
        SymExpr a = parse_sum();
        if (ident == "atan2") {
          expect(',');
          SymExpr b = parse_sum();
          expect(')');
          return atan2(a, b);
        }
        expect(')');
        return ident == "sin" ? sin(a) : cos(a);
      }
      return SymExpr::Param(std::move(ident));
    }
    if (at_end()) fail("expected operand");
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view text_;
  int line_;
  int col0_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const SymExpr& e) {
  std::string out;
  print(e, kAdditive, out);
  return out;
}

SymExpr parse_expr(std::string_view text) { return parse_expr(text, 1, 0); }

SymExpr parse_expr(std::string_view text, int line, int column_offset) {
  return ExprParser(text, line, column_offset).parse();
}

}  // namespace shapeprog
