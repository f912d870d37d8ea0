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

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shapeprog {

/// Parameter assignment used for evaluation: name -> value.
using ParamAssignment = std::map<std::string, double, std::less<>>;

class SymbolicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnboundParameter : public SymbolicError {
 public:
  explicit UnboundParameter(const std::string& name)
      : SymbolicError("unbound parameter '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class DivisionByZero : public SymbolicError {
 public:
  DivisionByZero() : SymbolicError("denominator evaluates to zero") {}
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& what)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                           ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/**
 * Immutable scalar expression over named parameters.
 *
 * Nodes are shared, so copies are cheap and values may be evaluated from any
 * number of threads. Arithmetic operators build the tree verbatim; call
 * simplify() for the canonical form.
 */
class SymExpr {
 public:
  enum class Kind : std::uint8_t {
    kConstant,
    kParam,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kNeg,
    kSin,
    kCos,
    kAtan2,
  };

  SymExpr();  // constant 0
  explicit SymExpr(double value);

  static SymExpr Constant(double value) { return SymExpr(value); }
  static SymExpr Param(std::string name);

  Kind kind() const;
  /// Constant value; only meaningful for kConstant.
  double value() const;
  /// Parameter name; only meaningful for kParam.
  const std::string& name() const;
  int arity() const;
  SymExpr child(int i) const;

  bool is_constant() const { return kind() == Kind::kConstant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }
  /// True if the node was produced by simplify().
  bool is_canonical() const;

  /// Structural equality.
  bool operator==(const SymExpr& other) const;
  bool operator!=(const SymExpr& other) const { return !(*this == other); }

  friend SymExpr operator+(const SymExpr& a, const SymExpr& b);
  friend SymExpr operator-(const SymExpr& a, const SymExpr& b);
  friend SymExpr operator*(const SymExpr& a, const SymExpr& b);
  friend SymExpr operator/(const SymExpr& a, const SymExpr& b);
  friend SymExpr operator-(const SymExpr& a);
  friend SymExpr sin(const SymExpr& a);
  friend SymExpr cos(const SymExpr& a);
  friend SymExpr atan2(const SymExpr& y, const SymExpr& x);

  /// Number of nodes in the tree.
  std::size_t size() const;

 private:
  struct Node;
  explicit SymExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static SymExpr Make(Kind kind, const SymExpr& a, const SymExpr& b);

  std::shared_ptr<const Node> node_;

  friend SymExpr mark_canonical(const SymExpr& e);
};

SymExpr operator+(const SymExpr& a, double b);
SymExpr operator*(double a, const SymExpr& b);

double eval(const SymExpr& e, const ParamAssignment& sigma);

SymExpr simplify(const SymExpr& e);

/// Replaces every parameter named in `bindings` by the bound expression.
SymExpr substitute(const SymExpr& e,
                   const std::map<std::string, SymExpr, std::less<>>& bindings);

/// Free parameter names, sorted.
std::set<std::string> free_params(const SymExpr& e);
bool depends_on(const SymExpr& e, std::string_view name);

std::string to_string(const SymExpr& e);
SymExpr parse_expr(std::string_view text);
/// Parses with errors reported relative to (line, column_offset).
SymExpr parse_expr(std::string_view text, int line, int column_offset);

bool is_valid_param_name(std::string_view name);

/// Shortest decimal text that reads back to exactly `v`.
std::string format_number(double v);

/// Range for a sampled parameter.
struct ParamRange {
  double lo = 0.0;
  double hi = 1.0;
};
using ParamRanges = std::map<std::string, ParamRange, std::less<>>;

/**
 * Probabilistic identity test: both expressions are evaluated at `samples`
 * random assignments of their free parameters (drawn from `ranges`, default
 * [0, 1]). Samples where either side is undefined are skipped.
 */
bool probably_equal(const SymExpr& a, const SymExpr& b,
                    const ParamRanges& ranges = {}, int samples = 32,
                    double tol = 1e-9, std::uint64_t seed = 0x5eed);
bool probably_zero(const SymExpr& e, const ParamRanges& ranges = {},
                   int samples = 32, double tol = 1e-12,
                   std::uint64_t seed = 0x5eed);

/// Rounds every constant to `digits` significant digits and drops additive
/// terms whose coefficients vanish after rounding.
SymExpr round_constants(const SymExpr& e, int digits = 12);

}  // namespace shapeprog
