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

// Canonical rational form used by simplify() and the linear solver: a
// quotient of polynomials over "atoms" (parameters and trig/atan2 nodes with
// canonical arguments). Internal to the symbolic library.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "shapeprog/symbolic.hpp"

namespace shapeprog::detail {

/// Sorted (atom key, exponent) pairs; empty means the constant monomial.
using Monomial = std::vector<std::pair<std::string, int>>;
using Poly = std::map<Monomial, double>;

struct Rational {
  Poly num;
  Poly den;
};

class RationalBuilder {
 public:
  Rational build(const SymExpr& e);
  SymExpr to_expr(const Rational& r) const;
  SymExpr to_expr(const Poly& p) const;

  /// Canonical atom expression for a key.
  const SymExpr& atom(const std::string& key) const { return atoms_.at(key); }

 private:
  Rational atom_rational(const SymExpr& atom);
  std::map<std::string, SymExpr> atoms_;
};

Poly poly_constant(double c);
bool poly_is_zero(const Poly& p);
bool poly_is_one(const Poly& p);
bool poly_is_constant(const Poly& p);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, double s);
int degree_in(const Monomial& m, const std::string& key);
int degree_in(const Poly& p, const std::string& key);
void normalize(Rational& r);

}  // namespace shapeprog::detail
