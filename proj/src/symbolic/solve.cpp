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

#include "rational.hpp"
#include "shapeprog/sym_solve.hpp"

namespace shapeprog {

SymExpr LinearForm::rebuild(std::string_view unknown) const {
  return coeff * SymExpr::Param(std::string(unknown)) + offset;
}

LinearForm extract_linear(const SymExpr& residual, std::string_view unknown) {
  const std::string key(unknown);
  detail::RationalBuilder builder;
  detail::Rational r = builder.build(residual);
  if (detail::degree_in(r.den, key) > 0) throw NotAffine();
  if (detail::degree_in(r.num, key) > 1) throw NotAffine();

  detail::Poly with_u, without_u;
  for (const auto& [m, c] : r.num) {
    bool has_u = false;
    detail::Monomial rest;
    for (const auto& [atom_key, exp] : m) {
      if (atom_key == key) {
        has_u = true;
        continue;
      }
      // The unknown hidden inside a trig atom is not affine.
      if (depends_on(builder.atom(atom_key), unknown)) throw NotAffine();
      rest.emplace_back(atom_key, exp);
    }
    (has_u ? with_u : without_u)[rest] += c;
  }
  detail::Rational coeff{with_u, r.den};
  detail::Rational offset{without_u, r.den};
  detail::normalize(coeff);
  detail::normalize(offset);
  return LinearForm{simplify(builder.to_expr(coeff)), simplify(builder.to_expr(offset))};
}

LinearSolution solve_linear(const SymExpr& residual, std::string_view unknown,
                            const ParamRanges& ranges) {
  LinearForm lf = extract_linear(residual, unknown);
  bool coeff_zero = lf.coeff.is_constant(0.0) || probably_zero(lf.coeff, ranges);
  if (coeff_zero) {
    bool offset_zero = lf.offset.is_constant(0.0) || probably_zero(lf.offset, ranges);
    LinearSolution s;
    s.status = offset_zero ? LinearSolution::Status::kAnySolution
                           : LinearSolution::Status::kNoSolution;
    return s;
  }
  LinearSolution s;
  s.status = LinearSolution::Status::kUnique;
  s.value = simplify(-lf.offset / lf.coeff);
  return s;
}

SymExpr solve_rotation_angle(const Eigen::Vector2d& rest, const SymMatrix& target) {
  if (rest.norm() < 1e-9) throw DegenerateRadius();
  const SymExpr a(rest.x());
  const SymExpr b(rest.y());
  const SymExpr& tx = target(0, 0);
  const SymExpr& ty = target(0, 1);
  // angle = atan2(rest x target, rest . target)
  SymExpr cross = simplify(a * ty - b * tx);
  SymExpr dot = simplify(a * tx + b * ty);
  return simplify(atan2(cross, dot));
}

}  // namespace shapeprog
