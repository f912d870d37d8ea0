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

#include <Eigen/Core>
#include <string_view>

#include "shapeprog/sym_matrix.hpp"
#include "shapeprog/symbolic.hpp"

namespace shapeprog {

class NotAffine : public SymbolicError {
 public:
  NotAffine() : SymbolicError("residual is not affine in the unknown") {}
};

class DegenerateRadius : public SymbolicError {
 public:
  DegenerateRadius() : SymbolicError("point lies on the rotation axis") {}
};

/// coeff * u + offset, with u the single unknown.
struct LinearForm {
  SymExpr coeff;
  SymExpr offset;

  SymExpr rebuild(std::string_view unknown) const;
};

/// Splits an expression affine in `unknown`; throws NotAffine otherwise.
LinearForm extract_linear(const SymExpr& residual, std::string_view unknown);

struct LinearSolution {
  enum class Status { kUnique, kNoSolution, kAnySolution };
  Status status = Status::kNoSolution;
  SymExpr value;  // set when kUnique
};

/// Solves residual(u) = 0 for u. Coefficients are tested for identical zero
/// by simplification first, then by randomized evaluation over `ranges`.
LinearSolution solve_linear(const SymExpr& residual, std::string_view unknown,
                            const ParamRanges& ranges = {});

/**
 * Angle taking the in-plane rest point `rest` onto `target` (1x2), both
 * relative to the rotation origin, in a right-handed plane basis. When
 * |target| differs from |rest| the result is the angle of best alignment.
 */
SymExpr solve_rotation_angle(const Eigen::Vector2d& rest, const SymMatrix& target);

}  // namespace shapeprog
