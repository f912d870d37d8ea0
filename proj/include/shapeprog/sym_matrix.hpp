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
#include <span>
#include <vector>

#include "shapeprog/symbolic.hpp"

namespace shapeprog {

/// Dense matrix of SymExpr entries (8x3 for cages, kx3 for residuals).
class SymMatrix {
 public:
  SymMatrix() = default;
  SymMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}

  static SymMatrix Constant(const Eigen::MatrixXd& m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  SymExpr& operator()(int r, int c) { return data_[index(r, c)]; }
  const SymExpr& operator()(int r, int c) const { return data_[index(r, c)]; }

  /// Row vector w^T * M, with w.size() == rows().
  SymMatrix weighted_row(std::span<const double> w) const;
  SymMatrix row(int r) const;
  /// Appends the rows of `other` (same column count).
  void append_rows(const SymMatrix& other);

  SymMatrix simplified() const;
  Eigen::MatrixXd eval(const ParamAssignment& sigma) const;
  /// Largest absolute entry of eval(sigma).
  double norm_inf(const ParamAssignment& sigma) const;

  std::set<std::string> free_params() const;

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);

  bool operator==(const SymMatrix& other) const;

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r * cols_ + c);
  }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<SymExpr> data_;
};

}  // namespace shapeprog
