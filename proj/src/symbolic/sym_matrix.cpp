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

#include "shapeprog/sym_matrix.hpp"

#include <cassert>
#include <cmath>

namespace shapeprog {

SymMatrix SymMatrix::Constant(const Eigen::MatrixXd& m) {
  SymMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int r = 0; r < out.rows_; ++r)
    for (int c = 0; c < out.cols_; ++c) out(r, c) = SymExpr(m(r, c));
  return out;
}

SymMatrix SymMatrix::weighted_row(std::span<const double> w) const {
  assert(static_cast<int>(w.size()) == rows_);
  SymMatrix out(1, cols_);
  for (int c = 0; c < cols_; ++c) {
    SymExpr acc;
    bool any = false;
    for (int r = 0; r < rows_; ++r) {
      if (w[static_cast<std::size_t>(r)] == 0.0) continue;
      SymExpr term = SymExpr(w[static_cast<std::size_t>(r)]) * (*this)(r, c);
      acc = any ? acc + term : term;
      any = true;
    }
    out(0, c) = simplify(acc);
  }
  return out;
}

SymMatrix SymMatrix::row(int r) const {
  SymMatrix out(1, cols_);
  for (int c = 0; c < cols_; ++c) out(0, c) = (*this)(r, c);
  return out;
}

void SymMatrix::append_rows(const SymMatrix& other) {
  if (rows_ == 0 && cols_ == 0) cols_ = other.cols_;
  assert(other.cols_ == cols_);
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  rows_ += other.rows_;
}

SymMatrix SymMatrix::simplified() const {
  SymMatrix out = *this;
  for (auto& e : out.data_) e = simplify(e);
  return out;
}

Eigen::MatrixXd SymMatrix::eval(const ParamAssignment& sigma) const {
  Eigen::MatrixXd m(rows_, cols_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) m(r, c) = shapeprog::eval((*this)(r, c), sigma);
  return m;
}

double SymMatrix::norm_inf(const ParamAssignment& sigma) const {
  double worst = 0.0;
  for (const auto& e : data_) worst = std::max(worst, std::abs(shapeprog::eval(e, sigma)));
  return worst;
}

std::set<std::string> SymMatrix::free_params() const {
  std::set<std::string> out;
  for (const auto& e : data_) out.merge(shapeprog::free_params(e));
  return out;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
  SymMatrix out(a.rows_, a.cols_);
  for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = a.data_[i] + b.data_[i];
  return out;
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
  SymMatrix out(a.rows_, a.cols_);
  for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = a.data_[i] - b.data_[i];
  return out;
}

bool SymMatrix::operator==(const SymMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
}

}  // namespace shapeprog
