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
#include <span>
#include <string>
#include <vector>

#include "shapeprog/symbolic.hpp"

namespace shapeprog {

/**
 * SymExpr flattened to postfix code with parameters bound to slots. Used on
 * the hot evaluation path; evaluation is const and thread-safe.
 */
class CompiledExpr {
 public:
  CompiledExpr() = default;
  /// Throws UnboundParameter if `e` references a name not in `slots`.
  CompiledExpr(const SymExpr& e, const std::vector<std::string>& slots);

  double operator()(std::span<const double> values) const;

  bool is_constant() const { return code_.size() == 1 && code_[0].op == Op::kConst; }

 private:
  enum class Op : std::uint8_t { kConst, kParam, kAdd, kSub, kMul, kDiv, kNeg, kSin, kCos, kAtan2 };
  struct Instr {
    Op op;
    int slot;
    double value;
  };
  void emit(const SymExpr& e, const std::vector<std::string>& slots, int depth);

  std::vector<Instr> code_{{Op::kConst, 0, 0.0}};
  int max_depth_ = 1;
};

}  // namespace shapeprog
