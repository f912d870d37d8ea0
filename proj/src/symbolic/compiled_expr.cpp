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

#include "shapeprog/compiled_expr.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace shapeprog {

CompiledExpr::CompiledExpr(const SymExpr& e, const std::vector<std::string>& slots) {
  code_.clear();
  max_depth_ = 0;
  emit(e, slots, 1);
}

void CompiledExpr::emit(const SymExpr& e, const std::vector<std::string>& slots,
                        int depth) {
  using K = SymExpr::Kind;
  max_depth_ = std::max(max_depth_, depth);
  switch (e.kind()) {
    case K::kConstant:
      code_.push_back({Op::kConst, 0, e.value()});
      return;
    case K::kParam: {
      auto it = std::find(slots.begin(), slots.end(), e.name());
      if (it == slots.end()) throw UnboundParameter(e.name());
      code_.push_back({Op::kParam, static_cast<int>(it - slots.begin()), 0.0});
      return;
    }
    default:
      break;
  }
  emit(e.child(0), slots, depth);
  if (e.arity() == 2) emit(e.child(1), slots, depth + 1);
  Op op = Op::kConst;
  switch (e.kind()) {
    case K::kAdd: op = Op::kAdd; break;
    case K::kSub: op = Op::kSub; break;
    case K::kMul: op = Op::kMul; break;
    case K::kDiv: op = Op::kDiv; break;
    case K::kNeg: op = Op::kNeg; break;
    case K::kSin: op = Op::kSin; break;
    case K::kCos: op = Op::kCos; break;
    case K::kAtan2: op = Op::kAtan2; break;
    default: break;
  }
  code_.push_back({op, 0, 0.0});
}

namespace {

template <typename Stack, typename Code>
double run(const Code& code, std::span<const double> values, Stack& st) {
  int top = -1;
  for (const auto& in : code) {
    using Op = std::remove_cvref_t<decltype(in.op)>;
    switch (in.op) {
      case Op::kConst: st[++top] = in.value; break;
      case Op::kParam: st[++top] = values[static_cast<std::size_t>(in.slot)]; break;
      case Op::kAdd: --top; st[top] += st[top + 1]; break;
      case Op::kSub: --top; st[top] -= st[top + 1]; break;
      case Op::kMul: --top; st[top] *= st[top + 1]; break;
      case Op::kDiv:
        --top;
        if (std::abs(st[top + 1]) < 1e-12) throw DivisionByZero();
        st[top] /= st[top + 1];
        break;
      case Op::kNeg: st[top] = -st[top]; break;
      case Op::kSin: st[top] = std::sin(st[top]); break;
      case Op::kCos: st[top] = std::cos(st[top]); break;
      case Op::kAtan2: --top; st[top] = std::atan2(st[top] + 0.0, st[top + 1]); break;
    }
  }
  return st[0];
}

}  // namespace

double CompiledExpr::operator()(std::span<const double> values) const {
  if (max_depth_ <= 64) {
    std::array<double, 64> st;
    return run(code_, values, st);
  }
  std::vector<double> st(static_cast<std::size_t>(max_depth_));
  return run(code_, values, st);
}

}  // namespace shapeprog
