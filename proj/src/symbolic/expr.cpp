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

#include <charconv>
#include <cmath>
#include <functional>

#include "shapeprog/sampling.hpp"
#include "shapeprog/symbolic.hpp"

namespace shapeprog {

struct SymExpr::Node {
  Kind kind = Kind::kConstant;
  bool canonical = false;
  double value = 0.0;
  std::string name;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

int arity_of(SymExpr::Kind k) {
  switch (k) {
    case SymExpr::Kind::kConstant:
    case SymExpr::Kind::kParam:
      return 0;
    case SymExpr::Kind::kNeg:
    case SymExpr::Kind::kSin:
    case SymExpr::Kind::kCos:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

SymExpr::SymExpr() : SymExpr(0.0) {}

SymExpr::SymExpr(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kConstant;
  n->value = value;
  node_ = std::move(n);
}

SymExpr SymExpr::Param(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kParam;
  n->name = std::move(name);
  return SymExpr(std::shared_ptr<const Node>(std::move(n)));
}

SymExpr SymExpr::Make(Kind kind, const SymExpr& a, const SymExpr& b) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = a.node_;
  if (arity_of(kind) == 2) n->b = b.node_;
  return SymExpr(std::shared_ptr<const Node>(std::move(n)));
}

SymExpr::Kind SymExpr::kind() const { return node_->kind; }
double SymExpr::value() const { return node_->value; }
const std::string& SymExpr::name() const { return node_->name; }
int SymExpr::arity() const { return arity_of(node_->kind); }
bool SymExpr::is_canonical() const { return node_->canonical; }

SymExpr SymExpr::child(int i) const {
  return SymExpr(i == 0 ? node_->a : node_->b);
}

std::size_t SymExpr::size() const {
  std::size_t n = 1;
  for (int i = 0; i < arity(); ++i) n += child(i).size();
  return n;
}

bool SymExpr::operator==(const SymExpr& other) const {
  if (node_ == other.node_) return true;
  const Node& x = *node_;
  const Node& y = *other.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Kind::kConstant:
      return x.value == y.value;
    case Kind::kParam:
      return x.name == y.name;
    default:
      break;
  }
  if (child(0) != other.child(0)) return false;
  return arity() < 2 || child(1) == other.child(1);
}

SymExpr operator+(const SymExpr& a, const SymExpr& b) {
  return SymExpr::Make(SymExpr::Kind::kAdd, a, b);
}
SymExpr operator-(const SymExpr& a, const SymExpr& b) {
  return SymExpr::Make(SymExpr::Kind::kSub, a, b);
}
SymExpr operator*(const SymExpr& a, const SymExpr& b) {
  return SymExpr::Make(SymExpr::Kind::kMul, a, b);
}
SymExpr operator/(const SymExpr& a, const SymExpr& b) {
  return SymExpr::Make(SymExpr::Kind::kDiv, a, b);
}
SymExpr operator-(const SymExpr& a) {
  return SymExpr::Make(SymExpr::Kind::kNeg, a, a);
}
SymExpr sin(const SymExpr& a) {
  return SymExpr::Make(SymExpr::Kind::kSin, a, a);
}
SymExpr cos(const SymExpr& a) {
  return SymExpr::Make(SymExpr::Kind::kCos, a, a);
}
SymExpr atan2(const SymExpr& y, const SymExpr& x) {
  return SymExpr::Make(SymExpr::Kind::kAtan2, y, x);
}
SymExpr operator+(const SymExpr& a, double b) { return a + SymExpr(b); }
SymExpr operator*(double a, const SymExpr& b) { return SymExpr(a) * b; }

SymExpr mark_canonical(const SymExpr& e) {
  if (e.node_->canonical) return e;
  auto n = std::make_shared<SymExpr::Node>(*e.node_);
  n->canonical = true;
  return SymExpr(std::shared_ptr<const SymExpr::Node>(std::move(n)));
}

double eval(const SymExpr& e, const ParamAssignment& sigma) {
  using K = SymExpr::Kind;
  switch (e.kind()) {
    case K::kConstant:
      return e.value();
    case K::kParam: {
      auto it = sigma.find(e.name());
      if (it == sigma.end()) throw UnboundParameter(e.name());
      return it->second;
    }
    case K::kAdd:
      return eval(e.child(0), sigma) + eval(e.child(1), sigma);
    case K::kSub:
      return eval(e.child(0), sigma) - eval(e.child(1), sigma);
    case K::kMul:
      return eval(e.child(0), sigma) * eval(e.child(1), sigma);
    case K::kDiv: {
      double den = eval(e.child(1), sigma);
      if (std::abs(den) < 1e-12) throw DivisionByZero();
      return eval(e.child(0), sigma) / den;
    }
    case K::kNeg:
      return -eval(e.child(0), sigma);
    case K::kSin:
      return std::sin(eval(e.child(0), sigma));
    case K::kCos:
      return std::cos(eval(e.child(0), sigma));
    case K::kAtan2:
      // +0.0 folds -0 so the branch cut always yields +pi.
      return std::atan2(eval(e.child(0), sigma) + 0.0, eval(e.child(1), sigma));
  }
  return 0.0;
}

SymExpr substitute(const SymExpr& e,
                   const std::map<std::string, SymExpr, std::less<>>& bindings) {
  using K = SymExpr::Kind;
  switch (e.kind()) {
    case K::kConstant:
      return e;
    case K::kParam: {
      auto it = bindings.find(e.name());
      return it == bindings.end() ? e : it->second;
    }
    case K::kAdd:
      return substitute(e.child(0), bindings) + substitute(e.child(1), bindings);
    case K::kSub:
      return substitute(e.child(0), bindings) - substitute(e.child(1), bindings);
    case K::kMul:
      return substitute(e.child(0), bindings) * substitute(e.child(1), bindings);
    case K::kDiv:
      return substitute(e.child(0), bindings) / substitute(e.child(1), bindings);
    case K::kNeg:
      return -substitute(e.child(0), bindings);
    case K::kSin:
      return sin(substitute(e.child(0), bindings));
    case K::kCos:
      return cos(substitute(e.child(0), bindings));
    case K::kAtan2:
      return atan2(substitute(e.child(0), bindings),
                   substitute(e.child(1), bindings));
  }
  return e;
}

namespace {

void collect_params(const SymExpr& e, std::set<std::string>& out) {
  if (e.kind() == SymExpr::Kind::kParam) {
    out.insert(e.name());
    return;
  }
  for (int i = 0; i < e.arity(); ++i) collect_params(e.child(i), out);
}

}  // namespace

std::set<std::string> free_params(const SymExpr& e) {
  std::set<std::string> out;
  collect_params(e, out);
  return out;
}

bool depends_on(const SymExpr& e, std::string_view name) {
  if (e.kind() == SymExpr::Kind::kParam) return e.name() == name;
  for (int i = 0; i < e.arity(); ++i)
    if (depends_on(e.child(i), name)) return true;
  return false;
}

namespace {

ParamAssignment draw(const std::set<std::string>& names,
                     const ParamRanges& ranges, UniformSampler& rng) {
  ParamAssignment sigma;
  for (const auto& n : names) {
    ParamRange r;
    if (auto it = ranges.find(n); it != ranges.end()) r = it->second;
    sigma[n] = rng.next(r.lo, r.hi);
  }
  return sigma;
}

}  // namespace

bool probably_equal(const SymExpr& a, const SymExpr& b,
                    const ParamRanges& ranges, int samples, double tol,
                    std::uint64_t seed) {
  if (a == b) return true;
  std::set<std::string> names = free_params(a);
  names.merge(free_params(b));
  UniformSampler rng(seed);
  int used = 0;
  for (int attempt = 0; attempt < samples * 4 && used < samples; ++attempt) {
    ParamAssignment sigma = draw(names, ranges, rng);
    double va, vb;
    try {
      va = eval(a, sigma);
      vb = eval(b, sigma);
    } catch (const DivisionByZero&) {
      continue;
    }
    ++used;
    if (!(std::abs(va - vb) <= tol * (1.0 + std::max(std::abs(va), std::abs(vb)))))
      return false;
  }
  return used > 0;
}

bool probably_zero(const SymExpr& e, const ParamRanges& ranges, int samples,
                   double tol, std::uint64_t seed) {
  if (e.is_constant()) return std::abs(e.value()) <= tol;
  std::set<std::string> names = free_params(e);
  UniformSampler rng(seed);
  int used = 0;
  for (int attempt = 0; attempt < samples * 4 && used < samples; ++attempt) {
    ParamAssignment sigma = draw(names, ranges, rng);
    double v;
    try {
      v = eval(e, sigma);
    } catch (const DivisionByZero&) {
      continue;
    }
    ++used;
    if (!(std::abs(v) <= tol)) return false;
  }
  return used > 0;
}

}  // namespace shapeprog
