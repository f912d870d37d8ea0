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

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rational.hpp"

namespace shapeprog {

SymExpr mark_canonical(const SymExpr& e);

namespace detail {

Poly poly_constant(double c) {
  Poly p;
  if (c != 0.0) p[Monomial{}] = c;
  return p;
}

bool poly_is_zero(const Poly& p) { return p.empty(); }

bool poly_is_constant(const Poly& p) {
  return p.empty() || (p.size() == 1 && p.begin()->first.empty());
}

bool poly_is_one(const Poly& p) {
  return p.size() == 1 && p.begin()->first.empty() && p.begin()->second == 1.0;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [m, c] : b) {
    auto [it, inserted] = out.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) out.erase(it);
    }
  }
  return out;
}

namespace {

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

int total_degree(const Monomial& m) {
  int d = 0;
  for (const auto& [k, e] : m) d += e;
  return d;
}

// Printing order: higher total degree first, then lexicographic.
std::vector<std::pair<Monomial, double>> ordered_terms(const Poly& p) {
  std::vector<std::pair<Monomial, double>> terms(p.begin(), p.end());
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    int da = total_degree(a.first), db = total_degree(b.first);
    if (da != db) return da > db;
    return a.first < b.first;
  });
  return terms;
}

// Largest monomial dividing every term of both polynomials.
Monomial common_factor(const Poly& a, const Poly& b) {
  bool first = true;
  std::map<std::string, int> g;
  auto visit = [&](const Poly& p) {
    for (const auto& [m, c] : p) {
      if (first) {
        for (const auto& [k, e] : m) g[k] = e;
        first = false;
        continue;
      }
      std::map<std::string, int> next;
      for (const auto& [k, e] : m) {
        auto it = g.find(k);
        if (it != g.end()) next[k] = std::min(it->second, e);
      }
      g = std::move(next);
    }
  };
  visit(a);
  visit(b);
  return Monomial(g.begin(), g.end());
}

Poly divide_monomial(const Poly& p, const Monomial& g) {
  if (g.empty()) return p;
  Poly out;
  for (const auto& [m, c] : p) {
    Monomial q;
    for (const auto& [k, e] : m) {
      int sub = 0;
      for (const auto& [gk, ge] : g)
        if (gk == k) sub = ge;
      if (e - sub > 0) q.emplace_back(k, e - sub);
    }
    out[q] += c;
  }
  return out;
}

}  // namespace

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      Monomial m = mono_mul(ma, mb);
      auto [it, inserted] = out.emplace(m, ca * cb);
      if (!inserted) it->second += ca * cb;
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    if (it->second == 0.0)
      it = out.erase(it);
    else
      ++it;
  }
  return out;
}

Poly poly_scale(const Poly& a, double s) {
  if (s == 0.0) return {};
  Poly out;
  for (const auto& [m, c] : a) {
    double v = c * s;
    if (v != 0.0) out[m] = v;
  }
  return out;
}

int degree_in(const Monomial& m, const std::string& key) {
  for (const auto& [k, e] : m)
    if (k == key) return e;
  return 0;
}

int degree_in(const Poly& p, const std::string& key) {
  int d = 0;
  for (const auto& [m, c] : p) d = std::max(d, degree_in(m, key));
  return d;
}

void normalize(Rational& r) {
  if (poly_is_zero(r.num)) {
    r.den = poly_constant(1.0);
    return;
  }
  if (poly_is_zero(r.den)) return;  // left for eval to report
  Monomial g = common_factor(r.num, r.den);
  if (!g.empty()) {
    r.num = divide_monomial(r.num, g);
    r.den = divide_monomial(r.den, g);
  }
  if (poly_is_constant(r.den)) {
    r.num = poly_scale(r.num, 1.0 / r.den.begin()->second);
    r.den = poly_constant(1.0);
    return;
  }
  // num == k * den collapses to the constant k.
  if (r.num.size() == r.den.size()) {
    bool proportional = true;
    double k = 0.0;
    auto it = r.num.begin();
    for (const auto& [m, c] : r.den) {
      if (it->first != m) {
        proportional = false;
        break;
      }
      double ratio = it->second / c;
      if (it == r.num.begin())
        k = ratio;
      else if (std::abs(ratio - k) > 1e-14 * std::abs(k)) {
        proportional = false;
        break;
      }
      ++it;
    }
    if (proportional) {
      r.num = poly_constant(k);
      r.den = poly_constant(1.0);
      return;
    }
  }
  double lead = ordered_terms(r.den).front().second;
  if (lead != 1.0) {
    r.num = poly_scale(r.num, 1.0 / lead);
    r.den = poly_scale(r.den, 1.0 / lead);
  }
}

namespace {

Rational make(Poly num, Poly den) {
  Rational r{std::move(num), std::move(den)};
  normalize(r);
  return r;
}

Rational add(const Rational& a, const Rational& b) {
  if (a.den == b.den) return make(poly_add(a.num, b.num), a.den);
  return make(poly_add(poly_mul(a.num, b.den), poly_mul(b.num, a.den)),
              poly_mul(a.den, b.den));
}

Rational mul(const Rational& a, const Rational& b) {
  return make(poly_mul(a.num, b.num), poly_mul(a.den, b.den));
}

Rational neg(const Rational& a) { return Rational{poly_scale(a.num, -1.0), a.den}; }

}  // namespace

Rational RationalBuilder::atom_rational(const SymExpr& atom) {
  std::string key = to_string(atom);
  atoms_.emplace(key, atom);
  Poly p;
  p[Monomial{{key, 1}}] = 1.0;
  return Rational{std::move(p), poly_constant(1.0)};
}

Rational RationalBuilder::build(const SymExpr& e) {
  using K = SymExpr::Kind;
  switch (e.kind()) {
    case K::kConstant:
      return Rational{poly_constant(e.value()), poly_constant(1.0)};
    case K::kParam:
      return atom_rational(e);
    case K::kAdd:
      return add(build(e.child(0)), build(e.child(1)));
    case K::kSub:
      return add(build(e.child(0)), neg(build(e.child(1))));
    case K::kMul:
      return mul(build(e.child(0)), build(e.child(1)));
    case K::kDiv: {
      Rational a = build(e.child(0));
      Rational b = build(e.child(1));
      if (poly_is_zero(b.num)) {
        return atom_rational(mark_canonical(to_expr(a) / SymExpr(0.0)));
      }
      return make(poly_mul(a.num, b.den), poly_mul(a.den, b.num));
    }
    case K::kNeg:
      return neg(build(e.child(0)));
    case K::kSin:
    case K::kCos: {
      SymExpr arg = to_expr(build(e.child(0)));
      if (arg.is_constant()) {
        double v = e.kind() == K::kSin ? std::sin(arg.value()) : std::cos(arg.value());
        return Rational{poly_constant(v), poly_constant(1.0)};
      }
      return atom_rational(e.kind() == K::kSin ? sin(arg) : cos(arg));
    }
    case K::kAtan2: {
      SymExpr y = to_expr(build(e.child(0)));
      SymExpr x = to_expr(build(e.child(1)));
      if (y.is_constant() && x.is_constant())
        return Rational{poly_constant(std::atan2(y.value() + 0.0, x.value())),
                        poly_constant(1.0)};
      return atom_rational(atan2(y, x));
    }
  }
  return Rational{};
}

SymExpr RationalBuilder::to_expr(const Poly& p) const {
  if (p.empty()) return SymExpr(0.0);
  SymExpr sum;
  bool first = true;
  for (const auto& [m, c] : ordered_terms(p)) {
    SymExpr product;
    bool has_product = false;
    for (const auto& [key, exp] : m) {
      for (int k = 0; k < exp; ++k) {
        product = has_product ? product * atoms_.at(key) : atoms_.at(key);
        has_product = true;
      }
    }
    double mag = first ? c : std::abs(c);
    SymExpr term;
    if (!has_product)
      term = SymExpr(mag);
    else if (mag == 1.0)
      term = product;
    else if (mag == -1.0)
      term = -product;
    else
      term = SymExpr(mag) * product;
    if (first) {
      sum = term;
      first = false;
    } else {
      sum = c < 0 ? sum - term : sum + term;
    }
  }
  return sum;
}

SymExpr RationalBuilder::to_expr(const Rational& r) const {
  SymExpr num = to_expr(r.num);
  if (poly_is_one(r.den)) return num;
  return num / to_expr(r.den);
}

}  // namespace detail

SymExpr simplify(const SymExpr& e) {
  if (e.is_canonical()) return e;
  detail::RationalBuilder builder;
  detail::Rational r = builder.build(e);
  return mark_canonical(builder.to_expr(r));
}

namespace {

double round_sig(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

SymExpr round_inside_atoms(const SymExpr& e, int digits) {
  using K = SymExpr::Kind;
  switch (e.kind()) {
    case K::kConstant:
    case K::kParam:
      return e;
    case K::kSin:
      return sin(round_constants(e.child(0), digits));
    case K::kCos:
      return cos(round_constants(e.child(0), digits));
    case K::kAtan2:
      return atan2(round_constants(e.child(0), digits),
                   round_constants(e.child(1), digits));
    case K::kNeg:
      return -round_inside_atoms(e.child(0), digits);
    case K::kAdd:
      return round_inside_atoms(e.child(0), digits) +
             round_inside_atoms(e.child(1), digits);
    case K::kSub:
      return round_inside_atoms(e.child(0), digits) -
             round_inside_atoms(e.child(1), digits);
    case K::kMul:
      return round_inside_atoms(e.child(0), digits) *
             round_inside_atoms(e.child(1), digits);
    case K::kDiv:
      return round_inside_atoms(e.child(0), digits) /
             round_inside_atoms(e.child(1), digits);
  }
  return e;
}

detail::Poly round_poly(const detail::Poly& p, int digits) {
  double biggest = 0.0;
  for (const auto& [m, c] : p) biggest = std::max(biggest, std::abs(c));
  double floor = biggest * std::pow(10.0, -digits);
  detail::Poly out;
  for (const auto& [m, c] : p) {
    if (std::abs(c) < floor) continue;
    double r = round_sig(c, digits);
    if (r != 0.0) out[m] = r;
  }
  return out;
}

}  // namespace

SymExpr round_constants(const SymExpr& e, int digits) {
  detail::RationalBuilder builder;
  detail::Rational r = builder.build(round_inside_atoms(e, digits));
  r.num = round_poly(r.num, digits);
  r.den = round_poly(r.den, digits);
  detail::normalize(r);
  return simplify(builder.to_expr(r));
}

}  // namespace shapeprog
