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

#include <Eigen/SVD>

#include "shapeprog/aep.hpp"
#include "shapeprog/sym_solve.hpp"

namespace shapeprog {

namespace {

const std::string& unknown_name() {
  static const std::string s(kUnknownAmount);
  return s;
}

/// Orthonormal (e1, e2) with e1 x e2 = k.
std::pair<Vec3, Vec3> plane_basis(const Vec3& k) {
  int least = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(k[a]) < std::abs(k[least])) least = a;
  Vec3 e1 = Vec3::Unit(least) - Vec3::Unit(least).dot(k) * k;
  e1.normalize();
  return {e1, k.cross(e1)};
}

void rotation_solutions(const EditOp& op, const Constraint& c, std::vector<SymExpr>& out) {
  if (c.target_sign == 0) return;
  auto [e1, e2] = plane_basis(op.axis);
  const std::map<std::string, SymExpr, std::less<>> at_zero{{unknown_name(), SymExpr(0.0)}};
  for (int r = 0; r < c.residual.rows(); ++r) {
    const Vec3& p0 = c.target_rest[static_cast<std::size_t>(r)];
    // Point the target side must reach: p0 - sign * residual(0).
    SymExpr q[3];
    for (int a = 0; a < 3; ++a)
      q[a] = SymExpr(p0[a] - op.origin[a]) -
             SymExpr(static_cast<double>(c.target_sign)) * substitute(c.residual(r, a), at_zero);
    SymMatrix target(1, 2);
    target(0, 0) = simplify(q[0] * SymExpr(e1.x()) + q[1] * SymExpr(e1.y()) + q[2] * SymExpr(e1.z()));
    target(0, 1) = simplify(q[0] * SymExpr(e2.x()) + q[1] * SymExpr(e2.y()) + q[2] * SymExpr(e2.z()));
    Vec3 d = p0 - op.origin;
    try {
      out.push_back(solve_rotation_angle(Eigen::Vector2d(d.dot(e1), d.dot(e2)), target));
    } catch (const DegenerateRadius&) {
    }
  }
}

void linear_solutions(const Constraint& c, const ParamRanges& ranges, std::vector<SymExpr>& out) {
  for (int r = 0; r < c.residual.rows(); ++r)
    for (int a = 0; a < 3; ++a) {
      const SymExpr& e = c.residual(r, a);
      if (!depends_on(e, kUnknownAmount)) continue;
      try {
        auto s = solve_linear(e, kUnknownAmount, ranges);
        if (s.status == LinearSolution::Status::kUnique) out.push_back(s.value);
      } catch (const SymbolicError&) {
      }
    }
}

EditOp with_amount(const EditOp& op, const SymExpr& amount) {
  EditOp out = op;
  out.amount = amount;
  return out;
}

}  // namespace

double arap_energy(const CageCorners& rest, const CageCorners& deformed) {
  Eigen::Matrix<double, 8, 4> x;
  x.leftCols<3>() = rest;
  x.col(3).setOnes();
  Eigen::Matrix<double, 4, 3> a = x.colPivHouseholderQr().solve(deformed);
  Mat3 f = a.topRows<3>().transpose();
  Eigen::JacobiSVD<Mat3> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  if ((u * svd.matrixV().transpose()).determinant() < 0) u.col(2) *= -1.0;
  Mat3 r = u * svd.matrixV().transpose();
  return (f - r).squaredNorm();
}

int symmetry_planes(const CageCorners& deformed, double delta) {
  const Vec3 m = cage_center(deformed);
  int count = 0;
  for (int axis = 0; axis < 3; ++axis) {
    const int bit = 1 << axis;
    Vec3 n = Vec3::Zero();
    for (int c = 0; c < 8; ++c)
      if (!(c & bit)) n += (deformed.row(c | bit) - deformed.row(c)).transpose();
    if (n.norm() < 1e-15) continue;
    n.normalize();
    double worst = 0.0;
    for (int c = 0; c < 8; ++c) {
      Vec3 p = deformed.row(c).transpose();
      Vec3 q = p - 2.0 * (p - m).dot(n) * n;
      worst = std::max(worst, (q - deformed.row(c ^ bit).transpose()).cwiseAbs().maxCoeff());
    }
    if (worst < delta) ++count;
  }
  return count;
}

std::vector<SolveOutcome> solve_amount(const CandidateEdit& candidate,
                                       const std::vector<Constraint>& constraints,
                                       const SolveSetup& setup) {
  std::vector<SymExpr> raw;
  for (const auto& c : constraints) {
    if (candidate.op.kind == OpKind::kRotate)
      rotation_solutions(candidate.op, c, raw);
    else
      linear_solutions(c, setup.ranges, raw);
  }
  std::vector<SymExpr> solutions;
  for (const auto& s0 : raw) {
    SymExpr s = round_constants(simplify(s0));
    if (probably_zero(s, setup.ranges, 32, 1e-12)) continue;
    for (const auto& known : setup.snap)
      if (probably_equal(s, known, setup.ranges)) {
        s = known;
        break;
      }
    bool dup = std::any_of(solutions.begin(), solutions.end(), [&](const SymExpr& t) {
      return probably_equal(s, t, setup.ranges);
    });
    if (!dup) solutions.push_back(s);
  }
  if (solutions.empty()) throw NoFeasibleSolution();

  std::vector<SolveOutcome> out;
  for (const auto& s : solutions) {
    SolveOutcome o;
    o.edit = with_amount(candidate.op, s);
    o.provenance = candidate.provenance;
    const std::map<std::string, SymExpr, std::less<>> bind{{unknown_name(), s}};
    for (std::size_t k = 0; k < constraints.size(); ++k) {
      const auto& c = constraints[k];
      SymMatrix r(c.residual.rows(), 3);
      for (int i = 0; i < r.rows(); ++i)
        for (int a = 0; a < 3; ++a) r(i, a) = substitute(c.residual(i, a), bind);
      if (check_sat(r, c.delta, setup.ranges, setup.n_samples, setup.seed)) {
        o.satisfied.push_back(c.source);
        o.satisfied_index.push_back(static_cast<int>(k));
      } else {
        o.broken.push_back(c.source);
      }
    }
    CageCorners deformed = setup.rest;
    try {
      deformed = apply_numeric(setup.rest, {o.edit}, setup.reference);
    } catch (const std::exception&) {
      continue;
    }
    o.arap_energy = arap_energy(setup.rest, deformed);
    o.sym_planes = symmetry_planes(deformed, setup.delta);
    out.push_back(std::move(o));
  }
  return out;
}

bool outcome_better(const SolveOutcome& a, const SolveOutcome& b) {
  if (a.broken.size() != b.broken.size()) return a.broken.size() < b.broken.size();
  const double tol = 1e-9 * (1.0 + std::max(a.arap_energy, b.arap_energy));
  if (std::abs(a.arap_energy - b.arap_energy) > tol) return a.arap_energy < b.arap_energy;
  if (a.sym_planes != b.sym_planes) return a.sym_planes > b.sym_planes;
  return a.candidate < b.candidate;
}

const SolveOutcome& select(std::span<const SolveOutcome> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("select: no outcomes");
  std::size_t best = 0;
  for (std::size_t k = 1; k < outcomes.size(); ++k)
    if (outcome_better(outcomes[k], outcomes[best])) best = k;
  return outcomes[best];
}

}  // namespace shapeprog
