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
#include <sstream>

#include "shapeprog/aep.hpp"

namespace shapeprog {

namespace {

class Propagator {
 public:
  Propagator(const ShapeGraph& g, const EditProgram& seeds, const PropagateOptions& opts)
      : g_(g), opts_(opts), edited_(g.nodes.size(), false), stalled_(g.nodes.size(), false) {
    res_.program = seeds;
    validate(seeds, g);
    for (const auto& op : seeds.ops)
      if (!op.operand.relation) edited_[static_cast<std::size_t>(g.find_part(op.operand.name))] = true;
    cages_ = cage_functions(g, seeds);
    ranges_ = seeds.ranges();
    for (const auto& [name, r] : ranges_) reference_[name] = 0.5 * (r.lo + r.hi);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
      if (g.edges[e].enabled && opts.disabled.count(g.edges[e].id)) enabled_override_.insert(e);
  }

  PropagationResult run() {
    const std::size_t max_rounds = 2 * g_.nodes.size() + 2;
    for (std::size_t round = 0; round < max_rounds; ++round) {
      SolverRound r;
      r.index = static_cast<int>(round) + 1;
      auto broken = broken_relations();
      for (int e : broken) r.broken.push_back(g_.edges[static_cast<std::size_t>(e)].id);
      if (conjugate_broken(broken, r)) {
        res_.rounds.push_back(std::move(r));
        continue;
      }
      int target = next_target(broken);
      if (target < 0) {
        res_.rounds.push_back(std::move(r));
        break;
      }
      r.solve = solve_part(target);
      res_.rounds.push_back(std::move(r));
    }
    auto all = cage_functions(g_, res_.program);
    for (std::size_t e = 0; e < g_.edges.size(); ++e)
      if (enabled(e))
        res_.relation_state[g_.edges[e].id] =
            relation_holds(g_, static_cast<int>(e), all, ranges_, opts_.n_samples, opts_.seed);
    return std::move(res_);
  }

 private:
  bool enabled(std::size_t e) const { return g_.edges[e].enabled && !enabled_override_.count(e); }

  std::vector<int> broken_relations() const {
    std::vector<int> out;
    for (std::size_t e = 0; e < g_.edges.size(); ++e) {
      if (!enabled(e)) continue;
      auto parts = g_.edges[e].parts();
      if (std::none_of(parts.begin(), parts.end(),
                       [&](int p) { return edited_[static_cast<std::size_t>(p)]; }))
        continue;
      if (!relation_holds(g_, static_cast<int>(e), cages_, ranges_, opts_.n_samples, opts_.seed))
        out.push_back(static_cast<int>(e));
    }
    return out;
  }

  void add_op(int part, const EditOp& op) {
    res_.program.ops.push_back(op);
    edited_[static_cast<std::size_t>(part)] = true;
    cages_[static_cast<std::size_t>(part)] =
        symbolic_apply(g_.node(part).cage.rest, ops_on_part(res_.program, g_.node(part).id));
  }

  bool conjugate_into(const SymmetryRelation& s, const std::string& rel_id, int from, int to,
                      SolverRound& r) {
    auto map = s.map_between(from, to);
    if (!map) return false;
    ConjugateAction act{rel_id, g_.node(from).id, g_.node(to).id, {}};
    for (const auto& op : ops_on_part(res_.program, g_.node(from).id)) {
      auto operand = map_operand(op.operand, map->second, g_.node(to).id);
      if (!operand) {
        res_.warnings.push_back("cannot map operand " + op.operand.text() + " onto " +
                                g_.node(to).id);
        return false;
      }
      EditOp c = conjugate(op, map->first);
      c.operand = *operand;
      act.ops.push_back(std::move(c));
    }
    for (const auto& op : act.ops) add_op(to, op);
    r.conjugations.push_back(std::move(act));
    return true;
  }

  bool conjugate_broken(const std::vector<int>& broken, SolverRound& r) {
    bool any = false;
    for (int e : broken) {
      const auto& edge = g_.edges[static_cast<std::size_t>(e)];
      if (!edge.is_symmetry()) continue;
      const auto& s = edge.symmetry();
      auto is_edited = [&](int p) { return static_cast<bool>(edited_[static_cast<std::size_t>(p)]); };
      if (s.type == SymmetryType::kReflection) {
        for (const auto& pr : s.pairs) {
          if (is_edited(pr.a) == is_edited(pr.b)) continue;
          int from = is_edited(pr.a) ? pr.a : pr.b;
          int to = is_edited(pr.a) ? pr.b : pr.a;
          any |= conjugate_into(s, edge.id, from, to, r);
        }
        continue;
      }
      auto src = std::find_if(s.members.begin(), s.members.end(), is_edited);
      if (src == s.members.end()) continue;
      const int from = *src;
      for (int m : s.members)
        if (!is_edited(m)) any |= conjugate_into(s, edge.id, from, m, r);
    }
    return any;
  }

  int next_target(const std::vector<int>& broken) const {
    int best = -1;
    for (int e : broken) {
      const auto& edge = g_.edges[static_cast<std::size_t>(e)];
      if (edge.is_symmetry()) continue;
      const auto& a = edge.attachment();
      for (auto [p, q] : {std::pair{a.a, a.b}, std::pair{a.b, a.a}}) {
        if (edited_[static_cast<std::size_t>(p)] || stalled_[static_cast<std::size_t>(p)]) continue;
        if (!edited_[static_cast<std::size_t>(q)]) continue;
        if (best < 0 || p < best) best = p;
      }
    }
    return best;
  }

  /// Enabled attachment edges between `part` and edited parts.
  std::vector<int> attachment_edges(int part, std::vector<int>* neighbors) const {
    std::vector<int> out;
    for (std::size_t e = 0; e < g_.edges.size(); ++e) {
      if (!enabled(e) || g_.edges[e].is_symmetry()) continue;
      const auto& a = g_.edges[e].attachment();
      int other = a.a == part ? a.b : a.b == part ? a.a : -1;
      if (other < 0 || !edited_[static_cast<std::size_t>(other)]) continue;
      out.push_back(static_cast<int>(e));
      if (neighbors && std::find(neighbors->begin(), neighbors->end(), other) == neighbors->end())
        neighbors->push_back(other);
    }
    return out;
  }

  std::vector<Constraint> constraints_for(int part, const std::vector<int>& edges,
                                          const EditOp& op) const {
    std::vector<SymMatrix> cages = cages_;
    cages[static_cast<std::size_t>(part)] = symbolic_apply(g_.node(part).cage.rest, {op});
    std::vector<Constraint> out;
    for (int e : edges)
      for (auto& c : relation_constraints(g_, e, cages, part)) out.push_back(std::move(c));
    return out;
  }

  std::vector<SolveOutcome> solve_all(int part, const std::vector<int>& edges,
                                      const std::vector<CandidateEdit>& cands, int base_index) const {
    SolveSetup setup;
    setup.rest = g_.node(part).cage.rest;
    setup.ranges = ranges_;
    setup.reference = reference_;
    setup.delta = g_.delta;
    setup.n_samples = opts_.n_samples;
    setup.seed = opts_.seed;
    for (const auto& op : res_.program.ops) {
      bool seen = std::any_of(setup.snap.begin(), setup.snap.end(),
                              [&](const SymExpr& s) { return s == op.amount; });
      if (!seen) setup.snap.push_back(op.amount);
    }
    std::vector<std::vector<SolveOutcome>> per(cands.size());
    const int n = static_cast<int>(cands.size());
    auto one = [&](int k) {
      const auto& c = cands[static_cast<std::size_t>(k)];
      try {
        auto outs = solve_amount(c, constraints_for(part, edges, c.op), setup);
        for (auto& o : outs) o.candidate = base_index + k;
        per[static_cast<std::size_t>(k)] = std::move(outs);
      } catch (const NoFeasibleSolution&) {
      }
    };
    if (opts_.exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic)
      for (int k = 0; k < n; ++k) one(k);
    } else {
      for (int k = 0; k < n; ++k) one(k);
    }
    std::vector<SolveOutcome> out;
    for (auto& v : per)
      for (auto& o : v) out.push_back(std::move(o));
    return out;
  }

  SolveAction solve_part(int part) {
    SolveAction act;
    act.part = g_.node(part).id;
    std::vector<int> neighbors;
    auto edges = attachment_edges(part, &neighbors);
    std::optional<HintKind> hint;
    if (auto it = opts_.hints.find(act.part); it != opts_.hints.end()) hint = it->second;

    auto cands = enumerate_candidates(g_, part, hint);
    auto outcomes = solve_all(part, edges, cands, 0);
    auto satisfying = [](const std::vector<SolveOutcome>& v) {
      return static_cast<int>(std::count_if(v.begin(), v.end(),
                                            [](const SolveOutcome& o) { return o.broken.empty(); }));
    };
    act.candidates = static_cast<int>(cands.size());
    if (satisfying(outcomes) == 0 && opts_.use_nhbd) {
      auto all = enumerate_candidates(g_, part, hint, neighbors, true, &res_.program);
      std::vector<CandidateEdit> extra;
      for (auto& c : all)
        if (c.provenance == Provenance::kNeighbor) extra.push_back(std::move(c));
      auto more = solve_all(part, edges, extra, static_cast<int>(cands.size()));
      act.used_nhbd = true;
      act.candidates += static_cast<int>(extra.size());
      cands.insert(cands.end(), extra.begin(), extra.end());
      outcomes.insert(outcomes.end(), more.begin(), more.end());
    }
    act.solutions = static_cast<int>(outcomes.size());
    act.satisfying = satisfying(outcomes);

    std::vector<SolveOutcome> admissible;
    for (const auto& o : outcomes)
      if (o.broken.empty() || (act.satisfying == 0 && opts_.use_breaking)) admissible.push_back(o);
    if (admissible.empty()) {
      stalled_[static_cast<std::size_t>(part)] = true;
      res_.stalled.push_back(act.part);
      res_.warnings.push_back("propagation stalled at part '" + act.part + "': no admissible edit");
      return act;
    }
    const SolveOutcome& best = select(admissible);
    act.selected = best;
    SolvedEdit solved;
    solved.part = part;
    solved.op = best.edit;
    solved.constraints = constraints_for(part, edges, cands[static_cast<std::size_t>(best.candidate)].op);
    solved.outcome = best;
    res_.solved.push_back(std::move(solved));
    add_op(part, best.edit);
    return act;
  }

  const ShapeGraph& g_;
  PropagateOptions opts_;
  PropagationResult res_;
  std::vector<bool> edited_;
  std::vector<bool> stalled_;
  std::vector<SymMatrix> cages_;
  ParamRanges ranges_;
  ParamAssignment reference_;
  std::set<std::size_t> enabled_override_;
};

std::string join(const std::vector<std::string>& v) {
  if (v.empty()) return "none";
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

std::string short_number(double v) {
  if (std::abs(v) < 1e-12) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

PropagationResult propagate(const ShapeGraph& g, const EditProgram& seeds,
                            const PropagateOptions& opts) {
  return Propagator(g, seeds, opts).run();
}

std::string format_report(const PropagationResult& r) {
  std::ostringstream out;
  for (const auto& round : r.rounds) {
    out << "round " << round.index << ": broken " << join(round.broken) << "\n";
    for (const auto& c : round.conjugations) {
      out << "  conjugate " << c.from << " -> " << c.to << " via " << c.relation << "\n";
      for (const auto& op : c.ops) out << "    " << format_op(op) << "\n";
    }
    if (round.solve) {
      const auto& s = *round.solve;
      out << "  solve " << s.part << ": " << s.candidates << " candidates, " << s.solutions
          << " solutions, " << s.satisfying << " satisfy all" << (s.used_nhbd ? ", nhbd" : "") << "\n";
      if (s.selected) {
        out << "    selected " << format_op(s.selected->edit) << "\n"
            << "    arap " << short_number(s.selected->arap_energy) << ", planes "
            << s.selected->sym_planes << ", breaks " << join(s.selected->broken) << "\n";
      } else {
        out << "    stalled\n";
      }
    }
  }
  std::vector<std::string> kept, broken;
  for (const auto& [id, ok] : r.relation_state) (ok ? kept : broken).push_back(id);
  out << "maintained: " << join(kept) << "\n";
  out << "broken: " << join(broken) << "\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  return out.str();
}

}  // namespace shapeprog
