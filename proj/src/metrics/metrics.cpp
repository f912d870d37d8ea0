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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "shapeprog/aep.hpp"
#include "shapeprog/metrics.hpp"

namespace shapeprog {

namespace {

/// First clearly non-zero component positive; returns the flip applied.
double canonical_sign(const Vec3& v, double quantum) {
  for (int a = 0; a < 3; ++a)
    if (std::abs(v[a]) > quantum) return v[a] > 0 ? 1.0 : -1.0;
  return 1.0;
}

std::string quantized(const Vec3& v, double quantum) {
  std::string out;
  for (int a = 0; a < 3; ++a) {
    long long q = std::llround(v[a] / quantum);
    out += (a ? "," : "") + std::to_string(q == 0 ? 0 : q);
  }
  return out;
}

}  // namespace

std::vector<std::pair<ParamAssignment, ParamAssignment>> aligned_samples(const EditProgram& p,
                                                                         const EditProgram& gt,
                                                                         const MetricOptions& opts) {
  UniformSampler rng(opts.seed);
  std::vector<std::pair<ParamAssignment, ParamAssignment>> out;
  for (int i = 0; i < opts.n_samples; ++i) {
    ParamAssignment sp, sg;
    for (std::size_t k = 0; k < gt.params.size(); ++k) {
      const auto& c = gt.params[k];
      const double v = rng.next(c.lo, c.hi);
      sg[c.name] = v;
      if (k < p.params.size()) sp[p.params[k].name] = v;
    }
    for (std::size_t k = gt.params.size(); k < p.params.size(); ++k) sp[p.params[k].name] = p.params[k].lo;
    out.emplace_back(std::move(sp), std::move(sg));
  }
  return out;
}

OpSignature op_signature(const EditOp& op, double quantum) {
  OpSignature s;
  s.key = std::string(op_keyword(op.kind)) + " " + op.operand.text();
  switch (op.kind) {
    case OpKind::kTranslate:
    case OpKind::kRotate:
      s.sign = canonical_sign(op.axis, quantum);
      s.key += " " + quantized(s.sign * op.axis, quantum);
      break;
    case OpKind::kScale:
      s.key += " " + quantized(canonical_sign(op.axis, quantum) * op.axis, quantum);
      break;
    case OpKind::kShear:
      // Flipping the normal or the direction alone both negate the shear.
      s.sign = canonical_sign(op.axis, quantum) * canonical_sign(op.normal, quantum);
      s.key += " " + quantized(canonical_sign(op.axis, quantum) * op.axis, quantum) + " " +
               quantized(canonical_sign(op.normal, quantum) * op.normal, quantum);
      break;
    case OpKind::kSymGroupCount:
    case OpKind::kSymGroupSpacing:
      break;
  }
  return s;
}

double j_prog(const EditProgram& p, const EditProgram& gt, const MetricOptions& opts) {
  if (p.ops.empty() && gt.ops.empty()) return 1.0;
  std::map<std::string, std::vector<std::size_t>> by_key_p, by_key_gt;
  for (std::size_t k = 0; k < p.ops.size(); ++k) by_key_p[op_signature(p.ops[k], opts.direction_quantum).key].push_back(k);
  for (std::size_t k = 0; k < gt.ops.size(); ++k) by_key_gt[op_signature(gt.ops[k], opts.direction_quantum).key].push_back(k);

  // Same-signature ops pair up in program order.
  std::vector<std::pair<std::size_t, std::size_t>> matched;
  for (const auto& [key, ks] : by_key_p) {
    auto it = by_key_gt.find(key);
    if (it == by_key_gt.end()) continue;
    for (std::size_t i = 0; i < std::min(ks.size(), it->second.size()); ++i) matched.emplace_back(ks[i], it->second[i]);
  }
  const double inter = static_cast<double>(matched.size());
  const double uni = static_cast<double>(p.ops.size() + gt.ops.size()) - inter;
  if (matched.empty()) return 0.0;

  const auto samples = aligned_samples(p, gt, opts);
  int agree = 0;
  for (const auto& [ip, ig] : matched) {
    const auto& a = p.ops[ip];
    const auto& b = gt.ops[ig];
    const double sa = op_signature(a, opts.direction_quantum).sign;
    const double sb = op_signature(b, opts.direction_quantum).sign;
    bool ok = true;
    for (const auto& [sp, sg] : samples) {
      double fa = sa * eval(a.amount, sp), fb = sb * eval(b.amount, sg);
      if (!(std::abs(fa - fb) < opts.amount_tol)) {
        ok = false;
        break;
      }
    }
    agree += ok ? 1 : 0;
  }
  return (inter / uni) * (agree / inter);
}

double d_geo(const EditProgram& p, const EditProgram& gt, const ShapeGraph& g, const MetricOptions& opts) {
  if (g.size() == 0 || opts.n_samples <= 0) return 0.0;
  ProgramEvaluator ep(g, p), eg(g, gt);
  double total = 0.0;
  for (const auto& [sp, sg] : aligned_samples(p, gt, opts)) {
    auto cp = ep.cages(sp);
    auto cg = eg.cages(sg);
    double sum = 0.0;
    for (std::size_t i = 0; i < cp.size(); ++i) sum += (cp[i] - cg[i]).rowwise().norm().sum();
    total += sum / (8.0 * static_cast<double>(cp.size()));
  }
  return total / opts.n_samples * 100.0 / g.diag;
}

double pct_rel(const EditProgram& p, const EditProgram& gt, const ShapeGraph& g, const MetricOptions& opts) {
  auto sp = relation_states(g, p, opts.n_samples, opts.seed);
  auto sg = relation_states(g, gt, opts.n_samples, opts.seed);
  if (sg.empty()) return 100.0;
  int same = 0;
  for (const auto& [id, state] : sg) {
    auto it = sp.find(id);
    same += it != sp.end() && it->second == state ? 1 : 0;
  }
  return 100.0 * same / static_cast<double>(sg.size());
}

EvalReport evaluate_metrics(const EditProgram& p, const EditProgram& gt, const ShapeGraph& g,
                            const MetricOptions& opts) {
  return {j_prog(p, gt, opts), d_geo(p, gt, g, opts), pct_rel(p, gt, g, opts)};
}

std::string metrics_csv_header() { return "label,j_prog,d_geo,pct_rel"; }

std::string metrics_csv_row(const MetricRow& row) {
  std::string label = row.label;
  if (label.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : label) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    label = quoted + "\"";
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.4f", row.report.j_prog, row.report.d_geo, row.report.pct_rel);
  return label + buf;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << metrics_csv_header() << "\n";
  for (const auto& r : rows) out << metrics_csv_row(r) << "\n";
}

}  // namespace shapeprog
