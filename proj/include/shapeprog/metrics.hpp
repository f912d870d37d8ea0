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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "shapeprog/dsl.hpp"
#include "shapeprog/sampling.hpp"

namespace shapeprog {

/// Program quality against a reference: op-signature overlap in [0, 1],
/// cage distance in units of 1e-2 * diag, and % of relations whose state
/// matches the reference.
struct EvalReport {
  double j_prog = 1.0;
  double d_geo = 0.0;
  double pct_rel = 100.0;
};

struct MetricOptions {
  int n_samples = 16;
  std::uint64_t seed = kDefaultSatSeed;
  double amount_tol = 1e-3;
  double direction_quantum = 1e-3;
};

/// Samples of the reference ranges; the candidate's k-th parameter takes
/// the reference's k-th value, surplus candidate parameters sit at their lower bound.
std::vector<std::pair<ParamAssignment, ParamAssignment>> aligned_samples(const EditProgram& p,
                                                                         const EditProgram& gt,
                                                                         const MetricOptions& opts = {});

/// Op signature: operand, kind, quantized axis (and shear normal). Axes are
/// sign-canonicalized; `sign` (+1/-1) says how the amount must be flipped
/// to compare with another op of the same signature.
struct OpSignature {
  std::string key;
  double sign = 1.0;
};
OpSignature op_signature(const EditOp& op, double quantum = 1e-3);

/// Multiset Jaccard of signatures times the fraction of matched ops whose
/// amounts agree within amount_tol at every sample. Both empty -> 1.
double j_prog(const EditProgram& p, const EditProgram& gt, const MetricOptions& opts = {});
/// Mean over samples of the mean corner distance, scaled by 100 / diag.
double d_geo(const EditProgram& p, const EditProgram& gt, const ShapeGraph& g,
             const MetricOptions& opts = {});
/// Percentage of enabled relations with the same maintained/broken state;
/// 100 when the graph has none.
double pct_rel(const EditProgram& p, const EditProgram& gt, const ShapeGraph& g,
               const MetricOptions& opts = {});
EvalReport evaluate_metrics(const EditProgram& p, const EditProgram& gt, const ShapeGraph& g,
                            const MetricOptions& opts = {});

struct MetricRow {
  std::string label;
  EvalReport report;
};
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricRow& row);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricRow>& rows);

}  // namespace shapeprog
