// Copyright 2026 The repcheck Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Deterministic alignment scoring between a reference (published) result and
// a candidate (generated) result, plus the structured discrepancy report.

#include <optional>
#include <string>
#include <vector>

#include "repcheck/error.hpp"
#include "repcheck/results.hpp"

namespace repcheck {

class Gateway;

struct ScoringTolerances {
  double full_abs = 0.005;    // 3-decimal rounding
  double full_rel = 0.05;
  double partial_abs = 0.05;
  double partial_rel = 0.5;
  double n_partial_rel = 0.05;
  double r2_full = 0.01;
  double r2_partial = 0.05;
  double mean_full = 0.005;
  double mean_partial = 0.05;
};

struct ScoringWeights {
  double coverage = 0.25;
  double value = 0.40;
  double stars = 0.15;
  double fit = 0.20;
  double figure_coverage = 0.25;
  double figure_value = 0.55;
  double figure_order = 0.20;
  double frequency_counts = 0.8;
  double frequency_means = 0.2;
};

struct ScoringConfig {
  ScoringWeights weights;
  ScoringTolerances tolerances;
  LabelNormalizer labels;
};

struct CellDiff {
  std::string key;
  std::optional<double> ref;
  std::optional<double> cand;
  double credit = 0.0;  // 0, 0.5 or 1
  std::optional<double> delta;

  bool operator==(const CellDiff&) const = default;
};

/// Score plus the components it was built from. For frequency tables
/// `value_accuracy` is the exact-count fraction and `fit_match` the group-mean
/// proximity; for figure series `fit_match` holds the category-order
/// agreement. Components that do not apply to a kind are reported as 1.
struct AlignmentBreakdown {
  int score = 0;
  double coverage = 0.0;
  double value_accuracy = 0.0;
  double stars_match = 0.0;
  double fit_match = 0.0;
  std::vector<CellDiff> per_cell;

  bool operator==(const AlignmentBreakdown&) const = default;
};

// Credit for one numeric estimate: 1 inside the full band, 0.5 inside the
// partial band when signs agree, else 0.
double coefficient_credit(double ref, double cand, const ScoringTolerances& tol);

// Rounds x.5 up; guards against 89.99999999 style float noise.
int round_half_up(double x);

// Normalized Kendall-tau similarity in [0,1] between two orderings of the
// same items; 1 means identical order, 0 fully reversed.
double order_agreement(const std::vector<std::string>& reference,
                       const std::vector<std::string>& candidate);

AlignmentBreakdown score(const CanonicalResult& reference, const CanonicalResult& candidate,
                         const ScoringConfig& config = {});

std::string breakdown_to_json(const AlignmentBreakdown& breakdown);
AlignmentBreakdown breakdown_from_json(std::string_view text);

struct ReportSection {
  std::string title;
  std::vector<std::string> lines;

  bool operator==(const ReportSection&) const = default;
};

struct DiscrepancyReport {
  std::vector<ReportSection> sections;
  std::optional<std::string> narrative;

  bool has_discrepancies() const;
  const ReportSection* section(std::string_view title) const;
  std::string render_markdown(int score) const;
};

DiscrepancyReport compose_discrepancy(const CanonicalResult& reference,
                                      const CanonicalResult& candidate,
                                      const AlignmentBreakdown& breakdown,
                                      const ScoringConfig& config = {});

struct JudgeOpinion {
  std::optional<int> score_opinion;
  std::string narrative;
};

struct JudgeOutcome {
  std::optional<JudgeOpinion> opinion;
  Warnings warnings;
};

/// Optional model-written narrative. A provider failure yields no opinion and
/// a warning; transcript errors propagate. The opinion never replaces the
/// deterministic score.
JudgeOutcome judge(Gateway& gateway, const CanonicalResult& reference,
                   const CanonicalResult& candidate,
                   const std::vector<std::string>& figure_files = {});

}  // namespace repcheck
