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

#include "repcheck/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "repcheck/util.hpp"

namespace repcheck {

using ordered_json = nlohmann::ordered_json;

namespace {

// Absorbs binary noise so that decimal inputs on a band edge fall inside it.
constexpr double kEdge = 1e-9;

}  // namespace

double coefficient_credit(double ref, double cand, const ScoringTolerances& tol) {
  const double delta = std::fabs(cand - ref) - kEdge;
  const double mag = std::fabs(ref);
  if (delta <= std::max(tol.full_abs, tol.full_rel * mag)) return 1.0;
  // Zero agrees with either sign.
  const bool signs_agree = ref * cand >= 0.0;
  if (signs_agree && delta <= std::max(tol.partial_abs, tol.partial_rel * mag)) return 0.5;
  return 0.0;
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5 + 1e-9)); }

double order_agreement(const std::vector<std::string>& reference,
                       const std::vector<std::string>& candidate) {
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < candidate.size(); ++i) position.emplace(candidate[i], i);
  std::vector<std::size_t> ranks;
  for (const auto& item : reference) {
    if (auto it = position.find(item); it != position.end()) ranks.push_back(it->second);
  }
  const std::size_t n = ranks.size();
  if (n < 2) return reference.size() < 2 ? 1.0 : 0.0;
  long long concordant = 0;
  long long discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ranks[i] < ranks[j]) ++concordant;
      else if (ranks[i] > ranks[j]) ++discordant;
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double tau = static_cast<double>(concordant - discordant) / pairs;
  return (tau + 1.0) / 2.0;
}

namespace {

double ratio(double num, double den, double if_empty) { return den > 0 ? num / den : if_empty; }

template <typename T, typename KeyFn>
std::map<std::string, const T*> first_by_key(const std::vector<T>& items, KeyFn key) {
  std::map<std::string, const T*> out;
  for (const auto& item : items) out.emplace(key(item), &item);
  return out;
}

template <typename T, typename KeyFn>
std::vector<std::string> duplicate_keys(const std::vector<T>& items, KeyFn key) {
  std::set<std::string> seen;
  std::vector<std::string> dups;
  for (const auto& item : items) {
    if (!seen.insert(key(item)).second) dups.push_back(key(item));
  }
  return dups;
}

double n_credit(std::int64_t ref, std::int64_t cand, const ScoringTolerances& tol) {
  if (ref == cand) return 1.0;
  if (ref != 0 && std::fabs(static_cast<double>(cand - ref)) / std::fabs(static_cast<double>(ref)) <=
                      tol.n_partial_rel + kEdge) {
    return 0.5;
  }
  return 0.0;
}

double r2_credit(double ref, double cand, const ScoringTolerances& tol) {
  const double delta = std::fabs(cand - ref) - kEdge;
  if (delta <= tol.r2_full) return 1.0;
  if (delta <= tol.r2_partial) return 0.5;
  return 0.0;
}

double mean_credit(double ref, double cand, const ScoringTolerances& tol) {
  const double delta = std::fabs(cand - ref) - kEdge;
  if (delta <= tol.mean_full) return 1.0;
  if (delta <= tol.mean_partial) return 0.5;
  return 0.0;
}

AlignmentBreakdown score_regression(const RegressionTable& ref, const RegressionTable& cand,
                                    const ScoringConfig& cfg) {
  const auto& norm = cfg.labels;
  const auto& tol = cfg.tolerances;
  auto cand_models = first_by_key(cand.models, [&](const ModelColumn& m) { return norm(m.label); });

  AlignmentBreakdown b;
  double total_cells = 0;
  double matched = 0;
  double credit_sum = 0;
  double stars_equal = 0;
  double fit_sum = 0;
  double fit_count = 0;

  for (const auto& rm : ref.models) {
    const ModelColumn* cm = nullptr;
    if (auto it = cand_models.find(norm(rm.label)); it != cand_models.end()) cm = it->second;
    std::map<std::string, const Cell*> cand_cells;
    if (cm) cand_cells = first_by_key(cm->cells, [&](const Cell& c) { return norm(c.variable); });

    for (const auto& rc : rm.cells) {
      total_cells += 1;
      CellDiff diff;
      diff.key = rm.label + " / " + rc.variable;
      diff.ref = rc.estimate;
      if (auto it = cand_cells.find(norm(rc.variable)); it != cand_cells.end()) {
        const Cell& cc = *it->second;
        matched += 1;
        diff.cand = cc.estimate;
        diff.delta = cc.estimate - rc.estimate;
        diff.credit = coefficient_credit(rc.estimate, cc.estimate, tol);
        credit_sum += diff.credit;
        if (cc.stars == rc.stars) stars_equal += 1;
      }
      b.per_cell.push_back(std::move(diff));
    }

    if (rm.n) {
      fit_count += 1;
      if (cm && cm->n) fit_sum += n_credit(*rm.n, *cm->n, tol);
    }
    if (rm.r2) {
      fit_count += 1;
      if (cm && cm->r2) fit_sum += r2_credit(*rm.r2, *cm->r2, tol);
    }
    if (rm.adj_r2) {
      fit_count += 1;
      if (cm && cm->adj_r2) fit_sum += r2_credit(*rm.adj_r2, *cm->adj_r2, tol);
    }
    if (rm.constant) {
      fit_count += 1;
      if (cm && cm->constant) fit_sum += coefficient_credit(*rm.constant, *cm->constant, tol);
    }
  }

  b.coverage = ratio(matched, total_cells, 1.0);
  b.value_accuracy = ratio(credit_sum, total_cells, 1.0);
  b.stars_match = matched > 0 ? stars_equal / matched : (total_cells > 0 ? 0.0 : 1.0);
  b.fit_match = ratio(fit_sum, fit_count, 1.0);
  const auto& w = cfg.weights;
  b.score = round_half_up(100.0 * (w.coverage * b.coverage + w.value * b.value_accuracy +
                                   w.stars * b.stars_match + w.fit * b.fit_match));
  return b;
}

AlignmentBreakdown score_frequency(const FrequencyTable& ref, const FrequencyTable& cand,
                                   const ScoringConfig& cfg) {
  const auto& norm = cfg.labels;
  auto cand_groups =
      first_by_key(cand.groups, [&](const FrequencyGroup& g) { return norm(g.label); });

  AlignmentBreakdown b;
  double total = 0;
  double matched = 0;
  double exact = 0;
  double mean_sum = 0;
  double mean_count = 0;
  for (const auto& rg : ref.groups) {
    const FrequencyGroup* cg = nullptr;
    if (auto it = cand_groups.find(norm(rg.label)); it != cand_groups.end()) cg = it->second;
    std::map<std::string, const FrequencyRow*> cand_rows;
    if (cg) {
      cand_rows = first_by_key(cg->rows, [&](const FrequencyRow& r) { return norm(r.category); });
    }
    for (const auto& rr : rg.rows) {
      total += 1;
      CellDiff diff;
      diff.key = rg.label + " / " + rr.category;
      diff.ref = static_cast<double>(rr.count);
      if (auto it = cand_rows.find(norm(rr.category)); it != cand_rows.end()) {
        matched += 1;
        diff.cand = static_cast<double>(it->second->count);
        diff.delta = *diff.cand - *diff.ref;
        diff.credit = it->second->count == rr.count ? 1.0 : 0.0;
        exact += diff.credit;
      }
      b.per_cell.push_back(std::move(diff));
    }
    if (rg.mean) {
      mean_count += 1;
      if (cg && cg->mean) mean_sum += mean_credit(*rg.mean, *cg->mean, cfg.tolerances);
    }
  }
  b.coverage = ratio(matched, total, 1.0);
  b.value_accuracy = ratio(exact, total, 1.0);
  b.stars_match = 1.0;
  b.fit_match = ratio(mean_sum, mean_count, 1.0);
  const auto& w = cfg.weights;
  b.score = round_half_up(100.0 * (w.frequency_counts * b.value_accuracy +
                                   w.frequency_means * b.fit_match));
  return b;
}

std::vector<std::string> normalized(const std::vector<std::string>& labels,
                                    const LabelNormalizer& norm) {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(norm(l));
  return out;
}

AlignmentBreakdown score_figure(const FigureSeries& ref, const FigureSeries& cand,
                                const ScoringConfig& cfg) {
  const auto& norm = cfg.labels;
  auto cand_series = first_by_key(cand.series, [&](const DataSeries& s) { return norm(s.label); });
  std::map<std::string, std::size_t> cand_cat;
  for (std::size_t i = 0; i < cand.categories.size(); ++i) {
    cand_cat.emplace(norm(cand.categories[i]), i);
  }

  AlignmentBreakdown b;
  double total = 0;
  double matched = 0;
  double credit_sum = 0;
  for (const auto& rs : ref.series) {
    const DataSeries* cs = nullptr;
    if (auto it = cand_series.find(norm(rs.label)); it != cand_series.end()) cs = it->second;
    for (std::size_t i = 0; i < ref.categories.size(); ++i) {
      total += 1;
      CellDiff diff;
      diff.key = rs.label + " / " + ref.categories[i];
      diff.ref = rs.values[i];
      if (cs) {
        if (auto it = cand_cat.find(norm(ref.categories[i])); it != cand_cat.end()) {
          matched += 1;
          diff.cand = cs->values[it->second];
          diff.delta = *diff.cand - *diff.ref;
          diff.credit = coefficient_credit(*diff.ref, *diff.cand, cfg.tolerances);
          credit_sum += diff.credit;
        }
      }
      b.per_cell.push_back(std::move(diff));
    }
  }
  b.coverage = ratio(matched, total, 1.0);
  b.value_accuracy = ratio(credit_sum, total, 1.0);
  b.stars_match = 1.0;
  b.fit_match = order_agreement(normalized(ref.categories, norm), normalized(cand.categories, norm));
  const auto& w = cfg.weights;
  b.score = round_half_up(100.0 * (w.figure_coverage * b.coverage + w.figure_value * b.value_accuracy +
                                   w.figure_order * b.fit_match));
  return b;
}

}  // namespace

AlignmentBreakdown score(const CanonicalResult& reference, const CanonicalResult& candidate,
                         const ScoringConfig& config) {
  if (reference.kind() != candidate.kind()) return AlignmentBreakdown{};
  AlignmentBreakdown b;
  if (const auto* ref = std::get_if<RegressionTable>(&reference.payload)) {
    b = score_regression(*ref, std::get<RegressionTable>(candidate.payload), config);
  } else if (const auto* ref = std::get_if<FrequencyTable>(&reference.payload)) {
    b = score_frequency(*ref, std::get<FrequencyTable>(candidate.payload), config);
  } else {
    b = score_figure(std::get<FigureSeries>(reference.payload),
                     std::get<FigureSeries>(candidate.payload), config);
  }
  b.score = std::clamp(b.score, 0, 100);
  return b;
}

// ---------------------------------------------------------------------------
// score.json

namespace {

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> number_or_null(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

std::string breakdown_to_json(const AlignmentBreakdown& b) {
  ordered_json doc;
  doc["score"] = b.score;
  doc["coverage"] = b.coverage;
  doc["value_accuracy"] = b.value_accuracy;
  doc["stars_match"] = b.stars_match;
  doc["fit_match"] = b.fit_match;
  doc["per_cell"] = ordered_json::array();
  for (const auto& c : b.per_cell) {
    ordered_json cj;
    cj["key"] = c.key;
    cj["ref"] = optional_number(c.ref);
    cj["cand"] = optional_number(c.cand);
    cj["credit"] = c.credit;
    cj["delta"] = optional_number(c.delta);
    doc["per_cell"].push_back(std::move(cj));
  }
  return doc.dump(2) + "\n";
}

AlignmentBreakdown breakdown_from_json(std::string_view text) {
  try {
    auto doc = nlohmann::json::parse(text.begin(), text.end());
    AlignmentBreakdown b;
    b.score = doc.at("score").get<int>();
    b.coverage = doc.at("coverage").get<double>();
    b.value_accuracy = doc.at("value_accuracy").get<double>();
    b.stars_match = doc.at("stars_match").get<double>();
    b.fit_match = doc.at("fit_match").get<double>();
    for (const auto& cj : doc.at("per_cell")) {
      CellDiff c;
      c.key = cj.at("key").get<std::string>();
      c.ref = number_or_null(cj, "ref");
      c.cand = number_or_null(cj, "cand");
      c.credit = cj.at("credit").get<double>();
      c.delta = number_or_null(cj, "delta");
      b.per_cell.push_back(std::move(c));
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("score document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Discrepancy report

namespace {

std::string signed_number(double v, int decimals) {
  auto s = format_number(v, decimals);
  if (v > 0 && s.find_first_not_of("0.") != std::string::npos) s.insert(0, "+");
  return s;
}

std::string stars_text(int stars) { return stars == 0 ? "(none)" : std::string(stars, '*'); }

void add_line(std::vector<ReportSection>& sections, std::string_view title, std::string line) {
  for (auto& s : sections) {
    if (s.title == title) {
      s.lines.push_back(std::move(line));
      return;
    }
  }
  sections.push_back({std::string(title), {std::move(line)}});
}

std::string credit_note(double credit) {
  if (credit >= 1.0) return "";
  return credit > 0.0 ? ", partial match" : ", mismatch";
}

// Canonical section order; sections without findings are dropped.
const std::vector<std::string>& section_order() {
  static const std::vector<std::string> order = {
      "Kind / structure", "Sample sizes",    "Coefficients", "Significance stars",
      "Fit statistics",   "Category order",  "Series values", "Reference lines",
      "Counts",           "Means",           "Missing / extra labels"};
  return order;
}

void report_regression(const RegressionTable& ref, const RegressionTable& cand,
                       const ScoringConfig& cfg, std::vector<ReportSection>& out) {
  const auto& norm = cfg.labels;
  const auto& tol = cfg.tolerances;
  auto model_key = [&](const ModelColumn& m) { return norm(m.label); };
  for (const auto& dup : duplicate_keys(cand.models, model_key)) {
    add_line(out, "Kind / structure", "duplicate candidate model label '" + dup + "' (first kept)");
  }
  auto cand_models = first_by_key(cand.models, model_key);
  std::set<std::string> ref_model_keys;

  for (const auto& rm : ref.models) {
    ref_model_keys.insert(norm(rm.label));
    auto mit = cand_models.find(norm(rm.label));
    if (mit == cand_models.end()) {
      add_line(out, "Missing / extra labels", "model '" + rm.label + "' missing in generated output");
      if (rm.n) add_line(out, "Sample sizes", rm.label + ": missing vs " + std::to_string(*rm.n));
      continue;
    }
    const ModelColumn& cm = *mit->second;
    auto cell_key = [&](const Cell& c) { return norm(c.variable); };
    for (const auto& dup : duplicate_keys(cm.cells, cell_key)) {
      add_line(out, "Kind / structure",
               rm.label + ": duplicate candidate variable '" + dup + "' (first kept)");
    }
    auto cand_cells = first_by_key(cm.cells, cell_key);

    if (rm.n) {
      if (!cm.n) {
        add_line(out, "Sample sizes", rm.label + ": missing vs " + std::to_string(*rm.n));
      } else if (*cm.n != *rm.n) {
        add_line(out, "Sample sizes", rm.label + ": " + std::to_string(*cm.n) + " vs " +
                                          std::to_string(*rm.n) + " (Δ " +
                                          signed_number(static_cast<double>(*cm.n - *rm.n), 0) + ")");
      }
    }

    std::set<std::string> ref_cell_keys;
    for (const auto& rc : rm.cells) {
      ref_cell_keys.insert(norm(rc.variable));
      auto cit = cand_cells.find(norm(rc.variable));
      const std::string name = rm.label + " / " + rc.variable;
      if (cit == cand_cells.end()) {
        add_line(out, "Missing / extra labels", name + " missing in generated output");
        continue;
      }
      const Cell& cc = *cit->second;
      double credit = coefficient_credit(rc.estimate, cc.estimate, tol);
      if (credit < 1.0) {
        std::string sign_note = rc.estimate * cc.estimate < 0 ? ", sign flip" : "";
        add_line(out, "Coefficients",
                 name + ": " + format_number(cc.estimate) + " vs " + format_number(rc.estimate) +
                     " (Δ " + signed_number(cc.estimate - rc.estimate, 3) + credit_note(credit) +
                     sign_note + ")");
      }
      if (cc.stars != rc.stars) {
        add_line(out, "Significance stars",
                 name + ": " + stars_text(cc.stars) + " vs " + stars_text(rc.stars));
      }
    }
    for (const auto& cc : cm.cells) {
      if (!ref_cell_keys.contains(norm(cc.variable))) {
        add_line(out, "Missing / extra labels",
                 rm.label + " / " + cc.variable + " not in published table (extra)");
      }
    }

    auto fit_line = [&](const char* stat, const std::optional<double>& r,
                        const std::optional<double>& c, double credit) {
      if (!r) return;
      if (!c) {
        add_line(out, "Fit statistics", rm.label + " " + stat + ": missing vs " + format_number(*r));
      } else if (credit < 1.0) {
        add_line(out, "Fit statistics", rm.label + " " + stat + ": " + format_number(*c) + " vs " +
                                            format_number(*r) + " (Δ " +
                                            signed_number(*c - *r, 3) + credit_note(credit) + ")");
      }
    };
    fit_line("R²", rm.r2, cm.r2, rm.r2 && cm.r2 ? r2_credit(*rm.r2, *cm.r2, tol) : 0.0);
    fit_line("adj. R²", rm.adj_r2, cm.adj_r2,
             rm.adj_r2 && cm.adj_r2 ? r2_credit(*rm.adj_r2, *cm.adj_r2, tol) : 0.0);
    fit_line("constant", rm.constant, cm.constant,
             rm.constant && cm.constant ? coefficient_credit(*rm.constant, *cm.constant, tol) : 0.0);
  }
  for (const auto& cm : cand.models) {
    if (!ref_model_keys.contains(norm(cm.label))) {
      add_line(out, "Missing / extra labels", "model '" + cm.label + "' not in published table (extra)");
    }
  }
}

void report_frequency(const FrequencyTable& ref, const FrequencyTable& cand,
                      const ScoringConfig& cfg, std::vector<ReportSection>& out) {
  const auto& norm = cfg.labels;
  auto group_key = [&](const FrequencyGroup& g) { return norm(g.label); };
  for (const auto& dup : duplicate_keys(cand.groups, group_key)) {
    add_line(out, "Kind / structure", "duplicate candidate group '" + dup + "' (first kept)");
  }
  auto cand_groups = first_by_key(cand.groups, group_key);
  std::set<std::string> ref_keys;
  for (const auto& rg : ref.groups) {
    ref_keys.insert(norm(rg.label));
    auto git = cand_groups.find(norm(rg.label));
    if (git == cand_groups.end()) {
      add_line(out, "Missing / extra labels", "group '" + rg.label + "' missing in generated output");
      continue;
    }
    const FrequencyGroup& cg = *git->second;
    auto rows = first_by_key(cg.rows, [&](const FrequencyRow& r) { return norm(r.category); });
    std::set<std::string> ref_rows;
    for (const auto& rr : rg.rows) {
      ref_rows.insert(norm(rr.category));
      const std::string name = rg.label + " / " + rr.category;
      auto rit = rows.find(norm(rr.category));
      if (rit == rows.end()) {
        add_line(out, "Missing / extra labels", name + " missing in generated output");
      } else if (rit->second->count != rr.count) {
        add_line(out, "Counts", name + ": " + std::to_string(rit->second->count) + " vs " +
                                    std::to_string(rr.count) + " (Δ " +
                                    signed_number(static_cast<double>(rit->second->count - rr.count), 0) +
                                    ")");
      }
    }
    for (const auto& cr : cg.rows) {
      if (!ref_rows.contains(norm(cr.category))) {
        add_line(out, "Missing / extra labels",
                 rg.label + " / " + cr.category + " not in published table (extra)");
      }
    }
    if (rg.mean) {
      if (!cg.mean) {
        add_line(out, "Means", rg.label + ": missing vs " + format_number(*rg.mean, 2));
      } else if (mean_credit(*rg.mean, *cg.mean, cfg.tolerances) < 1.0) {
        add_line(out, "Means", rg.label + ": " + format_number(*cg.mean, 3) + " vs " +
                                   format_number(*rg.mean, 3) + " (Δ " +
                                   signed_number(*cg.mean - *rg.mean, 3) + ")");
      }
    }
  }
  for (const auto& cg : cand.groups) {
    if (!ref_keys.contains(norm(cg.label))) {
      add_line(out, "Missing / extra labels", "group '" + cg.label + "' not in published table (extra)");
    }
  }
}

void report_figure(const FigureSeries& ref, const FigureSeries& cand, const ScoringConfig& cfg,
                   std::vector<ReportSection>& out) {
  const auto& norm = cfg.labels;
  auto ref_norm = normalized(ref.categories, norm);
  auto cand_norm = normalized(cand.categories, norm);
  std::map<std::string, std::size_t> cand_pos;
  for (std::size_t i = 0; i < cand_norm.size(); ++i) cand_pos.emplace(cand_norm[i], i);

  // Category order: list inverted pairs among shared categories.
  std::vector<std::size_t> shared;  // indices into ref
  for (std::size_t i = 0; i < ref_norm.size(); ++i) {
    if (cand_pos.contains(ref_norm[i])) shared.push_back(i);
  }
  std::vector<std::string> inversions;
  std::size_t inversion_count = 0;
  for (std::size_t a = 0; a < shared.size(); ++a) {
    for (std::size_t b = a + 1; b < shared.size(); ++b) {
      if (cand_pos[ref_norm[shared[a]]] > cand_pos[ref_norm[shared[b]]]) {
        ++inversion_count;
        if (inversions.size() < 10) {
          inversions.push_back("'" + ref.categories[shared[b]] + "' placed before '" +
                               ref.categories[shared[a]] + "'");
        }
      }
    }
  }
  if (inversion_count > 0) {
    const std::size_t pairs = shared.size() * (shared.size() - 1) / 2;
    const double agreement = order_agreement(ref_norm, cand_norm);
    if (inversion_count == pairs) {
      add_line(out, "Category order", "category order is reversed relative to the published figure");
    }
    add_line(out, "Category order", std::to_string(inversion_count) + " of " + std::to_string(pairs) +
                                        " category pairs inverted (order agreement " +
                                        format_number(agreement, 3) + ")");
    for (auto& inv : inversions) add_line(out, "Category order", inv);
    if (inversion_count > inversions.size()) {
      add_line(out, "Category order",
               "... " + std::to_string(inversion_count - inversions.size()) + " more inversions");
    }
  }

  auto series_key = [&](const DataSeries& s) { return norm(s.label); };
  for (const auto& dup : duplicate_keys(cand.series, series_key)) {
    add_line(out, "Kind / structure", "duplicate candidate series '" + dup + "' (first kept)");
  }
  auto cand_series = first_by_key(cand.series, series_key);
  std::set<std::string> ref_series_keys;
  for (const auto& rs : ref.series) {
    ref_series_keys.insert(norm(rs.label));
    auto sit = cand_series.find(norm(rs.label));
    if (sit == cand_series.end()) {
      add_line(out, "Missing / extra labels", "series '" + rs.label + "' missing in generated output");
      continue;
    }
    for (std::size_t i = 0; i < ref.categories.size(); ++i) {
      auto pit = cand_pos.find(ref_norm[i]);
      if (pit == cand_pos.end()) continue;
      double c = sit->second->values[pit->second];
      double r = rs.values[i];
      double credit = coefficient_credit(r, c, cfg.tolerances);
      if (credit < 1.0) {
        add_line(out, "Series values", rs.label + " / " + ref.categories[i] + ": " +
                                           format_number(c) + " vs " + format_number(r) + " (Δ " +
                                           signed_number(c - r, 3) + credit_note(credit) + ")");
      }
    }
  }
  for (const auto& cs : cand.series) {
    if (!ref_series_keys.contains(norm(cs.label))) {
      add_line(out, "Missing / extra labels", "series '" + cs.label + "' not in published figure (extra)");
    }
  }
  for (std::size_t i = 0; i < ref.categories.size(); ++i) {
    if (!cand_pos.contains(ref_norm[i])) {
      add_line(out, "Missing / extra labels",
               "category '" + ref.categories[i] + "' missing in generated output");
    }
  }
  std::set<std::string> ref_cats(ref_norm.begin(), ref_norm.end());
  for (std::size_t i = 0; i < cand.categories.size(); ++i) {
    if (!ref_cats.contains(cand_norm[i])) {
      add_line(out, "Missing / extra labels",
               "category '" + cand.categories[i] + "' not in published figure (extra)");
    }
  }

  auto cand_lines =
      first_by_key(cand.reference_lines, [&](const ReferenceLine& l) { return norm(l.label); });
  for (const auto& rl : ref.reference_lines) {
    auto lit = cand_lines.find(norm(rl.label));
    if (lit == cand_lines.end()) {
      add_line(out, "Reference lines", "'" + rl.label + "' missing (published at " +
                                           format_number(rl.value) + ")");
    } else if (coefficient_credit(rl.value, lit->second->value, cfg.tolerances) < 1.0) {
      add_line(out, "Reference lines", "'" + rl.label + "': " + format_number(lit->second->value) +
                                           " vs " + format_number(rl.value));
    }
  }
}

}  // namespace

DiscrepancyReport compose_discrepancy(const CanonicalResult& reference,
                                      const CanonicalResult& candidate,
                                      const AlignmentBreakdown& breakdown,
                                      const ScoringConfig& config) {
  std::vector<ReportSection> found;
  if (reference.kind() != candidate.kind()) {
    add_line(found, "Kind / structure",
             "kind mismatch: generated " + std::string(kind_name(candidate.kind())) + " vs published " +
                 std::string(kind_name(reference.kind())));
  } else if (const auto* ref = std::get_if<RegressionTable>(&reference.payload)) {
    report_regression(*ref, std::get<RegressionTable>(candidate.payload), config, found);
  } else if (const auto* ref = std::get_if<FrequencyTable>(&reference.payload)) {
    report_frequency(*ref, std::get<FrequencyTable>(candidate.payload), config, found);
  } else {
    report_figure(std::get<FigureSeries>(reference.payload),
                  std::get<FigureSeries>(candidate.payload), config, found);
  }

  DiscrepancyReport report;
  for (const auto& title : section_order()) {
    for (auto& s : found) {
      if (s.title == title) report.sections.push_back(std::move(s));
    }
  }
  if (report.sections.empty() && breakdown.score < 100) {
    // Components below 1 with no itemized finding (e.g. empty tables).
    report.sections.push_back({"Kind / structure",
                               {"alignment score " + std::to_string(breakdown.score) +
                                " without itemized differences"}});
  }
  return report;
}

bool DiscrepancyReport::has_discrepancies() const { return !sections.empty(); }

const ReportSection* DiscrepancyReport::section(std::string_view title) const {
  for (const auto& s : sections) {
    if (s.title == title) return &s;
  }
  return nullptr;
}

std::string DiscrepancyReport::render_markdown(int score) const {
  std::ostringstream out;
  out << "# Discrepancy report (alignment score " << score << "/100)\n\n";
  if (sections.empty()) {
    out << "No discrepancies found.\n";
  } else {
    out << "Values are listed as generated vs published.\n";
    for (const auto& s : sections) {
      out << "\n## " << s.title << "\n";
      for (const auto& line : s.lines) out << "- " << line << "\n";
    }
  }
  if (narrative) out << "\n## Reviewer narrative\n\n" << *narrative << "\n";
  return out.str();
}

}  // namespace repcheck
