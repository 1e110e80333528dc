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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "repcheck/evaluator.hpp"
#include "test_support.hpp"

using namespace repcheck;
using namespace repcheck::testing;

namespace {

CanonicalResult load(const char* name) { return parse_result(fixture_text(std::string("reference/") + name)); }

// Independent restatement of the regression formula for single-label tables.
double oracle_credit(double r, double c) {
  double d = std::abs(c - r);
  if (d <= std::max(0.005, 0.05 * std::abs(r))) return 1;
  if (r * c >= 0 && d <= std::max(0.05, 0.5 * std::abs(r))) return 0.5;
  return 0;
}

int oracle_regression(const RegressionTable& ref, const RegressionTable& cand) {
  double total = 0, matched = 0, credit = 0, stars = 0, fit = 0, fit_n = 0;
  for (const auto& rm : ref.models) {
    const ModelColumn* cm = nullptr;
    for (const auto& m : cand.models)
      if (m.label == rm.label) { cm = &m; break; }
    for (const auto& rc : rm.cells) {
      ++total;
      if (!cm) continue;
      for (const auto& cc : cm->cells) {
        if (cc.variable != rc.variable) continue;
        ++matched;
        credit += oracle_credit(rc.estimate, cc.estimate);
        stars += cc.stars == rc.stars;
        break;
      }
    }
    if (rm.n) {
      ++fit_n;
      if (cm && cm->n) fit += *cm->n == *rm.n ? 1 : (std::abs(double(*cm->n - *rm.n)) <= 0.05 * double(*rm.n) ? 0.5 : 0);
    }
    for (auto [r, c] : {std::pair{rm.r2, cm ? cm->r2 : std::nullopt}, std::pair{rm.adj_r2, cm ? cm->adj_r2 : std::nullopt}}) {
      if (!r) continue;
      ++fit_n;
      if (c) fit += std::abs(*c - *r) <= 0.01 ? 1 : (std::abs(*c - *r) <= 0.05 ? 0.5 : 0);
    }
    if (rm.constant) {
      ++fit_n;
      if (cm && cm->constant) fit += oracle_credit(*rm.constant, *cm->constant);
    }
  }
  double cov = total ? matched / total : 1;
  double va = total ? credit / total : 1;
  double st = matched ? stars / matched : (total ? 0 : 1);
  double fm = fit_n ? fit / fit_n : 1;
  return static_cast<int>(std::floor(100 * (0.25 * cov + 0.40 * va + 0.15 * st + 0.20 * fm) + 0.5 + 1e-9));
}

// Moves one estimate far outside the partial-credit band.
void spoil(Cell& c) { c.estimate = c.estimate >= 0 ? -(std::abs(c.estimate) + 10) : std::abs(c.estimate) + 10; }

}  // namespace

TEST_CASE("published Model 1 columns score 90 with the expected components") {
  auto b = score(load("table1_model1_original.json"), load("table1_model1_llm.json"));
  CHECK(b.score == 90);
  CHECK(b.coverage == doctest::Approx(1.0));
  CHECK(b.value_accuracy == doctest::Approx(2.5 / 3));
  CHECK(b.stars_match == doctest::Approx(1.0));
  CHECK(b.fit_match == doctest::Approx(2.5 / 3));
  REQUIRE(b.per_cell.size() == 3);
  CHECK(b.per_cell[0].credit == 1.0);
  CHECK(b.per_cell[1].credit == 1.0);
  CHECK(b.per_cell[2].credit == 0.5);
}

TEST_CASE("a candidate missing one of three variables scores 78") {
  auto b = score(load("table1_model1_original.json"), load("table1_model1_missing_prestige.json"));
  CHECK(b.coverage == doctest::Approx(2.0 / 3));
  CHECK(b.value_accuracy == doctest::Approx(2.0 / 3));
  CHECK(b.stars_match == doctest::Approx(1.0));
  CHECK(b.fit_match == doctest::Approx(1.0));
  CHECK(b.score == 78);
  CHECK_FALSE(b.per_cell[2].cand.has_value());
}

TEST_CASE("full published table against its LLM column agrees with the oracle") {
  auto ref = load("table1_original.json");
  auto cand = load("table1_llm.json");
  auto b = score(ref, cand);
  CHECK(b.score == oracle_regression(std::get<RegressionTable>(ref.payload), std::get<RegressionTable>(cand.payload)));
  CHECK(b.score < 100);
}

TEST_CASE("coefficient credit bands") {
  ScoringTolerances t;
  CHECK(coefficient_credit(0.0, 0.005, t) == 1.0);
  CHECK(coefficient_credit(1.0, 1.05, t) == 1.0);
  CHECK(coefficient_credit(1.0, 1.4, t) == 0.5);
  CHECK(coefficient_credit(1.0, 1.6, t) == 0.0);
  CHECK(coefficient_credit(0.02, -0.02, t) == 0.0);
  CHECK(coefficient_credit(0.0, -0.03, t) == 0.5);
  CHECK(coefficient_credit(-0.322, -0.3381, t) == 1.0);
  CHECK(coefficient_credit(1.0, 1.5, t) == 0.5);
}

TEST_CASE("round half up") {
  CHECK(round_half_up(89.5) == 90);
  CHECK(round_half_up(89.49) == 89);
  CHECK(round_half_up(100.0 * (0.25 + 0.40 * 2.5 / 3 + 0.15 + 0.20 * 2.5 / 3)) == 90);
}

TEST_CASE("order agreement") {
  std::vector<std::string> a{"a", "b", "c", "d"};
  std::vector<std::string> r(a.rbegin(), a.rend());
  CHECK(order_agreement(a, a) == 1.0);
  CHECK(order_agreement(a, r) == 0.0);
  CHECK(order_agreement(a, {"b", "a", "c", "d"}) == doctest::Approx(1.0 - 1.0 / 6));
  CHECK(order_agreement({"x"}, {"x"}) == 1.0);
}

TEST_CASE("identity over generated results of every kind") {
  ResultGenerator gen(11);
  for (auto kind : {ResultKind::kRegressionTable, ResultKind::kFrequencyTable, ResultKind::kFigureSeries}) {
    for (int i = 0; i < 50; ++i) {
      auto r = gen.any(kind);
      CHECK(score(r, r).score == 100);
    }
  }
}

TEST_CASE("random regression pairs match the oracle and stay in bounds") {
  ResultGenerator gen(5);
  for (int i = 0; i < 200; ++i) {
    auto ref = gen.regression();
    auto cand = ref;
    for (auto& m : cand.models) {
      for (auto& c : m.cells) {
        int roll = gen.integer(0, 5);
        if (roll == 0) c.estimate += gen.uniform(-0.01, 0.01);
        if (roll == 1) c.estimate *= gen.uniform(0.3, 1.7);
        if (roll == 2) c.stars = gen.integer(0, 3);
      }
      if (gen.coin() && !m.cells.empty()) m.cells.pop_back();
      if (m.n && gen.coin()) m.n = *m.n + gen.integer(-100, 100);
    }
    auto b = score(CanonicalResult{ref}, CanonicalResult{cand});
    CHECK(b.score >= 0);
    CHECK(b.score <= 100);
    CHECK(b.score == oracle_regression(ref, cand));
  }
}

TEST_CASE("degrading one matched cell never increases the score") {
  ResultGenerator gen(17);
  for (int i = 0; i < 300; ++i) {
    auto ref = gen.regression();
    auto cand = ref;
    for (auto& m : cand.models)
      for (auto& c : m.cells) c.estimate *= gen.uniform(0.5, 1.5);
    auto before = score(CanonicalResult{ref}, CanonicalResult{cand}).score;
    auto& m = cand.models[gen.integer(0, static_cast<int>(cand.models.size()) - 1)];
    spoil(m.cells[gen.integer(0, static_cast<int>(m.cells.size()) - 1)]);
    CHECK(score(CanonicalResult{ref}, CanonicalResult{cand}).score <= before);
  }
}

TEST_CASE("cell order in the candidate does not matter") {
  ResultGenerator gen(23);
  for (int i = 0; i < 100; ++i) {
    auto ref = gen.regression();
    auto cand = ref;
    for (auto& m : cand.models) {
      for (auto& c : m.cells) c.estimate += gen.uniform(-0.2, 0.2);
    }
    auto shuffled = cand;
    for (auto& m : shuffled.models) std::shuffle(m.cells.begin(), m.cells.end(), gen.rng());
    std::shuffle(shuffled.models.begin(), shuffled.models.end(), gen.rng());
    CHECK(score(CanonicalResult{ref}, CanonicalResult{cand}).score ==
          score(CanonicalResult{ref}, CanonicalResult{shuffled}).score);
  }
}

TEST_CASE("kind mismatch scores zero and is reported") {
  auto ref = load("table1_model1_original.json");
  auto cand = load("table3_frequency.json");
  auto b = score(ref, cand);
  CHECK(b.score == 0);
  auto report = compose_discrepancy(ref, cand, b);
  REQUIRE(report.section("Kind / structure"));
  CHECK(report.section("Kind / structure")->lines[0].find("kind mismatch") != std::string::npos);
}

TEST_CASE("sample size discrepancy line") {
  auto ref = load("table1_model1_original.json");
  auto cand = load("table1_model1_llm.json");
  auto report = compose_discrepancy(ref, cand, score(ref, cand));
  const auto* s = report.section("Sample sizes");
  REQUIRE(s);
  REQUIRE(s->lines.size() == 1);
  CHECK(s->lines[0] == "Model 1: 758 vs 787 (Δ -29)");
  REQUIRE(report.section("Coefficients"));
  CHECK_FALSE(report.section("Significance stars"));
  // R2 and the constant earn full credit, so no fit section; only the
  // partially matched prestige coefficient is listed.
  std::vector<std::string> titles;
  for (const auto& sec : report.sections) titles.push_back(sec.title);
  CHECK(titles == std::vector<std::string>{"Sample sizes", "Coefficients"});
  REQUIRE(report.section("Coefficients")->lines.size() == 1);
  CHECK(report.section("Coefficients")->lines[0] == "Model 1 / Occ. Prestige: 0.029 vs 0.016 (Δ +0.013, partial match)");
}

TEST_CASE("missing variable is listed") {
  auto ref = load("table1_model1_original.json");
  auto cand = load("table1_model1_missing_prestige.json");
  auto report = compose_discrepancy(ref, cand, score(ref, cand));
  const auto* s = report.section("Missing / extra labels");
  REQUIRE(s);
  CHECK(s->lines[0].find("Occ. Prestige") != std::string::npos);
}

TEST_CASE("identical tables give an empty report") {
  auto ref = load("table1_original.json");
  auto b = score(ref, ref);
  auto report = compose_discrepancy(ref, ref, b);
  CHECK_FALSE(report.has_discrepancies());
  CHECK(report.render_markdown(100).find("No discrepancies") != std::string::npos);
}

TEST_CASE("reversed figure order") {
  auto ref = load("figure1_reference.json");
  auto cand = load("figure1_reversed_order.json");
  auto b = score(ref, cand);
  CHECK(b.fit_match == 0.0);
  CHECK(b.coverage == 1.0);
  CHECK(b.value_accuracy == 1.0);
  CHECK(b.score == 80);
  auto report = compose_discrepancy(ref, cand, b);
  const auto* s = report.section("Category order");
  REQUIRE(s);
  bool reversed = false;
  for (const auto& l : s->lines) reversed |= l.find("category order is reversed") != std::string::npos;
  CHECK(reversed);
}

TEST_CASE("frequency scoring") {
  auto ref = load("table3_frequency.json");
  auto cand = ref;
  auto& t = std::get<FrequencyTable>(cand.payload);
  std::size_t rows = 0;
  for (const auto& g : t.groups) rows += g.rows.size();
  t.groups[0].rows[0].count += 1;
  *t.groups[0].mean += 0.03;
  auto b = score(ref, cand);
  CHECK(b.value_accuracy == doctest::Approx(double(rows - 1) / rows));
  CHECK(b.fit_match == doctest::Approx((t.groups.size() - 0.5) / t.groups.size()));
  CHECK(b.score == round_half_up(100 * (0.8 * b.value_accuracy + 0.2 * b.fit_match)));
  auto report = compose_discrepancy(ref, cand, b);
  CHECK(report.section("Counts"));
  CHECK(report.section("Means"));
}

TEST_CASE("figure value drift is scored and reported") {
  auto ref = load("figure1_reference.json");
  auto cand = ref;
  auto& f = std::get<FigureSeries>(cand.payload);
  f.series[0].values[0] += 5.0;
  f.reference_lines[0].value = 12.0;
  auto b = score(ref, cand);
  const double cells = f.categories.size() * f.series.size();
  CHECK(b.value_accuracy == doctest::Approx((cells - 1) / cells));
  auto report = compose_discrepancy(ref, cand, b);
  CHECK(report.section("Series values"));
  CHECK(report.section("Reference lines"));
}

TEST_CASE("score.json round trip") {
  auto b = score(load("table1_model1_original.json"), load("table1_model1_missing_prestige.json"));
  CHECK(breakdown_from_json(breakdown_to_json(b)) == b);
  CHECK_THROWS_AS(breakdown_from_json("{}"), Error);
}

TEST_CASE("custom weights and aliases are honoured") {
  auto ref = load("table1_model1_original.json");
  auto cand = ref;
  std::get<RegressionTable>(cand.payload).models[0].cells[0].variable = "Schooling";
  CHECK(score(ref, cand).coverage < 1.0);
  ScoringConfig cfg;
  cfg.labels.add_alias("schooling", "education");
  CHECK(score(ref, cand, cfg).score == 100);
}
