# Copyright 2026 The repcheck Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import os
from pathlib import Path

import pytest

import repcheck

FIXTURES = Path(os.environ.get("REPCHECK_FIXTURE_DIR", Path(__file__).resolve().parents[1] / "fixtures"))


def text(rel):
    return (FIXTURES / rel).read_text()


def test_identity_scores_100():
    doc = text("reference/table1_original.json")
    assert repcheck.score(doc, doc)["score"] == 100


def test_model1_hand_check():
    b = repcheck.score(text("reference/table1_model1_original.json"), text("reference/table1_model1_llm.json"))
    assert b["score"] == 90
    assert b["value_accuracy"] == pytest.approx(2.5 / 3)
    assert b["fit_match"] == pytest.approx(2.5 / 3)


def test_discrepancy_report_lists_sample_size():
    r = repcheck.discrepancy_report(
        text("reference/table1_model1_original.json"), text("reference/table1_model1_llm.json")
    )
    sizes = [s for s in r["sections"] if s["title"] == "Sample sizes"]
    assert sizes and sizes[0]["lines"] == ["Model 1: 758 vs 787 (Δ -29)"]
    assert "alignment score 90/100" in r["markdown"]


def test_recorded_harness_outputs_are_canonical():
    for name in ("seed42_correct", "seed42_score60", "seed42_score55", "seed42_score40"):
        doc = text(f"harness_outputs/{name}.json")
        assert repcheck.result_kind(doc) == "regression_table"
        assert json.loads(repcheck.normalize_result(doc)) == json.loads(repcheck.normalize_result(repcheck.normalize_result(doc)))


def test_schema_violation_raises():
    with pytest.raises(repcheck.RepcheckError, match="SchemaViolation"):
        repcheck.normalize_result('{"kind": "pie"}')


def test_harness_error_document():
    err = repcheck.parse_harness_error(text("harness_errors/seed42_nameerror.json"))
    assert err["exception_type"] == "NameError"
    assert err["phase"] == "runtime"
    assert len(err["context"]["columns"]) == 21
    assert repcheck.parse_harness_error(text("reference/table1_original.json")) is None


def test_label_normalization():
    assert repcheck.normalize_label("Occ. Prestige") == "occupational prestige"


def test_cli_replay_run(tmp_path):
    harness = os.environ.get("REPCHECK_FIXTURE_HARNESS")
    if not harness:
        pytest.skip("fixture harness not available")
    code, out, err = repcheck.main([
        "run",
        "--paper", str(FIXTURES / "paper.txt"),
        "--codebook", str(FIXTURES / "cb.txt"),
        "--data", str(FIXTURES / "data.csv"),
        "--target", "Table 1",
        "--reference", str(FIXTURES / "reference/seed42_reference.json"),
        "--llm", "replay",
        "--transcript", str(FIXTURES / "transcripts/e2e_success.jsonl"),
        "--harness", harness,
        "--out", str(tmp_path / "run"),
    ])
    assert code == repcheck.EXIT_SUCCESS, err
    assert "best=100 attempt=3" in out
    assert "| 3 | 1 | 2 | 100 | 3 |" in repcheck.render_run_report(str(tmp_path / "run"))


def test_cli_usage_error():
    code, _, _ = repcheck.main(["run"])
    assert code == repcheck.EXIT_USAGE
