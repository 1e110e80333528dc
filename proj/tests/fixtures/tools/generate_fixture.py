#!/usr/bin/env python3
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
"""Regenerates the seed-42 survey fixture and the pre-recorded harness outputs.

The C++ test suites only read the committed files; this script is kept so the
golden files can be audited and rebuilt:

    python3 tests/fixtures/tools/generate_fixture.py tests/fixtures
"""

import json
import sys
from pathlib import Path

import numpy as np
from scipy import stats

GENRES = ["JAZZ", "RAP", "COUNTRY", "OPERA", "GOSPEL", "BLUES"]
COLUMNS = ["ID", "YEAR", "EDUC", "INCOME", "PRESTIGE", "SEX", "AGE", "RACE",
           "REGION", "RELIG", "HOMPOP", "MARITAL", "CHILDS", "WTSSALL"] + GENRES
ROWS = 600


def make_dataset(seed):
    rng = np.random.default_rng(seed)
    educ = np.clip(np.round(rng.normal(13.0, 3.0, ROWS)), 0, 20).astype(int)
    income = np.round(np.exp(rng.normal(9.6, 0.7, ROWS)) + 400 * educ).astype(int)
    prestige = np.clip(np.round(20 + 2.2 * educ + rng.normal(0, 9, ROWS)), 17, 86).astype(int)
    sex = rng.integers(1, 3, ROWS)
    age = rng.integers(18, 90, ROWS)

    z = lambda v: (v - v.mean()) / v.std()
    latent = -0.55 * z(educ) - 0.10 * z(income) + 0.05 * z(prestige) + 0.15 * z(age)
    data = {
        "ID": np.arange(1, ROWS + 1),
        "YEAR": np.full(ROWS, 1993),
        "EDUC": educ,
        "INCOME": income,
        "PRESTIGE": prestige,
        "SEX": sex,
        "AGE": age,
        "RACE": rng.choice([1, 2, 3], ROWS, p=[0.8, 0.13, 0.07]),
        "REGION": rng.integers(1, 10, ROWS),
        "RELIG": rng.choice([1, 2, 3, 4, 5], ROWS, p=[0.6, 0.25, 0.02, 0.1, 0.03]),
        "HOMPOP": rng.integers(1, 7, ROWS),
        "MARITAL": rng.integers(1, 6, ROWS),
        "CHILDS": rng.integers(0, 9, ROWS),
    }
    weights = np.round(rng.uniform(0.4, 2.2, ROWS), 4)
    for offset, genre in enumerate(GENRES):
        cut = np.array([-1.4, -0.5, 0.3, 1.1]) + 0.15 * (offset - 2.5)
        score = latent + rng.normal(0, 1.0, ROWS)
        rating = 1 + np.searchsorted(cut, score)
        u = rng.uniform(size=ROWS)
        rating = np.where(u < 0.05, 8, np.where(u < 0.06, 9, rating))
        data[genre] = rating
    miss = rng.uniform(size=ROWS)
    data["EDUC"] = np.where(miss < 0.02, 98, np.where(miss < 0.03, 99, data["EDUC"]))
    return data, weights


def write_csv(path, data, weights):
    with open(path, "w", newline="\n") as out:
        out.write(",".join(COLUMNS) + "\n")
        for i in range(ROWS):
            row = []
            for col in COLUMNS:
                if col == "WTSSALL":
                    row.append(f"{weights[i]:.4f}")
                else:
                    row.append(str(int(data[col][i])))
            out.write(",".join(row) + "\n")


def oracle(data):
    """OLS on standardized variables; DV = count of genre items rated 4 or 5."""
    items = np.column_stack([data[g] for g in GENRES]).astype(float)
    items[np.isin(items, [8, 9])] = np.nan
    educ = data["EDUC"].astype(float)
    educ[np.isin(educ, [98, 99])] = np.nan
    x = np.column_stack([educ, data["INCOME"], data["PRESTIGE"]]).astype(float)
    keep = ~np.isnan(items).any(axis=1) & ~np.isnan(x).any(axis=1)
    y = (items[keep] >= 4).sum(axis=1).astype(float)
    x = x[keep]
    n, k = x.shape

    design = np.column_stack([np.ones(n), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    r2 = 1 - resid @ resid / ((y - y.mean()) @ (y - y.mean()))
    sigma2 = resid @ resid / (n - k - 1)
    cov = sigma2 * np.linalg.inv(design.T @ design)
    tvals = coef / np.sqrt(np.diag(cov))
    pvals = 2 * stats.t.sf(np.abs(tvals), n - k - 1)

    beta = coef[1:] * x.std(axis=0, ddof=1) / y.std(ddof=1)
    # Independent route: regress z-scores without an intercept.
    zx = (x - x.mean(axis=0)) / x.std(axis=0, ddof=1)
    zy = (y - y.mean()) / y.std(ddof=1)
    beta_ne = np.linalg.solve(zx.T @ zx, zx.T @ zy)
    assert np.max(np.abs(beta - beta_ne)) < 1e-8

    def stars(p):
        return 3 if p < 0.001 else 2 if p < 0.01 else 1 if p < 0.05 else 0

    labels = ["Education", "Household income", "Occupational prestige"]
    cells = [{"variable": labels[j], "estimate": float(beta[j]), "stars": stars(pvals[j + 1])}
             for j in range(k)]
    model = {"label": "Model 1", "n": int(n), "r2": float(r2),
             "constant": float(coef[0]), "cells": cells}
    return {"kind": "regression_table", "models": [model]}


def variant(reference, mode):
    """Candidate outputs with a known alignment score against the reference."""
    doc = json.loads(json.dumps(reference))
    model = doc["models"][0]
    if mode == "score60":
        # credits 1,0,0; stars equal; N exact, R2 and constant far off
        for cell in model["cells"][1:]:
            cell["estimate"] += 0.5
        model["r2"] += 0.2
        model["constant"] += 10 * (abs(model["constant"]) + 1)
    elif mode == "score40":
        for cell in model["cells"]:
            cell["estimate"] += 0.5
        model["n"] = int(round(model["n"] * 0.8))
        model["r2"] += 0.2
        model["constant"] += 10 * (abs(model["constant"]) + 1)
    elif mode == "score55":
        # every cell in the half-credit band, every star wrong, fit 1.5/3
        for cell in model["cells"]:
            beta = cell["estimate"]
            full = max(0.005, 0.05 * abs(beta))
            partial = max(0.05, 0.5 * abs(beta))
            step = (full + partial) / 2
            cell["estimate"] = beta + (step if beta >= 0 else -step)
            cell["stars"] = (cell["stars"] + 1) % 4
        model["r2"] += 0.03
        model["constant"] += 10 * (abs(model["constant"]) + 1)
    return doc


def main():
    root = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
    data, weights = make_dataset(42)
    write_csv(root / "data.csv", data, weights)
    reference = oracle(data)
    dump = lambda obj: json.dumps(obj, indent=2) + "\n"
    (root / "reference").mkdir(exist_ok=True)
    (root / "reference" / "seed42_reference.json").write_text(dump(reference))
    outputs = root / "harness_outputs"
    outputs.mkdir(exist_ok=True)
    (outputs / "seed42_correct.json").write_text(dump(reference))
    for mode in ("score60", "score40", "score55"):
        (outputs / f"seed42_{mode}.json").write_text(dump(variant(reference, mode)))


if __name__ == "__main__":
    main()
