"""Bundled example shifts with their expected outcomes.

Each entry is a JSON file in ``gallery_data/``.  Matrices and rules are
either spelled out in the interchange schemas or named by a small
builder description, so new examples need no code.  Running an entry executes
the battery and every listed rule check and compares against the stored
expectations.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from . import core
from .battery import EXCLUDED, run_battery
from .core import AdjacencyMatrix
from .errors import MatrixFormatError
from .joining import (LocalRule, check_pij_star, constant_first_coordinate_matrix,
                      make_bernoulli_rule, make_periodic_rule, make_projection_rule,
                      make_two_step_sum_rule, make_vector_sum_rule, product_rule,
                      search_rules, verify_pij)
from .parry import MarkovMeasure, parry_measure, uniform_measure

OK, MISMATCH, SKIPPED = "ok", "mismatch", "skipped"


def _data_dir():
    return resources.files(__package__).joinpath("gallery_data")


def entry_names() -> list[str]:
    return sorted(p.name[:-5] for p in _data_dir().iterdir() if p.name.endswith(".json"))


def load_entry(name: str) -> dict:
    path = _data_dir().joinpath(f"{name}.json")
    if not path.is_file():
        raise KeyError(f"unknown gallery entry {name!r}; known: {', '.join(entry_names())}")
    return json.loads(path.read_text())


def build_matrix(desc) -> AdjacencyMatrix:
    if "builder" not in desc:
        return core.parse_matrix(desc)
    kind = desc["builder"]
    if kind == "full":
        return core.full_shift(desc["n"])
    if kind == "cycle":
        return core.cycle_matrix(desc["n"])
    if kind == "tensor":
        a, b = (build_matrix(f) for f in desc["factors"])
        return core.tensor_product(a, b)
    if kind == "constant-first-coordinate":
        return constant_first_coordinate_matrix()
    raise MatrixFormatError(f"unknown matrix builder {kind!r}")


def build_rule(desc, M: AdjacencyMatrix) -> LocalRule:
    kind = desc["kind"]
    if kind == "bernoulli":
        return make_bernoulli_rule(desc["n"])
    if kind == "periodic":
        return make_periodic_rule(desc["n"])
    if kind == "projection":
        return make_projection_rule(M)
    if kind == "two-step-sum":
        return make_two_step_sum_rule()
    if kind == "vector-sum":
        return make_vector_sum_rule(M)
    if kind == "product":
        r1, r2 = (build_rule(f, None) for f in desc["factors"])
        return product_rule(r1, r2)
    raise MatrixFormatError(f"unknown rule builder {kind!r}")


def entry_rule(item: dict, M: AdjacencyMatrix) -> LocalRule:
    if "rule" in item:
        data = dict(item["rule"])
        data.setdefault("matrix", M.to_json())
        rule = LocalRule.from_json(data)
    else:
        rule = build_rule(item["builder"], M)
    if rule.matrix != M:
        raise MatrixFormatError(f"rule {item.get('name')!r} is not defined on the entry's matrix")
    return rule


def entry_measure(entry: dict, M: AdjacencyMatrix) -> MarkovMeasure:
    return uniform_measure(M) if entry.get("measure") == "uniform" else parry_measure(M)


@dataclass
class GalleryResult:
    name: str
    status: str
    comparisons: list = field(default_factory=list)  # (check, expected, observed)
    reason: str = ""

    def add(self, check, expected, observed):
        self.comparisons.append((check, expected, observed))

    def finish(self) -> "GalleryResult":
        if self.status != SKIPPED:
            self.status = OK if all(e == o for _, e, o in self.comparisons) else MISMATCH
        return self

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "reason": self.reason,
                "comparisons": [{"check": c, "expected": e, "observed": o, "match": e == o}
                                for c, e, o in self.comparisons]}


def run_entry(name: str, matrix: AdjacencyMatrix | None = None) -> GalleryResult:
    """Run one entry's pipeline; ``matrix`` supplies an externally sourced matrix."""
    entry = load_entry(name)
    res = GalleryResult(name, OK)
    if matrix is None:
        if entry.get("matrix") is None:
            res.status, res.reason = SKIPPED, "matrix externally sourced"
            return res
        matrix = build_matrix(entry["matrix"])
    report = run_battery(matrix)
    res.add("verdict", entry["expected_verdict"], report.verdict)
    if "expected_failure" in entry:
        fails = report.failures
        res.add("first_failure", entry["expected_failure"], fails[0].name if fails else None)
    if "expected_period" in entry:
        res.add("period", entry["expected_period"], core.period(matrix))
    if "expected_mk_constant" in entry:
        res.add("mk_constant_k", entry["expected_mk_constant"], report.check("mk_constant").witness.get("k"))
    rules = entry.get("rules", [])
    if rules or "search" in entry:
        mu = entry_measure(entry, matrix)
    for item in rules:
        rule = entry_rule(item, matrix)
        verdict = verify_pij(mu, rule, item["depth"], stop_early=True)
        res.add(f"verify:{item['name']}", item["expect"], verdict.overall)
        if "pij_star" in item:
            star = item["pij_star"]
            q = check_pij_star(mu, rule, star["q_max"])
            res.add(f"pij_star:{item['name']}", star["expect"], q)
    if "search" in entry:
        s = entry["search"]
        found = search_rules(matrix, s["p"], s["depth"], measure=mu)
        res.add("search_count", s["expect_count"], len(found))
    return res.finish()


def run_all() -> list[GalleryResult]:
    return [run_entry(n) for n in entry_names()]


def gallery_matrices() -> dict[str, AdjacencyMatrix]:
    """Bundled matrices by entry name (entries without a matrix are left out)."""
    out = {}
    for n in entry_names():
        desc = load_entry(n).get("matrix")
        if desc is not None:
            out[n] = build_matrix(desc)
    return out


def excluded_entries() -> list[str]:
    return [n for n in entry_names() if load_entry(n)["expected_verdict"] == EXCLUDED]
