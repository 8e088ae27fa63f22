"""Finite pairwise-independence configurations.

Given finite sets F, F' and C a subset of F x F', look for probability
vectors m on F and m' on F' such that, under m x m', the indicator of C
is independent of each coordinate:

    for all x0 in F, x0' in F':
        sum_{x : (x, x0') in C} m(x) == sum_{x' : (x0, x') in C} m'(x')

The common value m x m'(C) does not depend on the solution and is
rational.  Everything here is solved in exact rationals.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import core
from .core import AdjacencyMatrix
from .errors import PreconditionError
from .exact import frac_str, lexmin_point, linprog_exact
from .joining import LocalRule
from .parry import MarkovMeasure


@dataclass(frozen=True)
class IndependenceConfig:
    size_f: int
    size_fp: int
    members: frozenset

    def __post_init__(self):
        if self.size_f < 1 or self.size_fp < 1:
            raise ValueError("F and F' must be non-empty")
        members = frozenset((int(i), int(j)) for i, j in self.members)
        for i, j in members:
            if not (0 <= i < self.size_f and 0 <= j < self.size_fp):
                raise ValueError(f"pair ({i}, {j}) outside F x F'")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_matrix(cls, rows) -> "IndependenceConfig":
        rows = [list(r) for r in rows]
        return cls(len(rows), len(rows[0]),
                   frozenset((i, j) for i, r in enumerate(rows) for j, v in enumerate(r) if v))

    def contains(self, i: int, j: int) -> bool:
        return (i, j) in self.members

    def membership(self) -> list[list[int]]:
        return [[int((i, j) in self.members) for j in range(self.size_fp)] for i in range(self.size_f)]

    def transpose(self) -> "IndependenceConfig":
        return IndependenceConfig(self.size_fp, self.size_f, frozenset((j, i) for i, j in self.members))

    def complement(self) -> "IndependenceConfig":
        return IndependenceConfig(self.size_f, self.size_fp, frozenset(
            (i, j) for i in range(self.size_f) for j in range(self.size_fp) if (i, j) not in self.members))

    def to_json(self) -> dict:
        return {"F": self.size_f, "Fp": self.size_fp, "C": [list(p) for p in sorted(self.members)]}

    @classmethod
    def from_json(cls, data) -> "IndependenceConfig":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["F"]), int(data["Fp"]), frozenset(tuple(p) for p in data["C"]))


@dataclass(frozen=True)
class ConfigSolution:
    m: tuple[Fraction, ...]
    mp: tuple[Fraction, ...]
    value: Fraction

    def to_json(self) -> dict:
        return {"m": [frac_str(v) for v in self.m], "mp": [frac_str(v) for v in self.mp],
                "value": frac_str(self.value)}


def linear_system(cfg: IndependenceConfig) -> tuple[list[list[int]], list[int]]:
    """Equality constraints over the variables (m_0..m_{|F|-1}, m'_0..m'_{|F'|-1})."""
    nf, nfp = cfg.size_f, cfg.size_fp
    A = [[1] * nf + [0] * nfp, [0] * nf + [1] * nfp]
    b = [1, 1]
    for x0 in range(nf):
        for x0p in range(nfp):
            row = [int(cfg.contains(x, x0p)) for x in range(nf)]
            row += [-int(cfg.contains(x0, xp)) for xp in range(nfp)]
            A.append(row)
            b.append(0)
    return A, b


def is_solution(cfg: IndependenceConfig, m, mp) -> bool:
    """Direct check of the defining equations, nonnegativity and normalization."""
    if any(v < 0 for v in list(m) + list(mp)) or sum(m) != 1 or sum(mp) != 1:
        return False
    for x0 in range(cfg.size_f):
        for x0p in range(cfg.size_fp):
            lhs = sum(m[x] for x in range(cfg.size_f) if cfg.contains(x, x0p))
            rhs = sum(mp[xp] for xp in range(cfg.size_fp) if cfg.contains(x0, xp))
            if lhs != rhs:
                return False
    return True


def _value_from(cfg: IndependenceConfig, m, mp) -> Fraction:
    # any x0 in the support of m gives the value (row mass under m')
    x0 = next(i for i, v in enumerate(m) if v > 0)
    return sum((mp[xp] for xp in range(cfg.size_fp) if cfg.contains(x0, xp)), Fraction(0))


def _solution(cfg, x) -> ConfigSolution:
    m = tuple(x[:cfg.size_f])
    mp = tuple(x[cfg.size_f:])
    return ConfigSolution(m, mp, _value_from(cfg, m, mp))


def solve_config(cfg: IndependenceConfig) -> ConfigSolution | None:
    """Lexicographically smallest solution (m first, then m'), or None if infeasible."""
    A, b = linear_system(cfg)
    x = lexmin_point(A, b, cfg.size_f + cfg.size_fp)
    if x is None:
        return None
    sol = _solution(cfg, x)
    assert is_solution(cfg, sol.m, sol.mp)
    return sol


def config_value(cfg: IndependenceConfig) -> Fraction | None:
    sol = solve_config(cfg)
    return None if sol is None else sol.value


@dataclass(frozen=True)
class UniquenessReport:
    feasible: bool
    distinct_solutions: int
    values: tuple[Fraction, ...]
    solutions: tuple[ConfigSolution, ...] = ()

    @property
    def all_equal(self) -> bool:
        return len(set(self.values)) <= 1

    @property
    def value(self) -> Fraction | None:
        return self.values[0] if self.values else None

    @property
    def denominator(self) -> int | None:
        return None if self.value is None else self.value.denominator

    def to_json(self) -> dict:
        return {"feasible": self.feasible, "distinct_solutions": self.distinct_solutions,
                "all_equal": self.all_equal,
                "value": None if self.value is None else frac_str(self.value),
                "denominator": self.denominator,
                "solutions": [s.to_json() for s in self.solutions]}


def vertex_solutions(cfg: IndependenceConfig, trials: int = 10, seed: int = 0) -> list[ConfigSolution]:
    """Distinct vertices from minimizing and maximizing each variable plus random objectives."""
    A, b = linear_system(cfg)
    nvar = cfg.size_f + cfg.size_fp
    objectives = []
    for i in range(nvar):
        for sign in (1, -1):
            objectives.append([sign * int(j == i) for j in range(nvar)])
    rng = random.Random(seed)
    for _ in range(trials):
        objectives.append([rng.randint(-5, 5) for _ in range(nvar)])
    found = {}
    for cost in objectives:
        res = linprog_exact(cost, A, b)
        if res.status == "infeasible":
            return []
        if res.status == "optimal":
            found.setdefault(tuple(res.x), _solution(cfg, res.x))
    return [found[k] for k in sorted(found)]


def verify_value_uniqueness(cfg: IndependenceConfig, trials: int = 10, seed: int = 0) -> UniquenessReport:
    sols = vertex_solutions(cfg, trials, seed)
    for s in sols:
        if not is_solution(cfg, s.m, s.mp):
            raise ArithmeticError("solver produced a point violating the system")
    return UniquenessReport(bool(sols), len(sols), tuple(s.value for s in sols), tuple(sols))


def random_config(rng: random.Random, lo: int = 2, hi: int = 6, density: float = 0.5) -> IndependenceConfig:
    nf, nfp = rng.randint(lo, hi), rng.randint(lo, hi)
    return IndependenceConfig(nf, nfp, frozenset(
        (i, j) for i in range(nf) for j in range(nfp) if rng.random() < density))


# --- bridge from joinings --------------------------------------------------------

def config_from_joining(mu: MarkovMeasure, rule: LocalRule, length: int, c,
                        *, budget: int | None = None) -> IndependenceConfig:
    """Configuration on F = F' = L_{length+2p} whose C is the set of pairs producing ``c``.

    Checks that the configuration is feasible and that its value equals
    ``mu([c])`` exactly; raises :class:`PreconditionError` otherwise.
    """
    M: AdjacencyMatrix = rule.matrix
    word = M.alphabet.encode(c) if not isinstance(c, tuple) else c
    if any(not 0 <= s < M.size for s in word):
        raise PreconditionError(f"word {c!r} uses symbols outside the alphabet")
    if rule.matrix != mu.matrix:
        raise PreconditionError("rule and measure are defined on different matrices")
    if len(word) != length:
        raise PreconditionError(f"word {c!r} does not have length {length}")
    if not M.allowed(word):
        raise PreconditionError(f"word {c!r} is not allowed")
    if not mu.exact:
        raise PreconditionError("bridge needs an exact measure")
    words = core.index_words(M, length + 2 * rule.p, budget)
    members = frozenset((i, j) for i, x in enumerate(words) for j, xp in enumerate(words)
                        if rule.apply(x, xp) == word)
    cfg = IndependenceConfig(len(words), len(words), members)
    value = config_value(cfg)
    target = mu.mass(word)
    if value is None:
        raise PreconditionError(f"configuration for {c!r} is infeasible")
    if value != target:
        raise PreconditionError(f"configuration value {value} differs from mu([{c}]) = {target}")
    return cfg


def cylinder_witness(mu: MarkovMeasure, rule: LocalRule, length: int) -> tuple[Fraction, ...]:
    """Masses of the length+2p cylinders, the candidate m = m' from the joining."""
    return tuple(mu.mass(w) for w in core.index_words(rule.matrix, length + 2 * rule.p))


def configs_for_length(mu: MarkovMeasure, rule: LocalRule, length: int) -> Iterable:
    for w in core.index_words(rule.matrix, length):
        yield w, config_from_joining(mu, rule, length, w)
