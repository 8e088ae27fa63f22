"""Perron data and the maximal-entropy (Parry) Markov measure.

For an irreducible matrix with Perron value ``beta``, left eigenvector
``l`` and right eigenvector ``r`` normalized so that ``sum(l[i] * r[i]) == 1``,
the maximal-entropy measure gives the cylinder ``[a_0 ... a_k]`` the mass
``l[a_0] * r[a_k] / beta**k``.

When ``beta`` is an integer every quantity is an exact :class:`Fraction`.
Otherwise ``beta`` is carried as a Sturm-certified rational bracket and
the eigenvectors are floats accurate to about 1e-12.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from . import core
from .core import AdjacencyMatrix, Word
from .errors import MatrixFormatError, PreconditionError
from .exact import frac_str, nullspace, parse_frac
from .poly import IntPolynomial, factor_containing, isolate_largest_root

BRACKET_WIDTH = Fraction(1, 10**30)
FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class Bracket:
    """Irrational Perron value known to lie in ``(lo, hi]``, a root of ``factor``."""

    lo: Fraction
    hi: Fraction
    factor: IntPolynomial

    @property
    def midpoint(self) -> float:
        return float((self.lo + self.hi) / 2)


@dataclass(frozen=True)
class PerronData:
    value: Union[int, Bracket]
    left: tuple
    right: tuple
    residual: float = 0.0

    @property
    def exact(self) -> bool:
        return isinstance(self.value, int)

    @property
    def beta(self) -> float:
        return float(self.value) if self.exact else self.value.midpoint

    def to_json(self) -> dict:
        if self.exact:
            return {
                "kind": "integer",
                "value": self.value,
                "left": [frac_str(v) for v in self.left],
                "right": [frac_str(v) for v in self.right],
            }
        return {
            "kind": "bracket",
            "lo": frac_str(self.value.lo),
            "hi": frac_str(self.value.hi),
            "approx": self.value.midpoint,
            "factor": self.value.factor.to_json(),
            "factor_str": str(self.value.factor),
            "left": list(self.left),
            "right": list(self.right),
            "residual": self.residual,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PerronData":
        if data["kind"] == "integer":
            return cls(int(data["value"]), tuple(map(parse_frac, data["left"])),
                       tuple(map(parse_frac, data["right"])))
        bracket = Bracket(parse_frac(data["lo"]), parse_frac(data["hi"]),
                          IntPolynomial(tuple(data["factor"])))
        return cls(bracket, tuple(map(float, data["left"])), tuple(map(float, data["right"])),
                   float(data.get("residual", 0.0)))


def _positive_kernel_vector(rows) -> list[Fraction] | None:
    basis = nullspace(rows)
    if len(basis) != 1:
        return None
    vec = basis[0]
    if all(v < 0 for v in vec):
        vec = [-v for v in vec]
    if all(v > 0 for v in vec):
        return vec
    return None


def _normalize(left, right):
    right = [v / right[0] for v in right]
    s = sum(a * b for a, b in zip(left, right))
    left = [v / s for v in left]
    return tuple(left), tuple(right)


def perron(M: AdjacencyMatrix) -> PerronData:
    """Perron value and eigenvectors of an irreducible matrix.

    An integer root ``n`` of the characteristic polynomial is accepted as
    the Perron value only if ``M - nI`` has a strictly positive kernel
    vector, found by an exact rational solve.  Right eigenvector is scaled
    to ``r[0] == 1`` and the left one to ``sum(l * r) == 1``.
    """
    core._require_irreducible(M)
    n = M.size
    cp = core.char_poly(M)
    for root in cp.integer_roots():
        if root < 1:
            continue
        shifted = [[M.entries[i][j] - root * (i == j) for j in range(n)] for i in range(n)]
        right = _positive_kernel_vector(shifted)
        if right is None:
            continue
        left = _positive_kernel_vector([list(col) for col in zip(*shifted)])
        if left is None:
            continue
        l, r = _normalize(left, right)
        return PerronData(root, l, r)

    upper = max(sum(row) for row in M.entries)
    lo, hi = isolate_largest_root(cp, upper, BRACKET_WIDTH)
    factor = factor_containing(cp, lo, hi)
    beta = float((lo + hi) / 2)
    A = np.array(M.entries, dtype=float)
    r = _float_kernel(A - beta * np.eye(n))
    l = _float_kernel(A.T - beta * np.eye(n))
    l, r = _normalize(list(l), list(r))
    resid = max(np.max(np.abs(A @ np.array(r) - beta * np.array(r))),
                np.max(np.abs(np.array(l) @ A - beta * np.array(l))))
    return PerronData(Bracket(lo, hi, factor), tuple(map(float, l)), tuple(map(float, r)),
                      float(resid))


def _float_kernel(B: np.ndarray) -> np.ndarray:
    _, _, vt = np.linalg.svd(B)
    v = vt[-1]
    if v.sum() < 0:
        v = -v
    if np.any(v <= 0):
        raise ArithmeticError("Perron vector not strictly positive in floating point")
    return v


@dataclass(frozen=True)
class MarkovMeasure:
    """Stationary Markov measure built from Perron data.

    ``stationary[a] = l[a] * r[a]`` and
    ``transition[a][b] = M[a][b] * r[b] / (beta * r[a])``.
    """

    matrix: AdjacencyMatrix
    perron: PerronData
    stationary: tuple = field(init=False)
    transition: tuple = field(init=False)

    def __post_init__(self):
        l, r = self.perron.left, self.perron.right
        beta = self.perron.value if self.exact else self.perron.beta
        n = self.matrix.size
        if self.exact:
            pi = tuple(Fraction(l[a]) * r[a] for a in range(n))
            P = tuple(
                tuple(Fraction(self.matrix.entries[a][b]) * r[b] / (beta * r[a]) for b in range(n))
                for a in range(n)
            )
        else:
            pi = tuple(l[a] * r[a] for a in range(n))
            P = tuple(
                tuple(self.matrix.entries[a][b] * r[b] / (beta * r[a]) for b in range(n))
                for a in range(n)
            )
        object.__setattr__(self, "stationary", pi)
        object.__setattr__(self, "transition", P)

    @property
    def exact(self) -> bool:
        return self.perron.exact

    def endpoint_weight(self, a: int, b: int):
        return self.perron.left[a] * self.perron.right[b]

    def mass(self, word: Sequence[int]):
        """Cylinder mass of an index word; zero when the word is not allowed."""
        if not word or not self.matrix.allowed(word):
            return Fraction(0) if self.exact else 0.0
        k = len(word) - 1
        if self.exact:
            return Fraction(self.perron.left[word[0]]) * self.perron.right[word[-1]] / self.perron.value**k
        return self.endpoint_weight(word[0], word[-1]) / self.perron.beta**k

    def to_json(self) -> dict:
        fmt = frac_str if self.exact else float
        return {
            "matrix": self.matrix.to_json(),
            "perron": self.perron.to_json(),
            "exact": self.exact,
            "stationary": [fmt(v) for v in self.stationary],
            "transition": [[fmt(v) for v in row] for row in self.transition],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MarkovMeasure":
        M = core.parse_matrix(data["matrix"])
        perron_data = PerronData.from_json(data["perron"])
        if len(perron_data.left) != M.size or len(perron_data.right) != M.size:
            raise MatrixFormatError("eigenvector length does not match the alphabet")
        mu = cls(M, perron_data)
        if mu.exact:
            _check_exact_eigendata(M, perron_data)
        return mu


def _check_exact_eigendata(M: AdjacencyMatrix, pd: PerronData) -> None:
    n, beta = M.size, pd.value
    l, r = pd.left, pd.right
    ok = all(sum(M.entries[a][b] * r[b] for b in range(n)) == beta * r[a] for a in range(n))
    ok = ok and all(sum(l[a] * M.entries[a][b] for a in range(n)) == beta * l[b] for b in range(n))
    ok = ok and sum(a * b for a, b in zip(l, r)) == 1 and all(v > 0 for v in l + r)
    if not ok:
        raise MatrixFormatError("Perron data is not a normalized positive eigenpair of the matrix")


def parry_measure(M: AdjacencyMatrix) -> MarkovMeasure:
    return MarkovMeasure(M, perron(M))


def uniform_measure(M: AdjacencyMatrix) -> MarkovMeasure:
    """Measure giving every allowed word of length k+1 the mass 1/(|A| n^k).

    Needs constant in- and out-degree n but not irreducibility; on an
    irreducible uniform matrix it coincides with the Parry measure.
    """
    n = core.is_uniform(M)
    if n is None:
        raise PreconditionError("uniform_measure needs equal in- and out-degrees")
    size = M.size
    return MarkovMeasure(M, PerronData(n, tuple([Fraction(1, size)] * size), tuple([Fraction(1)] * size)))


@dataclass(frozen=True)
class CylinderMass:
    value: Union[Fraction, float]
    allowed: bool
    exact: bool
    error: float = 0.0


def cylinder_probability(mu: MarkovMeasure, w: Union[Word, Sequence[int], str]) -> CylinderMass:
    """Mass of the cylinder of ``w``.

    Disallowed words return an exact zero with ``allowed=False``.  In the
    irrational case ``error`` bounds the absolute error of the float.
    """
    word = _as_indices(mu.matrix, w)
    if not word:
        raise ValueError("empty word")
    if not mu.matrix.allowed(word):
        return CylinderMass(Fraction(0), False, True)
    value = mu.mass(word)
    if mu.exact:
        return CylinderMass(value, True, True)
    k = len(word) - 1
    beta = mu.perron.beta
    # relative error from the eigenvector residual, the bracket width and rounding
    rel = 4 * mu.perron.residual / min(mu.perron.left + mu.perron.right) / beta
    rel += k * float(mu.perron.value.hi - mu.perron.value.lo) / beta + (k + 4) * 2.2e-16
    return CylinderMass(value, True, False, abs(value) * rel)


def _as_indices(M: AdjacencyMatrix, w) -> tuple[int, ...]:
    if isinstance(w, Word):
        return w.symbols
    if isinstance(w, str):
        return M.alphabet.encode(w)
    return tuple(w)


@dataclass(frozen=True)
class EntropyReport:
    perron: Union[int, Bracket]
    log_beta: float
    estimates: list  # (length, |L_length|, log|L_length| / length)

    @property
    def beta(self) -> float:
        return float(self.perron) if isinstance(self.perron, int) else self.perron.midpoint


def entropy(mu: MarkovMeasure, lengths: Sequence[int] = range(1, 13)) -> EntropyReport:
    """Entropy log(beta) together with the finite-length estimates (1/l) log |L_l|."""
    estimates = []
    for length in lengths:
        count = core.count_words(mu.matrix, length)
        estimates.append((length, count, math.log(count) / length))
    return EntropyReport(mu.perron.value, math.log(mu.perron.beta), estimates)


@dataclass(frozen=True)
class QuasiUniformity:
    K: Union[Fraction, float]
    bound: Union[Fraction, float]
    per_length: list  # (length, max/min ratio at that length)

    @property
    def stabilized(self) -> bool:
        last = self.per_length[-1][1]
        if isinstance(last, Fraction):
            return last == self.bound
        return math.isclose(last, self.bound, rel_tol=FLOAT_TOL)


def _length_masses(mu: MarkovMeasure, length: int):
    """Endpoint weights l[a] * r[b] of all length-``length`` cylinders."""
    Mk = core.matrix_power(mu.matrix, length - 1)
    n = mu.matrix.size
    return [mu.endpoint_weight(a, b) for a in range(n) for b in range(n) if Mk[a][b] > 0]


def quasi_uniformity_constant(mu: MarkovMeasure, l_max: int) -> QuasiUniformity:
    """Smallest K with K^-1 mu(B) <= mu(C) <= K mu(B) for equal-length cylinders up to ``l_max``.

    Masses of length-l cylinders are ``l[a] r[b] / beta**(l-1)``, so the
    ratio at each length only depends on which endpoint pairs occur.
    ``bound`` is the length-independent ratio over every endpoint pair.
    """
    per_length = []
    for length in range(1, l_max + 1):
        w = _length_masses(mu, length)
        per_length.append((length, max(w) / min(w)))
    n = mu.matrix.size
    every = [mu.endpoint_weight(a, b) for a in range(n) for b in range(n)]
    K = max(r for _, r in per_length)
    return QuasiUniformity(K, max(every) / min(every), per_length)


@dataclass(frozen=True)
class MonotonicityReport:
    p: int
    l_max: int
    holds: bool
    first_violation: tuple | None  # (length, min mass at length, max mass at length + 2p)
    exact: bool


def check_cylinder_monotonicity(mu: MarkovMeasure, p: int, l_max: int) -> MonotonicityReport:
    """Check min over length-l cylinders >= max over length-(l+2p) cylinders, l <= l_max.

    A violation certifies that ``mu`` admits no pairwise-independent
    joining of width ``p``.  Float comparisons use relative tolerance 1e-9.
    """
    if p < 0 or l_max < 1:
        raise ValueError("need p >= 0 and l_max >= 1")
    beta = mu.perron.value if mu.exact else mu.perron.beta
    for length in range(1, l_max + 1):
        short = min(_length_masses(mu, length)) / beta ** (length - 1)
        long = max(_length_masses(mu, length + 2 * p)) / beta ** (length + 2 * p - 1)
        if mu.exact:
            bad = short < long
        else:
            bad = short < long * (1 - FLOAT_TOL)
        if bad:
            return MonotonicityReport(p, l_max, False, (length, short, long), mu.exact)
    return MonotonicityReport(p, l_max, True, None, mu.exact)
