"""Necessary conditions for pairwise-independent joinings, run as a pipeline.

Each check reports ``pass``, ``fail``, ``inapplicable`` (its hypotheses are
not met) or ``inconclusive`` (nothing found within the search budget).
Only checks of kind ``"necessary"`` can exclude a matrix; the
``"hypothesis"`` checks just gate the others.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import core
from .core import AdjacencyMatrix
from .errors import PreconditionError
from .parry import perron
from .poly import IntPolynomial

PASS, FAIL, INAPPLICABLE, INCONCLUSIVE = "pass", "fail", "inapplicable", "inconclusive"
EXCLUDED, CONSISTENT = "excluded", "consistent-with-PIJ"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    witness: dict = field(default_factory=dict)
    kind: str = "necessary"

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "kind": self.kind, "witness": self.witness}


@dataclass(frozen=True)
class PijReport:
    checks: tuple[CheckResult, ...]

    @property
    def verdict(self) -> str:
        return EXCLUDED if self.failures else CONSISTENT

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.kind == "necessary" and c.status == FAIL]

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def to_json(self) -> dict:
        return {"checks": [c.to_json() for c in self.checks], "verdict": self.verdict}


@dataclass(frozen=True)
class ShiftEquivalenceWitness:
    R: tuple[tuple[int, ...], ...]
    S: tuple[tuple[int, ...], ...]
    m: int

    def to_json(self) -> dict:
        return {"R": [list(r) for r in self.R], "S": [list(r) for r in self.S], "m": self.m}


def _is_iasft(M: AdjacencyMatrix) -> bool:
    return core.is_irreducible(M) and core.period(M) == 1


def _inapplicable(name, reason, kind="necessary"):
    return CheckResult(name, INAPPLICABLE, {"reason": reason}, kind)


def check_integer_perron(M: AdjacencyMatrix) -> CheckResult:
    name = "integer_perron"
    if not core.is_irreducible(M):
        return _inapplicable(name, "matrix is reducible")
    per = core.period(M)
    pd = perron(M)
    if per != 1:
        w = {"reason": f"period {per}: the integer-Perron condition needs aperiodicity; "
                       "without it rational cylinder masses do not force an integer Perron value"}
        w.update(_perron_witness(M, pd))
        return CheckResult(name, INAPPLICABLE, w)
    if pd.exact:
        return CheckResult(name, PASS, {"perron": pd.value})
    return CheckResult(name, FAIL, _perron_witness(M, pd))


def _perron_witness(M, pd) -> dict:
    cp = core.char_poly(M)
    if pd.exact:
        return {"perron": pd.value, "char_poly": str(cp)}
    return {
        "char_poly": str(cp),
        "integer_roots": cp.integer_roots(),
        "perron_factor": str(pd.value.factor),
        "bracket": [str(pd.value.lo), str(pd.value.hi)],
        "perron_approx": pd.value.midpoint,
    }


def check_rational_cylinders(M: AdjacencyMatrix) -> CheckResult:
    """Derived status: rational cylinder masses hold iff the Perron value is an integer (IASFT)."""
    name = "rational_cylinders"
    if not _is_iasft(M):
        return _inapplicable(name, "decided only for irreducible aperiodic matrices")
    pd = perron(M)
    if pd.exact:
        return CheckResult(name, PASS, {"derived_from": "integer_perron", "perron": pd.value})
    return CheckResult(name, FAIL, {
        "derived_from": "integer_perron",
        "reason": "l[a] r[a] / beta^k is irrational for some loop at a when beta is irrational",
    })


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def divides_some_power(size: int, n: int) -> bool:
    """True iff size | n**k for some k >= 1: every prime of ``size`` divides ``n``."""
    return all(n % q == 0 for q in prime_factors(size))


def check_divisibility(M: AdjacencyMatrix) -> CheckResult:
    name = "divisibility"
    n = core.is_uniform(M)
    if n is None or not _is_iasft(M):
        return _inapplicable(name, "needs a uniform irreducible aperiodic matrix")
    size = M.size
    bad = [q for q in prime_factors(size) if n % q]
    if not bad:
        k = next(k for k in range(1, size.bit_length() + 2) if n**k % size == 0)
        return CheckResult(name, PASS, {"alphabet_size": size, "n": n, "k": k})
    return CheckResult(name, FAIL, {
        "alphabet_size": size, "n": n, "prime": bad[0],
        "statement": f"{size} does not divide {n}^k for any k: the prime {bad[0]} divides {size} but not {n}",
    })


def default_k_max(M: AdjacencyMatrix) -> int:
    return 2 * M.size**2


def _all_equal(P) -> bool:
    first = P[0][0]
    return all(v == first for row in P for v in row)


def check_mk_constant(M: AdjacencyMatrix, k_max: int | None = None) -> CheckResult:
    """Look for k <= k_max with every entry of M^k equal (then to n^k / |A|)."""
    name = "mk_constant"
    n = core.is_uniform(M)
    if n is None or not _is_iasft(M):
        return _inapplicable(name, "needs a uniform irreducible aperiodic matrix")
    k_max = default_k_max(M) if k_max is None else k_max
    size = M.size
    P = core.identity(size)
    for k in range(1, k_max + 1):
        P = core._matmul(P, M.entries)
        if _all_equal(P):
            C = P[0][0]
            if C * size != n**k:
                raise ArithmeticError(f"constant M^{k} with C={C} but n^k/|A| = {n**k}/{size}")
            return CheckResult(name, PASS, {"k": k, "C_k": C, "n": n, "alphabet_size": size})
    last = {"k": k_max, "min_entry": min(map(min, P)), "max_entry": max(map(max, P))}
    if not divides_some_power(size, n):
        return CheckResult(name, FAIL, {
            "reason": f"a constant M^k would need C_k = {n}^k/{size}, never an integer",
            **last,
        })
    return CheckResult(name, INCONCLUSIVE, {"reason": f"not observed up to k_max={k_max}", **last})


def full_shift_char_poly(size: int, n: int) -> IntPolynomial:
    return IntPolynomial.monomial(size - 1) * IntPolynomial((-n, 1))


def check_full_shift_char_poly(M: AdjacencyMatrix) -> CheckResult:
    name = "full_shift_char_poly"
    if not _is_iasft(M):
        return _inapplicable(name, "needs an irreducible aperiodic matrix")
    pd = perron(M)
    if not pd.exact:
        return _inapplicable(name, "Perron value is not an integer")
    n = pd.value
    cp = core.char_poly(M)
    target = full_shift_char_poly(M.size, n)
    if cp == target:
        return CheckResult(name, PASS, {"char_poly": str(cp)})
    extra = sorted(r for r in cp.integer_roots() if r not in (0, n))
    return CheckResult(name, FAIL, {
        "char_poly": str(cp), "expected": str(target),
        "other_integer_eigenvalues": extra,
    })


def _as_int_matrix(A) -> list[list[int]]:
    if isinstance(A, AdjacencyMatrix):
        return [list(r) for r in A.entries]
    return [[int(v) for v in row] for row in A]


def verify_shift_equivalence(A, B, w: ShiftEquivalenceWitness) -> bool:
    """Exact check of RA = BR, SB = AS, SR = A^m and RS = B^m.

    ``A`` and ``B`` may be adjacency matrices or nonnegative integer
    matrices given as nested lists.
    """
    A, B = _as_int_matrix(A), _as_int_matrix(B)
    R, S = _as_int_matrix(w.R), _as_int_matrix(w.S)
    na, nb = len(A), len(B)
    if any(len(r) != na for r in A) or any(len(r) != nb for r in B):
        raise PreconditionError("A and B must be square")
    if len(R) != nb or any(len(r) != na for r in R):
        raise PreconditionError(f"R must be {nb}x{na}")
    if len(S) != na or any(len(r) != nb for r in S):
        raise PreconditionError(f"S must be {na}x{nb}")
    if w.m < 1:
        raise PreconditionError("lag m must be positive")
    if any(v < 0 for r in R + S for v in r):
        return False
    mul = core._matmul
    return (
        mul(R, A) == mul(B, R)
        and mul(S, B) == mul(A, S)
        and mul(S, R) == core.int_matrix_power(A, w.m)
        and mul(R, S) == core.int_matrix_power(B, w.m)
    )


def full_shift_witness(M: AdjacencyMatrix, k: int) -> ShiftEquivalenceWitness:
    """Witness that uniform M with constant M^k is shift equivalent to (n).

    R is the all-ones row and S the constant column C_k, lag k.
    """
    n = core.is_uniform(M)
    P = core.matrix_power(M, k)
    if n is None or not _all_equal(P):
        raise PreconditionError("needs a uniform matrix with constant M^k")
    size = M.size
    return ShiftEquivalenceWitness(((1,) * size,), tuple((P[0][0],) for _ in range(size)), k)


def scalar_to_ones_witness(n: int) -> ShiftEquivalenceWitness:
    """Lag-1 witness relating the 1x1 matrix (n) to the n x n all-ones matrix."""
    return ShiftEquivalenceWitness(tuple((1,) for _ in range(n)), ((1,) * n,), 1)


def run_battery(M: AdjacencyMatrix, k_max: int | None = None) -> PijReport:
    """Run the gated checks in a fixed order and aggregate them."""
    checks: list[CheckResult] = []
    irreducible = core.is_irreducible(M)
    checks.append(CheckResult("irreducible", PASS if irreducible else FAIL, {}, "hypothesis"))
    if irreducible:
        per = core.period(M)
        checks.append(CheckResult("aperiodic", PASS if per == 1 else FAIL, {"period": per}, "hypothesis"))
    else:
        checks.append(_inapplicable("aperiodic", "matrix is reducible", "hypothesis"))
    checks.append(check_integer_perron(M))
    checks.append(check_rational_cylinders(M))
    n = core.is_uniform(M)
    checks.append(CheckResult("uniform", PASS if n is not None else FAIL,
                              {"n": n} if n is not None else {}, "hypothesis"))
    checks.append(check_divisibility(M))
    mk = check_mk_constant(M, k_max)
    if mk.status == PASS:
        wit = full_shift_witness(M, mk.witness["k"])
        size = M.size
        mk = CheckResult(mk.name, mk.status, {
            **mk.witness,
            "shift_equivalence_to_scalar": wit.to_json(),
            "witness_verified": verify_shift_equivalence(M, [[n]], wit),
            "scalar_to_full_shift_verified": verify_shift_equivalence([[n]], [[1] * n] * n,
                                                                      scalar_to_ones_witness(n)),
            "alphabet_size": size,
        })
    checks.append(mk)
    checks.append(check_full_shift_char_poly(M))
    return PijReport(tuple(checks))


def format_report(report: PijReport) -> str:
    lines = []
    for c in report.checks:
        detail = ", ".join(f"{k}={v}" for k, v in c.witness.items() if not isinstance(v, dict))
        lines.append(f"  [{c.status:>12}] {c.name}" + (f"  ({detail})" if detail else ""))
    lines.append(f"  verdict: {report.verdict}")
    return "\n".join(lines)


def first_failure(report: PijReport) -> str | None:
    fails: Sequence[CheckResult] = report.failures
    return fails[0].name if fails else None
