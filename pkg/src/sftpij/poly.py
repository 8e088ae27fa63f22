"""Integer polynomials with exact real-root isolation.

Coefficients are stored lowest degree first, so ``coeffs[i]`` multiplies
``X**i``.  Root isolation uses Sturm sequences over the rationals, which
keeps every bracket a certificate rather than a floating-point estimate.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence


def _trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with arbitrary-precision integer coefficients."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        trimmed = _trim(int(c) for c in self.coeffs) or [0]
        object.__setattr__(self, "coeffs", tuple(trimmed))

    @classmethod
    def from_roots(cls, roots: Sequence[int]) -> "IntPolynomial":
        result = cls((1,))
        for r in roots:
            result = result * cls((-r, 1))
        return result

    @classmethod
    def monomial(cls, degree: int, coeff: int = 1) -> "IntPolynomial":
        return cls((0,) * degree + (coeff,))

    @property
    def degree(self) -> int:
        if self.coeffs == (0,):
            return -1
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(tuple(x - y for x, y in zip(a, b)))

    def __pow__(self, k: int) -> "IntPolynomial":
        result = IntPolynomial((1,))
        for _ in range(k):
            result = result * self
        return result

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coeffs))[1:] or (0,))

    def integer_roots(self) -> list[int]:
        """Distinct integer roots, in decreasing order.

        Candidates are the divisors of the lowest nonzero coefficient
        (rational root theorem after removing the factor ``X**j``).
        """
        if self.degree <= 0:
            return []
        roots = []
        shift = 0
        while self.coeffs[shift] == 0:
            shift += 1
        if shift:
            roots.append(0)
        c0 = abs(self.coeffs[shift])
        reduced = IntPolynomial(self.coeffs[shift:])
        if reduced.degree <= 0:
            return roots
        for d in _divisors(c0):
            for cand in (d, -d):
                if reduced(cand) == 0:
                    roots.append(cand)
        return sorted(set(roots), reverse=True)

    def sturm_count(self, lo: Fraction, hi: Fraction) -> int:
        """Number of distinct real roots in the half-open interval (lo, hi]."""
        seq = sturm_sequence(self)
        return _sign_changes(seq, lo) - _sign_changes(seq, hi)

    def __str__(self) -> str:
        terms = []
        for power in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[power]
            if c == 0:
                continue
            mag = abs(c)
            if power == 0:
                body = str(mag)
            else:
                var = "X" if power == 1 else f"X^{power}"
                body = var if mag == 1 else f"{mag}{var}"
            if not terms:
                terms.append(("-" if c < 0 else "") + body)
            else:
                terms.append(("- " if c < 0 else "+ ") + body)
        return " ".join(terms) if terms else "0"

    def to_json(self) -> list[int]:
        return list(self.coeffs)


def _divisors(n: int) -> list[int]:
    if n == 0:
        return [0]
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


# --- rational polynomial helpers (lists of Fractions, lowest degree first) ---

def _q_trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _q_rem(a, b):
    a = _q_trim(a)
    b = _q_trim(b)
    while len(a) >= len(b) and any(a):
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= factor * c
        a.pop()
        a = _q_trim(a) if a else [Fraction(0)]
    return a


def _q_gcd(a, b):
    a, b = _q_trim(a), _q_trim(b)
    while any(b):
        a, b = b, _q_rem(a, b)
    lead = a[-1]
    return [c / lead for c in a]


def _q_div(a, b):
    a = _q_trim(a)
    b = _q_trim(b)
    quot = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and any(a):
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        quot[shift] = factor
        for i, c in enumerate(b):
            a[shift + i] -= factor * c
        a.pop()
        if not a:
            a = [Fraction(0)]
    return quot


def _primitive(qcoeffs) -> IntPolynomial:
    den = 1
    for c in qcoeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in qcoeffs]
    g = 0
    for c in ints:
        g = gcd(g, c)
    g = g or 1
    if ints[-1] < 0:
        g = -g
    return IntPolynomial(tuple(c // g for c in ints))


def squarefree_part(p: IntPolynomial) -> IntPolynomial:
    """``p / gcd(p, p')`` as a primitive integer polynomial."""
    qp = [Fraction(c) for c in p.coeffs]
    g = _q_gcd(qp, [Fraction(c) for c in p.derivative().coeffs])
    return _primitive(_q_div(qp, g))


def sturm_sequence(p: IntPolynomial) -> list[list[Fraction]]:
    seq = [[Fraction(c) for c in p.coeffs], [Fraction(c) for c in p.derivative().coeffs]]
    while any(seq[-1]) and len(_q_trim(seq[-1])) > 1:
        r = _q_rem(seq[-2], seq[-1])
        if not any(r):
            break
        seq.append([-c for c in r])
    return seq


def _q_eval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _sign_changes(seq, x) -> int:
    signs = [v for v in (_q_eval(p, x) for p in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def isolate_largest_root(p: IntPolynomial, upper: int, width: Fraction) -> tuple[Fraction, Fraction]:
    """Bracket ``(lo, hi]`` around the largest real root of ``p``.

    ``upper`` must bound every real root from above.  The returned
    interval has ``hi - lo <= width`` and contains exactly the largest
    real root, certified by Sturm counts on the squarefree part.
    """
    q = squarefree_part(p)
    hi = Fraction(upper)
    lo = Fraction(-1)
    while q.sturm_count(lo, hi) == 0:
        lo = lo * 2 if lo < 0 else -Fraction(1)
        if lo < -Fraction(10) ** 30:
            raise ValueError("polynomial has no real root below the bound")
    seq = sturm_sequence(q)
    v_hi = _sign_changes(seq, hi)
    while hi - lo > width:
        mid = (lo + hi) / 2
        if _sign_changes(seq, mid) - v_hi >= 1:
            lo = mid
        else:
            hi = mid
            v_hi = _sign_changes(seq, hi)
    return lo, hi


def factor_containing(p: IntPolynomial, lo: Fraction, hi: Fraction) -> IntPolynomial:
    """Irreducible integer factor of ``p`` having a root in ``(lo, hi]``."""
    # Integer factorisation over Z is delegated to sympy; imported lazily
    # because only irrational Perron values reach this path.
    from sympy import Poly, symbols

    x = symbols("x")
    poly = Poly(list(reversed(p.coeffs)), x, domain="ZZ")
    _, factors = poly.factor_list()
    for fac, _mult in factors:
        cand = IntPolynomial(tuple(int(c) for c in reversed(fac.all_coeffs())))
        if cand.leading < 0:
            cand = IntPolynomial(tuple(-c for c in cand.coeffs))
        if cand.degree >= 1 and cand.sturm_count(lo, hi) >= 1:
            return cand
    raise ValueError("no factor has a root in the bracket")
