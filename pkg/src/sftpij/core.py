"""Alphabets, adjacency matrices and the combinatorics of their languages.

A subshift of finite type is given by a square 0-1 matrix ``M`` over a
finite alphabet: the two-letter word ``ab`` is allowed iff ``M[a][b] == 1``.
Only length-2 forbidden patterns are supported; recode a longer memory
with a higher-block presentation before loading.

All arithmetic is on Python integers, so nothing overflows.
"""
from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from .errors import BudgetExceeded, MatrixFormatError, ReducibleError
from .poly import IntPolynomial

DEFAULT_BUDGET = 10**6
BUDGET_ENV = "SFTPIJ_BUDGET"


def enumeration_budget(budget: int | None = None) -> int:
    """Resolve an explicit cap, else the environment override, else the default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get(BUDGET_ENV)
    if env:
        return int(env)
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        syms = tuple(str(s) for s in self.symbols)
        if not syms:
            raise MatrixFormatError("alphabet must contain at least one symbol")
        if len(set(syms)) != len(syms):
            raise MatrixFormatError(f"duplicate symbols in alphabet {list(syms)}")
        object.__setattr__(self, "symbols", syms)

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, name: str) -> int:
        try:
            return self.symbols.index(str(name))
        except ValueError:
            raise MatrixFormatError(f"unknown symbol {name!r}") from None

    @property
    def single_char(self) -> bool:
        return all(len(s) == 1 for s in self.symbols)

    def encode(self, word) -> tuple[int, ...]:
        """Symbol names (a string for one-character alphabets, or a list) to indices."""
        if isinstance(word, str):
            if not self.single_char:
                raise MatrixFormatError("string words need one-character symbol names")
            return tuple(self.index(ch) for ch in word)
        return tuple(self.index(s) for s in word)

    def decode(self, word: Sequence[int]):
        names = [self.symbols[i] for i in word]
        return "".join(names) if self.single_char else names


@dataclass(frozen=True)
class Word:
    """Finite block of symbol indices whose first symbol sits at ``offset``."""

    symbols: tuple[int, ...]
    offset: int = 0

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class AdjacencyMatrix:
    alphabet: Alphabet
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.entries)
        n = len(self.alphabet)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise MatrixFormatError(f"matrix must be {n}x{n} to match the alphabet")
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if v not in (0, 1):
                    raise MatrixFormatError(f"entry ({i},{j}) = {v} is not 0 or 1")
        for i in range(n):
            if not any(rows[i]):
                raise MatrixFormatError(f"row of symbol {self.alphabet.symbols[i]!r} is empty")
            if not any(rows[j][i] for j in range(n)):
                raise MatrixFormatError(f"column of symbol {self.alphabet.symbols[i]!r} is empty")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows, symbols: Iterable[str] | None = None) -> "AdjacencyMatrix":
        rows = [list(r) for r in rows]
        if symbols is None:
            symbols = [str(i) for i in range(len(rows))]
        return cls(Alphabet(tuple(symbols)), tuple(tuple(r) for r in rows))

    @property
    def size(self) -> int:
        return len(self.alphabet)

    def successors(self, a: int) -> list[int]:
        return [b for b, v in enumerate(self.entries[a]) if v]

    def allowed(self, word: Sequence[int]) -> bool:
        return all(self.entries[a][b] for a, b in zip(word, word[1:]))

    def to_json(self) -> dict:
        return {"alphabet": list(self.alphabet.symbols), "matrix": [list(r) for r in self.entries]}

    def __str__(self) -> str:
        return "\n".join(" ".join(map(str, r)) for r in self.entries)


def parse_matrix(source) -> AdjacencyMatrix:
    """Build a validated matrix from JSON text or an already-decoded dict.

    >>> parse_matrix('{"alphabet": ["0", "1"], "matrix": [[1, 1], [1, 1]]}').size
    2
    """
    if isinstance(source, (str, bytes)):
        try:
            source = json.loads(source)
        except json.JSONDecodeError as exc:
            raise MatrixFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(source, dict) or "matrix" not in source:
        raise MatrixFormatError('expected an object with "alphabet" and "matrix" keys')
    rows = source["matrix"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise MatrixFormatError("matrix must be a non-empty list of rows")
    if any(len(r) != len(rows) for r in rows):
        raise MatrixFormatError("matrix is not square")
    for r in rows:
        for v in r:
            if isinstance(v, bool) or not isinstance(v, int):
                raise MatrixFormatError(f"entry {v!r} is not an integer 0 or 1")
    symbols = source.get("alphabet")
    if symbols is None:
        symbols = [str(i) for i in range(len(rows))]
    return AdjacencyMatrix.from_rows(rows, symbols)


def load_matrix(path) -> AdjacencyMatrix:
    with open(path) as fh:
        return parse_matrix(fh.read())


def full_shift(n: int) -> AdjacencyMatrix:
    return AdjacencyMatrix.from_rows([[1] * n for _ in range(n)])


def cycle_matrix(n: int) -> AdjacencyMatrix:
    """Directed n-cycle a -> a+1 mod n."""
    return AdjacencyMatrix.from_rows([[int(b == (a + 1) % n) for b in range(n)] for a in range(n)])


# --- graph structure ---------------------------------------------------------

def _reach(adj: list[list[int]], start: int) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for b in adj[a]:
            if b not in seen:
                seen.add(b)
                queue.append(b)
    return seen


def is_irreducible(M: AdjacencyMatrix) -> bool:
    n = M.size
    forward = [M.successors(a) for a in range(n)]
    backward = [[a for a in range(n) if M.entries[a][b]] for b in range(n)]
    return len(_reach(forward, 0)) == n and len(_reach(backward, 0)) == n


def _require_irreducible(M: AdjacencyMatrix) -> None:
    if not is_irreducible(M):
        raise ReducibleError("adjacency matrix is not irreducible")


def period(M: AdjacencyMatrix) -> int:
    """gcd of all cycle lengths, from BFS levels: gcd of level[a] + 1 - level[b] over edges."""
    _require_irreducible(M)
    level = {0: 0}
    queue = deque([0])
    g = 0
    while queue:
        a = queue.popleft()
        for b in M.successors(a):
            if b not in level:
                level[b] = level[a] + 1
                queue.append(b)
            g = gcd(g, level[a] + 1 - level[b])
    return abs(g)


# --- integer linear algebra --------------------------------------------------

def _matmul(A, B):
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def int_matrix_power(A: Sequence[Sequence[int]], k: int) -> list[list[int]]:
    if k < 0:
        raise ValueError("negative exponent")
    result = identity(len(A))
    base = [list(r) for r in A]
    while k:
        if k & 1:
            result = _matmul(result, base)
        k >>= 1
        if k:
            base = _matmul(base, base)
    return result


def matrix_power(M: AdjacencyMatrix, k: int) -> list[list[int]]:
    return int_matrix_power(M.entries, k)


def matrix_power_entry(M: AdjacencyMatrix, k: int, a, b) -> int:
    """(M^k)[a][b]: the number of allowed words of length k+1 from a to b.

    ``a`` and ``b`` may be symbol names or indices.
    """
    ia = a if isinstance(a, int) else M.alphabet.index(a)
    ib = b if isinstance(b, int) else M.alphabet.index(b)
    return matrix_power(M, k)[ia][ib]


def count_words(M: AdjacencyMatrix, length: int) -> int:
    if length < 1:
        raise ValueError("word length must be positive")
    return sum(map(sum, matrix_power(M, length - 1)))


def index_words(M: AdjacencyMatrix, length: int, budget: int | None = None) -> list[tuple[int, ...]]:
    """All allowed words of the given length as index tuples, in lexicographic order."""
    cap = enumeration_budget(budget)
    total = count_words(M, length)
    if total > cap:
        raise BudgetExceeded(f"{total} words of length {length} exceed the budget {cap}")
    words = [(a,) for a in range(M.size)]
    succ = [M.successors(a) for a in range(M.size)]
    for _ in range(length - 1):
        words = [w + (b,) for w in words for b in succ[w[-1]]]
    return words


def language(M: AdjacencyMatrix, length: int, budget: int | None = None) -> list[Word]:
    return [Word(w) for w in index_words(M, length, budget)]


def char_poly(M: AdjacencyMatrix) -> IntPolynomial:
    """det(X I - M) by the Faddeev-LeVerrier recursion.

    Every division in the recursion is exact over the integers, so the
    computation stays in Z throughout.
    """
    return int_char_poly(M.entries)


def int_char_poly(A: Sequence[Sequence[int]]) -> IntPolynomial:
    n = len(A)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    Mk = [[0] * n for _ in range(n)]
    c = 1
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        Mk = _matmul(A, Mk)
        for i in range(n):
            Mk[i][i] += c
        AM = _matmul(A, Mk)
        trace = sum(AM[i][i] for i in range(n))
        assert trace % k == 0
        c = -trace // k
        coeffs[n - k] = c
    return IntPolynomial(tuple(coeffs))


def is_uniform(M: AdjacencyMatrix) -> int | None:
    """Common in- and out-degree n, or None when the degrees differ."""
    rows = {sum(r) for r in M.entries}
    cols = {sum(c) for c in zip(*M.entries)}
    if len(rows) == 1 and rows == cols:
        return rows.pop()
    return None


def is_zero_entropy(M: AdjacencyMatrix) -> bool:
    # irreducible with every out-degree 1 is exactly a single cycle
    _require_irreducible(M)
    return all(sum(r) == 1 for r in M.entries)


def tensor_product(A: AdjacencyMatrix, B: AdjacencyMatrix) -> AdjacencyMatrix:
    """Adjacency matrix of the product shift on pairs of symbols."""
    sep = "" if A.alphabet.single_char and B.alphabet.single_char else "|"
    names = [f"{a}{sep}{b}" for a in A.alphabet.symbols for b in B.alphabet.symbols]
    nb = B.size
    rows = [
        [A.entries[i // nb][j // nb] * B.entries[i % nb][j % nb] for j in range(A.size * nb)]
        for i in range(A.size * nb)
    ]
    return AdjacencyMatrix.from_rows(rows, names)
