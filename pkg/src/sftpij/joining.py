"""Width-p local rules and exact verification of pairwise independence.

A local rule ``phi`` of width ``p`` maps a pair of allowed windows
``(x[-p..p], x'[-p..p])`` to a symbol; sliding it along two sequences
produces the third coordinate ``x''``.  Feeding ``mu x mu`` through the
rule gives a 3-fold joining, and :func:`verify_pij` checks, depth by depth,
that its three 2-dimensional marginals are products.

Alignment: at depth k the output word sits at positions 0..k-1 and is
compared with the x- and x'-words at the same positions; the rule reads
the windows extended by p on each side.

Exact mode keeps every mass as an integer numerator over the common
denominator ``(D n^(K-1))^2`` where ``K = k + 2p`` and ``D`` clears the
eigenvector denominators, so numpy's integer counting stays exact.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Sequence

import numpy as np

from . import core
from .core import AdjacencyMatrix
from .errors import BudgetExceeded, ExactnessUnavailable, MatrixFormatError, PreconditionError
from .parry import MarkovMeasure, parry_measure
from .exact import frac_str

DEFAULT_DEPTH = 6
# Summand cap for verify_pij; |L_{k+2p}|^2 pairs per level.
DEFAULT_PAIR_CAP = 2**26
_CHUNK = 2**21


@dataclass(frozen=True)
class LocalRule:
    matrix: AdjacencyMatrix
    p: int
    table: tuple[tuple[int, ...], ...]
    windows: tuple[tuple[int, ...], ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("width must be nonnegative")
        windows = tuple(core.index_words(self.matrix, 2 * self.p + 1))
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        if len(table) != len(windows) or any(len(r) != len(windows) for r in table):
            raise MatrixFormatError(
                f"table must be {len(windows)}x{len(windows)} over the allowed windows")
        if any(not 0 <= v < self.matrix.size for r in table for v in r):
            raise MatrixFormatError("rule output outside the alphabet")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "windows", windows)

    @classmethod
    def from_function(cls, M: AdjacencyMatrix, p: int, f: Callable) -> "LocalRule":
        """Tabulate ``f(x_window, xprime_window) -> symbol index`` over allowed windows."""
        windows = core.index_words(M, 2 * p + 1)
        return cls(M, p, tuple(tuple(f(u, v) for v in windows) for u in windows))

    @property
    def window_index(self) -> dict:
        return {w: i for i, w in enumerate(self.windows)}

    def __call__(self, u: Sequence[int], v: Sequence[int]) -> int:
        idx = self.window_index
        return self.table[idx[tuple(u)]][idx[tuple(v)]]

    def apply(self, x: Sequence[int], xp: Sequence[int]) -> tuple[int, ...]:
        """Slide the rule along two equal-length words; output is 2p shorter."""
        if len(x) != len(xp):
            raise ValueError("words must have equal length")
        w = 2 * self.p + 1
        idx = self.window_index
        return tuple(self.table[idx[tuple(x[t:t + w])]][idx[tuple(xp[t:t + w])]]
                     for t in range(len(x) - w + 1))

    def to_json(self) -> dict:
        dec = self.matrix.alphabet.decode
        sym = self.matrix.alphabet.symbols
        return {
            "matrix": self.matrix.to_json(),
            "p": self.p,
            "table": [
                {"x": dec(u), "xp": dec(v), "out": sym[self.table[i][j]]}
                for i, u in enumerate(self.windows)
                for j, v in enumerate(self.windows)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LocalRule":
        M = core.parse_matrix(data["matrix"])
        p = int(data["p"])
        alpha = M.alphabet
        windows = core.index_words(M, 2 * p + 1)
        idx = {w: i for i, w in enumerate(windows)}
        table = [[None] * len(windows) for _ in windows]
        for entry in data["table"]:
            try:
                i, j = idx[alpha.encode(entry["x"])], idx[alpha.encode(entry["xp"])]
            except KeyError:
                raise MatrixFormatError(f"window pair {entry['x']!r}, {entry['xp']!r} not allowed") from None
            if table[i][j] is not None:
                raise MatrixFormatError(f"duplicate entry for {entry['x']!r}, {entry['xp']!r}")
            table[i][j] = alpha.index(entry["out"])
        if any(v is None for row in table for v in row):
            raise MatrixFormatError("rule table is not total on pairs of allowed windows")
        return cls(M, p, tuple(map(tuple, table)))


# --- canonical constructions ---------------------------------------------------

def make_bernoulli_rule(n: int) -> LocalRule:
    """Addition mod n on the full n-shift, width 0."""
    if n < 1:
        raise ValueError("n must be positive")
    return LocalRule.from_function(core.full_shift(n), 0, lambda u, v: (u[0] + v[0]) % n)


def make_periodic_rule(n: int) -> LocalRule:
    """(a, b) -> 2a - b mod n on the directed n-cycle; n must be odd."""
    if n < 1 or n % 2 == 0:
        raise ValueError("the periodic construction needs an odd n")
    return LocalRule.from_function(core.cycle_matrix(n), 0, lambda u, v: (2 * u[0] - v[0]) % n)


def make_projection_rule(M: AdjacencyMatrix) -> LocalRule:
    """x'' = x, the fully dependent rule."""
    return LocalRule.from_function(M, 0, lambda u, v: u[0])


def make_two_step_sum_rule() -> LocalRule:
    """x''_0 = x_0 + x_1 + x'_0 + x'_1 mod 2 on the full 2-shift, as a width-1 rule.

    Position -1 of each window is ignored.
    """
    return LocalRule.from_function(core.full_shift(2), 1, lambda u, v: (u[1] + u[2] + v[1] + v[2]) % 2)


def constant_first_coordinate_matrix() -> AdjacencyMatrix:
    """Pairs (c, b) in (Z/2)^2 where c never changes along a sequence."""
    names = ["00", "01", "10", "11"]
    rows = [[int(a[0] == b[0]) for b in names] for a in names]
    return AdjacencyMatrix.from_rows(rows, names)


def make_vector_sum_rule(M: AdjacencyMatrix | None = None) -> LocalRule:
    """Coordinatewise addition mod 2 on an alphabet of pairs, width 0."""
    M = constant_first_coordinate_matrix() if M is None else M
    if M.size != 4:
        raise ValueError("vector-sum rule needs the 4-symbol alphabet (Z/2)^2")
    return LocalRule.from_function(M, 0, lambda u, v: u[0] ^ v[0])


def product_rule(r1: LocalRule, r2: LocalRule) -> LocalRule:
    """Rule acting coordinatewise on the product shift, width max(p1, p2)."""
    M = core.tensor_product(r1.matrix, r2.matrix)
    p = max(r1.p, r2.p)
    nb = r2.matrix.size
    i1, i2 = r1.window_index, r2.window_index

    def phi(u, v):
        a_u, b_u = [s // nb for s in u], [s % nb for s in u]
        a_v, b_v = [s // nb for s in v], [s % nb for s in v]
        s1, s2 = slice(p - r1.p, p + r1.p + 1), slice(p - r2.p, p + r2.p + 1)
        out1 = r1.table[i1[tuple(a_u[s1])]][i1[tuple(a_v[s1])]]
        out2 = r2.table[i2[tuple(b_u[s2])]][i2[tuple(b_v[s2])]]
        return out1 * nb + out2

    return LocalRule.from_function(M, p, phi)


# --- exact pushforward machinery ----------------------------------------------

def _codes(words: np.ndarray, base: int) -> np.ndarray:
    out = np.zeros(len(words), dtype=np.int64)
    for t in range(words.shape[1]):
        out = out * base + words[:, t]
    return out


class _Setup:
    """Per-level arrays shared by verification and preimage counting."""

    def __init__(self, rule: LocalRule, out_len: int, budget: int | None, cap: int | None):
        M, p = rule.matrix, rule.p
        self.rule = rule
        self.A = M.size
        self.k = out_len
        self.K = out_len + 2 * p
        words = core.index_words(M, self.K, budget)
        cap = DEFAULT_PAIR_CAP if cap is None else cap
        if len(words) ** 2 > cap:
            raise BudgetExceeded(f"{len(words)}^2 window pairs at length {self.K} exceed the cap {cap}")
        self.words = words
        self.arr = np.array(words, dtype=np.int64).reshape(len(words), self.K)
        w = 2 * p + 1
        widx = rule.window_index
        self.wcodes = np.array([[widx[word[t:t + w]] for t in range(out_len)] for word in words],
                               dtype=np.int64).reshape(len(words), out_len)
        self.table = np.array(rule.table, dtype=np.int64)
        out_words = core.index_words(M, out_len, budget)
        self.out_words = out_words
        self.out_codes = _codes(np.array(out_words, dtype=np.int64).reshape(len(out_words), out_len), self.A)
        self.Y = len(out_words) + 1  # last bin collects disallowed outputs
        self.inner_words = core.index_words(M, out_len, budget)
        inner_idx = {wd: i for i, wd in enumerate(self.inner_words)}
        self.inner = np.array([inner_idx[wd[p:p + out_len]] for wd in words], dtype=np.int64)

    def output_index(self, rows: slice, table: np.ndarray) -> np.ndarray:
        """Index (into out_words, or Y-1) of the output for row block x all columns."""
        wr = self.wcodes[rows]
        code = np.zeros((wr.shape[0], len(self.words)), dtype=np.int64)
        for t in range(self.k):
            code = code * self.A + table[wr[:, t][:, None], self.wcodes[:, t][None, :]]
        pos = np.searchsorted(self.out_codes, code)
        pos_c = np.minimum(pos, len(self.out_codes) - 1)
        ok = self.out_codes[pos_c] == code
        return np.where(ok, pos_c, self.Y - 1)

    def row_blocks(self):
        step = max(1, _CHUNK // max(1, len(self.words)))
        for i0 in range(0, len(self.words), step):
            yield slice(i0, min(i0 + step, len(self.words)))


def _weights(mu: MarkovMeasure, words) -> tuple[list[int], int]:
    """Integer numerators c with mu(w) = c / (D * n^(len-1)), and D."""
    l, r = mu.perron.left, mu.perron.right
    D = 1
    for a in l:
        for b in r:
            D = lcm(D, (Fraction(a) * b).denominator)
    return [int(Fraction(l[w[0]]) * r[w[-1]] * D) for w in words], D


def _weighted_joint(setup: _Setup, table: np.ndarray, c: list[int], use_object: bool) -> np.ndarray:
    """J[v, y] = sum over x with inner(x)=v of c_x * sum_{x'} c_x' [out(x, x') = y]."""
    dtype = object if use_object else np.int64
    N, Y = len(setup.words), setup.Y
    J = np.zeros((len(setup.inner_words), Y), dtype=dtype)
    cvec = np.array(c, dtype=np.int64)
    classes = {}
    for j, cv in enumerate(c):
        classes.setdefault(cv, []).append(j)
    class_cols = [(cv, np.array(cols, dtype=np.int64)) for cv, cols in sorted(classes.items())]
    for rows in setup.row_blocks():
        yidx = setup.output_index(rows, table)
        nrow = yidx.shape[0]
        H = np.zeros((nrow, Y), dtype=dtype)
        base = (np.arange(nrow, dtype=np.int64) * Y)[:, None]
        for cv, cols in class_cols:
            cnt = np.bincount((base + yidx[:, cols]).ravel(), minlength=nrow * Y).reshape(nrow, Y)
            H += cnt.astype(dtype) * cv
        rw = cvec[rows].astype(dtype)[:, None]
        np.add.at(J, setup.inner[rows], rw * H)
    return J


@dataclass(frozen=True)
class LevelResult:
    k: int
    marginal_deviation: Fraction
    indep_x_deviation: Fraction
    indep_xprime_deviation: Fraction
    output_supported: bool
    witness: dict | None = None

    @property
    def marginal_ok(self) -> bool:
        return self.marginal_deviation == 0 and self.output_supported

    @property
    def independence_ok(self) -> bool:
        return self.indep_x_deviation == 0 and self.indep_xprime_deviation == 0

    @property
    def passed(self) -> bool:
        return self.marginal_ok and self.independence_ok

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "marginal": {"max_deviation": frac_str(self.marginal_deviation), "pass": self.marginal_ok},
            "indep_x": {"max_deviation": frac_str(self.indep_x_deviation),
                        "pass": self.indep_x_deviation == 0},
            "indep_xprime": {"max_deviation": frac_str(self.indep_xprime_deviation),
                             "pass": self.indep_xprime_deviation == 0},
            "output_supported": self.output_supported,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class JoiningVerdict:
    depth: int
    levels: tuple[LevelResult, ...]

    @property
    def refuted_at(self) -> int | None:
        return next((lv.k for lv in self.levels if not lv.passed), None)

    @property
    def verified(self) -> bool:
        return self.refuted_at is None

    @property
    def overall(self) -> str:
        k = self.refuted_at
        return f"verified-up-to-{self.depth}" if k is None else f"refuted-at-{k}"

    @property
    def witness(self) -> dict | None:
        k = self.refuted_at
        return None if k is None else self.levels[k - 1].witness

    def to_json(self) -> dict:
        return {"depth": self.depth, "overall": self.overall,
                "levels": [lv.to_json() for lv in self.levels], "witness": self.witness}


class _LevelData:
    def __init__(self, mu: MarkovMeasure, rule: LocalRule, k: int, budget, cap):
        setup = _Setup(rule, k, budget, cap)
        n = mu.perron.value
        c, D = _weights(mu, setup.words)
        c_out, _ = _weights(mu, setup.out_words)
        self.setup, self.n, self.D = setup, n, D
        self.den = D * n ** (setup.K - 1)  # mu(extended word) = c / den
        bound = max(c) ** 2 * len(c) ** 2
        use_object = bound >= 2**62
        self.Jx = _weighted_joint(setup, setup.table, c, use_object)
        self.Jxp = _weighted_joint(setup, setup.table.T.copy(), c, use_object)
        dtype = object if use_object else np.int64
        self.c_out = np.array(c_out + [0], dtype=dtype)
        self.c_inner = np.array(c_out, dtype=dtype)
        self.dtype = dtype

    def fraction(self, num) -> Fraction:
        return Fraction(int(num), self.den**2)

    def deviations(self):
        p = self.setup.rule.p
        k = self.setup.k
        prod = np.outer(self.c_inner, self.c_out) * (self.n ** (4 * p))
        dev_x = np.abs(self.Jx - prod)
        dev_xp = np.abs(self.Jxp - prod)
        marg_target = self.c_out * (self.D * self.n ** (k + 4 * p - 1))
        marg = self.Jx.sum(axis=0)
        dev_m = np.abs(marg - marg_target)
        return dev_x, dev_xp, marg, dev_m, prod, marg_target


def _word_str(M: AdjacencyMatrix, w) -> str:
    dec = M.alphabet.decode(w)
    return dec if isinstance(dec, str) else " ".join(dec)


def _level(mu: MarkovMeasure, rule: LocalRule, k: int, budget, cap) -> LevelResult:
    data = _LevelData(mu, rule, k, budget, cap)
    dev_x, dev_xp, marg, dev_m, prod, marg_target = data.deviations()
    setup = data.setup
    M = rule.matrix
    supported = int(marg[-1]) == 0
    mx, mxp, mm = int(dev_x.max()), int(dev_xp.max()), int(dev_m.max())
    witness = None

    def out_name(y):
        return "<not allowed>" if y == setup.Y - 1 else _word_str(M, setup.out_words[y])

    if not supported or mm:
        y = int(np.argmax(dev_m))
        witness = {"check": "marginal", "k": k, "output_word": out_name(y),
                   "observed": frac_str(data.fraction(marg[y])),
                   "expected": frac_str(data.fraction(marg_target[y]))}
    elif mx or mxp:
        which, dev, J = ("indep_x", dev_x, data.Jx) if mx else ("indep_xprime", dev_xp, data.Jxp)
        v, y = np.unravel_index(int(np.argmax(dev)), dev.shape)
        witness = {"check": which, "k": k,
                   "input_word": _word_str(M, setup.inner_words[v]),
                   "output_word": out_name(y),
                   "joint": frac_str(data.fraction(J[v, y])),
                   "product": frac_str(data.fraction(prod[v, y]))}
    return LevelResult(k, data.fraction(mm), data.fraction(mx), data.fraction(mxp), supported, witness)


def _require_exact(mu: MarkovMeasure, rule: LocalRule) -> None:
    if not mu.exact:
        raise ExactnessUnavailable("exact verification needs an integer Perron value")
    if rule.matrix != mu.matrix:
        raise PreconditionError("rule and measure are defined on different matrices")


def verify_pij(mu: MarkovMeasure, rule: LocalRule, depth: int = DEFAULT_DEPTH, *,
               budget: int | None = None, cap: int | None = None,
               stop_early: bool = False) -> JoiningVerdict:
    """Exact pairwise-independence check of the joining induced by ``rule``, depths 1..depth.

    At each depth k compares (a) the law of the output word with ``mu``,
    (b) the joint law of aligned x- and output words with the product, and
    (c) the same for x'.  A positive mass on a disallowed output word fails
    (a).  With ``stop_early`` the scan ends at the first failing depth.
    """
    _require_exact(mu, rule)
    levels = []
    for k in range(1, depth + 1):
        lv = _level(mu, rule, k, budget, cap)
        levels.append(lv)
        if stop_early and not lv.passed:
            break
    return JoiningVerdict(depth, tuple(levels))


def joint_distribution(mu: MarkovMeasure, rule: LocalRule, k: int, side: str = "x") -> dict:
    """{(input word, output word): mass} for aligned length-k words; small k only."""
    _require_exact(mu, rule)
    data = _LevelData(mu, rule, k, None, None)
    J = data.Jx if side == "x" else data.Jxp
    setup = data.setup
    out = {}
    for v, inner in enumerate(setup.inner_words):
        for y in range(setup.Y):
            if J[v, y]:
                key_out = setup.out_words[y] if y < setup.Y - 1 else None
                out[(inner, key_out)] = data.fraction(J[v, y])
    return out


@dataclass(frozen=True)
class PreimageReport:
    k: int
    expected: int
    passed: bool
    passed_x: bool
    passed_xprime: bool
    violations: tuple = ()


def preimage_count_check(rule: LocalRule, k: int, *, budget: int | None = None,
                         cap: int | None = None) -> PreimageReport:
    """Count preimages of every output word a_0..a_k for every fixed extended window.

    On a uniform shift of degree n a pairwise-independent rule has exactly
    n^(2p) preimage windows per allowed output word (0 for disallowed
    ones), with either coordinate held fixed.
    """
    n = core.is_uniform(rule.matrix)
    if n is None:
        raise PreconditionError("preimage counting needs a uniform matrix")
    setup = _Setup(rule, k + 1, budget, cap)
    expected = n ** (2 * rule.p)
    target = np.full(setup.Y, expected, dtype=np.int64)
    target[-1] = 0
    violations = []
    ok = {}
    for side, table in (("x", setup.table), ("xprime", setup.table.T.copy())):
        ok[side] = True
        for rows in setup.row_blocks():
            yidx = setup.output_index(rows, table)
            nrow = yidx.shape[0]
            base = (np.arange(nrow, dtype=np.int64) * setup.Y)[:, None]
            cnt = np.bincount((base + yidx).ravel(), minlength=nrow * setup.Y).reshape(nrow, setup.Y)
            bad = np.argwhere(cnt != target[None, :])
            if len(bad):
                ok[side] = False
                for i, y in bad[:5 - len(violations)]:
                    fixed = setup.words[rows.start + int(i)]
                    out = setup.out_words[y] if y < setup.Y - 1 else None
                    violations.append({"fixed": side, "window": _word_str(rule.matrix, fixed),
                                       "output": None if out is None else _word_str(rule.matrix, out),
                                       "count": int(cnt[i, y])})
    return PreimageReport(k, expected, ok["x"] and ok["xprime"], ok["x"], ok["xprime"], tuple(violations))


# --- search --------------------------------------------------------------------

def search_rules(M: AdjacencyMatrix, p: int = 0, depth: int = 4, budget: int | None = None, *,
                 measure: MarkovMeasure | None = None, prune: bool = True) -> list[LocalRule]:
    """All width-p rules whose joining verifies up to ``depth``, in lexicographic table order.

    Pruning keeps, for every fixed window in either coordinate, the mass
    of the windows sent to each symbol at most that symbol's mass.  This
    is necessary for independence of x''_0 from the window, which depth
    ``>= 2p + 1`` verification implies, so it is only enabled there.
    """
    mu = parry_measure(M) if measure is None else measure
    if not mu.exact:
        raise ExactnessUnavailable("rule search needs an integer Perron value")
    cap = core.enumeration_budget(budget)
    windows = core.index_words(M, 2 * p + 1)
    W, A = len(windows), M.size
    if W * W > cap:
        raise BudgetExceeded(f"table with {W * W} entries exceeds the budget {cap}")
    prune = prune and depth >= 2 * p + 1
    survivors = []

    def consider(table):
        rule = LocalRule(M, p, table)
        if verify_pij(mu, rule, depth, stop_early=True).verified:
            survivors.append(rule)

    if not prune:
        if A ** (W * W) > cap:
            raise BudgetExceeded(f"{A ** (W * W)} unpruned tables exceed the budget {cap}")
        for flat in itertools.product(range(A), repeat=W * W):
            consider(tuple(tuple(flat[i * W:(i + 1) * W]) for i in range(W)))
        return survivors

    cw, _ = _weights(mu, windows)
    csym, _ = _weights(mu, [(a,) for a in range(A)])
    target = [c * mu.perron.value ** (2 * p) for c in csym]
    row_sum = [[0] * A for _ in range(W)]
    col_sum = [[0] * A for _ in range(W)]
    table = [[0] * W for _ in range(W)]

    def dfs(pos):
        if pos == W * W:
            consider(tuple(map(tuple, table)))
            return
        i, j = divmod(pos, W)
        for s in range(A):
            if row_sum[i][s] + cw[j] > target[s] or col_sum[j][s] + cw[i] > target[s]:
                continue
            row_sum[i][s] += cw[j]
            col_sum[j][s] += cw[i]
            table[i][j] = s
            dfs(pos + 1)
            row_sum[i][s] -= cw[j]
            col_sum[j][s] -= cw[i]

    dfs(0)
    return survivors


# --- PIJ* ----------------------------------------------------------------------

def check_pij_star(mu: MarkovMeasure, rule: LocalRule, q_max: int, *,
                   check_precondition: bool = True, budget: int | None = None) -> int | None:
    """Smallest q <= q_max with x_0 a function of (x'[-q..q], x''[-q..q]) almost surely.

    Every pair of allowed windows has positive mass, so the test is
    single-valuedness of the relation over all of them.  The precondition
    (verification at depth 2 q_max + 1) is checked first unless disabled.
    """
    _require_exact(mu, rule)
    if check_precondition:
        verdict = verify_pij(mu, rule, 2 * q_max + 1, budget=budget, stop_early=True)
        if not verdict.verified:
            raise PreconditionError(f"joining not verified at depth {2 * q_max + 1}: {verdict.overall}")
    p = rule.p
    for q in range(q_max + 1):
        words = core.index_words(rule.matrix, 2 * (q + p) + 1, budget)
        if len(words) ** 2 > core.enumeration_budget(budget) * 10:
            raise BudgetExceeded(f"{len(words)}^2 window pairs exceed the budget")
        seen: dict = {}
        functional = True
        for x in words:
            for xp in words:
                key = (xp[p:p + 2 * q + 1], rule.apply(x, xp))
                if seen.setdefault(key, x[q + p]) != x[q + p]:
                    functional = False
                    break
            if not functional:
                break
        if functional:
            return q
    return None
