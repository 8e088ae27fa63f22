import json

import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import GOLDEN, SQRT2, TRIANGLE, matrices
from sftpij import core
from sftpij.core import AdjacencyMatrix, Alphabet, Word
from sftpij.errors import BudgetExceeded, MatrixFormatError, ReducibleError
from sftpij.poly import IntPolynomial


def test_parse_roundtrip():
    text = '{"alphabet": ["a", "b"], "matrix": [[1, 1], [1, 0]]}'
    M = core.parse_matrix(text)
    assert M.alphabet.symbols == ("a", "b")
    assert core.parse_matrix(json.dumps(M.to_json())) == M


@pytest.mark.parametrize("bad", [
    '{"alphabet": ["0", "1"], "matrix": [[1, 2], [1, 1]]}',
    '{"alphabet": ["0", "1"], "matrix": [[1, 1, 0], [1, 1, 0]]}',
    '{"alphabet": ["0", "0"], "matrix": [[1, 1], [1, 1]]}',
    '{"alphabet": ["0", "1"], "matrix": [[0, 0], [1, 1]]}',
    '{"alphabet": ["0", "1"], "matrix": [[1, 0], [1, 0]]}',
    '{"alphabet": ["0"], "matrix": [[true]]}',
    '{"matrix": "no"}',
    'not json',
])
def test_parse_rejects(bad):
    with pytest.raises(MatrixFormatError):
        core.parse_matrix(bad)


def test_alphabet_codec():
    a = Alphabet(("x", "y"))
    assert a.encode("xyx") == (0, 1, 0)
    assert a.decode((1, 0)) == "yx"
    multi = Alphabet(("00", "01"))
    assert multi.encode(["01", "00"]) == (1, 0)
    assert multi.decode((1,)) == ["01"]
    with pytest.raises(MatrixFormatError):
        multi.encode("0001")


def test_triangle_structure():
    assert core.is_irreducible(TRIANGLE)
    assert core.period(TRIANGLE) == 1
    assert core.is_uniform(TRIANGLE) == 2
    assert str(core.char_poly(TRIANGLE)) == "X^3 - 3X - 2"


def test_sqrt2_structure():
    assert core.period(SQRT2) == 2
    assert core.char_poly(SQRT2) == IntPolynomial((0, 0, -2, 0, 1))
    assert core.is_uniform(SQRT2) is None


def test_cycle_and_reducible():
    C = core.cycle_matrix(5)
    assert core.period(C) == 5
    assert core.is_zero_entropy(C)
    R = AdjacencyMatrix.from_rows([[1, 1], [0, 1]])
    assert not core.is_irreducible(R)
    with pytest.raises(ReducibleError):
        core.period(R)


def test_words_and_powers():
    assert core.count_words(GOLDEN, 5) == 13  # Fibonacci
    assert core.matrix_power_entry(TRIANGLE, 2, "0", "0") == 2
    assert core.language(GOLDEN, 2) == [Word((0, 0)), Word((0, 1)), Word((1, 0))]
    with pytest.raises(BudgetExceeded):
        core.index_words(core.full_shift(2), 12, budget=100)


def test_budget_env(monkeypatch):
    monkeypatch.setenv(core.BUDGET_ENV, "10")
    with pytest.raises(BudgetExceeded):
        core.index_words(core.full_shift(2), 4)
    assert len(core.index_words(core.full_shift(2), 4, budget=16)) == 16


def test_tensor_product():
    P = core.tensor_product(core.full_shift(2), core.cycle_matrix(3))
    assert P.size == 6 and core.is_uniform(P) == 2 and core.period(P) == 3
    assert P.alphabet.symbols[:3] == ("00", "01", "02")


@given(matrices())
def test_char_poly_matches_cofactor_expansion(M):
    assert list(core.char_poly(M).coeffs) == oracles.char_poly_coeffs([list(r) for r in M.entries])


@given(matrices())
def test_irreducibility_and_period_match_oracle(M):
    rows = [list(r) for r in M.entries]
    irr = oracles.irreducible(rows)
    assert core.is_irreducible(M) == irr
    if irr:
        assert core.period(M) == oracles.period(rows)


@given(matrices(max_size=4), st.integers(1, 5))
def test_word_count_is_power_sum(M, length):
    words = core.index_words(M, length)
    assert words == oracles.words([list(r) for r in M.entries], length)
    assert len(words) == core.count_words(M, length)
