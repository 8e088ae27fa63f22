from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import FULL2, GOLDEN, TRIANGLE
from sftpij import core
from sftpij.errors import BudgetExceeded, ExactnessUnavailable, MatrixFormatError, PreconditionError
from sftpij.joining import (LocalRule, check_pij_star, constant_first_coordinate_matrix,
                            joint_distribution, make_bernoulli_rule, make_periodic_rule,
                            make_projection_rule, make_two_step_sum_rule, make_vector_sum_rule,
                            preimage_count_check, product_rule, search_rules, verify_pij)
from sftpij.parry import parry_measure, uniform_measure


def _mass_fn(M):
    pi, P = oracles.stationary_uniform([list(r) for r in M.entries])
    return lambda w: oracles.markov_mass(pi, P, w)


def test_bernoulli_tables():
    assert make_bernoulli_rule(2).table == ((0, 1), (1, 0))
    assert make_bernoulli_rule(3).table[2] == (2, 0, 1)
    assert make_bernoulli_rule(1).table == ((0,),)


def test_periodic_tables():
    r = make_periodic_rule(3)
    assert r.table == ((0, 2, 1), (2, 1, 0), (1, 0, 2))
    with pytest.raises(ValueError):
        make_periodic_rule(2)


def test_rule_json_roundtrip():
    for rule in (make_bernoulli_rule(3), make_two_step_sum_rule(), make_vector_sum_rule()):
        assert LocalRule.from_json(rule.to_json()) == rule
    data = make_bernoulli_rule(2).to_json()
    assert data["table"][1] == {"x": "0", "xp": "1", "out": "1"}
    data["table"].pop()
    with pytest.raises(MatrixFormatError):
        LocalRule.from_json(data)


def test_rule_table_must_cover_allowed_windows():
    with pytest.raises(MatrixFormatError):
        LocalRule(TRIANGLE, 0, ((0, 1), (1, 0)))
    with pytest.raises(MatrixFormatError):
        LocalRule(FULL2, 0, ((0, 2), (1, 0)))


@pytest.mark.parametrize("n", [2, 3])
def test_bernoulli_verified(n):
    v = verify_pij(parry_measure(core.full_shift(n)), make_bernoulli_rule(n), 5)
    assert v.overall == "verified-up-to-5"
    assert all(lv.marginal_deviation == lv.indep_x_deviation == lv.indep_xprime_deviation == 0
               for lv in v.levels)


def test_projection_refuted_with_witness():
    v = verify_pij(parry_measure(FULL2), make_projection_rule(FULL2), 1)
    assert v.overall == "refuted-at-1"
    w = v.witness
    assert (w["joint"], w["product"]) == ("1/2", "1/4")
    assert v.levels[0].marginal_ok and not v.levels[0].independence_ok


def test_unsupported_output_is_marginal_failure():
    rule = LocalRule.from_function(TRIANGLE, 0, lambda u, v: u[0])
    lv = verify_pij(parry_measure(TRIANGLE), rule, 2).levels[1]
    assert lv.output_supported  # projection stays in the shift
    const = LocalRule.from_function(TRIANGLE, 0, lambda u, v: 0)
    lv = verify_pij(parry_measure(TRIANGLE), const, 2).levels[1]
    assert not lv.output_supported and not lv.marginal_ok


@given(st.lists(st.integers(0, 2), min_size=9, max_size=9), st.integers(1, 3))
def test_deviations_match_direct_pushforward_full3(flat, k):
    M = core.full_shift(3)
    table = tuple(tuple(flat[i * 3:(i + 1) * 3]) for i in range(3))
    rule = LocalRule(M, 0, table)
    lv = verify_pij(parry_measure(M), rule, k).levels[-1]
    expect = oracles.pushforward_deviations([list(r) for r in M.entries], _mass_fn(M),
                                            lambda u, v: table[u[0]][v[0]], 0, k)
    assert (lv.marginal_deviation, lv.indep_x_deviation, lv.indep_xprime_deviation) == expect


@given(st.lists(st.integers(0, 1), min_size=64, max_size=64), st.integers(1, 2))
def test_deviations_match_direct_pushforward_width1(flat, k):
    M = FULL2
    rule = LocalRule(M, 1, tuple(tuple(flat[i * 8:(i + 1) * 8]) for i in range(8)))
    lv = verify_pij(parry_measure(M), rule, k).levels[-1]
    expect = oracles.pushforward_deviations([list(r) for r in M.entries], _mass_fn(M), rule, 1, k)
    assert (lv.marginal_deviation, lv.indep_x_deviation, lv.indep_xprime_deviation) == expect


@given(st.lists(st.integers(0, 2), min_size=6, max_size=6))
def test_deviations_on_triangle(outs):
    # allowed windows on the triangle are single symbols: tables are 3x3 but we vary two rows
    table = (tuple(outs[:3]), tuple(outs[3:]), (0, 1, 2))
    rule = LocalRule(TRIANGLE, 0, table)
    lv = verify_pij(parry_measure(TRIANGLE), rule, 2).levels[-1]
    expect = oracles.pushforward_deviations([list(r) for r in TRIANGLE.entries], _mass_fn(TRIANGLE),
                                            lambda u, v: table[u[0]][v[0]], 0, 2)
    assert (lv.marginal_deviation, lv.indep_x_deviation, lv.indep_xprime_deviation) == expect


def test_joint_distribution_xor():
    J = joint_distribution(parry_measure(FULL2), make_bernoulli_rule(2), 2)
    assert len(J) == 16 and set(J.values()) == {Fraction(1, 16)}


def test_exactness_and_compatibility_errors():
    with pytest.raises(ExactnessUnavailable):
        verify_pij(parry_measure(GOLDEN), LocalRule.from_function(GOLDEN, 0, lambda u, v: u[0]), 1)
    with pytest.raises(PreconditionError):
        verify_pij(parry_measure(TRIANGLE), make_bernoulli_rule(2), 1)
    with pytest.raises(BudgetExceeded):
        verify_pij(parry_measure(FULL2), make_bernoulli_rule(2), 6, cap=100)


def test_preimage_examples():
    assert preimage_count_check(make_bernoulli_rule(2), 3).passed
    proj = preimage_count_check(make_projection_rule(FULL2), 0)
    assert not proj.passed and {v["count"] for v in proj.violations} <= {0, 2}
    assert preimage_count_check(make_periodic_rule(3), 2).passed
    assert preimage_count_check(make_two_step_sum_rule(), 2).expected == 4
    with pytest.raises(PreconditionError):
        preimage_count_check(LocalRule.from_function(GOLDEN, 0, lambda u, v: u[0]), 0)


def test_product_rules():
    xx = product_rule(make_bernoulli_rule(2), make_bernoulli_rule(2))
    assert xx.matrix == core.full_shift(4).__class__.from_rows([[1] * 4] * 4, ["00", "01", "10", "11"])
    assert all(xx.table[a][b] == a ^ b for a in range(4) for b in range(4))
    mixed = product_rule(make_bernoulli_rule(2), make_periodic_rule(3))
    assert mixed.matrix.size == 6
    assert verify_pij(parry_measure(mixed.matrix), mixed, 4).verified
    trivial = product_rule(make_bernoulli_rule(3), make_bernoulli_rule(1))
    assert trivial.table == make_bernoulli_rule(3).table


def test_search_full2_matches_brute_force():
    mu = parry_measure(FULL2)
    pruned = search_rules(FULL2, 0, 4)
    assert [r.table for r in pruned] == [((0, 1), (1, 0)), ((1, 0), (0, 1))]
    assert [r.table for r in search_rules(FULL2, 0, 1, prune=False)] == [r.table for r in pruned]
    assert [r.table for r in pruned] == oracles.brute_force_rules([[1, 1], [1, 1]], _mass_fn(FULL2), 4)
    assert all(r.matrix == mu.matrix for r in pruned)


def test_search_triangle_empty():
    assert search_rules(TRIANGLE, 0, 3) == []


def test_search_full3_latin_squares():
    # every surviving table is a Latin square on 3 symbols
    rules = search_rules(core.full_shift(3), 0, 2)
    assert len(rules) == 12
    for r in rules:
        t = np.array(r.table)
        assert all(sorted(row) == [0, 1, 2] for row in t) and all(sorted(c) == [0, 1, 2] for c in t.T)


def test_search_budget():
    with pytest.raises(BudgetExceeded):
        search_rules(core.full_shift(3), 0, 1, budget=5)
    with pytest.raises(ExactnessUnavailable):
        search_rules(GOLDEN, 0, 1)


def test_pij_star():
    assert check_pij_star(parry_measure(FULL2), make_bernoulli_rule(2), 1) == 0
    assert check_pij_star(parry_measure(core.cycle_matrix(3)), make_periodic_rule(3), 1) == 0
    assert check_pij_star(parry_measure(FULL2), make_two_step_sum_rule(), 2) is None
    M = constant_first_coordinate_matrix()
    assert check_pij_star(uniform_measure(M), make_vector_sum_rule(M), 1) == 0
    with pytest.raises(PreconditionError):
        check_pij_star(parry_measure(FULL2), make_projection_rule(FULL2), 0)
