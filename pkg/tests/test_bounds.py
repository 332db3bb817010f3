import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_weights
from weightdim.bounds import (
    CASE1,
    CASE2,
    TRIVIAL,
    blw_condition_holds,
    full_report,
    select_exponents,
    theorem1_bound,
    theorem1_per_index,
)
from weightdim.core import validate_weights
from weightdim.exceptions import IndexOutOfRange

F = Fraction


def W(*taus, d=2, m=1):
    return validate_weights([F(t) for t in taus], d, m)


def sympy_per_index(taus, d, m, i):
    n = d + m
    t = [sympy.Rational(x.numerator, x.denominator) for x in taus]
    expr = (n + 1 + sum(t[i - 1] - t[k - 1] for k in range(i, n + 1))) / (t[i - 1] + 1) - m
    return F(int(sympy.numer(expr)), int(sympy.denom(expr)))


def test_per_index_examples():
    assert theorem1_per_index(W("3/5", "1/2", "2/5"), 1) == F(27, 16)
    assert theorem1_per_index(W("3/5", "1/2", "2/5"), 2) == F(26, 15)
    assert theorem1_per_index(W("6/5", "1/5", "1/5"), 1) == F(19, 11)
    assert theorem1_per_index(W("6/5", "1/5", "1/5"), 2) == F(7, 3)


def test_per_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        theorem1_per_index(W("3/5", "1/2", "2/5"), 3)
    with pytest.raises(IndexOutOfRange):
        theorem1_per_index(W("3/5", "1/2", "2/5"), 0)


def test_per_index_matches_sympy_on_random_vectors():
    rng = random.Random(11)
    for _ in range(200):
        w = random_weights(rng, heavy=False)
        for i in range(1, w.d + 1):
            assert theorem1_per_index(w, i) == sympy_per_index(w.taus, w.d, w.m, i)


def test_theorem1_bound_examples():
    assert theorem1_bound(W("3/5", "1/2", "2/5")) == (F(27, 16), F(27, 16))
    assert theorem1_bound(W("6/5", "1/5", "1/5")) == (F(19, 11), F(19, 11))
    assert theorem1_bound(W("1/3", "1/3", "1/3")) == (2, 2)


@pytest.mark.parametrize("d, m", [(1, 1), (2, 1), (2, 3), (4, 2), (5, 5)])
def test_equal_weights(d, m):
    n = d + m
    w = validate_weights([F(1, n)] * n, d, m)
    assert theorem1_bound(w) == (d, d)
    assert all(theorem1_per_index(w, i) == d for i in range(1, d + 1))
    assert blw_condition_holds(w)
    for k in range(1, 6):
        tau = F(1, n) + (F(1, m) - F(1, n)) * F(k, 6)
        w = validate_weights([tau] * n, d, m)
        assert theorem1_bound(w)[1] == F(n + 1) / (1 + tau) - m


def test_blw_examples():
    assert blw_condition_holds(W("3/5", "1/2", "2/5"))
    assert not blw_condition_holds(W("6/5", "1/5", "1/5"))


def test_select_exponents_examples():
    s = select_exponents(W("3/5", "1/2", "2/5"))
    assert s.case == CASE1
    assert s.a == (F(13, 10), F(13, 10)) and s.t == (F(3, 10), F(1, 5))
    s = select_exponents(W("6/5", "1/5", "1/5"))
    assert (s.case, s.K) == (CASE2, 1)
    assert s.a == (F(8, 5), F(6, 5)) and s.t == (F(3, 5), 0)
    assert select_exponents(validate_weights([F(1, 4)] * 4, 2, 2)).case == TRIVIAL


def test_full_report_examples():
    r = full_report(W("6/5", "1/5", "1/5"))
    assert (r.mtp_min, r.theorem_min, r.effective_bound) == (F(19, 11), F(19, 11), F(19, 11))
    assert r.mtp_level == F(11, 5)
    assert not r.blw_condition_holds and r.improvement_flag
    r = full_report(W("3/5", "1/2", "2/5"))
    assert (r.mtp_min, r.theorem_min) == (F(27, 16), F(27, 16)) and r.blw_condition_holds
    r = full_report(W("1/3", "1/3", "1/3"))
    assert r.effective_bound == 2 and r.trivial_regime


def test_selection_invariants_and_mtp_agreement():
    rng = random.Random(5)
    for _ in range(300):
        w = random_weights(rng)
        s = select_exponents(w)
        assert sum(ai - 1 for ai in s.a) + w.tail_sum == 1
        assert all(ai + ti == 1 + tau for ai, ti, tau in zip(s.a, s.t, w.head))
        assert min(s.a) > 1 and min(s.t) >= 0
        r = full_report(w)
        assert r.mtp_min >= r.effective_bound
        assert r.effective_bound <= w.d


def test_proof_range_minimum_equals_full_minimum():
    # observed on this corpus: the indices beyond K never carry the minimum
    rng = random.Random(1)
    for _ in range(2000):
        r = full_report(random_weights(rng))
        assert not r.minima_differ
        assert r.active_min == r.effective_bound == r.mtp_min


@given(st.fractions(min_value=F(1, 20), max_value=F(1, 2), max_denominator=20), st.fractions(min_value=0, max_value=3, max_denominator=20))
def test_effective_bound_nonincreasing_in_leading_weight(tail, bump):
    base = validate_weights([tail, tail, tail], 2, 1)
    up = validate_weights([tail + bump, tail, tail], 2, 1)
    assert theorem1_bound(up)[1] <= theorem1_bound(base)[1]
