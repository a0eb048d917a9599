from itertools import product
from math import factorial, prod

from hypothesis import given, strategies as st

from spps.indices import (admissible_of_degree, degree, enumerate_admissible, is_admissible, monomials,
                          path_count, predecessors, x_term_count)


def test_predecessors_examples():
    assert predecessors((0, 0)) == []
    assert predecessors((2, 3)) == [(1, (2, 2))]
    assert predecessors((2, 2)) == [(0, (1, 2)), (1, (2, 1))]


def test_enumerate_examples():
    assert enumerate_admissible(1, 3) == [(0,), (1,), (2,), (3,)]
    assert enumerate_admissible(2, 2) == [(0, 0), (0, 1), (1, 0), (0, 2), (2, 0)]
    assert len(enumerate_admissible(3, 2)) == 7


def test_enumerate_matches_brute_force():
    for d in (1, 2, 3):
        for m in range(7):
            brute = sorted(j for j in product(range(m + 1), repeat=d) if sum(j) == m and sum(v % 2 for v in j) <= 1)
            assert list(admissible_of_degree(d, m)) == brute


def test_enumerate_closed_under_predecessor():
    idx = set(enumerate_admissible(3, 8))
    for j in idx:
        assert is_admissible(j)
        for _, k in predecessors(j):
            if degree(j) % 2 or is_admissible(k):
                assert k in idx


def test_path_count_examples():
    assert path_count((0, 0)) == 1
    assert path_count((2, 2)) == 2
    assert path_count((2, 4)) == 3


def _count_recursive(j, memo={}):
    if j in memo:
        return memo[j]
    if degree(j) == 0:
        val = 1
    elif degree(j) % 2:
        val = _count_recursive(predecessors(j)[0][1])
    else:
        val = sum(_count_recursive(k) for _, k in predecessors(j) if is_admissible(k))
    memo[j] = val
    return val


def test_path_count_recursion():
    for d in (1, 2, 3):
        for j in enumerate_admissible(d, 12):
            assert path_count(j) == _count_recursive(j)
            assert path_count(j) == factorial(degree(j) // 2) // prod(factorial(v // 2) for v in j)


def test_x_term_count():
    assert x_term_count((0, 0)) == 2
    assert x_term_count((2, 2)) == 4


@given(st.lists(st.integers(0, 6), min_size=1, max_size=4))
def test_admissibility_rule(j):
    j = tuple(j)
    assert is_admissible(j) == (sum(v % 2 for v in j) <= 1)


def test_monomials_count():
    assert len(monomials(2, 3)) == 10
    assert monomials(2, 1) == [(0, 0), (0, 1), (1, 0)]
