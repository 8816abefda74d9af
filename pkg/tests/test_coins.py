import itertools
import math
import warnings
from functools import reduce

import pytest
from hypothesis import assume, given, settings, strategies as st

from bilipfrac.coins import (
    MultisetSpec,
    check_preconditions,
    coin_solve,
    frobenius_number,
    partition_multiset,
    representable,
)
from bilipfrac.errors import GcdNotOne, NotRepresentable, PreconditionViolated


def _brute_frobenius(a):
    limit = max(a) * max(a) + 2 * max(a)
    ok = [False] * (limit + 1)
    ok[0] = True
    for t in range(1, limit + 1):
        ok[t] = any(t >= c and ok[t - c] for c in a)
    bad = [t for t in range(limit + 1) if not ok[t]]
    return max(bad) if bad else -1


coprime_coins = st.lists(st.integers(1, 12), min_size=1, max_size=4).filter(lambda a: reduce(math.gcd, a) == 1)


def test_known_frobenius_numbers():
    assert frobenius_number([2, 5]) == 3
    assert frobenius_number([3, 5]) == 7
    assert frobenius_number([6, 9, 20]) == 43
    assert frobenius_number([1, 4]) == -1


@settings(max_examples=200)
@given(coprime_coins)
def test_frobenius_matches_brute_force(a):
    assert frobenius_number(a) == _brute_frobenius(a)


def test_gcd_check():
    with pytest.raises(GcdNotOne):
        frobenius_number([4, 6])
    with pytest.raises(ValueError):
        frobenius_number([0, 1])


@given(coprime_coins, st.integers(0, 60))
def test_coin_solve_is_lexicographically_least(a, target):
    a = tuple(a)
    sols = [x for x in itertools.product(*(range(target // c + 1) for c in a))
            if sum(c * k for c, k in zip(a, x)) == target]
    assert representable(a, target) == bool(sols)
    if not sols:
        with pytest.raises(NotRepresentable):
            coin_solve(a, target)
        return
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert coin_solve(a, target) == min(sols)


def test_coin_solve_examples():
    assert coin_solve((2, 5), 4) == (2, 0)
    assert coin_solve((2, 5), 5) == (0, 1)
    assert coin_solve((2, 3), 4) == (2, 0)


@given(coprime_coins, st.data())
def test_small_targets_stay_bounded(a, data):
    # every value up to phi + max has a solution with all x_j <= phi + max
    phi = frobenius_number(a)
    bound = phi + max(a)
    target = data.draw(st.integers(max(phi + 1, 0), max(bound, 0)))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        x = coin_solve(a, target)
    assert max(x) <= bound


def test_partition_examples():
    part = partition_multiset(MultisetSpec((14, 24), 50, 2), (2, 3))
    assert part.sums((2, 3)) == (50, 50)
    part = partition_multiset(MultisetSpec((45, 62), 200, 2), (2, 5))
    assert part.sums((2, 5)) == (200, 200)


def test_precondition_names():
    a = (2, 5)
    assert check_preconditions(MultisetSpec((4, 0), 5, 2), a) == "omega"
    assert check_preconditions(MultisetSpec((5, 2), 10, 2), a) == "p"
    with pytest.raises(PreconditionViolated) as err:
        partition_multiset(MultisetSpec((5, 2), 10, 2), a)
    assert err.value.which == "p"
    assert partition_multiset(MultisetSpec((4, 0), 5, 2), a, permissive=True) is None


@settings(max_examples=80)
@given(st.lists(st.integers(1, 5), min_size=1, max_size=3).filter(lambda a: reduce(math.gcd, a) == 1),
       st.integers(2, 4), st.data())
def test_partition_properties(a, c, data):
    a = tuple(a)
    phi, top = frobenius_number(a), max(a)
    b = 2 * len(a) * top * (top + phi) + data.draw(st.integers(1, 40))
    # counts with at least c (top + phi) of each coin and total b c
    base = [max((top + phi) * c, 0) for _ in a]
    rest = b * c - sum(k * x for k, x in zip(base, a))
    assume(rest >= 0)
    j = data.draw(st.integers(0, len(a) - 1))
    # fill the remainder greedily, finishing with a representable amount
    for i in sorted(range(len(a)), key=lambda i: -a[i]):
        if i == j:
            continue
    try:
        x = coin_solve(a, rest)
    except NotRepresentable:
        assume(False)
    counts = tuple(k + e for k, e in zip(base, x))
    spec = MultisetSpec(counts, b, c)
    assert check_preconditions(spec, a) is None
    part = partition_multiset(spec, a)
    assert part.sums(a) == (b,) * c
    items = sorted(i for g in part.groups for i in g)
    assert items == sorted((j, t) for j, k in enumerate(counts) for t in range(k))
