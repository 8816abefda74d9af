"""Frobenius numbers, bounded coin representations and multiset partitions.

The partition routine splits a multiset of coin values with total ``b*c``
into ``c`` groups of total ``b`` each, following an inductive scheme: hold
back enough coins of every value, greedily fill a group up to just below
``b - phi``, then close the gap exactly with held-back coins.
"""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import Optional

from .errors import GcdNotOne, NotRepresentable, PreconditionViolated


def _check_coins(a) -> tuple:
    a = tuple(int(x) for x in a)
    if not a or any(x <= 0 for x in a):
        raise ValueError("coin values must be positive integers")
    if reduce(gcd, a) != 1:
        raise GcdNotOne(f"gcd{a} = {reduce(gcd, a)}")
    return a


def residue_table(a) -> list:
    """Least representable integer in each residue class modulo ``min(a)``.

    Dijkstra over residues, with edges ``r -> r + a_j``.
    """
    a = _check_coins(a)
    mod = min(a)
    best = [None] * mod
    best[0] = 0
    heap = [(0, 0)]
    while heap:
        dist, r = heapq.heappop(heap)
        if dist != best[r]:
            continue
        for coin in a:
            nd = dist + coin
            nr = nd % mod
            if best[nr] is None or nd < best[nr]:
                best[nr] = nd
                heapq.heappush(heap, (nd, nr))
    return best


def frobenius_number(a) -> int:
    """Largest integer not representable by the coins; ``-1`` if a coin is 1."""
    a = _check_coins(a)
    if 1 in a:
        return -1
    return max(residue_table(a)) - min(a)


def representable(a, target: int) -> bool:
    a = _check_coins(a)
    if target < 0:
        return False
    table = residue_table(a)
    return target >= table[target % min(a)]


@dataclass(frozen=True)
class CoinSystem:
    a: tuple
    phi: int

    @classmethod
    def of(cls, a) -> "CoinSystem":
        a = _check_coins(a)
        return cls(a, frobenius_number(a))


def coin_solve(a, target: int) -> tuple:
    """Lexicographically least ``x >= 0`` with ``sum a_j x_j = target``.

    "Least" compares ``x_1`` first.  When ``target <= phi + max(a)`` a
    warning is issued if some ``x_j`` exceeds ``phi + max(a)``.
    """
    a = _check_coins(a)
    if target < 0:
        raise NotRepresentable(f"{target} is negative")
    s = len(a)
    # reach[j][t]: t is representable with coins a[j:]
    reach = [None] * (s + 1)
    reach[s] = [t == 0 for t in range(target + 1)]
    for j in range(s - 1, -1, -1):
        row = list(reach[j + 1])
        c = a[j]
        for t in range(c, target + 1):
            if row[t - c]:
                row[t] = True
        reach[j] = row
    if not reach[0][target]:
        raise NotRepresentable(f"{target} is not representable by {a}")
    x = []
    rest = target
    for j in range(s):
        k = 0
        while not reach[j + 1][rest - k * a[j]]:
            k += 1
        x.append(k)
        rest -= k * a[j]
    x = tuple(x)
    phi = frobenius_number(a)
    bound = phi + max(a)
    if target <= bound and max(x) > bound:
        warnings.warn(f"least solution {x} of {target} exceeds the bound {bound}", RuntimeWarning)
    return x


@dataclass(frozen=True)
class MultisetSpec:
    counts: tuple  # counts[j] = number of items of value a[j]
    b: int
    c: int


@dataclass(frozen=True)
class Partition:
    groups: tuple  # c tuples of item ids; an item id is (j, serial)

    def sums(self, a) -> tuple:
        return tuple(sum(a[j] for j, _ in g) for g in self.groups)


def check_preconditions(spec: MultisetSpec, a) -> Optional[str]:
    """Name of the first failing condition, or ``None``."""
    a = _check_coins(a)
    if len(spec.counts) != len(a):
        raise ValueError("counts and coins have different lengths")
    phi = frobenius_number(a)
    top = max(a)
    if sum(k * x for k, x in zip(spec.counts, a)) != spec.b * spec.c:
        return "omega"
    if spec.c > 1 and spec.b <= 2 * len(a) * top * (top + phi):
        return "p"
    if spec.c > 1 and any(k < (top + phi) * spec.c for k in spec.counts):
        return "condi"
    return None


def partition_multiset(spec: MultisetSpec, a, permissive: bool = False) -> Optional[Partition]:
    """Split the multiset into ``c`` groups each of total ``b``.

    Items are identified as ``(j, serial)`` with ``serial`` counting from 0
    within coin ``j``.  Raises :class:`PreconditionViolated` when a sufficient
    condition fails; with ``permissive=True`` the construction is attempted
    anyway and ``None`` is returned if it gets stuck.
    """
    a = _check_coins(a)
    which = check_preconditions(spec, a)
    if which == "omega" or (which and not permissive):
        if permissive:
            return None
        raise PreconditionViolated(f"condition ({which}) fails for {spec}", which)
    phi = frobenius_number(a)
    top = max(a)
    pools = [[(j, t) for t in range(k)] for j, k in enumerate(spec.counts)]
    order = sorted(range(len(a)), key=lambda j: (-a[j], j))
    groups = []
    for k in range(spec.c, 1, -1):
        group = _one_group(pools, a, order, spec.b, phi, top, k)
        if group is None:
            if permissive:
                return None
            raise PreconditionViolated("construction got stuck", which)
        groups.append(tuple(group))
    last = tuple(item for pool in pools for item in pool)
    if sum(a[j] for j, _ in last) != spec.b:
        if permissive:
            return None
        raise PreconditionViolated("remaining items do not sum to b", which)
    groups.append(last)
    result = Partition(tuple(groups))
    assert all(s == spec.b for s in result.sums(a))
    return result


def _one_group(pools, a, order, b, phi, top, k):
    """Take one group of total ``b``, keeping ``k (top + phi)`` of each coin back."""
    reserve = max(k * (top + phi), 0)
    group = []
    total = 0
    limit = b - phi
    for j in order:
        free = len(pools[j]) - reserve
        while free > 0 and total + a[j] < limit:
            group.append(pools[j].pop(0))
            total += a[j]
            free -= 1
    gap = b - total
    if gap < 0:
        return None
    try:
        x = coin_solve(a, gap)
    except NotRepresentable:
        return None
    for j, cnt in enumerate(x):
        if cnt > len(pools[j]):
            return None
        for _ in range(cnt):
            group.append(pools[j].pop(0))
    return group
