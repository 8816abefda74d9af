"""Structure and spectra of non-negative integer adjacency matrices.

Covers strongly connected blocks and their sink-peeling ranks, the
Perron-Frobenius eigenvalue (floating point), exact integer-characteristic
certificates ``A v = m v`` with ``v > 0``, irreducibility and the cyclic
(period) decomposition of irreducible matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Optional

import numpy as np

from .errors import NonConvergence, PreconditionViolated


def as_matrix(a) -> tuple:
    """Validate and freeze a square non-negative integer matrix."""
    rows = tuple(tuple(int(v) for v in row) for row in a)
    p = len(rows)
    if p == 0 or any(len(r) != p for r in rows):
        raise ValueError("adjacency matrix must be square and non-empty")
    if any(v < 0 for r in rows for v in r):
        raise ValueError("adjacency matrix entries must be non-negative")
    return rows


def mat_power(a, k: int) -> tuple:
    a = as_matrix(a)
    p = len(a)
    result = tuple(tuple(int(i == j) for j in range(p)) for i in range(p))
    base = a
    while k:
        if k & 1:
            result = _mul(result, base)
        base = _mul(base, base)
        k >>= 1
    return result


def _mul(a, b):
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(r, c)) for c in cols) for r in a)


def successors(a) -> list:
    return [[j for j, v in enumerate(row) if v] for row in a]


# --------------------------------------------------------------------------
# strongly connected blocks and ranks


@dataclass(frozen=True)
class RankedCondensation:
    blocks: tuple          # tuple of sorted vertex tuples, in discovery order
    block_of: tuple        # vertex -> block index
    dag: tuple             # block -> sorted tuple of successor blocks (no self)
    rank: tuple            # block -> rank

    def vertex_rank(self, v: int) -> int:
        return self.rank[self.block_of[v]]

    def layers(self) -> list:
        out = [[] for _ in range(max(self.rank) + 1)]
        for b, r in enumerate(self.rank):
            out[r].append(b)
        return out


def strongly_connected_components(succ) -> list:
    """Tarjan's algorithm, iterative; components in reverse topological order."""
    n = len(succ)
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comps = []
    counter = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            if pos < len(succ[v]):
                work[-1] = (v, pos + 1)
                w = succ[v][pos]
                if index[w] is None:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp)))
    return comps


def condense_and_rank(a) -> RankedCondensation:
    """Blocks of mutually reachable vertices, ranked by repeatedly peeling sinks.

    Rank 0 blocks are the sinks of the block DAG; rank ``k`` blocks are the
    sinks once all lower ranks are removed.
    """
    a = as_matrix(a)
    succ = successors(a)
    comps = strongly_connected_components(succ)
    block_of = [0] * len(a)
    for b, comp in enumerate(comps):
        for v in comp:
            block_of[v] = b
    dag = []
    for comp in comps:
        out = {block_of[w] for v in comp for w in succ[v]}
        out.discard(block_of[comp[0]])
        dag.append(tuple(sorted(out)))
    rank = [None] * len(comps)
    remaining = set(range(len(comps)))
    level = 0
    while remaining:
        layer = [b for b in remaining if all(c not in remaining for c in dag[b])]
        for b in layer:
            rank[b] = level
        remaining.difference_update(layer)
        level += 1
    return RankedCondensation(tuple(comps), tuple(block_of), tuple(dag), tuple(rank))


def irreducible(a) -> bool:
    """True iff the digraph of ``a`` is strongly connected."""
    a = as_matrix(a)
    return len(strongly_connected_components(successors(a))) == 1


# --------------------------------------------------------------------------
# Perron-Frobenius eigenvalue


def pf_eigenvalue(a, tol: float = 1e-12, max_iter: int = 200_000) -> float:
    """Spectral radius, by power iteration on ``A + I`` from the all-ones vector.

    The radius of a matrix is the largest radius of its strongly connected
    diagonal blocks, so each block is iterated on its own; irreducible blocks
    avoid the slow convergence of Jordan chains.  A block stops when the
    Collatz-Wielandt bounds ``min (Bx)_i/x_i`` and ``max (Bx)_i/x_i`` agree to
    relative ``tol``.  The result is checked against the row-sum bracket.
    """
    a = as_matrix(a)
    if not any(v for row in a for v in row):
        raise PreconditionViolated("matrix has no nonzero entry", "nonzero")
    est = 0.0
    for block in strongly_connected_components(successors(a)):
        if len(block) == 1:
            est = max(est, float(a[block[0]][block[0]]))
        else:
            sub = [[a[i][j] for j in block] for i in block]
            est = max(est, _pf_irreducible(sub, tol, max_iter))
    sums = [sum(row) for row in a]
    slack = 1e-9 * max(1.0, max(sums))
    if not min(sums) - slack <= est <= max(sums) + slack:
        raise AssertionError(f"PF estimate {est} outside row-sum bracket [{min(sums)}, {max(sums)}]")
    return est


def _pf_irreducible(a, tol, max_iter) -> float:
    A = np.array(a, dtype=float)
    B = A + np.eye(A.shape[0])
    x = np.ones(A.shape[0])
    for _ in range(max_iter):
        y = B @ x
        ratios = y / x
        lo, hi = ratios.min(), ratios.max()
        if hi - lo <= tol * hi:
            return float(0.5 * (lo + hi) - 1.0)
        x = y / y.max()
    raise NonConvergence(f"power iteration did not converge in {max_iter} steps")


# --------------------------------------------------------------------------
# exact linear algebra


def nullspace(rows) -> list:
    """Basis of the right null space over the rationals (reduced row echelon)."""
    m = [[Fraction(v) for v in row] for row in rows]
    if not m:
        return []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][f]
        basis.append(vec)
    return basis


def fourier_motzkin_point(constraints, nvars: int) -> Optional[list]:
    """A rational point satisfying every ``sum_j c_j y_j >= rhs``, or None.

    ``constraints`` is a list of ``(coeffs, rhs)``.  Variables are eliminated
    last-to-first; a point is then recovered by back substitution, taking the
    midpoint of each feasible interval (or one step beyond a one-sided bound).
    """
    systems = [[(list(map(Fraction, c)), Fraction(r)) for c, r in constraints]]
    for k in range(nvars - 1, -1, -1):
        current = systems[-1]
        pos, neg, rest = [], [], []
        for c, r in current:
            (pos if c[k] > 0 else neg if c[k] < 0 else rest).append((c, r))
        nxt = list(rest)
        for cp, rp in pos:
            for cn, rn in neg:
                a, b = cp[k], -cn[k]
                coeffs = [b * x + a * y for x, y in zip(cp, cn)]
                coeffs[k] = Fraction(0)
                nxt.append((coeffs, b * rp + a * rn))
        nxt = _dedupe(nxt)
        systems.append(nxt)
    for c, r in systems[-1]:
        if r > 0:
            return None
    y = [Fraction(0)] * nvars
    for k in range(nvars):
        level = systems[nvars - 1 - k]
        lower, upper = None, None
        for c, r in level:
            if c[k] == 0:
                continue
            rest = sum((c[j] * y[j] for j in range(nvars) if j != k), Fraction(0))
            bound = (r - rest) / c[k]
            if c[k] > 0:
                lower = bound if lower is None else max(lower, bound)
            else:
                upper = bound if upper is None else min(upper, bound)
        if lower is not None and upper is not None:
            if lower > upper:
                return None
            y[k] = (lower + upper) / 2
        elif lower is not None:
            y[k] = lower + 1
        elif upper is not None:
            y[k] = upper - 1
    return y


def _dedupe(constraints):
    seen = set()
    out = []
    for c, r in constraints:
        scale = next((abs(v) for v in c if v != 0), None)
        if scale is None:
            key = (tuple(c), r)
        else:
            key = (tuple(v / scale for v in c), r / scale)
        if key not in seen:
            seen.add(key)
            out.append((c, r))
    return out


# --------------------------------------------------------------------------
# integer characteristic


@dataclass(frozen=True)
class CharacteristicCertificate:
    m: int
    v: tuple  # positive integers, gcd 1

    def check(self, a) -> bool:
        a = as_matrix(a)
        return all(x > 0 for x in self.v) and all(
            sum(r * x for r, x in zip(row, self.v)) == self.m * vi for row, vi in zip(a, self.v)
        )


@dataclass(frozen=True)
class Refutation:
    tested: tuple

    def __bool__(self):
        return False


def primitive_integer_vector(vec) -> tuple:
    """Scale a positive rational vector to coprime positive integers."""
    den = reduce(lcm, (Fraction(x).denominator for x in vec), 1)
    ints = [int(Fraction(x) * den) for x in vec]
    g = reduce(gcd, ints, 0) or 1
    return tuple(i // g for i in ints)


def candidate_characteristics(a) -> range:
    sums = [sum(row) for row in as_matrix(a)]
    return range(max(2, min(sums)), max(sums) + 1)


def positive_eigenvector(a, m: int) -> Optional[tuple]:
    """A strictly positive integer solution of ``A v = m v``, if one exists."""
    a = as_matrix(a)
    p = len(a)
    shifted = [[a[i][j] - (m if i == j else 0) for j in range(p)] for i in range(p)]
    basis = nullspace(shifted)
    if not basis:
        return None
    if len(basis) == 1:
        v = basis[0]
        if all(x > 0 for x in v):
            return primitive_integer_vector(v)
        if all(x < 0 for x in v):
            return primitive_integer_vector([-x for x in v])
        return None
    k = len(basis)
    constraints = [([basis[t][i] for t in range(k)], 1) for i in range(p)]
    y = fourier_motzkin_point(constraints, k)
    if y is None:
        return None
    v = [sum(y[t] * basis[t][i] for t in range(k)) for i in range(p)]
    if not all(x > 0 for x in v):
        raise AssertionError("Fourier-Motzkin returned an infeasible point")
    return primitive_integer_vector(v)


def integer_characteristic(a):
    """First integer ``m >= 2`` in the row-sum range with a positive eigenvector.

    Returns a :class:`CharacteristicCertificate` or a falsy
    :class:`Refutation` listing the tested values.
    """
    a = as_matrix(a)
    tested = []
    for m in candidate_characteristics(a):
        tested.append(m)
        v = positive_eigenvector(a, m)
        if v is not None:
            cert = CharacteristicCertificate(m, v)
            assert cert.check(a)
            return cert
    return Refutation(tuple(tested))


# --------------------------------------------------------------------------
# period decomposition


@dataclass(frozen=True)
class PeriodDecomposition:
    permutation: tuple     # vertex order grouping the cyclic classes
    period: int
    classes: tuple         # vertex tuples, one per cyclic class
    blocks: tuple          # diagonal blocks of A^u, each strictly positive
    u: int


def period(a) -> tuple:
    """Period and cyclic class labels (BFS level mod period) of an irreducible matrix."""
    a = as_matrix(a)
    succ = successors(a)
    level = [None] * len(a)
    level[0] = 0
    order = [0]
    for v in order:
        for w in succ[v]:
            if level[w] is None:
                level[w] = level[v] + 1
                order.append(w)
    d = 0
    for v in range(len(a)):
        for w in succ[v]:
            d = gcd(d, level[v] + 1 - level[w])
    if d == 0:
        raise PreconditionViolated("matrix has no cycle", "irreducible")
    return d, tuple(lv % d for lv in level)


def primitivity_exponent(block, cap: Optional[int] = None) -> int:
    """Least ``h`` with ``block^h > 0``; Wielandt's bound caps the search."""
    block = as_matrix(block)
    s = len(block)
    cap = cap or (s - 1) ** 2 + 1
    power = block
    for h in range(1, cap + 1):
        if all(v > 0 for row in power for v in row):
            return h
        power = _mul(power, block)
    raise PreconditionViolated("block is not primitive", "primitive")


def period_decomposition(a) -> PeriodDecomposition:
    """Permutation, period ``d`` and positive diagonal blocks of ``A^u``.

    ``u = d * lcm(h_i)`` where ``h_i`` is the primitivity exponent of the
    ``i``-th diagonal block of ``A^d``.
    """
    a = as_matrix(a)
    if not irreducible(a):
        raise PreconditionViolated("matrix is not irreducible", "irreducible")
    d, label = period(a)
    classes = tuple(tuple(v for v in range(len(a)) if label[v] == c) for c in range(d))
    perm = tuple(v for cls in classes for v in cls)
    ad = mat_power(a, d)
    hs = [primitivity_exponent([[ad[i][j] for j in cls] for i in cls]) for cls in classes]
    u = d * reduce(lcm, hs, 1)
    au = mat_power(a, u)
    blocks = tuple(tuple(tuple(au[i][j] for j in cls) for i in cls) for cls in classes)
    for blk in blocks:
        assert all(v > 0 for row in blk for v in row), "diagonal block of A^u not positive"
    # off-diagonal blocks of A^u vanish
    for ci, cls in enumerate(classes):
        for cj, other in enumerate(classes):
            if ci != cj:
                assert all(au[i][j] == 0 for i in cls for j in other)
    return PeriodDecomposition(perm, d, classes, blocks, u)


# --------------------------------------------------------------------------
# fixtures from the literature


def gamma_family_matrix(n: int) -> tuple:
    """The ``2^n x 2^n`` matrix pairing rows ``(1,1)`` and ``(1,2)`` column pairs."""
    size = 2 ** n
    half = size // 2
    rows = [[0] * size for _ in range(size)]
    for k in range(half):
        rows[k][2 * k] = rows[k][2 * k + 1] = 1
        rows[half + k][2 * k] = 1
        rows[half + k][2 * k + 1] = 2
    return as_matrix(rows)


B1 = as_matrix([
    [1, 1, 0, 0, 0, 0],
    [1, 1, 1, 0, 0, 0],
    [1, 0, 1, 1, 0, 0],
    [1, 1, 1, 0, 1, 0],
    [1, 0, 1, 1, 0, 1],
    [1, 0, 1, 1, 0, 2],
])

B2 = as_matrix([
    [1, 1, 1],
    [1, 1, 2],
    [0, 1, 1],
])

LAYERED4 = as_matrix([
    [0, 1, 1, 0],
    [1, 1, 1, 1],
    [0, 0, 1, 2],
    [0, 0, 3, 2],
])
