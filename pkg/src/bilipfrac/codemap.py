"""Finite-depth cylinder correspondences between graph-directed codes and symbols.

A vertex ``i`` of a graph-directed system with ``A v = m v`` is sent onto
``Pi(b_i)``, the words of ``Sigma_M`` whose first letter is among the first
``b_i`` letters.  Each code step out of a vertex is assigned a contiguous
range of words one letter longer.  Everything is encoded with integers: a
node is ``(P, s, e)`` meaning the words ``P*M + s .. P*M + e`` (written in
base ``M``), and a step ``(target, offset, lo, hi, count, leaf)`` from that
node has image ``H*M + lo .. H*M + hi`` with ``H = P*M + s + offset``.

Two constructions are provided.  ``build_upper_map`` handles a strongly
connected top block sitting above vertices that already have maps (their
ranges are opaque leaves).  ``build_zero_rank_map`` handles an irreducible
matrix through a coin partition of the path counts.  ``build_gd_map``
stacks both rank by rank so that leaves continue into the lower maps.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Optional

from .coins import MultisetSpec, frobenius_number, partition_multiset
from .errors import NoSuchK, PreconditionViolated
from .kernels import KIND_NAMES, walk_step_tables
from .matrix import as_matrix, condense_and_rank, irreducible, mat_power, pf_eigenvalue, period_decomposition

MAX_POWER = 12


@dataclass(frozen=True)
class EigData:
    A: tuple
    m: int
    v: tuple

    def __post_init__(self):
        A = as_matrix(self.A)
        v = tuple(int(x) for x in self.v)
        if len(v) != len(A):
            raise ValueError("eigenvector length does not match the matrix")
        if any(x < 1 for x in v):
            raise ValueError("eigenvector entries must be positive integers")
        if any(sum(a * x for a, x in zip(row, v)) != self.m * vi for row, vi in zip(A, v)):
            raise ValueError("A v != m v")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class RowSequences:
    row: int
    delta: int
    c: tuple
    gamma: tuple   # 0-based target vertex of each step
    zeta: tuple    # 1-based, as in the cylinder indexing
    kappa: tuple


def build_row_sequences(eig: EigData) -> list:
    """Per row: step sizes ``c``, their targets, and running ranges ``zeta..kappa``."""
    out = []
    for i, row in enumerate(eig.A):
        c, gamma, zeta, kappa = [], [], [], []
        acc = 0
        for j, eta in enumerate(row):
            for _ in range(eta):
                c.append(eig.v[j])
                gamma.append(j)
                zeta.append(acc + 1)
                acc += eig.v[j]
                kappa.append(acc)
        if acc != eig.m * eig.v[i]:
            raise AssertionError(f"row {i}: step sizes sum to {acc}, expected {eig.m * eig.v[i]}")
        out.append(RowSequences(i, len(c), tuple(c), tuple(gamma), tuple(zeta), tuple(kappa)))
    return out


def top_block(A) -> int:
    """Size ``s`` of the strongly connected block of vertex 0, checked to be ``0..s-1``.

    The matrix must be block upper triangular with that block on top and no
    edge returning into it.
    """
    cond = condense_and_rank(A)
    block = cond.blocks[cond.block_of[0]]
    s = len(block)
    if block != tuple(range(s)):
        raise PreconditionViolated("the block of vertex 1 must be the leading vertices", "block")
    for i in range(s, len(A)):
        if any(A[i][j] for j in range(s)):
            raise PreconditionViolated("lower vertices must not lead back into the top block", "block")
    return s


def _upper_ok(A, v, m, s, k) -> bool:
    Ak = mat_power(A, k)
    mk = m ** k
    if any(b >= mk for b in v):
        return False
    if s == len(A):  # nothing below: the block is the whole system
        return True
    return all(sum(Ak[i][j] * v[j] for j in range(s)) < mk for i in range(s))


def normalize_b_less_m(eig: EigData, s: Optional[int] = None, cap: int = MAX_POWER):
    """Smallest power ``k`` making every ``b_j < m^k`` and the top-block sums ``< m^k``.

    Returns ``(EigData(A^k, m^k, v), k)``.
    """
    s = top_block(eig.A) if s is None else s
    if s < len(eig.A):
        D = [row[:s] for row in eig.A[:s]]
        if any(any(r) for r in D) and pf_eigenvalue(D) >= eig.m - 1e-9:
            raise NoSuchK("top block has spectral radius at least m")
    for k in range(1, cap + 1):
        if _upper_ok(eig.A, eig.v, eig.m, s, k):
            return EigData(mat_power(eig.A, k), eig.m ** k, eig.v), k
    raise NoSuchK(f"no power up to {cap} brings the top block below m^k")


@dataclass
class CylinderMap:
    kind: str
    base: int                # M, alphabet size of the symbolic side
    depth: int
    power: int               # graph steps per code step
    tables: list             # vertex -> list of steps, or None
    sizes: list              # vertex -> number of first letters of its target, or None
    step_paths: list         # vertex -> per step (target, serial) into paths of length `power`
    matrix: tuple            # the original adjacency matrix
    partitions: dict = field(default_factory=dict)  # vertex -> list of groups (zero-rank parts)

    def roots(self, vertices=None):
        vs = range(len(self.tables)) if vertices is None else vertices
        return [(v, 0, self.sizes[v] - 1) for v in vs if self.tables[v] is not None]

    def step_image(self, prefix: int, s: int, step) -> tuple:
        target, offset, lo, hi, count, leaf = step
        head = prefix * self.base + s + offset
        return head, head * self.base + lo, head * self.base + hi


# --------------------------------------------------------------------------
# upper map


def _upper_tables(A, v, m_pow, P, block, sizes, continue_leaves):
    """Steps for the vertices of ``block`` using ``A^P``; others become leaves."""
    AP = mat_power(A, P)
    inside = set(block)
    tables, paths = {}, {}
    for i in block:
        steps, sp = [], []
        acc = 0
        for j, eta in enumerate(AP[i]):
            for serial in range(eta):
                size = v[j]
                lo, hi = acc, acc + size - 1
                acc += size
                leaf = j not in inside
                if leaf and continue_leaves and sizes[j] == size:
                    leaf = False
                steps.append((j, 0, lo, hi, size, leaf))
                sp.append((j, serial))
        if acc != m_pow * v[i]:
            raise AssertionError(f"row {i}: ranges sum to {acc}, expected {m_pow * v[i]}")
        tables[i], paths[i] = steps, sp
    return tables, paths


def build_upper_map(eig: EigData, depth: int, s: Optional[int] = None) -> CylinderMap:
    """Map for the top block ``0..s-1``; ranges into lower vertices stay opaque."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    s = top_block(eig.A) if s is None else s
    norm, k = normalize_b_less_m(eig, s)
    p = len(eig.A)
    sizes = [eig.v[i] if i < s else None for i in range(p)]
    tabs, paths = _upper_tables(eig.A, eig.v, norm.m, k, range(s), sizes, False)
    # steps into the top block end strictly before m^k
    for i in range(s):
        for target, _, _, hi, _, _ in tabs[i]:
            if target < s and hi + 1 >= norm.m:
                raise AssertionError(f"row {i}: top-block range ends at {hi + 1}, not below {norm.m}")
    tables = [tabs.get(i) for i in range(p)]
    return CylinderMap("upper", norm.m, depth, k, tables, sizes,
                       [paths.get(i) for i in range(p)], eig.A)


def frame_ranges(cmap: CylinderMap, vertex: int) -> list:
    """Depth-one images as 1-based frame index ranges ``(first, last)``."""
    return [(lo + 1, hi + 1) for _, off, lo, hi, _, _ in cmap.tables[vertex] if off == 0] \
        if cmap.kind == "upper" else [
            (off * cmap.base + lo + 1, off * cmap.base + hi + 1) for _, off, lo, hi, _, _ in cmap.tables[vertex]
        ]


# --------------------------------------------------------------------------
# zero-rank map


@dataclass(frozen=True)
class ZeroRankPlan:
    classes: tuple     # cyclic classes (vertex tuples)
    u: int
    kstar: int         # power of A^u
    a: dict            # vertex -> reduced eigenvector entry


def _class_kstar(block, a, m_eff, cap):
    s = len(block)
    if s == 1:
        return 1
    phi = frobenius_number(a)
    top = max(a)
    for k in range(1, cap + 1):
        if m_eff ** k <= 2 * s * top * (top + phi):
            continue
        Dk = mat_power(block, k)
        if all(Dk[i][j] > a[i] * (top + phi) for i in range(s) for j in range(s)):
            return k
    raise NoSuchK(f"partition bounds not met by any power up to {cap}")


def plan_zero_rank(A, v, m, cap: int = MAX_POWER) -> ZeroRankPlan:
    A = as_matrix(A)
    if not irreducible(A):
        raise PreconditionViolated("matrix is not irreducible", "irreducible")
    dec = period_decomposition(A)
    a = {}
    k = 1
    for cls, block in zip(dec.classes, dec.blocks):
        g = reduce(math.gcd, (v[i] for i in cls))
        red = tuple(v[i] // g for i in cls)
        for i, x in zip(cls, red):
            a[i] = x
        k = max(k, _class_kstar(block, red, m ** dec.u, max(1, cap // dec.u)))
    return ZeroRankPlan(dec.classes, dec.u, k, a)


def _zero_rank_tables(A, a, m, P, classes):
    """Steps from coin partitions of the length-``P`` path counts."""
    AP = mat_power(A, P)
    M = m ** P
    tables, paths, parts = {}, {}, {}
    for cls in classes:
        coins = tuple(a[j] for j in cls)
        for i in cls:
            counts = tuple(AP[i][j] for j in cls)
            if len(cls) == 1:
                groups = (tuple((0, t) for t in range(counts[0])),)
            else:
                groups = partition_multiset(MultisetSpec(counts, M, a[i]), coins).groups
            steps, sp = [], []
            for t, group in enumerate(groups):
                acc = 0
                for jl, serial in group:
                    j = cls[jl]
                    steps.append((j, t, acc, acc + a[j] - 1, a[j], False))
                    sp.append((j, serial))
                    acc += a[j]
                if acc != M:
                    raise AssertionError(f"group {t} of vertex {i} sums to {acc}, expected {M}")
            tables[i], paths[i], parts[i] = steps, sp, groups
    return tables, paths, parts


def build_zero_rank_map(eig: EigData, depth: int, cap: int = MAX_POWER) -> CylinderMap:
    """Map for an irreducible matrix, one cyclic class block of ``A^u`` at a time."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    plan = plan_zero_rank(eig.A, eig.v, eig.m, cap)
    P = plan.u * plan.kstar
    tabs, paths, parts = _zero_rank_tables(eig.A, plan.a, eig.m, P, plan.classes)
    p = len(eig.A)
    return CylinderMap("zero-rank", eig.m ** P, depth, P, [tabs[i] for i in range(p)],
                       [plan.a[i] for i in range(p)], [paths[i] for i in range(p)], eig.A, parts)


# --------------------------------------------------------------------------
# stacked map for a whole system


def build_gd_map(eig: EigData, depth: int, cap: int = MAX_POWER) -> CylinderMap:
    """Maps for every vertex, built rank by rank with one common power.

    Rank-0 blocks use coin partitions, higher blocks the upper construction.
    A range into a lower vertex continues into that vertex's own map when
    their sizes agree; otherwise it stays an opaque leaf.
    """
    A, v, m = eig.A, eig.v, eig.m
    p = len(A)
    cond = condense_and_rank(A)
    order = sorted(range(len(cond.blocks)), key=lambda b: cond.rank[b])
    zero_plans = {}
    need, period = 1, 1
    for b in order:
        block = cond.blocks[b]
        if cond.rank[b] == 0:
            sub = tuple(tuple(A[i][j] for j in block) for i in block)
            plan = plan_zero_rank(sub, tuple(v[i] for i in block), m, cap)
            zero_plans[b] = plan
            need = max(need, plan.u * plan.kstar)
            period = math.lcm(period, plan.u)
    P = None
    for cand in range(need, cap + 1):
        if cand % period:
            continue
        if all(_block_upper_ok(A, v, m, cond.blocks[b], cand) for b in order if cond.rank[b] > 0):
            P = cand
            break
    if P is None:
        raise NoSuchK(f"no common power up to {cap}")
    tables = [None] * p
    sizes = [None] * p
    paths = [None] * p
    parts = {}
    for b in order:
        block = cond.blocks[b]
        if cond.rank[b] == 0:
            plan = zero_plans[b]
            classes = tuple(tuple(block[x] for x in cls) for cls in plan.classes)
            a = {block[x]: plan.a[x] for x in plan.a}
            # path counts inside a class of a rank-0 block stay inside the block
            tabs, sp, pt = _zero_rank_tables(A, a, m, P, classes)
            for i in block:
                sizes[i] = a[i]
            parts.update(pt)
        else:
            for i in block:
                sizes[i] = v[i]
            tabs, sp = _upper_tables(A, v, m ** P, P, block, sizes, True)
        for i in block:
            tables[i] = tabs[i]
            paths[i] = sp[i]
    return CylinderMap("stacked", m ** P, depth, P, tables, sizes, paths, A, parts)


def _block_upper_ok(A, v, m, block, k) -> bool:
    Ak = mat_power(A, k)
    mk = m ** k
    if any(v[j] >= mk for j in block):
        return False
    return all(sum(Ak[i][j] * v[j] for j in block) < mk for i in block)


# --------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class VerificationReport:
    nodes: int
    violations: int
    samples: tuple     # (kind, vertex, level, step)
    depth: int
    mode: str

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def describe(self) -> list:
        return [f"{KIND_NAMES[k]} at vertex {v + 1}, level {lvl}, step {q + 1 if q >= 0 else '-'}"
                for k, v, lvl, q in self.samples]


def _tables_for_walk(cmap: CylinderMap):
    return [list(t) if t is not None else [] for t in cmap.tables]


EXHAUSTIVE_LIMIT = 50_000_000


def count_cylinders(cmap: CylinderMap, depth: int) -> int:
    """Number of nodes an exhaustive walk to ``depth`` visits."""
    # per[v]: nodes in the subtree of a vertex-v node with the given levels left
    per = [1] * len(cmap.tables)
    for _ in range(depth):
        per = [1 + sum(per[st[0]] for st in t if not st[5]) if t is not None else 1 for t in cmap.tables]
    return sum(per[v] for v, _, _ in cmap.roots())


def verify_cylinder_map(cmap: CylinderMap, depth: Optional[int] = None, mode: str = "auto",
                        max_report: int = 100) -> VerificationReport:
    """Check disjointness, nesting, coverage and counts down to ``depth``.

    ``mode="exhaustive"`` visits every code cylinder; ``mode="memo"`` checks
    each distinct ``(vertex, width)`` once per level, which is equivalent
    because the checks are invariant under shifting a node's range.  ``mode="auto"`` walks exhaustively
    unless that exceeds ``EXHAUSTIVE_LIMIT`` nodes.
    """
    depth = cmap.depth if depth is None else depth
    tables = _tables_for_walk(cmap)
    roots = cmap.roots()
    if mode == "auto":
        mode = "exhaustive" if count_cylinders(cmap, depth) <= EXHAUSTIVE_LIMIT else "memo"
    if mode == "exhaustive":
        nodes, bad, rep = walk_step_tables(tables, roots, cmap.base, depth, max_report)
        return VerificationReport(nodes, bad, tuple(rep), depth, mode)
    if mode != "memo":
        raise ValueError(f"unknown mode {mode!r}")
    # one batched walk per level over the distinct node shapes of that level
    # checks are unchanged when a node's range is shifted, so a node reduces to (vertex, width)
    frontier = sorted({(v, 0, e - s) for v, s, e in roots})
    seen_nodes = 0
    bad = 0
    rep = []
    for level in range(depth):
        _, b, r = walk_step_tables(tables, frontier, cmap.base, 1, max_report)
        seen_nodes += len(frontier)
        bad += b
        rep.extend((k, v, level, q) for k, v, _, q in r)
        frontier = sorted({(st[0], 0, st[3] - st[2]) for v, _, _ in frontier for st in tables[v] if not st[5]})
    return VerificationReport(seen_nodes, bad, tuple(rep[:max_report]), depth, mode)


def cylinder_images(cmap: CylinderMap, depth: int, vertex: int = 0) -> dict:
    """Image of every code cylinder from ``vertex`` down to ``depth``.

    Keys are tuples of 1-based ``(vertex, step)`` pairs; values are
    ``(length, first, last)`` with words numbered in base ``M``.
    """
    out = {}
    stack = [((), 0, 0, cmap.sizes[vertex] - 1, vertex)]
    while stack:
        code, prefix, s, e, v = stack.pop()
        if len(code) >= depth or cmap.tables[v] is None:
            continue
        for q, step in enumerate(cmap.tables[v]):
            head, lo, hi = cmap.step_image(prefix, s, step)
            key = code + ((v + 1, q + 1),)
            out[key] = (len(key) + 1, lo, hi)
            if not step[5]:
                stack.append((key, head, step[2], step[3], step[0]))
    return dict(sorted(out.items()))


def to_digits(number: int, length: int, base: int) -> tuple:
    """1-based letters of a word given by its index."""
    digits = []
    for _ in range(length):
        number, d = divmod(number, base)
        digits.append(d + 1)
    return tuple(reversed(digits))


def cylinder_map_to_dict(cmap: CylinderMap, depth: Optional[int] = None) -> dict:
    depth = min(cmap.depth if depth is None else depth, 3)
    images = {}
    for v in range(len(cmap.tables)):
        if cmap.tables[v] is None:
            continue
        for code, (length, lo, hi) in cylinder_images(cmap, depth, v).items():
            images.setdefault(str(v + 1), []).append({
                "code": [list(c) for c in code],
                "length": length,
                "first": list(to_digits(lo, length, cmap.base)),
                "last": list(to_digits(hi, length, cmap.base)),
            })
    return {
        "kind": cmap.kind,
        "alphabet": cmap.base,
        "power": cmap.power,
        "sizes": cmap.sizes,
        "steps": [
            None if t is None else [
                {"target": s[0] + 1, "offset": s[1], "lo": s[2] + 1, "hi": s[3] + 1, "count": s[4], "leaf": bool(s[5])}
                for s in t
            ] for t in cmap.tables
        ],
        "images": images,
    }


# --------------------------------------------------------------------------
# distortion


@dataclass(frozen=True)
class DistortionEstimate:
    min_ratio: float
    max_ratio: float
    pairs: int
    depth: int

    @property
    def spread(self) -> float:
        return self.max_ratio / self.min_ratio


def _paths(A, start, length):
    """All length-``length`` edge paths from ``start``, grouped by end vertex, lexicographic."""
    out = {}

    def rec(v, left, acc):
        if left == 0:
            out.setdefault(v, []).append(tuple(acc))
            return
        for j, mult in enumerate(A[v]):
            for r in range(mult):
                acc.append((j, r))
                rec(j, left - 1, acc)
                acc.pop()

    rec(start, length, [])
    return out


class _Realizer:
    """Points of the attractor addressed by codes of a stacked map."""

    def __init__(self, sys, gd, cmap):
        self.sys = sys
        self.gd = gd
        self.cmap = cmap
        self.group = sys.group
        self.den = Fraction(1, sys.n ** (gd.kstar - 1))
        self.nprime = gd.ratio_recip
        # edge lookup: (source, target, serial) -> edge similitude
        self.edge = {}
        for i, out in enumerate(gd.edges):
            counter = {}
            for e in out:
                r = counter.get(e.target, 0)
                counter[e.target] = r + 1
                self.edge[(i, e.target, r)] = e.map
        self.fixed = self._fixed_point()
        self._path_cache = {}

    def _fixed_point(self):
        """Fixed point of the first map, a point of the attractor (exact)."""
        from .lattice import mat_vec

        sys = self.sys
        g, b = sys.maps[0]
        mat = sys.group.matrix(g)
        l = sys.rank
        # (n I - g) x = n b
        rows = [[Fraction((sys.n if r == c else 0) - mat[r][c]) for c in range(l)] + [Fraction(sys.n * b[r])]
                for r in range(l)]
        for c in range(l):
            piv = next(r for r in range(c, l) if rows[r][c] != 0)
            rows[c], rows[piv] = rows[piv], rows[c]
            inv = 1 / rows[c][c]
            rows[c] = [x * inv for x in rows[c]]
            for r in range(l):
                if r != c and rows[r][c] != 0:
                    f = rows[r][c]
                    rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
        x = tuple(rows[r][l] for r in range(l))
        assert tuple(Fraction(v, sys.n) + w for v, w in zip(mat_vec(mat, x), b)) == x
        return x

    def anchor(self, cls):
        g, d = self.gd.classes[cls][0]
        moved = self.group.act(g, self.fixed)
        return tuple(x / self.nprime + y * self.den for x, y in zip(moved, d))

    def path(self, v, target, serial):
        key = (v, target)
        if key not in self._path_cache:
            for t, lst in _paths(self.cmap.matrix, v, self.cmap.power).items():
                self._path_cache[(v, t)] = lst
        return self._path_cache[key][serial]

    def point(self, start, steps):
        """Apply the similitudes of every step, innermost last, to the final anchor."""
        sims = []
        v = start
        for q in steps:
            target, serial = self.cmap.step_paths[v][q]
            src = v
            for j, r in self.path(v, target, serial):
                sims.append(self.edge[(src, j, r)])
                src = j
            v = target
        x = self.anchor(v)
        for sim in reversed(sims):
            moved = self.group.act(sim.iso, x)
            x = tuple((a + b * self.den) / self.nprime for a, b in zip(moved, sim.shift))
        return x


def _distance(gram, x, y) -> float:
    d = [a - b for a, b in zip(x, y)]
    l = len(d)
    return math.sqrt(float(sum(d[i] * gram[i][j] * d[j] for i in range(l) for j in range(l))))


def estimate_distortion(sys, gd, cmap: CylinderMap, samples: int = 400, seed: int = 0,
                        depth: Optional[int] = None, start: int = 0) -> DistortionEstimate:
    """Observed range of symbolic over Euclidean distance on sampled code pairs.

    Each pair shares a random number of leading steps and then diverges, so
    every scale down to ``depth`` is represented.  Symbolic distance is
    ``rho^k`` with ``k`` the first differing letter of the lowest image words
    and ``rho = n'^-power``.
    """
    depth = cmap.depth if depth is None else depth
    rng = random.Random(seed)
    real = _Realizer(sys, gd, cmap)
    rho = Fraction(1, gd.ratio_recip ** cmap.power)
    gram = sys.lattice.gram
    lo_ratio, hi_ratio = math.inf, 0.0
    count = 0
    for _ in range(samples):
        split = rng.randrange(depth)
        codes = []
        shared = None
        for side in range(2):
            v, prefix, s = start, 0, 0
            steps = []
            word = None
            for level in range(depth):
                table = cmap.tables[v]
                if table is None:
                    break
                if level < split and shared is not None:
                    q = shared[level]
                elif level == split and shared is not None and len(table) > 1:
                    q = rng.choice([x for x in range(len(table)) if x != shared[level]])
                else:
                    q = rng.randrange(len(table))
                step = table[q]
                head, lo, _ = cmap.step_image(prefix, s, step)
                steps.append(q)
                word = (lo, level + 2)
                if step[5]:
                    break
                v, prefix, s = step[0], head, step[2]
            codes.append((tuple(steps), word))
            if shared is None:
                shared = steps
        (c1, w1), (c2, w2) = codes
        if c1 == c2:
            continue
        length = max(w1[1], w2[1])
        d1 = to_digits(w1[0] * cmap.base ** (length - w1[1]), length, cmap.base)
        d2 = to_digits(w2[0] * cmap.base ** (length - w2[1]), length, cmap.base)
        k = next((t for t in range(length) if d1[t] != d2[t]), None)
        if k is None:
            continue
        sym = float(rho ** (k + 1))
        euc = _distance(gram, real.point(start, c1), real.point(start, c2))
        if euc == 0:
            continue
        ratio = sym / euc
        lo_ratio = min(lo_ratio, ratio)
        hi_ratio = max(hi_ratio, ratio)
        count += 1
    return DistortionEstimate(lo_ratio, hi_ratio, count, depth)
