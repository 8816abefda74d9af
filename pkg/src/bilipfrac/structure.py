"""Separation depth and graph-directed structure of a self-similar set.

Points of the refined lattice ``Gamma' = Gamma / n^(k-1)`` are stored as
integer coordinates in the basis of ``Gamma`` scaled by ``n^(k-1)``; the
quadratic form of ``Gamma`` applied to such coordinates gives squared
lengths multiplied by ``n^(2(k-1))``.  With this convention the touching
test between two balls of radius ``delta / n^k`` is the same for every
``k``: ``Q(c - c') <= 4 delta^2 / n^2``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import isqrt, lcm
from typing import Optional

from .config import enumeration_cap
from .errors import CapExceeded, DegenerateSystem, RegionEscape
from .ifs import IfsSystem, compose_word, derived_constants, iter_words
from .lattice import IsoGroup, points_in_ellipsoid, quad_form
from .kernels import cluster_labels

DEFAULT_K_MAX = 8
DEFAULT_CLASS_CAP = 5000


# --------------------------------------------------------------------------
# exact clustering


def _integer_form(gram):
    """``(qint, scale)`` with ``qint = scale * gram`` integral."""
    scale = reduce(lcm, (Fraction(v).denominator for row in gram for v in row), 1)
    return tuple(tuple(int(v * scale) for v in row) for row in gram), scale


def _inverse_00(gram) -> Fraction:
    """Entry ``(0, 0)`` of the inverse Gram matrix (by Cramer's rule)."""
    from .lattice import determinant

    minor = [row[1:] for row in gram[1:]]
    det = determinant(gram)
    return (determinant(minor) if minor else Fraction(1)) / det


def clusters(gram, points, threshold_sq) -> list:
    """Group points into components of the graph ``Q(p - p') <= threshold_sq``.

    Returns a list of components (lists of points), ordered by their least
    point, each sorted.
    """
    pts = sorted(set(points))
    if not pts:
        return []
    qint, scale = _integer_form(gram)
    threshold_sq = Fraction(threshold_sq)
    bound = threshold_sq * scale
    t = bound.numerator // bound.denominator
    # |d_0|^2 <= threshold * (Q^-1)_00 for every joined pair
    w2 = threshold_sq * _inverse_00(gram)
    window = isqrt(w2.numerator // w2.denominator) + 1
    labels = cluster_labels(pts, qint, t, window)
    groups = {}
    for p, lab in zip(pts, labels):
        groups.setdefault(lab, []).append(p)
    return [groups[k] for k in sorted(groups, key=lambda k: pts[k])]


# --------------------------------------------------------------------------
# separation depth


@dataclass(frozen=True)
class KStarResult:
    found: bool
    kstar: Optional[int]
    k_max: int
    centers_checked: tuple = ()  # per tried depth, number of ball centers

    def __str__(self):
        return f"Found({self.kstar})" if self.found else f"Inconclusive({self.k_max})"


def _level_words(sys: IfsSystem, k: int):
    """Distinct ``(g_w, t_w)`` over words of length ``k``."""
    level = {(0, (0,) * sys.rank)}
    for _ in range(k):
        nxt = set()
        for g, t in level:
            for gi, b in sys.maps:
                moved = sys.group.act(g, b)
                nxt.add((sys.group.compose(g, gi), tuple(sys.n * x + y for x, y in zip(t, moved))))
        level = nxt
    return level


def periodized_centers(sys: IfsSystem, k: int, radius_factor: Fraction, cap=None) -> list:
    """Ball centers of the periodized depth-``k`` cover within a radius.

    Centers ``h t_w + n^k b`` for ``h`` in the group, ``|w| = k`` and ``b``
    in ``Gamma``, written in ``Gamma / n^(k-1)`` coordinates, whose length is
    at most ``radius_factor * delta``.
    """
    cap = enumeration_cap(cap)
    delta_sq = derived_constants(sys).delta_sq
    n, l = sys.n, sys.rank
    gram = sys.lattice.gram
    scale_sq = n ** (2 * (k - 1))
    limit = delta_sq * radius_factor ** 2 * scale_sq
    # |h t_w| <= delta n^(k-1), so |n^k b| <= (radius_factor + 1) delta n^(k-1)
    b_radius = delta_sq * (radius_factor + 1) ** 2 / (n * n)
    shifts = points_in_ellipsoid(gram, (0,) * l, b_radius)
    words = {t for _, t in _level_words(sys, k)}
    base = {sys.group.act(h, t) for h in range(len(sys.group)) for t in words}
    if len(base) * len(shifts) > cap:
        raise CapExceeded(f"{len(base) * len(shifts)} candidate centers exceed cap {cap}")
    nk = n ** k
    out = set()
    for c in base:
        for b in shifts:
            p = tuple(x + nk * y for x, y in zip(c, b))
            if quad_form(gram, p) <= limit:
                out.add(p)
    return sorted(out)


def find_kstar(sys: IfsSystem, k_max: int = DEFAULT_K_MAX, cap=None) -> KStarResult:
    """Least depth at which no component of the cover crosses the annulus.

    A component *touches* when one of its balls meets ``B(0, 2 delta)`` and
    *reaches* when one of its balls meets ``{|x| >= 3 delta}``.  Returns
    ``Found(k)`` at the first ``k`` where no component does both.
    """
    if sys.is_degenerate:
        raise DegenerateSystem("all translations vanish; the attractor is a point")
    delta_sq = derived_constants(sys).delta_sq
    n = sys.n
    gram = sys.lattice.gram
    link = 4 * delta_sq / (n * n)
    counts = []
    for k in range(1, k_max + 1):
        eps = Fraction(1, n ** k)
        centers = periodized_centers(sys, k, 3 + eps, cap)
        counts.append(len(centers))
        scale_sq = n ** (2 * (k - 1))
        touch = delta_sq * (2 + eps) ** 2 * scale_sq
        reach = delta_sq * (3 - eps) ** 2 * scale_sq
        crossing = False
        for comp in clusters(gram, centers, link):
            norms = [quad_form(gram, c) for c in comp]
            if min(norms) <= touch and max(norms) >= reach:
                crossing = True
                break
        if not crossing:
            return KStarResult(True, k, k_max, tuple(counts))
    return KStarResult(False, None, k_max, tuple(counts))


# --------------------------------------------------------------------------
# types and their canonical forms


@dataclass(frozen=True)
class Similitude:
    """``x -> iso(x) + shift`` on ``Gamma'`` coordinates (ratio handled separately)."""

    iso: int
    shift: tuple

    def compose(self, group: IsoGroup, other: "Similitude") -> "Similitude":
        """``self o other``."""
        moved = group.act(self.iso, other.shift)
        return Similitude(group.compose(self.iso, other.iso), tuple(a + b for a, b in zip(moved, self.shift)))

    def inverse(self, group: IsoGroup) -> "Similitude":
        inv = group.inverse[self.iso]
        return Similitude(inv, tuple(-x for x in group.act(inv, self.shift)))

    def apply_type(self, group: IsoGroup, elements) -> tuple:
        return tuple(sorted(
            (group.compose(self.iso, g), tuple(a + b for a, b in zip(group.act(self.iso, d), self.shift)))
            for g, d in elements
        ))


def canonicalize(elements, group: IsoGroup, modulus: int):
    """Least image of a type under ``(g, d) -> (h g, h d + b)``, ``b in modulus * Z^l``.

    Returns ``(canonical, transform)`` with ``transform`` the similitude
    ``(h, b)`` realising the minimum.
    """
    elements = list(elements)
    if not elements:
        raise ValueError("a type must be non-empty")
    best = None
    for h in range(len(group)):
        moved = [(group.compose(h, g), group.act(h, d)) for g, d in elements]
        anchor = min(d for _, d in moved)
        shift = tuple((x % modulus) - x for x in anchor)
        cand = tuple(sorted((g, tuple(a + b for a, b in zip(d, shift))) for g, d in moved))
        if best is None or cand < best[0]:
            best = (cand, Similitude(h, shift))
    return best


# --------------------------------------------------------------------------
# extraction


@dataclass(frozen=True)
class GdEdge:
    source: int
    target: int
    map: Similitude   # child set = map(target representative), before the 1/n' scaling
    component: tuple  # the raw child component


@dataclass
class GdSystem:
    classes: list                 # class i -> sorted tuple of (g, d)
    edges: list                   # class i -> list of GdEdge
    adjacency: tuple
    ratio_recip: int              # n'
    char: int                     # m'
    kstar: int
    system: IfsSystem = field(repr=False)
    base_transform: Similitude = field(repr=False, default=None)

    @property
    def p(self) -> int:
        return len(self.classes)

    def sizes(self) -> tuple:
        return tuple(len(c) for c in self.classes)


def _decompose(sys, first_level, elements, nprime):
    children = set()
    group = sys.group
    for g, d in elements:
        for gi, bi in first_level:
            moved = group.act(g, bi)
            children.add((group.compose(g, gi), tuple(x + nprime * y for x, y in zip(moved, d))))
    return children


def extract_structure(sys: IfsSystem, kstar: int, class_cap: int = DEFAULT_CLASS_CAP) -> GdSystem:
    """Breadth-first closure of types generated from the ``kstar``-fold system.

    Class 0 is the list of composed maps itself.  Each class is decomposed,
    split into ball-connected components, and every component is matched to a
    class by canonical form.
    """
    if sys.is_degenerate:
        raise DegenerateSystem("all translations vanish; the attractor is a point")
    if kstar < 1:
        raise ValueError("kstar must be at least 1")
    consts = derived_constants(sys)
    delta_sq = consts.delta_sq
    n = sys.n
    group = sys.group
    gram = sys.lattice.gram
    nprime = n ** kstar
    mprime = sys.m ** kstar
    first_level = []
    for w in iter_words(sys.m, kstar):
        aff = compose_word(sys, w)
        first_level.append((aff.iso, aff.trans_coords))
    link = 4 * delta_sq / (n * n)
    # region: |x| <= 3 delta + delta / n', in Gamma' coordinates
    region = delta_sq * (3 + Fraction(1, nprime)) ** 2 * n ** (2 * (kstar - 1))

    root = tuple(sorted(set(first_level)))
    canon_root, lam_root = canonicalize(root, group, nprime)
    classes = [root]
    transforms = [lam_root]  # class representative -> canonical form
    lookup = {canon_root: 0}
    edges = []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        elements = classes[i]
        children = _decompose(sys, first_level, elements, nprime)
        parent_of = {}
        for g, d in elements:
            for gi, bi in first_level:
                key = (group.compose(g, gi), tuple(x + nprime * y for x, y in zip(group.act(g, bi), d)))
                parent_of.setdefault(key, d)
        by_point = {}
        for g, d in children:
            by_point.setdefault(d, []).append((g, d))
        out = []
        for comp_points in clusters(gram, list(by_point), link):
            comp = tuple(sorted(e for p in comp_points for e in by_point[p]))
            anchor = parent_of[comp[0]]
            for _, d in comp:
                rel = tuple(x - nprime * y for x, y in zip(d, anchor))
                if quad_form(gram, rel) > region:
                    raise RegionEscape(
                        f"type element {rel} leaves the working region; separation depth {kstar} is too small"
                    )
            canon, lam = canonicalize(comp, group, nprime)
            j = lookup.get(canon)
            if j is None:
                if len(classes) >= class_cap:
                    raise CapExceeded(f"more than {class_cap} type classes")
                j = len(classes)
                lookup[canon] = j
                classes.append(canon)
                transforms.append(Similitude(0, (0,) * sys.rank))
                queue.append(j)
            # comp = lam^-1(canon) = lam^-1(transforms[j](rep_j))
            mu = lam.inverse(group).compose(group, transforms[j])
            assert mu.apply_type(group, classes[j]) == comp
            out.append(GdEdge(i, j, mu, comp))
        edges.append(out)
    p = len(classes)
    adjacency = tuple(tuple(sum(1 for e in edges[i] if e.target == j) for j in range(p)) for i in range(p))
    return GdSystem(classes, edges, adjacency, nprime, mprime, kstar, sys, lam_root)


@dataclass(frozen=True)
class CharacteristicCheck:
    ok: bool
    sizes: tuple
    failed_row: Optional[int] = None

    def __bool__(self):
        return self.ok


def verify_characteristic(gd: GdSystem) -> CharacteristicCheck:
    """Check ``m' #D_i = sum_j a_ij #D_j`` for every class."""
    sizes = gd.sizes()
    for i, row in enumerate(gd.adjacency):
        if gd.char * sizes[i] != sum(a * s for a, s in zip(row, sizes)):
            return CharacteristicCheck(False, sizes, i)
    return CharacteristicCheck(True, sizes)


def components_disjoint(gd: GdSystem) -> bool:
    """Children of every class are pairwise separated (no touching balls)."""
    gram = gd.system.lattice.gram
    n = gd.system.n
    link = 4 * derived_constants(gd.system).delta_sq / (n * n)
    for out in gd.edges:
        pts = [(d, k) for k, e in enumerate(out) for _, d in e.component]
        for a in range(len(pts)):
            for b in range(a + 1, len(pts)):
                (da, ka), (db, kb) = pts[a], pts[b]
                if ka != kb and quad_form(gram, tuple(x - y for x, y in zip(da, db))) <= link:
                    return False
    return True


def gd_to_dict(gd: GdSystem) -> dict:
    return {
        "kstar": gd.kstar,
        "ratio": f"1/{gd.ratio_recip}",
        "characteristic": gd.char,
        "classes": [[{"g": g, "d": list(d)} for g, d in cls] for cls in gd.classes],
        "adjacency": [list(r) for r in gd.adjacency],
        "edges": [
            [{"target": e.target, "iso": e.map.iso, "shift": list(e.map.shift)} for e in out]
            for out in gd.edges
        ],
    }


def gd_to_dot(gd: GdSystem) -> str:
    lines = ["digraph types {"]
    for i, cls in enumerate(gd.classes):
        lines.append(f'  D{i} [label="D{i + 1} ({len(cls)})"];')
    for i, row in enumerate(gd.adjacency):
        for j, a in enumerate(row):
            if a:
                lines.append(f'  D{i} -> D{j} [label="{a}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
