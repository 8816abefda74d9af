"""Self-similar systems whose maps have the form ``S(x) = g(x)/n + b``.

Words are tuples of 1-based map indices, matching the usual notation
``S_{i1} o ... o S_{ik}``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .config import enumeration_cap
from .errors import CapExceeded, DimensionMismatch
from .lattice import IsoGroup, LatticeModel, add, norm_sq, scale


@dataclass(frozen=True)
class AffineData:
    """Exact form of ``S_w``: ``x -> iso(x)/n^k + trans_coords / n^(k-1)``.

    The translation lives in the refined lattice ``Gamma / n^(k-1)`` with
    ``k = trans_scale``.
    """

    iso: int
    trans_coords: tuple
    trans_scale: int

    def translation(self, n: int) -> tuple:
        den = n ** (self.trans_scale - 1)
        return tuple(Fraction(c, den) for c in self.trans_coords)


@dataclass(frozen=True)
class DerivedConstants:
    delta_sq: Fraction
    m_bound_sq: Fraction
    dimension: float


@dataclass(frozen=True)
class IfsSystem:
    lattice: LatticeModel
    group: IsoGroup
    n: int
    maps: tuple  # ((g_handle, b_coords), ...)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not self.maps:
            raise ValueError("a system needs at least one map")
        maps = []
        for g, b in self.maps:
            if not 0 <= g < len(self.group):
                raise ValueError(f"isometry handle {g} out of range")
            b = tuple(int(v) for v in b)
            if len(b) != self.lattice.rank:
                raise DimensionMismatch("translation has wrong dimension")
            maps.append((int(g), b))
        object.__setattr__(self, "maps", tuple(maps))

    @property
    def m(self) -> int:
        return len(self.maps)

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def is_degenerate(self) -> bool:
        """All translations vanish, so the attractor is the single point 0."""
        return all(not any(b) for _, b in self.maps)

    def duplicate_maps(self) -> list:
        """Pairs ``(i, j)``, ``i < j`` (1-based) of identical maps."""
        out = []
        for i, j in itertools.combinations(range(self.m), 2):
            if self.maps[i] == self.maps[j]:
                out.append((i + 1, j + 1))
        return out

    def check_word(self, w) -> tuple:
        w = tuple(w)
        if any(not 1 <= i <= self.m for i in w):
            raise ValueError(f"word {w} has letters outside 1..{self.m}")
        return w


def compose_word(sys: IfsSystem, w) -> AffineData:
    """Exact affine data of ``S_{w1} o ... o S_{wk}``."""
    w = sys.check_word(w)
    if not w:
        raise ValueError("word must be non-empty")
    iso = 0
    trans = (0,) * sys.rank
    for letter in w:
        g, b = sys.maps[letter - 1]
        # t_k = n * t_{k-1} + (g_{i1}...g_{i(k-1)}) b_{ik}
        trans = add(scale(sys.n, trans), sys.group.act(iso, b))
        iso = sys.group.compose(iso, g)
    return AffineData(iso, trans, len(w))


def compose_affine(sys: IfsSystem, first: AffineData, second: AffineData) -> AffineData:
    """Affine data of ``first o second`` (word concatenation)."""
    k2 = second.trans_scale
    moved = sys.group.act(first.iso, second.trans_coords)
    trans = add(scale(sys.n ** k2, first.trans_coords), moved)
    return AffineData(sys.group.compose(first.iso, second.iso), trans, first.trans_scale + k2)


def max_b_norm_sq(sys: IfsSystem) -> Fraction:
    return max(norm_sq(sys.lattice, b) for _, b in sys.maps)


def derived_constants(sys: IfsSystem) -> DerivedConstants:
    """Attractor radius ``delta`` and overlap-graph bound ``M``, both squared."""
    bmax = max_b_norm_sq(sys)
    n = sys.n
    delta_sq = bmax * Fraction(n, n - 1) ** 2
    m_bound_sq = 4 * bmax / Fraction((n - 1) ** 2)
    return DerivedConstants(delta_sq, m_bound_sq, math.log(sys.m) / math.log(n))


def iter_words(m: int, length: int):
    return itertools.product(range(1, m + 1), repeat=length)


def point_cloud(sys: IfsSystem, depth: int, cap=None) -> list:
    """``(word, S_w(0))`` for every word of the given length, lexicographically."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    cap = enumeration_cap(cap)
    if sys.m ** depth > cap:
        raise CapExceeded(f"{sys.m}^{depth} points exceed cap {cap}")
    out = []
    for w in iter_words(sys.m, depth):
        aff = compose_word(sys, w)
        out.append((w, aff.translation(sys.n)))
    return out
