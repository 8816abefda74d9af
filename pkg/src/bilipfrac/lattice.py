"""Exact arithmetic on a discrete additive group given by a rational Gram matrix.

Points are integer coordinate tuples with respect to a fixed basis of the
group; isometries are integer matrices acting on those coordinates.  Nothing
here ever touches floating point, so triangular lattices (whose ambient
coordinates are irrational) are handled through their Gram matrix alone.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, ceil, isqrt
from typing import NamedTuple, Optional, Sequence

from .errors import CapExceeded, DimensionMismatch, NonIsometry

Matrix = tuple  # tuple of row tuples


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings into a reduced Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_fraction(value: Fraction) -> str:
    value = as_fraction(value)
    return f"{value.numerator}/{value.denominator}"


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def mat_vec(a: Matrix, x: Sequence) -> tuple:
    return tuple(sum(r * v for r, v in zip(row, x)) for row in a)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def identity(l: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(l)) for i in range(l))


def determinant(a) -> Fraction:
    """Exact determinant by fraction-free-ish Gaussian elimination."""
    m = [[as_fraction(x) for x in row] for row in a]
    n = len(m)
    det = Fraction(1)
    for i in range(n):
        pivot = next((r for r in range(i, n) if m[r][i] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != i:
            m[i], m[pivot] = m[pivot], m[i]
            det = -det
        det *= m[i][i]
        for r in range(i + 1, n):
            f = m[r][i] / m[i][i]
            if f:
                for c in range(i, n):
                    m[r][c] -= f * m[i][c]
    return det


def add(x, y):
    return tuple(a + b for a, b in zip(x, y))


def sub(x, y):
    return tuple(a - b for a, b in zip(x, y))


def scale(k, x):
    return tuple(k * a for a in x)


@dataclass(frozen=True)
class LatticeModel:
    """A rank-``l`` lattice described by the Gram matrix of a chosen basis.

    ``ambient_basis`` (columns of rationals) is optional; when it is given the
    Gram matrix is computed from it and must agree with ``gram``.
    """

    gram: Matrix
    ambient_basis: Optional[Matrix] = None
    rank: int = field(init=False)

    def __post_init__(self):
        gram = tuple(tuple(as_fraction(x) for x in row) for row in self.gram)
        l = len(gram)
        if l == 0 or any(len(row) != l for row in gram):
            raise DimensionMismatch("Gram matrix must be square and non-empty")
        if any(gram[i][j] != gram[j][i] for i in range(l) for j in range(l)):
            raise ValueError("Gram matrix must be symmetric")
        for k in range(1, l + 1):
            if determinant([row[:k] for row in gram[:k]]) <= 0:
                raise ValueError("Gram matrix must be positive definite")
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "rank", l)
        if self.ambient_basis is not None:
            cols = tuple(tuple(as_fraction(x) for x in col) for col in self.ambient_basis)
            if len(cols) != l:
                raise DimensionMismatch("ambient basis needs one column per rank")
            computed = tuple(
                tuple(sum(a * b for a, b in zip(cols[i], cols[j])) for j in range(l))
                for i in range(l)
            )
            if computed != gram:
                raise ValueError("ambient basis does not match the Gram matrix")
            object.__setattr__(self, "ambient_basis", cols)

    @classmethod
    def from_ambient(cls, columns) -> "LatticeModel":
        cols = tuple(tuple(as_fraction(x) for x in col) for col in columns)
        l = len(cols)
        gram = tuple(
            tuple(sum(a * b for a, b in zip(cols[i], cols[j])) for j in range(l)) for i in range(l)
        )
        return cls(gram, cols)

    @classmethod
    def scaled_integers(cls, denominator: int = 1, rank: int = 1) -> "LatticeModel":
        """``(1/denominator) Z^rank`` with its standard basis."""
        step = Fraction(1, denominator)
        cols = tuple(tuple(step if i == j else Fraction(0) for i in range(rank)) for j in range(rank))
        return cls.from_ambient(cols)

    def to_ambient(self, coords) -> tuple:
        if self.ambient_basis is None:
            raise ValueError("lattice has no rational ambient basis")
        l = len(self.ambient_basis[0])
        return tuple(
            sum(as_fraction(c) * col[k] for c, col in zip(coords, self.ambient_basis)) for k in range(l)
        )

    def check_point(self, x) -> None:
        if len(x) != self.rank:
            raise DimensionMismatch(f"expected {self.rank} coordinates, got {len(x)}")

    def is_isometry(self, p: Matrix) -> bool:
        if len(p) != self.rank or any(len(row) != self.rank for row in p):
            return False
        if mat_mul(mat_mul(transpose(p), self.gram), p) != self.gram:
            return False
        return abs(determinant(p)) == 1


def norm_sq(m: LatticeModel, x) -> Fraction:
    """Squared length ``x^T Q x`` of a point given in lattice coordinates."""
    m.check_point(x)
    g = m.gram
    l = m.rank
    return sum((x[i] * g[i][j] * x[j] for i in range(l) for j in range(l)), Fraction(0))


def quad_form(gram, x) -> Fraction:
    l = len(gram)
    return sum((x[i] * gram[i][j] * x[j] for i in range(l) for j in range(l)), Fraction(0))


def _ldl(gram):
    """Return (d, u) with Q(y) = sum_i d_i (y_i + sum_{j>i} u_ij y_j)^2."""
    l = len(gram)
    q = [[Fraction(x) for x in row] for row in gram]
    for i in range(l):
        for j in range(i + 1, l):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, l):
            for j in range(k, l):
                q[k][j] -= q[k][i] * q[i][j]
    d = [q[i][i] for i in range(l)]
    u = [[q[i][j] if j > i else Fraction(0) for j in range(l)] for i in range(l)]
    return d, u


def points_in_ellipsoid(gram, center, radius_sq) -> list:
    """All integer ``x`` with ``(x-center)^T Q (x-center) <= radius_sq``.

    Recursive coordinate bounding from the completed-square form, in exact
    rationals; returned in lexicographic order.
    """
    radius_sq = as_fraction(radius_sq)
    if radius_sq < 0:
        return []
    l = len(gram)
    center = [as_fraction(c) for c in center]
    d, u = _ldl(gram)
    out = []
    y = [Fraction(0)] * l
    x = [0] * l

    def recurse(i, budget):
        shift = sum((u[i][j] * y[j] for j in range(i + 1, l)), Fraction(0))
        z = center[i] - shift
        ratio = budget / d[i]
        reach = isqrt(ratio.numerator // ratio.denominator) + 1
        for xi in range(floor(z) - reach, ceil(z) + reach + 1):
            t = xi - z
            used = d[i] * t * t
            if used > budget:
                continue
            x[i] = xi
            y[i] = xi - center[i]
            if i == 0:
                out.append(tuple(x))
            else:
                recurse(i - 1, budget - used)

    recurse(l - 1, radius_sq)
    out.sort()
    return out


def enumerate_ball(m: LatticeModel, radius_sq) -> list:
    """Lattice points with ``norm_sq <= radius_sq``, lexicographically ordered."""
    radius_sq = as_fraction(radius_sq)
    if radius_sq < 0:
        raise ValueError("radius_sq must be non-negative")
    return points_in_ellipsoid(m.gram, (0,) * m.rank, radius_sq)


class Isometry(NamedTuple):
    id: int
    matrix: Matrix


class IsoGroup:
    """A finite group of lattice isometries with its composition table.

    Handle 0 is always the identity.  ``compose(a, b)`` is the handle of the
    map ``x -> a(b(x))``.
    """

    def __init__(self, lattice: LatticeModel, matrices, words, generators=()):
        self.lattice = lattice
        self.elements = tuple(Isometry(i, mat) for i, mat in enumerate(matrices))
        self.words = tuple(tuple(w) for w in words)
        self.generators = tuple(generators)
        self._index = {mat: i for i, mat in enumerate(matrices)}
        n = len(matrices)
        self.cayley = tuple(
            tuple(self._index[mat_mul(matrices[a], matrices[b])] for b in range(n)) for a in range(n)
        )
        self.inverse = tuple(row.index(0) for row in self.cayley)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"IsoGroup(order={len(self)}, rank={self.lattice.rank})"

    @property
    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def matrix(self, h: int) -> Matrix:
        return self.elements[h].matrix

    def handle(self, matrix) -> int:
        key = tuple(tuple(int(v) for v in row) for row in matrix)
        try:
            return self._index[key]
        except KeyError:
            raise KeyError("matrix is not an element of this group") from None

    def compose(self, a: int, b: int) -> int:
        return self.cayley[a][b]

    def act(self, h: int, x) -> tuple:
        return mat_vec(self.elements[h].matrix, x)

    def from_word(self, word) -> int:
        h = 0
        for letter in word:
            h = self.cayley[h][self._gen_handles[letter]]
        return h

    @property
    def _gen_handles(self):
        return tuple(self._index[g] for g in self.generators)


def group_closure(m: LatticeModel, generators, cap: int = 4096) -> IsoGroup:
    """Close a set of integer isometry matrices under composition.

    Elements are discovered breadth-first from the identity, so each keeps
    its shortest generator word (ties broken by generator order).
    """
    gens = []
    for g in generators:
        mat = tuple(tuple(int(v) for v in row) for row in g)
        if not m.is_isometry(mat):
            raise NonIsometry(f"generator {mat} does not preserve the Gram form")
        gens.append(mat)
    ident = identity(m.rank)
    matrices = [ident]
    words = [()]
    seen = {ident: 0}
    queue = deque([0])
    while queue:
        h = queue.popleft()
        for gi, g in enumerate(gens):
            prod = mat_mul(matrices[h], g)
            if prod not in seen:
                if len(matrices) >= cap:
                    raise CapExceeded(f"group closure exceeded {cap} elements")
                seen[prod] = len(matrices)
                matrices.append(prod)
                words.append(words[h] + (gi,))
                queue.append(seen[prod])
    return IsoGroup(m, matrices, words, gens)


def trivial_group(m: LatticeModel) -> IsoGroup:
    return group_closure(m, [])
