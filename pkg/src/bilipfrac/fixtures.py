"""Ready-made systems used by tests, benchmarks and the documentation."""

from __future__ import annotations

from fractions import Fraction

from .lattice import LatticeModel, group_closure, trivial_group
from .ifs import IfsSystem


def integer_line_system(n: int, denominator: int, coords, signs=None) -> IfsSystem:
    """Maps ``x -> s_i x / n + c_i / denominator`` on the line.

    ``signs`` defaults to all ``+1``; a ``-1`` entry needs the group ``{+-id}``.
    """
    lat = LatticeModel.scaled_integers(denominator)
    if signs is None or all(s == 1 for s in signs):
        group = trivial_group(lat)
        maps = tuple((0, (c,)) for c in coords)
    else:
        group = group_closure(lat, [((-1,),)])
        neg = group.handle(((-1,),))
        maps = tuple((0 if s == 1 else neg, (c,)) for s, c in zip(signs, coords))
    return IfsSystem(lat, group, n, maps)


def cantor() -> IfsSystem:
    """Middle-thirds Cantor set, ``b in {0, 2/3}``."""
    return integer_line_system(3, 3, (0, 2))


def seven_eight() -> IfsSystem:
    """``E = E/5 u (E/5 + 7/10) u (E/5 + 8/10)`` on the lattice ``Z/10``."""
    return integer_line_system(5, 10, (0, 7, 8))


def digits_135() -> IfsSystem:
    """Ratio 1/5 with translations ``{0, 2/5, 4/5}``."""
    return integer_line_system(5, 5, (0, 2, 4))


def digits_145() -> IfsSystem:
    """Ratio 1/5 with translations ``{0, 3/5, 4/5}``."""
    return integer_line_system(5, 5, (0, 3, 4))


def flipped_145() -> IfsSystem:
    """``F = F/5 u (-F+4)/5 u (F+4)/5``, which needs the sign group."""
    return integer_line_system(5, 5, (0, 4, 4), signs=(1, -1, 1))


def unit_interval() -> IfsSystem:
    """``[0, 1]`` as the attractor of ``x/2`` and ``x/2 + 1/2``."""
    return integer_line_system(2, 2, (0, 1))


def overlapping_interval() -> IfsSystem:
    """``n = 2``, ``b in {0, 1, 1/2}``: ``S1 S2 = S3 S1`` and the attractor is ``[0, 2]``."""
    return integer_line_system(2, 2, (0, 2, 1))


def overlapping_dust() -> IfsSystem:
    """``n = 5``, ``b in {0, 1, 1/5}``: totally disconnected but ``S1 S2 = S3 S1``."""
    return integer_line_system(5, 5, (0, 5, 1))


def single_point() -> IfsSystem:
    return integer_line_system(2, 1, (0,))


TRIANGULAR_GRAM = ((Fraction(1), Fraction(1, 2)), (Fraction(1, 2), Fraction(1)))
ROTATION_60 = ((0, -1), (1, 1))
REFLECTION = ((1, 1), (0, -1))


def triangular_lattice() -> LatticeModel:
    """Lattice spanned by ``(1, 0)`` and ``(1/2, sqrt(3)/2)``, Gram matrix only."""
    return LatticeModel(TRIANGULAR_GRAM)


def triangular_group():
    """The 12-element symmetry group of the triangular lattice."""
    return group_closure(triangular_lattice(), [ROTATION_60, REFLECTION])


def triangle_system() -> IfsSystem:
    """Ratio 1/3 on the triangular lattice, three corner pieces, trivial group."""
    lat = triangular_lattice()
    return IfsSystem(lat, trivial_group(lat), 3, ((0, (0, 0)), (0, (2, 0)), (0, (0, 2))))
