import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bilipfrac.errors import DimensionMismatch, NonIsometry
from bilipfrac.fixtures import REFLECTION, ROTATION_60, triangular_group, triangular_lattice
from bilipfrac.lattice import (
    LatticeModel,
    as_fraction,
    determinant,
    enumerate_ball,
    format_fraction,
    group_closure,
    points_in_ellipsoid,
    quad_form,
    trivial_group,
)


def test_as_fraction_parses_strings_and_ints():
    assert as_fraction("7/10") == Fraction(7, 10)
    assert as_fraction(3) == Fraction(3)
    assert format_fraction(Fraction(-1, 10)) == "-1/10"
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(TypeError):
        as_fraction(True)


def test_gram_from_ambient_basis():
    lat = LatticeModel.from_ambient([["1/10"]])
    assert lat.gram == ((Fraction(1, 100),),)
    assert lat.to_ambient((7,)) == (Fraction(7, 10),)


def test_rejects_bad_gram():
    with pytest.raises(ValueError):
        LatticeModel(((1, 2), (2, 1)))  # indefinite
    with pytest.raises(ValueError):
        LatticeModel(((1, 0), (1, 1)))  # not symmetric
    with pytest.raises(DimensionMismatch):
        LatticeModel(((1, 0),))


def test_ambient_basis_must_match_gram():
    with pytest.raises(ValueError):
        LatticeModel(((1,),), ambient_basis=(("1/2",),))


def test_determinant_small():
    assert determinant([[2, 1], [1, 1]]) == 1
    assert determinant([[0, 1], [1, 0]]) == -1


def test_triangular_group_has_twelve_elements():
    g = triangular_group()
    assert len(g) == 12
    lat = triangular_lattice()
    assert all(lat.is_isometry(e.matrix) for e in g.elements)
    # identity first, every element has an inverse in the table
    assert g.elements[0].matrix == ((1, 0), (0, 1))
    assert all(g.compose(h, g.inverse[h]) == 0 for h in range(len(g)))


def test_group_words_rebuild_elements():
    g = triangular_group()
    for h in range(len(g)):
        assert g.from_word(g.words[h]) == h


def test_group_closure_rejects_non_isometry():
    with pytest.raises(NonIsometry):
        group_closure(triangular_lattice(), [((1, 1), (0, 1))])


def test_sign_group():
    lat = LatticeModel.scaled_integers(5)
    g = group_closure(lat, [((-1,),)])
    assert len(g) == 2
    assert g.act(1, (3,)) == (-3,)
    assert trivial_group(lat).is_trivial


def test_rotation_composition_order():
    g = triangular_group()
    r = g.handle(ROTATION_60)
    f = g.handle(REFLECTION)
    x = (2, -1)
    assert g.act(g.compose(r, f), x) == g.act(r, g.act(f, x))


def _brute_ball(gram, center, radius_sq, box):
    l = len(gram)
    out = []
    for x in itertools.product(range(-box, box + 1), repeat=l):
        d = [Fraction(a) - Fraction(c) for a, c in zip(x, center)]
        if quad_form(gram, d) <= radius_sq:
            out.append(tuple(x))
    return sorted(out)


@given(
    st.sampled_from([((1,),), ((Fraction(1, 4),),), ((1, Fraction(1, 2)), (Fraction(1, 2), 1)), ((2, 1), (1, 3))]),
    st.fractions(min_value=0, max_value=6, max_denominator=7),
    st.data(),
)
def test_ellipsoid_matches_brute_force(gram, radius_sq, data):
    l = len(gram)
    center = tuple(data.draw(st.fractions(min_value=-2, max_value=2, max_denominator=5)) for _ in range(l))
    box = 12
    got = points_in_ellipsoid(gram, center, radius_sq)
    assert got == _brute_ball(gram, center, radius_sq, box)


def test_enumerate_ball_counts():
    # Z/10, |x| <= 2/5: the nine points -4..4
    lat = LatticeModel.scaled_integers(10)
    assert len(enumerate_ball(lat, Fraction(4, 25))) == 9
    # triangular lattice, unit ball: origin plus six neighbours
    assert len(enumerate_ball(triangular_lattice(), 1)) == 7
