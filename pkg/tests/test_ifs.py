from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bilipfrac import fixtures
from bilipfrac.errors import CapExceeded, DimensionMismatch
from bilipfrac.ifs import IfsSystem, compose_affine, compose_word, derived_constants, point_cloud
from bilipfrac.lattice import LatticeModel, trivial_group


def _apply_direct(sys, word, x):
    """Apply S_{w1} o ... o S_{wk} to a point by plain rational arithmetic."""
    for letter in reversed(word):
        g, b = sys.maps[letter - 1]
        moved = sys.group.act(g, x)
        x = tuple(Fraction(a, sys.n) + c for a, c in zip(moved, b))
    return x


SYSTEMS = [fixtures.cantor(), fixtures.flipped_145(), fixtures.seven_eight(), fixtures.triangle_system()]


@given(st.sampled_from(SYSTEMS), st.data())
def test_compose_word_matches_direct_application(sys, data):
    k = data.draw(st.integers(1, 4))
    word = tuple(data.draw(st.integers(1, sys.m)) for _ in range(k))
    x = tuple(data.draw(st.fractions(min_value=-3, max_value=3, max_denominator=9)) for _ in range(sys.rank))
    aff = compose_word(sys, word)
    moved = sys.group.act(aff.iso, x)
    t = aff.translation(sys.n)
    via_affine = tuple(Fraction(a, sys.n ** k) + c for a, c in zip(moved, t))
    assert via_affine == _apply_direct(sys, word, x)


@given(st.sampled_from(SYSTEMS), st.data())
def test_compose_affine_is_concatenation(sys, data):
    w1 = tuple(data.draw(st.integers(1, sys.m)) for _ in range(data.draw(st.integers(1, 3))))
    w2 = tuple(data.draw(st.integers(1, sys.m)) for _ in range(data.draw(st.integers(1, 3))))
    assert compose_affine(sys, compose_word(sys, w1), compose_word(sys, w2)) == compose_word(sys, w1 + w2)


def test_cantor_constants():
    c = derived_constants(fixtures.cantor())
    # max |b| = 2/3, delta = (2/3) * 3/2 = 1, M = 2 * (2/3) / 2
    assert c.delta_sq == 1
    assert c.m_bound_sq == Fraction(4, 9)
    assert c.dimension == pytest.approx(0.6309297535714574)


def test_point_cloud_cantor_depth_two():
    sys = fixtures.cantor()
    pts = [sys.lattice.to_ambient(x) for _, x in point_cloud(sys, 2)]
    assert pts == [(0,), (Fraction(2, 9),), (Fraction(2, 3),), (Fraction(8, 9),)]


def test_point_cloud_cap():
    with pytest.raises(CapExceeded):
        point_cloud(fixtures.cantor(), 10, cap=100)


def test_bad_systems():
    lat = LatticeModel.scaled_integers(2)
    g = trivial_group(lat)
    with pytest.raises(ValueError):
        IfsSystem(lat, g, 1, ((0, (0,)),))
    with pytest.raises(DimensionMismatch):
        IfsSystem(lat, g, 2, ((0, (0, 1)),))
    with pytest.raises(ValueError):
        IfsSystem(lat, g, 2, ((3, (0,)),))
    with pytest.raises(ValueError):
        compose_word(fixtures.cantor(), (3,))


def test_duplicates_and_degenerate():
    sys = fixtures.integer_line_system(3, 3, (0, 2, 2))
    assert sys.duplicate_maps() == [(2, 3)]
    assert fixtures.single_point().is_degenerate
