from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bilipfrac import fixtures
from bilipfrac.errors import CapExceeded
from bilipfrac.ifs import IfsSystem, compose_word
from bilipfrac.lattice import LatticeModel, group_closure, trivial_group
from bilipfrac.overlap import (
    brute_force_overlap,
    build_state_graph,
    detect_complete_overlaps,
    state_graph_to_dot,
    witness_is_valid,
)


@pytest.mark.parametrize("name", ["cantor", "seven_eight", "digits_135", "digits_145", "flipped_145",
                                  "unit_interval", "triangle_system"])
def test_overlap_free_fixtures(name):
    assert not detect_complete_overlaps(getattr(fixtures, name)()).overlaps


@pytest.mark.parametrize("name", ["overlapping_interval", "overlapping_dust"])
def test_overlapping_fixtures(name):
    sys = getattr(fixtures, name)()
    v = detect_complete_overlaps(sys)
    assert v.overlaps
    assert v.witness == ((1, 2), (3, 1))
    assert witness_is_valid(sys, v.witness)
    assert str(v) == "Overlaps (1, 2) ~ (3, 1)"


def test_duplicate_maps_are_length_one_witnesses():
    sys = fixtures.integer_line_system(3, 3, (0, 2, 2))
    v = detect_complete_overlaps(sys)
    assert v.witness == ((2,), (3,))


def test_state_graph_seven_eight():
    g = build_state_graph(fixtures.seven_eight())
    assert g.m_bound_sq == Fraction(4, 25)
    assert len(g.points) == 9
    lat = g.system.lattice
    originals = sorted({lat.to_ambient(g.vertices[k][0]) for k in g.originals})
    assert originals == [(Fraction(-1, 10),), (Fraction(1, 10),)]
    assert [g.vertices[k][0] for k in g.boundary] == [(0,)]
    dot = state_graph_to_dot(g)
    assert dot.startswith("digraph") and "shape=box" in dot


def test_state_graph_cap():
    with pytest.raises(CapExceeded):
        build_state_graph(fixtures.triangle_system(), cap=5)


def _random_system(data):
    l = data.draw(st.sampled_from([1, 2]))
    n = data.draw(st.integers(2, 5))
    m = data.draw(st.integers(2, 4))
    if l == 1:
        lat = LatticeModel.scaled_integers(1)
        group = data.draw(st.sampled_from([trivial_group(lat), group_closure(lat, [((-1,),)])]))
    else:
        lat = LatticeModel(((1, 0), (0, 1)))
        group = data.draw(st.sampled_from([trivial_group(lat), group_closure(lat, [((0, -1), (1, 0))])]))
    maps = []
    for _ in range(m):
        g = data.draw(st.integers(0, len(group) - 1))
        b = tuple(data.draw(st.integers(-n, n)) for _ in range(l))
        maps.append((g, b))
    return IfsSystem(lat, group, n, tuple(maps))


@settings(max_examples=100)
@given(st.data())
def test_detector_agrees_with_brute_force(data):
    sys = _random_system(data)
    oracle = brute_force_overlap(sys, 4)
    verdict = detect_complete_overlaps(sys)
    if oracle.overlaps:
        assert verdict.overlaps
        # the search is breadth first, so its witness is no longer than the oracle's
        assert len(verdict.witness[0]) <= len(oracle.witness[0])
    if verdict.overlaps:
        assert witness_is_valid(sys, verdict.witness)
        a, b = verdict.witness
        assert a[0] != b[0] and compose_word(sys, a) == compose_word(sys, b)
