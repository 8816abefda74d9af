import pytest
from hypothesis import given, settings, strategies as st

from bilipfrac import _pykernels
from bilipfrac.kernels import BACKEND, compiled_available

pytestmark = pytest.mark.skipif(not compiled_available(), reason="compiled extension not built")


@pytest.fixture(scope="module")
def ck():
    from bilipfrac import _ckernels

    return _ckernels


points = st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), min_size=0, max_size=60, unique=True)


@settings(max_examples=150)
@given(points, st.integers(0, 400), st.sampled_from([((1, 0), (0, 1)), ((2, 1), (1, 2))]))
def test_cluster_labels_parity(ck, pts, threshold, q):
    pts = sorted(pts)
    window = 30
    assert ck.cluster_labels(pts, q, threshold, window) == _pykernels.cluster_labels(pts, q, threshold, window)


@st.composite
def step_tables(draw):
    nv = draw(st.integers(1, 3))
    base = draw(st.integers(2, 5))
    tables = []
    for _ in range(nv):
        steps = []
        for _ in range(draw(st.integers(0, 4))):
            lo = draw(st.integers(0, base))
            hi = lo + draw(st.integers(-1, 2))
            steps.append((draw(st.integers(0, nv - 1)), draw(st.integers(0, 2)), lo, hi,
                          draw(st.integers(0, 3)), draw(st.booleans())))
        tables.append(steps)
    roots = [(v, 0, draw(st.integers(0, 2))) for v in range(nv)]
    return tables, roots, base, draw(st.integers(0, 3))


@settings(max_examples=150)
@given(step_tables())
def test_walk_parity(ck, args):
    tables, roots, base, depth = args
    assert ck.walk_step_tables(tables, roots, base, depth) == _pykernels.walk_step_tables(tables, roots, base, depth)


def test_overflow_falls_back_exactly(ck):
    tables = [[(0, 0, 0, 0, 1, False), (0, 0, 1, 1, 1, False)]]
    base = 2 ** 40
    got = ck.walk_step_tables(tables, [(0, 0, 0)], base, 3)
    assert got == _pykernels.walk_step_tables(tables, [(0, 0, 0)], base, 3)


def test_backend_name():
    assert BACKEND in ("cython", "python")
