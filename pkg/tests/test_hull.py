import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biplotmotion.hull import convex_hull, point_in_polygon

from .oracles import brute_hull


def test_square_with_center():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
    h = convex_hull(pts)
    assert {tuple(v) for v in h} == {(0, 0), (1, 0), (1, 1), (0, 1)}
    x, y = h[:, 0], h[:, 1]
    assert 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) > 0  # CCW


def test_passthrough_cases():
    assert convex_hull([(0, 0), (1, 1)]) is None
    assert convex_hull([(0, 0)]) is None
    assert convex_hull([(0, 0), (1, 1), (2, 2), (3, 3)]) is None
    assert convex_hull([(1, 1), (1, 1), (1, 1)]) is None


def test_collinear_boundary_points_dropped():
    h = convex_hull([(0, 0), (1, 0), (2, 0), (2, 2), (0, 2)])
    assert len(h) == 4


@pytest.mark.parametrize("seed", range(10))
def test_random_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(50, 2))
    h = convex_hull(P)
    succ = brute_hull(P)
    verts = [tuple(P[i]) for i in succ]
    assert {tuple(v) for v in h} == set(verts)
    idx = {tuple(p): i for i, p in enumerate(P)}
    for a, b in zip(h, np.roll(h, -1, axis=0)):
        assert succ[idx[tuple(a)]] == idx[tuple(b)]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=1, max_size=30))
def test_hull_properties_on_integer_grids(points):
    P = np.array(points, dtype=float)
    h = convex_hull(P)
    if h is None:
        uniq = np.unique(P, axis=0)
        if len(uniq) >= 3:
            assert np.linalg.matrix_rank(uniq - uniq[0]) < 2
        return
    pset = {tuple(p) for p in P}
    assert all(tuple(v) in pset for v in h)
    for p in P:
        assert point_in_polygon(p, h)


def test_rounded_collinear_points_pass_through(rng):
    for _ in range(20):
        line = np.outer(rng.normal(size=9), rng.normal(size=2)) + rng.normal(size=2)
        assert convex_hull(line) is None


def test_thin_but_real_triangle_kept():
    assert len(convex_hull([(0, 0), (1, 0), (0.5, 1e-4)])) == 3
