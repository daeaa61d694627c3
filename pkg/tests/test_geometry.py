import math

import numpy as np
import pytest

from dnfwmi.errors import DegenerateChordError
from dnfwmi.geometry import (LiftedBody, Polytope, bounding_box, chebyshev_center, chord,
                             feasible_interior, member, member_many)
from dnfwmi.weights import PolyWeight


def box_polytope(box):
    box = np.asarray(box, dtype=float)
    n = len(box)
    A = np.vstack([np.eye(n), -np.eye(n)])
    return Polytope(A, np.concatenate([box[:, 1], -box[:, 0]]))


def triangle():
    # x >= 0, y >= 0, x + y <= 1
    return Polytope([[-1, 0], [0, -1], [1, 1]], [0, 0, 1])


def test_polytope_rejects_zero_row():
    with pytest.raises(ValueError):
        Polytope([[0, 0]], [1])


def test_chebyshev_center_of_square():
    x, depth = chebyshev_center(box_polytope([[0, 2], [0, 2]]))
    assert np.allclose(x, [1, 1])
    assert depth == pytest.approx(1.0)


def test_chebyshev_center_of_triangle():
    # inradius of the right triangle with legs 1 is (2 - sqrt 2) / 2
    _, depth = chebyshev_center(triangle())
    assert depth == pytest.approx((2 - math.sqrt(2)) / 2, rel=1e-7)


def test_feasible_interior_none_for_empty_and_flat():
    empty = Polytope([[1, 0], [-1, 0], [0, 1], [0, -1]], [-1, -1, 1, 1])
    flat = Polytope([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, -1, 1, 1])
    assert feasible_interior(empty) is None
    assert feasible_interior(flat) is None
    assert feasible_interior(triangle()) is not None


def test_bounding_box_axis_aligned_and_general():
    assert np.allclose(bounding_box(box_polytope([[1, 3], [-2, 5]])), [[1, 3], [-2, 5]])
    assert np.allclose(bounding_box(triangle()), [[0, 1], [0, 1]])
    diamond = Polytope([[1, 1], [1, -1], [-1, 1], [-1, -1]], [1, 1, 1, 1])
    assert np.allclose(bounding_box(diamond), [[-1, 1], [-1, 1]])


def test_bounding_box_empty():
    assert bounding_box(box_polytope([[2, 1], [0, 1]])) is None


def test_restrict_refuses_coupled_rows():
    with pytest.raises(ValueError):
        triangle().restrict([0])
    P = box_polytope([[0, 1], [2, 3]]).restrict([1])
    assert np.allclose(bounding_box(P), [[2, 3]])


def test_member():
    B = LiftedBody(box_polytope([[0, 4]]), PolyWeight([(1.0, {0: 1})]))
    assert member(B, [2.0, 1.5])
    assert not member(B, [2.0, 2.5])
    assert not member(B, [2.0, -0.1])
    assert not member(B, [5.0, 0.0])
    got = member_many(B, [[2, 1.5], [2, 2.5], [5, 0], [1, 1]])
    assert got.tolist() == [True, False, False, True]


def test_chord_constant_weight_horizontal():
    B = LiftedBody(box_polytope([[-1, 1]]), PolyWeight.constant(1.0))
    assert chord(B, [0.0, 0.5], [1.0, 0.0]) == pytest.approx((-1.0, 1.0))


def test_chord_linear_weight_vertical():
    # weight x at x = 2: d ranges over [0, 2], so from d = 1 the chord is [-1, 1]
    B = LiftedBody(box_polytope([[0, 4]]), PolyWeight([(1.0, {0: 1})]))
    assert chord(B, [2.0, 1.0], [0.0, 1.0]) == pytest.approx((-1.0, 1.0), abs=1e-9)


def test_chord_concave_surface_diagonal():
    # weight 4 - x^2; along (s, s) the surface is hit at s^2 + s = 4
    B = LiftedBody(box_polytope([[-2, 2]]), PolyWeight([(4.0, {}), (-1.0, {0: 2})]))
    u = np.array([1.0, 1.0]) / math.sqrt(2)
    lo, hi = chord(B, [0.0, 0.0], u)
    assert lo == pytest.approx(0.0, abs=1e-9)
    assert hi == pytest.approx(math.sqrt(2) * (math.sqrt(17) - 1) / 2, abs=1e-8)
    assert chord(B, [0.0, 0.0], [1.0, 0.0]) == pytest.approx((-2.0, 2.0), abs=1e-9)


def test_chord_degenerate():
    B = LiftedBody(box_polytope([[0, 4]]), PolyWeight([(1.0, {0: 1})]))
    # from the apex corner (4, 4) moving right leaves immediately
    with pytest.raises(DegenerateChordError):
        chord(B, [4.0, 4.0], [1.0, 0.0])
