import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ap_pusher.geometry import Vec2, cayley_rotate, cayley_solve, perp

reals = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
alphas = st.floats(min_value=-1e4, max_value=1e4, allow_nan=False)
vecs = st.tuples(reals, reals).map(lambda t: Vec2(*t)).filter(lambda z: z.norm() > 1e-6)

J = np.array([[0.0, -1.0], [1.0, 0.0]])


@pytest.mark.parametrize(
    "z, expected",
    [((1, 0), (0, 1)), ((0, 1), (-1, 0)), ((3, -2), (2, 3))],
)
def test_perp_examples(z, expected):
    assert perp(Vec2(*z)) == Vec2(*expected)


def test_vec2_arithmetic_is_vector_arithmetic():
    a, b = Vec2(1.0, 2.0), Vec2(3.0, -1.0)
    assert a + b == Vec2(4.0, 1.0)
    assert a - b == Vec2(-2.0, 3.0)
    assert 2 * a == a * 2 == Vec2(2.0, 4.0)
    assert -a == Vec2(-1.0, -2.0)
    assert a / 2 == Vec2(0.5, 1.0)
    assert a.dot(b) == 1.0
    assert Vec2(3.0, 4.0).norm() == 5.0


def test_cayley_solve_examples():
    assert cayley_solve(0.0, Vec2(1.5, -2.0)) == Vec2(1.5, -2.0)
    # oracle: dense 2x2 solve of (I + J) u = z
    expected = np.linalg.solve(np.eye(2) + J, [1.0, 0.0])
    assert np.allclose(cayley_solve(1.0, Vec2(1.0, 0.0)), expected, atol=1e-15)
    assert np.allclose(expected, [0.5, -0.5])
    assert math.isclose(cayley_solve(3.0, Vec2(1.0, 2.0)).norm(), math.sqrt(5) / math.sqrt(10), rel_tol=1e-15)


def test_cayley_rotate_examples():
    z = Vec2(0.3, -1.7)
    assert cayley_rotate(0.0, z) == z
    expected = np.linalg.solve(np.eye(2) + J, (np.eye(2) - J) @ [1.0, 0.0])
    assert np.allclose(cayley_rotate(1.0, Vec2(1.0, 0.0)), expected, atol=1e-15)
    assert np.allclose(expected, [0.0, -1.0], atol=1e-15)
    for a in (-7.0, 0.2, 1e3):
        assert math.isclose(cayley_rotate(a, Vec2(2.0, 1.0)).norm(), math.sqrt(5), rel_tol=1e-14)


@given(vecs)
def test_perp_isometry_and_involution(z):
    assert math.isclose(perp(z).norm(), z.norm(), rel_tol=1e-15)
    assert perp(perp(z)) == -z
    assert perp(z).dot(z) == pytest.approx(0.0, abs=1e-12 * z.norm2())


@given(alphas, vecs)
def test_cayley_solve_norm_identity(a, z):
    assert cayley_solve(a, z).norm() * math.sqrt(1 + a * a) == pytest.approx(z.norm(), rel=1e-14)


@given(alphas, vecs)
def test_cayley_solve_matches_dense_solve(a, z):
    u = np.linalg.solve(np.eye(2) + a * J, np.array(z))
    assert np.allclose(cayley_solve(a, z), u, rtol=1e-12, atol=1e-12 * z.norm())


@given(alphas, vecs)
def test_cayley_rotate_is_unitary(a, z):
    assert cayley_rotate(a, z).norm() == pytest.approx(z.norm(), rel=1e-14)


@given(alphas, alphas, vecs)
def test_resolvent_comparison_identity(a, a2, z):
    lhs = cayley_solve(a, z) - cayley_solve(a2, z)
    rhs = -cayley_solve(a, perp(cayley_solve(a2, z)) * (a - a2))
    assert (lhs - rhs).norm() <= 1e-12 * z.norm()
