import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfheat import spaceform as sf

finite = st.floats(-3, 3, allow_nan=False)


def test_ambient_form_basis_cases():
    assert sf.ambient_form(1, [1, 0, 0, 0], [1, 0, 0, 0]) == 1
    assert sf.ambient_form(-1, [1, 0, 0, 0], [1, 0, 0, 0]) == 1


def test_ambient_form_lorentz_arithmetic():
    p = [2, math.sqrt(3), 0, 0]
    assert sf.ambient_form(-1, p, p) == pytest.approx(1.0, abs=1e-15)


def test_riemannian_inner_gives_curvature_on_model():
    p = np.array([math.cosh(1), math.sinh(1), 0, 0])
    assert sf.inner(-1, p, p) == pytest.approx(-1.0)
    assert sf.on_model(-1, p)


def test_bad_curvature_rejected():
    with pytest.raises(sf.SpaceFormError):
        sf.check_curvature(2)


@pytest.mark.parametrize("c, p, xi, s, want", [
    (0, [0, 0, 0], [0, 0, 1], 2.0, [0, 0, 2]),
    (1, [1, 0, 0, 0], [0, 1, 0, 0], math.pi / 2, [0, 1, 0, 0]),
    (-1, [1, 0, 0, 0], [0, 1, 0, 0], 1.0, [math.cosh(1), math.sinh(1), 0, 0]),
])
def test_geodesic_examples(c, p, xi, s, want):
    assert np.allclose(sf.geodesic(c, p, xi, s), want, atol=1e-15)


def test_geodesic_needs_unit_direction():
    with pytest.raises(sf.SpaceFormError):
        sf.geodesic(0, [0, 0, 0], [0, 0, 2], 1.0)


def test_distance_and_area_examples():
    assert sf.sphere_area(0, 2) == pytest.approx(16 * math.pi)
    assert sf.distance(1, [1, 0, 0, 0], [-1, 0, 0, 0]) == pytest.approx(math.pi)
    assert sf.sphere_area(-1, 1) == pytest.approx(4 * math.pi * math.sinh(1) ** 2, rel=1e-15)


def test_sphere_area_limits():
    with pytest.raises(sf.SpaceFormError):
        sf.sphere_area(1, math.pi)
    with pytest.raises(sf.SpaceFormError):
        sf.sphere_area(0, -1)


def test_poincare_examples():
    assert np.allclose(sf.poincare_from_hyperboloid([1, 0, 0, 0]), 0)
    x = sf.poincare_from_hyperboloid([math.cosh(1), math.sinh(1), 0, 0])
    assert x == pytest.approx([math.tanh(0.5), 0, 0])


def test_poincare_image_of_hyperbolic_helicoid():
    # the hyperboloid parametrization maps to the Poincare formula componentwise
    a = 0.4
    for u, v in [(0.3, -0.2), (-1.1, 0.7), (2.0, 1.3)]:
        p = [math.cosh(a * u) * math.cosh(v), math.sinh(a * u) * math.cosh(v), math.cos(u) * math.sinh(v),
             math.sin(u) * math.sinh(v)]
        den = 1 + math.cosh(a * u) * math.cosh(v)
        want = [math.sinh(a * u) * math.cosh(v) / den, math.cos(u) * math.sinh(v) / den,
                math.sin(u) * math.sinh(v) / den]
        assert np.allclose(sf.poincare_from_hyperboloid(p), want, atol=1e-15)


@given(st.lists(finite, min_size=3, max_size=3).filter(lambda x: sum(t * t for t in x) < 0.8))
def test_poincare_round_trip(x):
    x = np.array(x)
    assert np.allclose(sf.poincare_from_hyperboloid(sf.hyperboloid_from_poincare(x)), x, atol=1e-12)


@pytest.mark.parametrize("c", [-1, 0, 1])
@given(s=st.floats(0.01, 2.5), seed=st.integers(0, 10_000))
def test_geodesic_unit_speed_and_distance(c, s, seed):
    rng = np.random.default_rng(seed)
    p = {0: rng.normal(size=3), 1: None, -1: None}[c]
    if c == 1:
        p = rng.normal(size=4)
        p /= np.linalg.norm(p)
    if c == -1:
        p = sf.hyperboloid_from_poincare(0.5 * rng.uniform(-1, 1, 3) / math.sqrt(3))
    e = sf.tangent_frame(c, p)[0]
    q = sf.geodesic(c, p, e, s)
    assert sf.on_model(c, q, tol=1e-9)
    assert sf.distance(c, p, q) == pytest.approx(s, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("c", [-1, 0, 1])
def test_tangent_frame_is_orthonormal(c):
    p = {0: np.array([0.3, -1.0, 2.0]), 1: np.array([0.5, 0.5, 0.5, 0.5]),
         -1: np.array([math.cosh(1), 0, math.sinh(1), 0])}[c]
    fr = sf.tangent_frame(c, p)
    gram = np.array([[sf.inner(c, a, b) for b in fr] for a in fr])
    assert np.allclose(gram, np.eye(3), atol=1e-13)
    if c != 0:
        assert np.allclose([sf.inner(c, p, e) for e in fr], 0, atol=1e-13)


@pytest.mark.parametrize("c", [-1, 0, 1])
def test_ball_volume_is_integral_of_area(c):
    from scipy.integrate import quad
    R = 1.3
    val, _ = quad(lambda r: float(sf.sphere_area(c, r)), 0, R)
    assert sf.ball_volume(c, R) == pytest.approx(val, rel=1e-12)
