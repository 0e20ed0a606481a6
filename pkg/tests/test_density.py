import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfheat import catalog, density as D
from halfheat.density import DensityUsageError

BALL = catalog.get("round_sphere")
CATENOID = catalog.get("catenoid")
HELICOID = catalog.get("right_helicoid")


def _cap_fraction(r, R=1.0):
    # |x + r w| < R with |x| = R  <=>  w.x < -r / (2R)
    return 0.5 - r / (4 * R)


def test_plane_is_exactly_half():
    s = catalog.get("euclidean_plane")
    for r in (0.1, 1.0, 10.0):
        assert D.density(s, s.point(0.3, -0.2), r) == pytest.approx(0.5, abs=1e-15)


@given(r=st.floats(0.01, 1.95), u=st.floats(-3, 3), v=st.floats(-1.4, 1.4))
def test_ball_against_cap_formula(r, u, v):
    assert D.density(BALL, BALL.point(u, v), r) == pytest.approx(_cap_fraction(r), abs=1e-10)


def test_larger_ball_against_cap_formula():
    s = catalog.get("round_sphere", radius=2.0)
    assert D.density(s, s.point(0.4, 0.3), 0.5) == pytest.approx(_cap_fraction(0.5, 2.0), abs=1e-10)


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_helicoid_on_axis(r):
    assert D.density(HELICOID, [1.0, 0.0, 0.0], r, n=96) == pytest.approx(0.5, abs=1e-9)


def test_catenoid_waist_deviation_against_monte_carlo():
    x = CATENOID.point(0.0, 0.0)
    val, err = D.density_with_error(CATENOID, x, 1.0)
    assert err < 1e-9
    rng = np.random.default_rng(11)
    n = 2_000_000
    w = rng.normal(size=(n, 3))
    w /= np.linalg.norm(w, axis=1)[:, None]
    frac = np.mean(CATENOID.side(x + w) > 0)
    assert abs(frac - val) < 5 * 0.5 / np.sqrt(n)
    assert val - 0.5 == pytest.approx(1.235e-3, abs=2e-5)


def test_classify_converges_to_refine():
    x = CATENOID.point(0.0, 0.0)
    ref = D.density(CATENOID, x, 1.0)
    coarse = D.density(CATENOID, x, 1.0, n=128, method="classify")
    fine = D.density(CATENOID, x, 1.0, n=512, method="classify")
    assert abs(fine - ref) < abs(coarse - ref)
    assert abs(fine - ref) < 1e-4


def test_ball_expansion_fit_and_radius_scaling():
    coeffs = []
    for R in (1.0, 2.0):
        s = catalog.get("round_sphere", radius=R)
        prof = D.profile(s, s.point(0.4, 0.3), np.geomspace(0.05, 0.4, 6))
        fit = D.expansion_fit(prof)
        assert not fit.inconclusive
        assert fit.leading_order == pytest.approx(1.0, abs=1e-6)
        coeffs.append(fit.leading_coeff)
    # coefficient is -H/2 with H = 1/R; ratio equals H1/H2
    assert coeffs[0] / coeffs[1] == pytest.approx(2.0, rel=0.05)
    assert coeffs[0] == pytest.approx(-0.25, rel=1e-6)


def test_expansion_fit_flags_unresolved_deviation():
    s = catalog.get("euclidean_plane")
    fit = D.expansion_fit(D.profile(s, s.point(0, 0), [0.1, 0.2, 0.4]))
    assert fit.inconclusive


def test_ball_split_half_space():
    s = catalog.get("euclidean_plane")
    b = D.ball_split(s, s.point(0, 0), 1.5)
    assert b.relative_gap < 1e-12
    assert b.vol_plus + b.vol_minus == pytest.approx(b.ball, rel=1e-12)


@pytest.mark.parametrize("s", [catalog.get("clifford_torus"), catalog.get("hyperbolic_helicoid", alpha=0.4)],
                         ids=lambda s: s.label())
def test_ball_split_half_domains(s):
    b = D.ball_split(s, s.point(0.4, 0.3), 1.0, n=16, n_radial=12)
    assert b.relative_gap < 2e-3


def test_ball_split_detects_ball():
    b = D.ball_split(BALL, BALL.point(0.4, 0.3), 0.5)
    # lens |y| < 1, |y - x| < r with |x| = 1
    r = 0.5
    exact_inside = 2 * np.pi / 3 * r ** 3 * (1 - 3 * r / 8)
    assert b.vol_plus == pytest.approx(exact_inside, rel=1e-9)


def test_usage_errors():
    x = HELICOID.point(0.2, 0.3)
    with pytest.raises(DensityUsageError):
        D.density(HELICOID, x + np.array([0, 0, 0.1]), 1.0)
    with pytest.raises(DensityUsageError):
        D.density(HELICOID, x, 0.0)
    with pytest.raises(DensityUsageError):
        D.density(catalog.get("clifford_torus"), np.array([1.0, 0, 0, 0]), 3.2)
    with pytest.raises(DensityUsageError):
        D.density(catalog.get("clifford_torus"), np.array([2.0, 0, 0, 0]), 1.0)


def test_profile_rows():
    prof = D.profile(HELICOID, [1.0, 0.0, 0.0], [0.5, 1.0], n=32)
    rows = prof.rows()
    assert [r for r, _, _ in rows] == [0.5, 1.0]
    assert prof.as_dict()["surface"] == "right_helicoid"
