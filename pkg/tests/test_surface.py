import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfheat import catalog, series, surface
from halfheat.surface import Chart

uu = st.floats(-2, 2)
vv = st.floats(-1.2, 1.2)


def test_plane_is_flat():
    fd = surface.fundamental_data(catalog.get("euclidean_plane").chart, 0.3, -0.4)
    assert np.allclose(fd.S, 0) and fd.K == 0 and fd.eta == 0


@given(u=uu, v=vv)
def test_helicoid_minimal_with_closed_form_curvature(u, v):
    fd = surface.fundamental_data(catalog.get("right_helicoid").chart, u, v)
    assert abs(fd.eta) < 1e-12
    assert fd.K == pytest.approx(-1 / (1 + v * v) ** 2, rel=1e-12)


def test_helicoid_curvature_at_origin():
    assert surface.fundamental_data(catalog.get("right_helicoid").chart, 0, 0).K == pytest.approx(-1)


@given(u=uu, v=st.floats(-1.4, 1.4))
def test_clifford_torus_flat_and_minimal(u, v):
    fd = surface.fundamental_data(catalog.get("clifford_torus").chart, u, v)
    assert abs(fd.eta) < 1e-12 and abs(fd.K) < 1e-12
    assert sorted(fd.k_principal) == pytest.approx([-1, 1])


@pytest.mark.parametrize("name, kw", [("right_helicoid", {}), ("catenoid", {}), ("clifford_torus", {}),
                                      ("hyperbolic_helicoid", {"alpha": 0.4}), ("round_sphere", {})])
@given(u=uu, v=st.floats(-1, 1))
def test_brioschi_matches_shape_operator_curvature(name, kw, u, v):
    chart = catalog.get(name, **kw).chart
    geo = surface.local_geometry(chart, u, v, order=2)
    assert surface.brioschi_curvature(geo) == pytest.approx(float(geo.K.const), rel=1e-9, abs=1e-11)


def test_orientation_flips_shape_operator():
    chart = catalog.get("round_sphere").chart
    a = surface.fundamental_data(chart, 0.2, 0.1)
    b = surface.fundamental_data(chart.with_orientation(-chart.orientation), 0.2, 0.1)
    assert np.allclose(a.S, -b.S) and a.K == pytest.approx(b.K)


def test_inward_sphere_normal_gives_positive_mean_curvature():
    # side > 0 inside the ball, so the normal points inward and S = -dN is +identity / R
    fd = surface.fundamental_data(catalog.get("round_sphere", radius=2.0).chart, 0.3, 0.2)
    assert fd.eta == pytest.approx(1.0)


def test_finite_difference_jets_match_analytic():
    fn = catalog.get("hyperbolic_helicoid", alpha=0.4).chart.fn
    analytic = Chart(-1, fn)
    black_box = Chart(-1, lambda u, v: [float(x) for x in fn(u, v)], analytic=False)
    a = surface.fundamental_data(analytic, 0.3, 0.5)
    b = surface.fundamental_data(black_box, 0.3, 0.5)
    assert np.allclose(a.S, b.S, atol=1e-6)
    assert a.K == pytest.approx(b.K, abs=1e-6)


def test_singular_chart_rejected():
    with pytest.raises(surface.SingularChartError):
        surface.fundamental_data(Chart(0, lambda u, v: (u, u, 0 * v)), 0.0, 0.0)


def test_chart_domain_enforced():
    chart = catalog.get("round_sphere").chart
    with pytest.raises(surface.ChartDomainError):
        chart.jets(0.0, 1.6, 2)


def test_tangential_calculus_of_constant():
    res = surface.tangential_calculus(catalog.get("catenoid").chart, 0.2, 0.3, lambda u, v: 3.0)
    assert res.grad == (0.0, 0.0) and res.laplacian == 0.0


def test_flat_laplacian_sign():
    res = surface.tangential_calculus(catalog.get("euclidean_plane").chart, 0.4, -0.2, lambda u, v: u * u + v * v)
    assert res.laplacian == pytest.approx(-4.0)
    assert res.grad == pytest.approx((0.8, -0.4))


def test_divergence_of_tangent_field_on_plane():
    res = surface.tangential_calculus(catalog.get("euclidean_plane").chart, 0.1, 0.2, lambda u, v: u,
                                      field=lambda u, v: (u * v, v * v))
    assert res.div == pytest.approx(0.2 + 0.4)


def test_log_E_on_helicoid_asymptotic_chart():
    chart = catalog.get("right_helicoid").asymptotic_chart
    v = 0.45
    res = surface.tangential_calculus(chart, 0.1, v, lambda a, b: series.log(series.cosh(b) ** 2))
    # surface Laplacian = (1/E) * flat Laplacian, and the flat one is 2 sigma E - 2/E
    E = math.cosh(v) ** 2
    assert res.laplacian == pytest.approx((-2 / E) / E, rel=1e-12)
    assert surface.isothermal_diagnostics(chart, 0.1, v).logE_pde_residual == pytest.approx(0, abs=1e-12)


def test_black_box_tangential_calculus():
    fn = catalog.get("catenoid").chart.fn
    bb = Chart(0, lambda u, v: [float(x) for x in fn(u, v)], analytic=False)
    phi = lambda u, v: series.sin(u) * v * v
    a = surface.tangential_calculus(catalog.get("catenoid").chart, 0.3, 0.2, phi)
    b = surface.tangential_calculus(bb, 0.3, 0.2, phi)
    assert b.laplacian == pytest.approx(a.laplacian, rel=1e-5)


@pytest.mark.parametrize("name, kw", [("totally_geodesic_h2", {}), ("great_sphere", {}), ("euclidean_plane", {})])
def test_divergence_residual_vanishes_exactly_when_K_constant(name, kw):
    chart = catalog.get(name, **kw).chart
    assert surface.divergence_residual(chart, 0.3, -0.4) == 0.0


@given(u=uu, v=vv)
def test_helicoid_divergence_condition(u, v):
    assert abs(surface.divergence_residual(catalog.get("right_helicoid").chart, u, v)) < 1e-6


@given(u=uu, v=st.floats(-1.5, 1.5))
def test_catenoid_divergence_closed_form(u, v):
    ch, sh = math.cosh(v), math.sinh(v)
    want = 4 * (ch * ch - 7 * sh * sh) / ch ** 10
    assert surface.divergence_residual(catalog.get("catenoid").chart, u, v) == pytest.approx(want, rel=1e-9,
                                                                                             abs=1e-12)


def test_catenoid_waist_divergence():
    assert surface.divergence_residual(catalog.get("catenoid").chart, 0, 0) == pytest.approx(4.0)


@given(u=uu, v=vv)
def test_helicoid_asymptotic_chart_diagnostics(u, v):
    d = surface.isothermal_diagnostics(catalog.get("right_helicoid").asymptotic_chart, u, v)
    assert d.E == pytest.approx(math.cosh(v) ** 2, rel=1e-14)
    assert abs(d.E_identity) < 1e-10 and abs(d.Q_uv) < 1e-10
    assert d.F_residual < 1e-14 and d.l_offdiag_residual < 1e-14


def test_clifford_chart_is_unit_conformal():
    d = surface.isothermal_diagnostics(catalog.get("clifford_torus").chart, 0.4, 0.7)
    assert d.E == pytest.approx(1.0)
    assert max(d.F_residual, d.l_offdiag_residual, abs(d.E_identity), abs(d.Q_uv),
               abs(d.logE_pde_residual), d.conformality_residual) < 1e-12


@pytest.mark.parametrize("alpha", [0.14, 0.4, 1.0])
def test_hyperbolic_asymptotic_chart(alpha):
    chart = catalog.get("hyperbolic_helicoid", alpha=alpha).asymptotic_chart
    for u, v in [(0.0, 0.0), (0.7, -0.5), (-1.2, 0.9)]:
        d = surface.isothermal_diagnostics(chart, u, v)
        assert abs(d.E_identity) < 1e-6
        assert abs(d.logE_pde_residual) < 1e-8
        assert d.conformality_residual < 1e-10


def test_plane_coordinate_lines_are_geodesic():
    chart = catalog.get("euclidean_plane").chart
    for which in "uv":
        r = surface.geodesic_ruling_check(chart, which, 0.3)
        assert r.geodesic_curvature == 0 and r.asymptotic_residual == 0 and r.ambient_geodesic_residual == 0


def test_helicoid_axis_is_a_geodesic():
    r = surface.geodesic_ruling_check(catalog.get("right_helicoid").asymptotic_chart, "v", 0.0)
    assert r.geodesic_curvature < 1e-14


def test_clifford_rulings_are_great_circles():
    r = surface.geodesic_ruling_check(catalog.get("clifford_torus").chart, "u", 0.4)
    assert r.ambient_geodesic_residual < 1e-10


def test_non_ruling_line_is_detected():
    # circles v = const on the catenoid are not geodesics of R^3
    r = surface.geodesic_ruling_check(catalog.get("catenoid").chart, "v", 0.5)
    assert r.ambient_geodesic_residual > 0.1


def test_scale_normalizer_floor():
    assert surface.scale_normalizer(catalog.get("euclidean_plane").chart, 0, 0) == 1.0
