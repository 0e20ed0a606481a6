"""Named boundary surfaces with side functions and isometry families.

Every fixture fixes ``side > 0`` as the domain Omega_+ and orients its
chart normal into Omega_+.  Fixtures that bound a half-domain carry a
one-parameter flow ``T_beta`` (preserving both sides, acting on the chart
as ``u -> u + beta``), a swap isometry ``Psi`` exchanging the sides, and
for every surface point an element of the flow group with ``Psi(x) = T(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from . import series, spaceform
from .series import Jet
from .spaceform import Isometry
from .surface import Chart

ON_SURFACE_TOL = 1e-9


class FixtureDefectError(AssertionError):
    """A fixture violates one of its defining symmetry identities."""


class NotABoundaryError(ValueError):
    """The surface does not bound a domain, so side-based operations are undefined."""


class UnknownSurfaceError(KeyError):
    pass


def classify(side_values, tol=ON_SURFACE_TOL):
    """+1 on Omega_+, -1 on Omega_-, 0 on the surface."""
    s = np.asarray(side_values, dtype=float)
    return np.where(np.abs(s) < tol, 0, np.sign(s)).astype(int)


@dataclass(frozen=True)
class NamedSurface:
    name: str
    curvature: int
    chart: Chart
    side_fn: Optional[Callable]
    flow: Optional[Callable] = None
    swap: Optional[Isometry] = None
    swap_chart: Optional[Callable] = None
    transport: Optional[Callable] = None
    is_half_domain_fixture: bool = False
    minimal: bool = False
    embedded: bool = True
    fixes_surface: bool = False
    asymptotic_chart: Optional[Chart] = None
    ruling_line: Optional[str] = None
    sample_params: tuple = ()
    params: dict = field(default_factory=dict)

    def side(self, p):
        if self.side_fn is None or not self.embedded:
            raise NotABoundaryError(f"{self.name} is not the boundary of a domain")
        return self.side_fn(np.asarray(p, dtype=float))

    def point(self, u, v):
        return self.chart.point(u, v)

    def boundary_points(self, n=5):
        """The first ``n`` sample points on the surface."""
        return [self.point(u, v) for u, v in self.sample_params[:n]]

    def label(self):
        if not self.params:
            return self.name
        return self.name + "(" + ",".join(f"{k}={v:g}" for k, v in self.params.items()) + ")"


# ---------------------------------------------------------------------------
# isometry builders
# ---------------------------------------------------------------------------

def _rot(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _boost(t):
    c, s = math.cosh(t), math.sinh(t)
    return np.array([[c, s], [s, c]])


def _block(a, b):
    m = np.zeros((4, 4))
    m[:2, :2] = a
    m[2:, 2:] = b
    return m


def _screw(beta):
    m = np.eye(3)
    m[:2, :2] = _rot(beta)
    return Isometry(0, m, np.array([0.0, 0.0, beta]))


# w-coordinates of C^2 in which the Clifford torus group is diagonal:
# w1 = (z1 + i z2)/sqrt2, w2 = (z1 - i z2)/sqrt2 with z1 = x1 + i x2, z2 = x3 + i x4
def _torus_element(a, b):
    def as_real(m):
        out = np.zeros((4, 4))
        out[0::2, 0::2] = m.real
        out[0::2, 1::2] = -m.imag
        out[1::2, 0::2] = m.imag
        out[1::2, 1::2] = m.real
        return out

    U = np.array([[1, 1j], [1, -1j]]) / math.sqrt(2)
    D = np.diag([np.exp(1j * a), np.exp(1j * b)])
    M = U.conj().T @ D @ U
    # real coordinates ordered (x1, x2, x3, x4) = (Re z1, Im z1, Re z2, Im z2)
    return Isometry(1, as_real(M))


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------

def _default_samples(domain=None):
    return ((0.0, 0.0), (0.4, 0.3), (-0.7, 0.8), (1.3, -0.5), (2.1, 1.1), (-1.9, -1.2))


def _orient(chart, side_fn):
    """Orientation flag that makes the chart normal point into side > 0."""
    from .surface import fundamental_data

    u, v = 0.37, 0.21
    fd = fundamental_data(chart, u, v)
    p = chart.point(u, v)
    eps = 1e-5
    if chart.curvature == 0:
        q = p + eps * fd.normal
    else:
        q = spaceform.geodesic(chart.curvature, p, fd.normal, eps)
    s = float(side_fn(q))
    if abs(s) < 1e-14:
        raise FixtureDefectError("side function does not change across the surface")
    return chart.with_orientation(chart.orientation * (1 if s > 0 else -1))


def euclidean_plane():
    chart = Chart(0, lambda u, v: (u, v, 0.0 * u), name="euclidean_plane")
    side = lambda p: p[..., 2]
    return NamedSurface(
        "euclidean_plane", 0, _orient(chart, side), side,
        flow=lambda b: Isometry(0, np.eye(3), np.array([b, 0.0, 0.0])),
        swap=Isometry(0, np.diag([1.0, 1.0, -1.0])),
        swap_chart=lambda u, v: (u, v),
        transport=lambda u, v: Isometry(0, np.eye(3)),
        is_half_domain_fixture=True, minimal=True, fixes_surface=True,
        asymptotic_chart=None, ruling_line="u", sample_params=_default_samples(),
    )


def _helicoid_fn(u, v):
    return (v * series.cos(u), v * series.sin(u), u)


def _helicoid_asym_fn(u, v):
    sv = series.sinh(v)
    return (sv * series.cos(u), sv * series.sin(u), u)


def right_helicoid():
    side = lambda p: p[..., 0] * np.sin(p[..., 2]) - p[..., 1] * np.cos(p[..., 2])
    chart = _orient(Chart(0, _helicoid_fn, name="right_helicoid"), side)
    asym = _orient(Chart(0, _helicoid_asym_fn, name="right_helicoid/asymptotic"), side)
    return NamedSurface(
        "right_helicoid", 0, chart, side,
        flow=_screw,
        swap=Isometry(0, np.diag([1.0, -1.0, -1.0])),
        swap_chart=lambda u, v: (-u, v),
        transport=lambda u, v: _screw(-2.0 * u),
        is_half_domain_fixture=True, minimal=True,
        asymptotic_chart=asym, ruling_line="u",
        sample_params=((0.0, 1.0), (0.4, 0.3), (-0.7, 0.8), (1.3, -0.5), (2.1, 1.1), (-1.9, -1.2)),
    )


def catenoid():
    side = lambda p: p[..., 0] ** 2 + p[..., 1] ** 2 - np.cosh(p[..., 2]) ** 2
    fn = lambda u, v: (series.cosh(v) * series.cos(u), series.cosh(v) * series.sin(u), v)
    chart = _orient(Chart(0, fn, name="catenoid"), side)
    rot = lambda b: Isometry(0, _block(_rot(b), np.eye(2))[:3, :3])
    return NamedSurface(
        "catenoid", 0, chart, side, flow=rot,
        is_half_domain_fixture=False, minimal=True,
        sample_params=((0.0, 0.0), (0.4, 0.3), (-0.7, 0.5), (1.3, -0.2), (2.1, 0.6)),
    )


def round_sphere(radius=1.0):
    R = float(radius)
    if R <= 0:
        raise ValueError("radius must be positive")
    side = lambda p: R * R - np.sum(p * p, axis=-1)
    fn = lambda u, v: (R * series.cos(u) * series.cos(v), R * series.sin(u) * series.cos(v), R * series.sin(v))
    chart = _orient(Chart(0, fn, domain=((-np.inf, np.inf), (-1.5, 1.5)), name="round_sphere"), side)
    return NamedSurface(
        "round_sphere", 0, chart, side,
        flow=lambda b: Isometry(0, _block(_rot(b), np.eye(2))[:3, :3]),
        sample_params=((0.0, 0.0), (0.4, 0.3), (-0.7, 0.8), (1.3, -0.5), (2.1, 1.1)),
        params={"R": R},
    )


def _hyp_E(alpha, v):
    return alpha * alpha * series.cosh(v) ** 2 + series.sinh(v) ** 2


@lru_cache(maxsize=None)
def _w_of_v(alpha, v):
    val, _ = integrate.quad(lambda t: 1.0 / math.sqrt(_hyp_E(alpha, t)), 0.0, v, epsabs=1e-14, epsrel=1e-13,
                            limit=200)
    return val


@lru_cache(maxsize=None)
def _w_limit(alpha):
    """Supremum of w: the isothermal coordinate only covers |w| < w_limit."""
    return _w_of_v(alpha, 40.0)


@lru_cache(maxsize=None)
def _v_of_w(alpha, w):
    if w == 0.0:
        return 0.0
    if abs(w) >= _w_limit(alpha):
        from .surface import ChartDomainError
        raise ChartDomainError(f"w = {w} outside the isothermal range |w| < {_w_limit(alpha)}")
    return optimize.brentq(lambda v: _w_of_v(alpha, v) - w, -40.0, 40.0, xtol=1e-15, rtol=1e-15, maxiter=300)


def _isothermal_v(alpha, wj):
    """v(w) with dv/dw = sqrt(E(v)); accepts floats and jets."""
    if not isinstance(wj, Jet):
        return _v_of_w(alpha, float(wj))
    w0 = float(wj.const)
    v0 = _v_of_w(alpha, w0)
    m = wj.order
    t = Jet.variable(0, 1, m)
    vt = Jet.constant(v0, 1, m)
    for _ in range(m + 1):
        vt = (series.sqrt(_hyp_E(alpha, vt)).integrate(0)).truncate(m) + v0
    derivs = [float(vt.coeffs[k]) * math.factorial(k) for k in range(m + 1)]
    return series.compose_analytic(wj, w0, derivs)


def hyperbolic_helicoid(alpha):
    a = float(alpha)
    if not a > 0:
        raise ValueError("alpha must be positive")

    def fn(u, v):
        au = a * u
        cv, sv = series.cosh(v), series.sinh(v)
        return (series.cosh(au) * cv, series.sinh(au) * cv, series.cos(u) * sv, series.sin(u) * sv)

    def side(p):
        # arctanh(p1/p0) without cancellation: p0^2 - p1^2 = 1 + p2^2 + p3^2 on the model
        big = p[..., 0] + np.abs(p[..., 1])
        ustar = np.sign(p[..., 1]) * 0.5 * np.log(big * big / (1 + p[..., 2] ** 2 + p[..., 3] ** 2)) / a
        return np.cos(ustar) * p[..., 3] - np.sin(ustar) * p[..., 2]

    def flow(b):
        return Isometry(-1, _block(_boost(a * b), _rot(b)))

    chart = _orient(Chart(-1, fn, name="hyperbolic_helicoid"), side)
    # isothermal in (u, w) with l_12 = alpha; scaling both by sqrt(alpha) makes l_12 = 1
    lam = math.sqrt(a)
    wmax = 0.95 * lam * _w_limit(a)
    asym = _orient(Chart(-1, lambda s, t: fn(s / lam, _isothermal_v(a, t / lam)),
                         domain=((-np.inf, np.inf), (-wmax, wmax)), name="hyperbolic_helicoid/asymptotic"), side)
    return NamedSurface(
        "hyperbolic_helicoid", -1, chart, side, flow=flow,
        swap=Isometry(-1, np.diag([1.0, -1.0, 1.0, -1.0])),
        swap_chart=lambda u, v: (-u, v),
        transport=lambda u, v: flow(-2.0 * u),
        is_half_domain_fixture=True, minimal=True,
        asymptotic_chart=asym, ruling_line="u",
        sample_params=((0.0, 0.0), (0.4, 0.3), (-0.7, 0.8), (1.3, -0.5), (2.1, 1.1), (-1.9, -1.2)),
        params={"alpha": a},
    )


def totally_geodesic_h2():
    fn = lambda u, v: (series.cosh(u) * series.cosh(v), series.sinh(u) * series.cosh(v), series.sinh(v), 0.0 * u)
    side = lambda p: p[..., 3]
    chart = _orient(Chart(-1, fn, name="totally_geodesic_h2"), side)
    return NamedSurface(
        "totally_geodesic_h2", -1, chart, side,
        flow=lambda b: Isometry(-1, _block(_boost(b), np.eye(2))),
        swap=Isometry(-1, np.diag([1.0, 1.0, 1.0, -1.0])),
        swap_chart=lambda u, v: (u, v),
        transport=lambda u, v: Isometry(-1, np.eye(4)),
        is_half_domain_fixture=True, minimal=True, fixes_surface=True,
        ruling_line="u", sample_params=_default_samples(),
    )


def great_sphere():
    fn = lambda u, v: (series.cos(u) * series.cos(v), series.sin(u) * series.cos(v), series.sin(v), 0.0 * u)
    side = lambda p: p[..., 3]
    chart = _orient(Chart(1, fn, domain=((-np.inf, np.inf), (-1.5, 1.5)), name="great_sphere"), side)
    return NamedSurface(
        "great_sphere", 1, chart, side,
        flow=lambda b: Isometry(1, _block(_rot(b), np.eye(2))),
        swap=Isometry(1, np.diag([1.0, 1.0, 1.0, -1.0])),
        swap_chart=lambda u, v: (u, v),
        transport=lambda u, v: Isometry(1, np.eye(4)),
        is_half_domain_fixture=True, minimal=True, fixes_surface=True,
        ruling_line="u",
        sample_params=((0.0, 0.0), (0.4, 0.3), (-0.7, 0.8), (1.3, -0.5), (2.1, 1.1)),
    )


def _spherical_fn(alpha):
    def fn(u, v):
        au = alpha * u
        cv, sv = series.cos(v), series.sin(v)
        return (series.cos(au) * cv, series.sin(au) * cv, series.cos(u) * sv, series.sin(u) * sv)
    return fn


def _clifford_side(p):
    return p[..., 0] * p[..., 3] - p[..., 1] * p[..., 2]


def clifford_torus():
    chart = _orient(Chart(1, _spherical_fn(1.0), name="clifford_torus"), _clifford_side)
    return NamedSurface(
        "clifford_torus", 1, chart, _clifford_side,
        flow=lambda b: _torus_element(b, b),
        swap=Isometry(1, np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]], dtype=float)),
        swap_chart=lambda u, v: (u, math.pi / 2 - v),
        transport=lambda u, v: _torus_element(math.pi / 2 - 2 * v, 2 * v - math.pi / 2),
        is_half_domain_fixture=True, minimal=True,
        asymptotic_chart=chart, ruling_line="u",
        sample_params=((0.0, 0.0), (0.4, 0.3), (-0.7, 0.8), (1.3, -0.5), (2.1, 1.1), (-1.9, -1.2)),
    )


def spherical_helicoid(alpha):
    """Lawson's ruled minimal surfaces in S^3; only alpha = 1 is embedded."""
    a = float(alpha)
    if not a > 0:
        raise ValueError("alpha must be positive")
    if a == 1.0:
        base = clifford_torus()
        return NamedSurface(
            "spherical_helicoid", 1, base.chart, base.side_fn, flow=base.flow, swap=base.swap,
            swap_chart=base.swap_chart, transport=base.transport, is_half_domain_fixture=True,
            minimal=True, asymptotic_chart=base.chart, ruling_line="u",
            sample_params=base.sample_params, params={"alpha": a},
        )
    chart = Chart(1, _spherical_fn(a), name="spherical_helicoid")
    return NamedSurface(
        "spherical_helicoid", 1, chart, None, minimal=True, embedded=False, ruling_line="u",
        sample_params=((0.0, 0.0), (0.4, 0.3), (-0.7, 0.8), (1.3, -0.5), (2.1, 1.1)),
        params={"alpha": a},
    )


_BUILDERS = {
    "euclidean_plane": euclidean_plane,
    "right_helicoid": right_helicoid,
    "catenoid": catenoid,
    "round_sphere": round_sphere,
    "hyperbolic_helicoid": hyperbolic_helicoid,
    "totally_geodesic_h2": totally_geodesic_h2,
    "great_sphere": great_sphere,
    "clifford_torus": clifford_torus,
    "spherical_helicoid": spherical_helicoid,
}
_NEEDS_ALPHA = ("hyperbolic_helicoid", "spherical_helicoid")


def names():
    return sorted(_BUILDERS)


@lru_cache(maxsize=None)
def get(name, alpha=None, radius=None):
    """Fixture by name; ``alpha`` is required for the helicoid families."""
    if name not in _BUILDERS:
        raise UnknownSurfaceError(f"unknown surface {name!r}; known: {', '.join(names())}")
    if name in _NEEDS_ALPHA:
        if alpha is None:
            raise ValueError(f"{name} needs alpha")
        return _BUILDERS[name](alpha)
    if name == "round_sphere":
        return round_sphere(1.0 if radius is None else radius)
    return _BUILDERS[name]()


def fixtures():
    """The standard fixture list, including the hyperbolic helicoids used for acceptance."""
    out = [euclidean_plane(), right_helicoid(), catenoid(), round_sphere(1.0),
           totally_geodesic_h2(), great_sphere(), clifford_torus(), spherical_helicoid(1.0)]
    out += [hyperbolic_helicoid(a) for a in (0.14, 0.2, 0.4, 1.0)]
    return out


def half_domain_fixtures():
    return [s for s in fixtures() if s.is_half_domain_fixture and s.name != "spherical_helicoid"]


# ---------------------------------------------------------------------------
# symmetry harness
# ---------------------------------------------------------------------------

def random_model_points(c, n, rng, scale=2.5):
    """Roughly uniform sample of points of the model near the origin."""
    if c == 0:
        return rng.uniform(-scale, scale, size=(n, 3))
    if c == 1:
        x = rng.normal(size=(n, 4))
        return x / np.linalg.norm(x, axis=1, keepdims=True)
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = np.tanh(scale / 2) * rng.uniform(0, 1, size=(n, 1)) ** (1 / 3)
    return spaceform.hyperboloid_from_poincare(d * r)


@dataclass
class SymmetryReport:
    surface: str
    flow_chart_residual: float
    swap_chart_residual: float
    transport_residual: float
    fixed_residual: float
    side_preserved: int
    side_swapped: int
    points_tested: int
    tol: float

    @property
    def passed(self):
        ok = max(self.flow_chart_residual, self.swap_chart_residual, self.transport_residual) <= self.tol
        return ok and self.side_preserved == self.points_tested and self.side_swapped == self.points_tested

    def as_dict(self):
        d = dict(self.__dict__)
        d["passed"] = self.passed
        return d


def symmetry_check(s, grid=None, betas=(0.7,), n_random=1000, seed=0, tol=1e-10, strict=True):
    """Check the flow, swap and transport identities of a half-domain fixture.

    ``grid`` is a pair (us, vs) of parameter arrays (default 10 x 10 points).
    """
    if s.flow is None or s.swap is None:
        raise NotABoundaryError(f"{s.label()} has no swap isometry")
    if grid is None:
        grid = (np.linspace(-1.5, 1.5, 10), np.linspace(-1.2, 1.2, 10))
    us, vs = grid
    flow_res = swap_res = trans_res = fixed_res = 0.0
    for b in betas:
        T = s.flow(b)
        for u in us:
            for v in vs:
                p = s.point(u, v)
                flow_res = max(flow_res, float(np.max(np.abs(T(p) - s.point(u + b, v)))))
    for u in us:
        for v in vs:
            p = s.point(u, v)
            q = s.swap(p)
            swap_res = max(swap_res, float(np.max(np.abs(q - s.point(*s.swap_chart(u, v))))))
            trans_res = max(trans_res, float(np.max(np.abs(q - s.transport(u, v)(p)))))
            if s.fixes_surface:
                fixed_res = max(fixed_res, float(np.max(np.abs(q - p))))
    rng = np.random.default_rng(seed)
    pts = random_model_points(s.curvature, n_random, rng)
    cls = classify(s.side(pts))
    keep = cls != 0
    pts, cls = pts[keep], cls[keep]
    preserved = np.ones(len(pts), dtype=bool)
    for b in rng.uniform(-3, 3, size=5):
        preserved &= classify(s.side(s.flow(b)(pts))) == cls
    swapped = classify(s.side(s.swap(pts))) == -cls
    rep = SymmetryReport(s.label(), flow_res, swap_res, trans_res, fixed_res,
                         int(preserved.sum()), int(swapped.sum()), int(len(pts)), tol)
    if strict and not rep.passed:
        raise FixtureDefectError(f"symmetry identities fail for {s.label()}: {rep.as_dict()}")
    return rep
