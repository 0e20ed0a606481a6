"""Parametric surfaces in a space form.

Sign conventions used throughout the package:

* ``S(X) = -nabla_X N`` for the chart's (oriented) unit normal ``N``;
  with the inner normal, the boundary of a convex Euclidean ball has
  positive mean curvature ``eta = tr S``.
* Laplacians are positive: ``lap(f) = -div(grad f)``; the tangential
  codivergence ``delta = -div``.
* ``K = curvature + det S`` (Gauss equation).

Derivatives come from forward-mode Taylor jets when the chart map is
written with :mod:`halfheat.series` functions; black-box maps fall back to
Richardson-extrapolated central differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import series, spaceform
from .series import Jet


class SingularChartError(ValueError):
    """The immersion is degenerate (det g below threshold)."""


class ChartDomainError(ValueError):
    """A point or stencil leaves the chart's parameter domain."""


DEGENERATE_DET = 1e-14


@dataclass(frozen=True)
class Chart:
    """A parametrization ``(u, v) -> model point``.

    ``fn(u, v)`` returns the ambient coordinates as a sequence.  If
    ``analytic`` is true it must accept :class:`~halfheat.series.Jet`
    arguments (use the functions of :mod:`halfheat.series`).
    """

    curvature: int
    fn: Callable
    domain: tuple = ((-np.inf, np.inf), (-np.inf, np.inf))
    orientation: int = 1
    analytic: bool = True
    name: str = ""

    def with_orientation(self, orientation):
        return Chart(self.curvature, self.fn, self.domain, int(orientation), self.analytic, self.name)

    def check_domain(self, u, v, margin=0.0):
        (u0, u1), (v0, v1) = self.domain
        if not (u0 - 1e-12 <= u - margin and u + margin <= u1 + 1e-12
                and v0 - 1e-12 <= v - margin and v + margin <= v1 + 1e-12):
            raise ChartDomainError(f"({u}, {v}) with margin {margin} outside chart domain {self.domain}")

    def point(self, u, v):
        return np.array([float(x) for x in self.fn(float(u), float(v))])

    def points(self, us, vs):
        """Model points on the tensor grid ``us x vs`` (shape (len(us), len(vs), dim))."""
        return np.array([[self.point(u, v) for v in vs] for u in us])

    def jets(self, u, v, order):
        """Ambient coordinate jets (bivariate, total degree ``order``) at (u, v)."""
        self.check_domain(u, v)
        if self.analytic:
            uj = Jet.variable(0, 2, order, float(u))
            vj = Jet.variable(1, 2, order, float(v))
            out = []
            for x in self.fn(uj, vj):
                if not isinstance(x, Jet):
                    x = Jet.constant(float(x), 2, order)
                out.append(x)
            return out
        return fd_jets(self, u, v, order)


# ---------------------------------------------------------------------------
# finite-difference fallback
# ---------------------------------------------------------------------------

def _central_weights(deriv, half):
    """Central-difference weights on offsets -half..half for the given derivative."""
    offs = np.arange(-half, half + 1, dtype=float)
    A = np.vander(offs, increasing=True).T
    rhs = np.zeros(len(offs))
    rhs[deriv] = math.factorial(deriv)
    return np.linalg.solve(A, rhs)


def _fd_step(total_order, v):
    base = {0: 1e-4, 1: 1e-4, 2: 1e-4, 3: 1e-3, 4: 3e-3}.get(total_order, 1e-2)
    return base * max(1.0, abs(v))


def fd_jets(chart, u, v, order, step=None):
    """Taylor jets of a black-box chart from Richardson-extrapolated central differences."""
    if order > 4:
        raise ValueError("finite-difference jets are limited to order 4")
    n = spaceform.dim(chart.curvature)
    mons = series.monomials(2, order)
    coeffs = np.zeros((n, len(mons)))
    cache = {}

    def f(a, b):
        key = (a, b)
        if key not in cache:
            cache[key] = chart.point(a, b)
        return cache[key]

    for k, (i, j) in enumerate(mons):
        h = step if step is not None else _fd_step(i + j, v)

        def estimate(hh):
            wi = _central_weights(i, (i + 1) // 2) if i else np.array([1.0])
            wj = _central_weights(j, (j + 1) // 2) if j else np.array([1.0])
            hi, hj = (len(wi) - 1) // 2, (len(wj) - 1) // 2
            acc = np.zeros(n)
            for a, wa in zip(range(-hi, hi + 1), wi):
                for b, wb in zip(range(-hj, hj + 1), wj):
                    if wa == 0 or wb == 0:
                        continue
                    acc += wa * wb * f(u + a * hh, v + b * hh)
            return acc / hh ** (i + j)

        if i + j == 0:
            d = f(u, v)
        else:
            chart.check_domain(u, v, margin=2 * h * ((max(i, j) + 1) // 2 + 1))
            d1, d2 = estimate(h), estimate(h / 2)
            d = d2 + (d2 - d1) / 3.0
        coeffs[:, k] = d / (math.factorial(i) * math.factorial(j))
    return [Jet(coeffs[c], 2, order) for c in range(n)]


# ---------------------------------------------------------------------------
# local geometry from jets
# ---------------------------------------------------------------------------

def _det3(a, b, c):
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def _normal_direction(c, X, Xu, Xv):
    """A vector orthogonal (in the Riemannian form) to X (c != 0), Xu, Xv."""
    if c == 0:
        return [Xu[1] * Xv[2] - Xu[2] * Xv[1],
                Xu[2] * Xv[0] - Xu[0] * Xv[2],
                Xu[0] * Xv[1] - Xu[1] * Xv[0]]
    rows = (X, Xu, Xv)
    out = []
    for i in range(4):
        cols = [k for k in range(4) if k != i]
        minor = _det3(*[[r[k] for k in cols] for r in rows])
        out.append(minor if i % 2 == 0 else -minor)
    # Euclidean-orthogonal vector n; the Riemannian-orthogonal one is J^{-1} n
    if c == -1:
        out[0] = -out[0]
    return out


def _mat_inv2(a, b, c, d):
    det = a * d - b * c
    return det, (d / det, -b / det, -c / det, a / det)


@dataclass
class LocalGeometry:
    """Jet-valued fundamental data of a chart around one parameter point.

    All quantities are bivariate jets in the displacement (du, dv).
    ``g`` and ``l`` are (E, F, G) / (L, M, N) tuples; ``S`` is the matrix
    of the shape operator acting on coordinate components, stored
    row-major as (S11, S12, S21, S22) with ``S = g^{-1} l``.
    """

    chart: Chart
    u: float
    v: float
    X: list
    Xu: list
    Xv: list
    N: list
    g: tuple
    ginv: tuple
    detg: Jet
    l: tuple
    S: tuple
    K: Jet
    eta: Jet
    second: dict = field(default_factory=dict)

    @property
    def curvature(self):
        return self.chart.curvature

    @property
    def sqrt_detg(self):
        return series.sqrt(self.detg)

    def gradient(self, phi):
        """Coordinate components (Y1, Y2) of the tangential gradient of a scalar jet."""
        gi11, gi12, _, gi22 = self.ginv
        pu, pv = phi.diff(0), phi.diff(1)
        return gi11 * pu + gi12 * pv, gi12 * pu + gi22 * pv

    def divergence(self, Y):
        """div of a tangential field with coordinate components Y = (Y1, Y2)."""
        rg = self.sqrt_detg
        return ((rg * Y[0]).diff(0) + (rg * Y[1]).diff(1)) / rg

    def laplacian(self, phi):
        """Positive Laplace-Beltrami operator of the surface."""
        return -self.divergence(self.gradient(phi))

    def apply_S(self, Y):
        s11, s12, s21, s22 = self.S
        return s11 * Y[0] + s12 * Y[1], s21 * Y[0] + s22 * Y[1]

    def divergence_field(self):
        """The scalar jet div(S(grad K))."""
        return self.divergence(self.apply_S(self.gradient(self.K)))


def local_geometry(chart, u, v, order=4):
    """Fundamental data of ``chart`` as jets of the given order around (u, v).

    The chart is expanded to ``order + 2`` so that g, l, S, K, eta carry
    ``order`` derivatives.
    """
    c = chart.curvature
    X = chart.jets(u, v, order + 2)
    Xu = [x.diff(0) for x in X]
    Xv = [x.diff(1) for x in X]
    Xuu = [x.diff(0) for x in Xu]
    Xuv = [x.diff(1) for x in Xu]
    Xvv = [x.diff(1) for x in Xv]
    ip = lambda a, b: spaceform.inner(c, a, b)
    E, F, G = ip(Xu, Xu), ip(Xu, Xv), ip(Xv, Xv)
    detg = E * G - F * F
    if float(detg.const) <= DEGENERATE_DET:
        raise SingularChartError(f"degenerate immersion at ({u}, {v}): det g = {detg.const:.3e}")
    n = _normal_direction(c, [x.truncate(order + 1) for x in X], Xu, Xv)
    norm = series.sqrt(ip(n, n))
    N = [chart.orientation * x / norm for x in n]
    L, M, Nn = ip(Xuu, N), ip(Xuv, N), ip(Xvv, N)
    _, (gi11, gi12, gi21, gi22) = _mat_inv2(E, F, F, G)
    S = (gi11 * L + gi12 * M, gi11 * M + gi12 * Nn,
         gi21 * L + gi22 * M, gi21 * M + gi22 * Nn)
    detS = S[0] * S[3] - S[1] * S[2]
    K = detS + float(c)
    eta = S[0] + S[3]
    geo = LocalGeometry(chart, float(u), float(v), X, Xu, Xv, N,
                        (E, F, G), (gi11, gi12, gi21, gi22), detg,
                        (L, M, Nn), S, K, eta)
    geo.second = {"Xuu": Xuu, "Xuv": Xuv, "Xvv": Xvv}
    return geo


@dataclass(frozen=True)
class FundamentalData:
    g: np.ndarray
    l: np.ndarray
    S: np.ndarray
    K: float
    eta: float
    k_principal: tuple
    normal: np.ndarray


def fundamental_data(chart, u, v):
    """First/second fundamental forms, shape operator and curvatures at (u, v)."""
    geo = local_geometry(chart, u, v, order=0)
    E, F, G = (float(x.const) for x in geo.g)
    L, M, Nn = (float(x.const) for x in geo.l)
    S = np.array([[float(geo.S[0].const), float(geo.S[1].const)],
                  [float(geo.S[2].const), float(geo.S[3].const)]])
    # S is self-adjoint for g, so its eigenvalues are real
    k = np.sort(np.real(np.linalg.eigvals(S)))[::-1]
    return FundamentalData(
        g=np.array([[E, F], [F, G]]),
        l=np.array([[L, M], [M, Nn]]),
        S=S,
        K=float(geo.K.const),
        eta=float(geo.eta.const),
        k_principal=(float(k[0]), float(k[1])),
        normal=np.array([float(x.const) for x in geo.N]),
    )


def brioschi_curvature(geo):
    """Intrinsic Gauss curvature from the metric jets alone (Brioschi formula)."""
    E, F, G = geo.g
    Eu, Ev, Fu, Fv, Gu, Gv = E.diff(0), E.diff(1), F.diff(0), F.diff(1), G.diff(0), G.diff(1)
    Evv, Fuv, Guu = Ev.diff(1), Fu.diff(1), Gu.diff(0)
    e = lambda j: float(j.const)
    m1 = np.array([[-0.5 * e(Evv) + e(Fuv) - 0.5 * e(Guu), 0.5 * e(Eu), e(Fu) - 0.5 * e(Ev)],
                   [e(Fv) - 0.5 * e(Gu), e(E), e(F)],
                   [0.5 * e(Gv), e(F), e(G)]])
    m2 = np.array([[0.0, 0.5 * e(Ev), 0.5 * e(Gu)],
                   [0.5 * e(Ev), e(E), e(F)],
                   [0.5 * e(Gu), e(F), e(G)]])
    return (np.linalg.det(m1) - np.linalg.det(m2)) / (e(E) * e(G) - e(F) ** 2) ** 2


# ---------------------------------------------------------------------------
# tangential calculus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TangentialResult:
    grad: tuple
    laplacian: float
    div: float = None


def tangential_calculus(chart, u, v, phi, field=None, order=2):
    """Gradient and positive Laplacian of ``phi`` (and div of ``field``) at (u, v).

    ``phi(u, v)`` and ``field(u, v) -> (X1, X2)`` are written with
    :mod:`halfheat.series` functions so they can be expanded as jets.  For
    black-box charts or fields pass ``analytic=False`` charts; the
    derivatives then come from :func:`fd_tangential`.
    """
    if not chart.analytic:
        return fd_tangential(chart, u, v, phi, field)
    geo = local_geometry(chart, u, v, order=order)
    uj = Jet.variable(0, 2, order, float(u))
    vj = Jet.variable(1, 2, order, float(v))
    pj = phi(uj, vj)
    if not isinstance(pj, Jet):
        pj = Jet.constant(float(pj), 2, order)
    grad = geo.gradient(pj)
    lap = geo.laplacian(pj)
    div = None
    if field is not None:
        comps = [x if isinstance(x, Jet) else Jet.constant(float(x), 2, order) for x in field(uj, vj)]
        div = float(geo.divergence(comps).const)
    return TangentialResult(tuple(float(x.const) for x in grad), float(lap.const), div)


def fd_tangential(chart, u, v, phi, field=None, h=None):
    """Stencil version of :func:`tangential_calculus` (4 points per axis, one Richardson step)."""
    h = 1e-3 * max(1.0, abs(v)) if h is None else h
    chart.check_domain(u, v, margin=2 * h)

    def metric(a, b):
        geo = local_geometry(chart, a, b, order=0)
        E, F, G = (float(x.const) for x in geo.g)
        return np.array([[E, F], [F, G]])

    def grad_at(a, b, hh):
        dpu = (-phi(a + 2 * hh, b) + 8 * phi(a + hh, b) - 8 * phi(a - hh, b) + phi(a - 2 * hh, b)) / (12 * hh)
        dpv = (-phi(a, b + 2 * hh) + 8 * phi(a, b + hh) - 8 * phi(a, b - hh) + phi(a, b - 2 * hh)) / (12 * hh)
        return np.linalg.solve(metric(a, b), np.array([dpu, dpv]))

    def div_of(Yfun, hh):
        def w(a, b, k):
            return math.sqrt(np.linalg.det(metric(a, b))) * Yfun(a, b)[k]
        du = (-w(u + 2 * hh, v, 0) + 8 * w(u + hh, v, 0) - 8 * w(u - hh, v, 0) + w(u - 2 * hh, v, 0)) / (12 * hh)
        dv = (-w(u, v + 2 * hh, 1) + 8 * w(u, v + hh, 1) - 8 * w(u, v - hh, 1) + w(u, v - 2 * hh, 1)) / (12 * hh)
        return (du + dv) / math.sqrt(np.linalg.det(metric(u, v)))

    g0 = grad_at(u, v, h / 4)
    lap1 = -div_of(lambda a, b: grad_at(a, b, h / 4), h)
    lap2 = -div_of(lambda a, b: grad_at(a, b, h / 8), h / 2)
    lap = lap2 + (lap2 - lap1) / 15.0
    div = None
    if field is not None:
        d1 = div_of(lambda a, b: np.array(field(a, b), dtype=float), h)
        d2 = div_of(lambda a, b: np.array(field(a, b), dtype=float), h / 2)
        div = d2 + (d2 - d1) / 15.0
    return TangentialResult((float(g0[0]), float(g0[1])), float(lap), div)


def divergence_residual(chart, u, v):
    """div(S(grad K)) at (u, v); zero exactly when K is constant."""
    geo = local_geometry(chart, u, v, order=2)
    return float(geo.divergence_field().const)


def scale_normalizer(chart, u, v):
    """max(1, |K| * |S|) at (u, v), used to make "approximately zero" checks scale-free."""
    fd = fundamental_data(chart, u, v)
    return max(1.0, abs(fd.K) * float(np.max(np.abs(fd.k_principal))))


# ---------------------------------------------------------------------------
# isothermal asymptotic charts and rulings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsothermalDiagnostics:
    E: float
    F_residual: float
    l_offdiag_residual: float
    E_identity: float
    Q_uv: float
    logE_pde_residual: float
    conformality_residual: float


def isothermal_diagnostics(chart, u, v):
    """Residuals of the isothermal-asymptotic normal form at (u, v).

    ``l_offdiag_residual`` measures how far l is from being purely
    off-diagonal (max |L|, |N| relative to |M|); ``logE_pde_residual``
    uses the flat coordinate Laplacian ``-(f_uu + f_vv)`` of log E.
    """
    geo = local_geometry(chart, u, v, order=2)
    E, F, G = geo.g
    L, M, Nn = geo.l
    Eu, Ev = E.diff(0), E.diff(1)
    Euv = Eu.diff(1)
    e0 = float(E.const)
    E_identity = e0 * float(Euv.const) - 4 * float(Eu.const) * float(Ev.const)
    Q = series.power(E, -3.0)
    Q_uv = float(Q.diff(0).diff(1).const)
    logE = series.log(E)
    flat_lap = -(float(logE.diff(0).diff(0).const) + float(logE.diff(1).diff(1).const))
    sigma = chart.curvature
    pde = flat_lap - 2 * sigma * e0 + 2 / e0
    scale = max(abs(float(M.const)), 1e-300)
    return IsothermalDiagnostics(
        E=e0,
        F_residual=abs(float(F.const)),
        l_offdiag_residual=max(abs(float(L.const)), abs(float(Nn.const))) / scale,
        E_identity=E_identity,
        Q_uv=Q_uv,
        logE_pde_residual=pde,
        conformality_residual=abs(e0 - float(G.const)),
    )


@dataclass(frozen=True)
class RulingCheck:
    geodesic_curvature: float
    asymptotic_residual: float
    ambient_geodesic_residual: float


def christoffel(geo):
    """Christoffel symbols Gamma[k][i][j] at the base point from metric jets."""
    E, F, G = geo.g
    g = np.array([[E.const, F.const], [F.const, G.const]], dtype=float)
    dg = np.zeros((2, 2, 2))  # dg[k, i, j] = d_k g_ij
    for k in range(2):
        dE, dF, dG = (float(x.diff(k).const) for x in (E, F, G))
        dg[k] = [[dE, dF], [dF, dG]]
    gi = np.linalg.inv(g)
    Gam = np.zeros((2, 2, 2))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                Gam[k, i, j] = 0.5 * sum(gi[k, m] * (dg[i, m, j] + dg[j, m, i] - dg[m, i, j])
                                         for m in range(2))
    return Gam


def curve_ambient_curvature(c, p, d1, d2):
    """Curvature in M of a curve with position p, velocity d1 and flat acceleration d2."""
    p, d1, d2 = (np.asarray(x, dtype=float) for x in (p, d1, d2))
    acc = spaceform.project_tangent(c, p, d2) if c != 0 else d2
    speed2 = spaceform.inner(c, d1, d1)
    perp = acc - spaceform.inner(c, acc, d1) / speed2 * d1
    return math.sqrt(max(spaceform.inner(c, perp, perp), 0.0)) / speed2


def geodesic_ruling_check(chart, which_line, c, samples=None):
    """Geodesic, asymptotic and ambient-geodesic residuals along a coordinate line.

    ``which_line="u"`` is the line u = c (v varies); ``"v"`` is v = c.
    Values are maxima of absolute residuals over ``samples`` of the free
    parameter.
    """
    if which_line not in ("u", "v"):
        raise ValueError("which_line must be 'u' or 'v'")
    if samples is None:
        (u0, u1), (v0, v1) = chart.domain
        lo, hi = (v0, v1) if which_line == "u" else (u0, u1)
        lo, hi = max(lo, -2.0), min(hi, 2.0)
        samples = np.linspace(lo, hi, 21)
    kg = asym = amb = 0.0
    for t in samples:
        u, v = (c, t) if which_line == "u" else (t, c)
        geo = local_geometry(chart, u, v, order=1)
        Gam = christoffel(geo)
        E, F, G = (float(x.const) for x in geo.g)
        g = np.array([[E, F], [F, G]])
        i = 1 if which_line == "u" else 0  # index of the moving coordinate
        j = 1 - i
        tang = np.zeros(2)
        tang[i] = 1.0
        accel = Gam[:, i, i]  # covariant derivative of d_i along itself, coordinates
        conormal = np.zeros(2)
        conormal[j] = 1.0
        conormal = conormal - (g[i, j] / g[i, i]) * tang
        cn = math.sqrt(conormal @ g @ conormal)
        kg = max(kg, abs(accel @ g @ conormal) / (g[i, i] * cn))
        l = np.array([[float(geo.l[0].const), float(geo.l[1].const)],
                      [float(geo.l[1].const), float(geo.l[2].const)]])
        asym = max(asym, abs(l[i, i]) / g[i, i])
        X = np.array([float(x.const) for x in geo.X])
        d1 = np.array([float(x.const) for x in (geo.Xv if i == 1 else geo.Xu)])
        d2key = "Xvv" if i == 1 else "Xuu"
        d2 = np.array([float(x.const) for x in geo.second[d2key]])
        amb = max(amb, curve_ambient_curvature(chart.curvature, X, d1, d2))
    return RulingCheck(kg, asym, amb)
