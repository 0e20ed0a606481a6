"""Radial heat kernels of the space forms and the Cauchy temperature of a domain.

For a domain Omega_+ the Cauchy temperature at x is, by the co-area
formula over geodesic spheres about x,

    u_C(t, x) = int_0^inf p(t, r) |S_r| density(r, x) dr.

Kernels (dimension 3, positive Laplacian, ``d/dt u = -Lap u``):

* curvature 0:  ``(4 pi t)^(-3/2) exp(-r^2 / 4t)``
* curvature -1: ``(4 pi t)^(-3/2) (r / sinh r) exp(-t - r^2 / 4t)``
* curvature +1: ``(4 pi t)^(-3/2) exp(t) sum_m (r + 2 pi m) / sin r exp(-(r + 2 pi m)^2 / 4t)``
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from . import spaceform
from ._parallel import pmap
from .density import _fraction, surface_normal
from .catalog import ON_SURFACE_TOL

TAIL_MASS = 1e-12
SPHERE_CAP = math.pi - 1e-6
HEAT_DENSITY_ORDER = 16
HEAT_DENSITY_TOL = 1e-6
HEAT_THETA_CELLS = 128
U_TOL = 1e-7


class HeatUsageError(ValueError):
    pass


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise HeatUsageError("time must be positive")
    return t


def _images(t):
    """Image indices m with non-negligible terms on [0, pi]."""
    m = int(math.ceil((math.sqrt(4 * t * 40) + math.pi) / (2 * math.pi)))
    return np.arange(-m, m + 1)


def kernel(c, t, r):
    """Heat kernel p(t, x, y) as a function of r = d(x, y)."""
    c = spaceform.check_curvature(c)
    t = float(_check_t(t))
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise HeatUsageError("distance must be non-negative")
    pref = (4 * math.pi * t) ** -1.5
    if c == 0:
        return pref * np.exp(-r * r / (4 * t))
    if c == -1:
        ratio = np.where(r < 1e-8, 1.0, r / np.where(r < 1e-8, 1.0, np.sinh(np.maximum(r, 1e-300))))
        return pref * ratio * np.exp(-t - r * r / (4 * t))
    if np.any(r > math.pi + 1e-12):
        raise HeatUsageError("distances on S^3 are at most pi")
    m = _images(t)
    s = r[..., None] + 2 * math.pi * m
    g = np.exp(-s * s / (4 * t))
    f = np.sum(s * g, axis=-1)
    df = np.sum((1 - s * s / (2 * t)) * g, axis=-1)
    sin = np.sin(r)
    # f vanishes with sin r at r = 0 and r = pi; use l'Hopital there
    near = np.abs(sin) < 1e-5
    val = np.where(near, df / np.cos(r), f / np.where(near, 1.0, sin))
    return pref * math.exp(t) * val


def r_max(c, t, tail=TAIL_MASS):
    """Radius beyond which the radial kernel mass is below ``tail``."""
    t = float(_check_t(t))
    if c == 1:
        return SPHERE_CAP
    base = 2 * math.sqrt(t) * math.sqrt(math.log(1 / tail) + 4)
    return base + (2 * t if c == -1 else 0.0)


def radial_mass(c, t, a, b):
    f = lambda r: float(kernel(c, t, r) * spaceform.sphere_area(c, r))
    val, _ = integrate.quad(f, a, b, epsabs=1e-15, epsrel=1e-13, limit=400)
    return val


def normalization(c, t):
    """Total kernel mass, int p(t, r) |S_r| dr (stochastic completeness: 1)."""
    return radial_mass(c, t, 0.0, r_max(c, t) if c != 1 else math.pi)


def semigroup_residual(c, t, r, n=160):
    """|p(2t, r) - int p(t, d(x, y)) p(t, d(y, x')) dy| for d(x, x') = r."""
    smax = math.pi if c == 1 else r_max(c, t) + r
    ts, ws = np.polynomial.legendre.leggauss(n)
    s = 0.5 * smax * (ts + 1)
    wsr = 0.5 * smax * ws
    th = 0.5 * math.pi * (ts + 1)
    wth = 0.5 * math.pi * ws
    S, TH = np.meshgrid(s, th, indexing="ij")
    if c == 0:
        d = np.sqrt(np.maximum(S * S + r * r - 2 * S * r * np.cos(TH), 0.0))
    elif c == 1:
        d = np.arccos(np.clip(np.cos(S) * math.cos(r) + np.sin(S) * math.sin(r) * np.cos(TH), -1, 1))
    else:
        d = np.arccosh(np.maximum(np.cosh(S) * math.cosh(r) - np.sinh(S) * math.sinh(r) * np.cos(TH), 1.0))
    _, sn = spaceform.cs_sn(c, S)
    integrand = kernel(c, t, S) * kernel(c, t, d) * 2 * math.pi * np.sin(TH) * sn ** 2
    conv = float(np.sum(integrand * wsr[:, None] * wth[None, :]))
    return abs(float(kernel(c, 2 * t, r)) - conv)


# ---------------------------------------------------------------------------
# co-area Cauchy temperature
# ---------------------------------------------------------------------------

def radial_grid(c, ts, breakpoints=(), nodes=8):
    """Composite Gauss-Legendre nodes shared by every t in ``ts``.

    Panels grow geometrically from the smallest diffusion length to the
    tail radius of the largest t; ``breakpoints`` become panel edges.
    """
    ts = _check_t(np.atleast_1d(ts))
    top = max(r_max(c, t) for t in ts)
    h = 0.25 * math.sqrt(float(np.min(ts)))
    edges = [0.0]
    while edges[-1] < top:
        edges.append(min(top, edges[-1] + h))
        h *= 1.5
    edges = sorted(set(edges) | {b for b in breakpoints if 0 < b < top})
    x, w = np.polynomial.legendre.leggauss(nodes)
    rs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        rs.append(0.5 * (b - a) * (x + 1) + a)
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(rs), np.concatenate(ws)


class DensityCache:
    """Density values per (surface, point, r); filled in a build phase, then read-only."""

    def __init__(self):
        self._data = {}
        self._lock = threading.Lock()

    @staticmethod
    def key(s, x, r, tol):
        return (s.label(), tuple(np.round(np.asarray(x, dtype=float), 14)), round(float(r), 14), float(tol))

    def get(self, s, x, r, tol):
        return self._data.get(self.key(s, x, r, tol))

    def put(self, s, x, r, tol, val):
        with self._lock:
            self._data[self.key(s, x, r, tol)] = val

    def __len__(self):
        return len(self._data)


_CACHE = DensityCache()


def _general_fraction(s, x, r, n, tol, cells):
    """Density at any point x (the pole is the side gradient, or any direction at its zeros)."""
    from . import density as dmod

    try:
        pole = surface_normal(s, x)
    except dmod.DensityUsageError:
        pole = None
    fr = spaceform.tangent_frame(s.curvature, x, first=pole)
    return dmod._positive_fraction_refine(s, x, r, n, tol, frame=(fr[0], fr[1], fr[2]), cells=cells)


def distance_to_surface(s, x, starts=None):
    """Geodesic distance from x to the fixture surface (multi-start minimisation over the chart)."""
    x = np.asarray(x, dtype=float)
    c = s.curvature
    sd = float(s.side(x))
    if abs(sd) < ON_SURFACE_TOL:
        return 0.0
    f = lambda p: float(spaceform.distance(c, x, s.point(p[0], p[1])))
    starts = starts or [(u, v) for u in np.linspace(-3, 3, 7) for v in np.linspace(-2, 2, 5)]
    best = min(starts, key=f)
    res = optimize.minimize(f, best, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    return float(res.fun)


def node_tolerances(c, ts, rs, ws, tol=HEAT_DENSITY_TOL, utol=U_TOL, cap=1e-3):
    """Density tolerance per radial node.

    A density error e at node i moves u_C by at most e * w_i p(t, r_i) |S_r|,
    so nodes with little kernel weight are resolved only as far as the
    budget ``utol`` on u_C requires (never looser than ``cap``).
    """
    weight = np.max([ws * kernel(c, t, rs) * spaceform.sphere_area(c, rs) for t in ts], axis=0)
    loose = utol / (np.maximum(weight, 1e-300) * len(rs))
    return np.clip(loose, tol, max(cap, tol))


def density_profile_on_grid(s, x, rs, tols, n=HEAT_DENSITY_ORDER, cells=HEAT_THETA_CELLS, cache=_CACHE,
                            threads=None):
    x = np.asarray(x, dtype=float)
    on = abs(float(s.side(x))) < ON_SURFACE_TOL
    todo = [(r, tl) for r, tl in zip(rs, tols) if cache.get(s, x, r, tl) is None]

    def work(item):
        r, tl = item
        if on:
            val = _fraction(s, x, float(r), n, "refine", float(tl), cells)[0]
        else:
            val = _general_fraction(s, x, float(r), n, float(tl), cells)[0]
        cache.put(s, x, r, tl, val)

    pmap(work, todo, threads)
    return np.array([cache.get(s, x, r, tl) for r, tl in zip(rs, tols)])


def cauchy_temperatures(s, ts, x, nodes=8, n=HEAT_DENSITY_ORDER, tol=HEAT_DENSITY_TOL, utol=U_TOL,
                        cells=HEAT_THETA_CELLS, cache=_CACHE, threads=None, dist=None):
    """u_C(t, x) for every t in ``ts`` from one cached density profile."""
    ts = _check_t(np.atleast_1d(ts))
    x = np.asarray(x, dtype=float)
    if not spaceform.on_model(s.curvature, x, tol=1e-9):
        raise HeatUsageError("x is not a point of the model")
    d = distance_to_surface(s, x) if dist is None else float(dist)
    rs, ws = radial_grid(s.curvature, ts, breakpoints=(d,) if d > 0 else (), nodes=nodes)
    tols = node_tolerances(s.curvature, ts, rs, ws, tol, utol)
    dens = density_profile_on_grid(s, x, rs, tols, n, cells, cache, threads)
    area = spaceform.sphere_area(s.curvature, rs)
    return np.array([float(np.sum(ws * kernel(s.curvature, t, rs) * area * dens)) for t in ts])


def cauchy_temperature(s, t, x, **kw):
    return float(cauchy_temperatures(s, [t], x, **kw)[0])


# ---------------------------------------------------------------------------
# half-space oracles and the Dirichlet relation
# ---------------------------------------------------------------------------

def halfspace_cauchy(t, rho):
    """Exact Cauchy temperature of a half-space at signed depth rho."""
    return 0.5 * (1 + special.erf(rho / (2 * np.sqrt(t))))


def halfspace_dirichlet(t, rho):
    """Exact Dirichlet temperature of a half-space (reflection solution)."""
    return special.erf(rho / (2 * np.sqrt(t)))


def halfspace_flux(t):
    """Inward normal derivative of the half-space Dirichlet temperature at the wall."""
    return 1 / math.sqrt(math.pi * t)


@dataclass(frozen=True)
class DirichletReport:
    max_oracle_deviation: float
    max_relation_deviation: float
    flux_numeric: dict
    flux_exact: dict

    def as_dict(self):
        return {"max_oracle_deviation": self.max_oracle_deviation,
                "max_relation_deviation": self.max_relation_deviation,
                "flux_numeric": {str(k): v for k, v in self.flux_numeric.items()},
                "flux_exact": {str(k): v for k, v in self.flux_exact.items()}}


def dirichlet_relation_check(s, ts, depths, flux_h=1e-3, **kw):
    """Half-space check of u_D = 2 u_C - 1 against the erf oracles.

    ``s`` must be the Euclidean plane fixture; points are (0, 0, depth).
    The numeric flux is a central difference of 2 u_C - 1 across the wall.
    """
    if s.name != "euclidean_plane":
        raise HeatUsageError("the Dirichlet oracle is only available for the half-space")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    oracle = relation = 0.0
    for rho in depths:
        uc = cauchy_temperatures(s, ts, np.array([0.0, 0.0, rho]), dist=abs(rho), **kw)
        oracle = max(oracle, float(np.max(np.abs(uc - halfspace_cauchy(ts, rho)))))
        relation = max(relation, float(np.max(np.abs((2 * uc - 1) - halfspace_dirichlet(ts, rho)))))
    up = cauchy_temperatures(s, ts, np.array([0.0, 0.0, flux_h]), dist=flux_h, **kw)
    dn = cauchy_temperatures(s, ts, np.array([0.0, 0.0, -flux_h]), dist=flux_h, **kw)
    flux = (2 * up - 2 * dn) / (2 * flux_h)
    return DirichletReport(oracle, relation, {float(t): float(f) for t, f in zip(ts, flux)},
                           {float(t): halfspace_flux(t) for t in ts})


def helicoid_direct(t, x):
    """Cauchy temperature of the right-helicoid domain by slicing in z.

    Every horizontal slice of Omega_+ = {x sin z - y cos z > 0} is a half
    plane through the axis, so the 3-D Gaussian integral reduces to a 1-D
    integral of an error function.
    """
    x0, y0, z0 = (float(v) for v in x)
    s4t = 2 * math.sqrt(t)

    def f(z):
        g = math.exp(-(z - z0) ** 2 / (4 * t)) / math.sqrt(4 * math.pi * t)
        return g * 0.5 * (1 + math.erf((x0 * math.sin(z) - y0 * math.cos(z)) / s4t))

    w = 2 * math.sqrt(t) * math.sqrt(math.log(1e14))
    val, _ = integrate.quad(f, z0 - w, z0 + w, epsabs=1e-14, epsrel=1e-12, limit=400)
    return val
