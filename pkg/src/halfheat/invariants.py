"""Heat-flow invariants from the operator algebra on a boundary collar.

Near a base point the collar is described in Fermi coordinates
``(u, v, rho)``: ``P(u, v, rho)`` is the point at distance ``rho`` along the
normal geodesic through ``X(u, v)``.  Every quantity is a trivariate Taylor
jet in the displacement ``(du, dv, rho)``, so normal *and* tangential
derivatives are exact up to truncation.  In these coordinates the metric
is ``d rho^2 + g_rho`` and

* ``eta_rho = -d_rho log sqrt(det g_rho)`` (mean curvature of the leaf),
* ``Nop phi = 2 d_rho phi - eta phi``,
* ``Lap phi = -phi'' + eta phi' + Lbar phi`` with ``Lbar`` the positive
  Laplacian of the leaf metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from . import series, spaceform
from .series import Jet
from .surface import fundamental_data, local_geometry


class CollarTooWideError(ValueError):
    """A focal point of the parallel family lies inside the requested collar."""


class InsufficientOrderError(ValueError):
    """The collar jets are too short for the requested operator word."""


DEFAULT_ORDER = 6
DEFAULT_RADIUS = 0.3


# ---------------------------------------------------------------------------
# Riccati transport of the shape operator
# ---------------------------------------------------------------------------

def _cs_sn_prime(c, rho):
    cs, sn = spaceform.cs_sn(c, rho)
    return cs, sn, -c * sn, cs


def riccati_eigenvalue(c, k0, rho):
    """Principal curvature of the parallel surface at distance rho.

    Solves ``k' = k^2 + c`` with ``k(0) = k0`` as ``k = -A'/A``,
    ``A = cs(rho) - k0 sn(rho)``.  Works for floats, arrays and jets.
    """
    cs, sn, dcs, dsn = _cs_sn_prime(c, rho)
    return -(dcs - k0 * dsn) / (cs - k0 * sn)


def riccati_matrix(c, S0, rho):
    """Closed-form solution of ``S' = S^2 + c I`` for a 2x2 coordinate matrix."""
    S0 = np.asarray(S0, dtype=float)
    cs, sn, dcs, dsn = _cs_sn_prime(c, float(rho))
    I = np.eye(len(S0))
    A = cs * I - sn * S0
    dA = dcs * I - dsn * S0
    return -dA @ np.linalg.inv(A)


def focal_distance(c, k0):
    """Distance to the first zero of ``cs - k0 sn`` (inf if none)."""
    if c == 0:
        return 1.0 / k0 if k0 > 0 else math.inf
    if c == 1:
        return math.atan2(1.0, k0)
    return math.atanh(1.0 / k0) if k0 > 1 else math.inf


def riccati_numeric(c, S0, rhos):
    """4th/5th-order Runge-Kutta solution of ``S' = S^2 + c I`` sampled at ``rhos``."""
    S0 = np.asarray(S0, dtype=float)
    n = len(S0)

    def rhs(_, y):
        S = y.reshape(n, n)
        return (S @ S + c * np.eye(n)).ravel()

    sol = solve_ivp(rhs, (0.0, float(np.max(rhos))), S0.ravel(), method="RK45",
                    t_eval=np.asarray(rhos, dtype=float), rtol=1e-12, atol=1e-14)
    return sol.y.T.reshape(-1, n, n)


def riccati_crosscheck(c, S0, radius=DEFAULT_RADIUS, samples=31):
    """max |closed form - numerical integration| over rho in [0, radius]."""
    rhos = np.linspace(0.0, radius, samples)
    num = riccati_numeric(c, S0, rhos)
    return float(max(np.max(np.abs(riccati_matrix(c, S0, r) - m)) for r, m in zip(rhos, num)))


def riccati_eta_jet(c, k_principal, order=DEFAULT_ORDER):
    """Univariate jet of ``eta(rho) = sum k_i(rho)`` from the closed form."""
    rho = Jet.variable(0, 1, order)
    out = Jet.constant(0.0, 1, order)
    for k0 in k_principal:
        out = out + riccati_eigenvalue(c, float(k0), rho)
    return out


# ---------------------------------------------------------------------------
# collar geometry
# ---------------------------------------------------------------------------

@dataclass
class Collar:
    """Fermi-coordinate geometry around one base point (jets in du, dv, rho)."""

    curvature: int
    u: float
    v: float
    order: int
    P: list
    g: tuple
    ginv: tuple
    sqrt_detg: Jet
    eta: Jet
    S: tuple
    K0: float
    k_principal: tuple

    # tangential calculus on leaves ------------------------------------------
    def grad_bar(self, phi):
        gi11, gi12, _, gi22 = self.ginv
        pu, pv = phi.diff(0), phi.diff(1)
        return gi11 * pu + gi12 * pv, gi12 * pu + gi22 * pv

    def div_bar(self, Y):
        rg = self.sqrt_detg
        return ((rg * Y[0]).diff(0) + (rg * Y[1]).diff(1)) / rg

    def lap_bar(self, phi):
        return -self.div_bar(self.grad_bar(phi))

    def apply_S(self, Y):
        s11, s12, s21, s22 = self.S
        return s11 * Y[0] + s12 * Y[1], s21 * Y[0] + s22 * Y[1]

    # normal calculus ----------------------------------------------------------
    def d_rho(self, phi):
        return phi.diff(2)

    def lap_R(self, phi):
        d1 = phi.diff(2)
        return -d1.diff(2) + self.eta * d1

    def lap(self, phi):
        return self.lap_R(phi) + self.lap_bar(phi)

    def nop(self, phi):
        return 2.0 * phi.diff(2) - self.eta * phi

    def one(self):
        return Jet.constant(1.0, 3, self.order)

    def lift(self, fn):
        """Trivariate jet of ``fn(u, v, rho)`` written with :mod:`halfheat.series` functions."""
        uj = Jet.variable(0, 3, self.order, self.u)
        vj = Jet.variable(1, 3, self.order, self.v)
        rj = Jet.variable(2, 3, self.order)
        out = fn(uj, vj, rj)
        return out if isinstance(out, Jet) else Jet.constant(float(out), 3, self.order)


def _value(j):
    if j.order < 0:
        raise InsufficientOrderError("jet exhausted")
    return float(j.const)


def _restrict_rho(j):
    """Univariate rho-jet at the base point (du = dv = 0)."""
    return j.restrict({0: 0, 1: 0})


def collar(chart, u, v, order=DEFAULT_ORDER, radius=None):
    """Collar geometry at chart point (u, v) with jets of total degree ``order``.

    The jets are formal in rho; ``radius`` only asks that the parallel
    surfaces stay regular out to that distance (CollarTooWideError
    otherwise).  Without it nothing beyond non-focality at rho = 0 is
    required.
    """
    if order > series.MAX_ORDER - 1:
        raise ValueError(f"collar order is limited to {series.MAX_ORDER - 1}")
    c = chart.curvature
    geo = local_geometry(chart, u, v, order=order - 1)
    fd = fundamental_data(chart, u, v)
    for k in fd.k_principal:
        if radius is not None and focal_distance(c, k) <= radius:
            raise CollarTooWideError(
                f"focal distance {focal_distance(c, k):.4g} within collar radius {radius} at ({u}, {v})")
    X = [x.truncate(order).embed(3, (0, 1)) for x in geo.X]
    N = [n.truncate(order).embed(3, (0, 1)) for n in geo.N]
    rho = Jet.variable(2, 3, order)
    cs, sn = spaceform.cs_sn(c, rho)
    P = [cs * x + sn * n for x, n in zip(X, N)]
    Pu = [p.diff(0) for p in P]
    Pv = [p.diff(1) for p in P]
    ip = lambda a, b: spaceform.inner(c, a, b)
    E, F, G = ip(Pu, Pu), ip(Pu, Pv), ip(Pv, Pv)
    detg = E * G - F * F
    inv = 1.0 / detg
    ginv = (G * inv, -F * inv, -F * inv, E * inv)
    sqrt_detg = series.sqrt(detg)
    eta = -series.log(sqrt_detg).diff(2)
    # l_rho = -1/2 d_rho g_rho, S_rho = g_rho^{-1} l_rho
    L, M, Nn = (-0.5 * x.diff(2) for x in (E, F, G))
    gi11, gi12, gi21, gi22 = ginv
    S = (gi11 * L + gi12 * M, gi11 * M + gi12 * Nn, gi21 * L + gi22 * M, gi21 * M + gi22 * Nn)
    return Collar(c, float(u), float(v), order, P, (E, F, G), ginv, sqrt_detg, eta, S,
                  fd.K, fd.k_principal)


# ---------------------------------------------------------------------------
# operator words
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorWord:
    """``coeff * W`` for a word W over {"N", "L"} (L = Laplacian); rightmost letter acts first."""

    letters: str
    coeff: Fraction = Fraction(1)

    def __post_init__(self):
        if set(self.letters) - {"N", "L"}:
            raise ValueError("operator words use the letters N and L only")

    @property
    def degree(self):
        return sum(1 if ch == "N" else 2 for ch in self.letters)

    def __str__(self):
        return f"{self.coeff}*{self.letters}"


D_WORDS = {
    2: (OperatorWord("N", Fraction(1, 2)),),
    4: (OperatorWord("LN", Fraction(-1, 16)), OperatorWord("NL", Fraction(-3, 16))),
    6: tuple(OperatorWord(w, Fraction(k, 768)) for w, k in (
        ("LNNN", 1), ("NNNL", -1), ("NLNN", 1), ("NNLN", -1),
        ("NLL", 40), ("LLN", 8), ("LNL", 16))),
}

# D_6 applied to 1, using N1 = -eta and L1 = 0, as words acting on eta
D6_REDUCED = tuple(OperatorWord(w, Fraction(k, 768)) for w, k in (
    ("LNN", -1), ("NLN", -1), ("NNL", 1), ("LL", -8)))


@dataclass
class CollarField:
    collar: Collar
    values: Jet

    def at_base(self):
        return _value(self.values)

    def rho_jet(self):
        return _restrict_rho(self.values)


def _apply_letters(letters, cl, phi):
    for ch in reversed(letters):
        phi = cl.nop(phi) if ch == "N" else cl.lap(phi)
    return phi


def apply_operator(word, field):
    """Apply a word, or a sum of words, to a collar field."""
    words = (word,) if isinstance(word, OperatorWord) else tuple(word)
    cl = field.collar
    need = max(w.degree for w in words)
    if field.values.order < need:
        raise InsufficientOrderError(
            f"words of degree {need} need jets of order >= {need}, have {field.values.order}")
    total = None
    for w in words:
        term = float(w.coeff) * _apply_letters(w.letters, cl, field.values)
        total = term if total is None else total + term
    return CollarField(cl, total)


def d_one(cl, k):
    """D_k applied to the constant 1, as a collar field."""
    return apply_operator(D_WORDS[k], CollarField(cl, cl.one()))


@dataclass(frozen=True)
class GammaResult:
    gamma: float
    reduced: float = None


def gamma(chart, u, v, k, order=DEFAULT_ORDER, cl=None):
    """Heat invariant gamma_k = (1 + k/2) D_{k+2}1 at chart point (u, v)."""
    if k not in (0, 2, 4):
        raise ValueError("only gamma_0, gamma_2 and gamma_4 are available")
    cl = collar(chart, u, v, order) if cl is None else cl
    val = (1 + k / 2) * d_one(cl, k + 2).at_base()
    reduced = None
    if k == 4:
        reduced = 3.0 * apply_operator(D6_REDUCED, CollarField(cl, cl.eta)).at_base()
    elif k == 0:
        reduced = -0.5 * _value(cl.eta)
    return GammaResult(val, reduced)


@dataclass(frozen=True)
class InvariantReport:
    u: float
    v: float
    eta: float
    K: float
    gamma0: float
    gamma2: float
    gamma4: float
    gamma4_reduced: float
    div_residual: float
    scale: float

    @property
    def predicted_gamma4(self):
        return 5.0 / 16.0 * self.div_residual

    def as_dict(self):
        d = dict(self.__dict__)
        d["predicted_gamma4"] = self.predicted_gamma4
        return d


def invariants(chart, u, v, order=DEFAULT_ORDER):
    """gamma_0, gamma_2, gamma_4 (both forms) and the divergence residual at (u, v)."""
    from .surface import divergence_residual

    cl = collar(chart, u, v, order)
    g0 = gamma(chart, u, v, 0, cl=cl)
    g2 = gamma(chart, u, v, 2, cl=cl)
    g4 = gamma(chart, u, v, 4, cl=cl)
    scale = max(1.0, abs(cl.K0) * max(abs(k) for k in cl.k_principal))
    return InvariantReport(float(u), float(v), _value(cl.eta), cl.K0, g0.gamma, g2.gamma,
                           g4.gamma, g4.reduced, divergence_residual(chart, u, v), scale)


# ---------------------------------------------------------------------------
# identity checks
# ---------------------------------------------------------------------------

def eta_jet(cl):
    """Univariate rho-jet of the leaf mean curvature at the base point."""
    return _restrict_rho(cl.eta)


def even_eta_coefficients(cl, upto=4):
    """Normal derivatives d^k eta / d rho^k at the base point for even k <= upto."""
    j = eta_jet(cl)
    return {k: float(j.coeffs[k]) * math.factorial(k) for k in range(0, min(upto, j.order) + 1, 2)}


def riccati_trace_residual(cl):
    """max |coefficient| of d_rho eta - tr(S^2) - 2 c over the base-point rho-jet."""
    s11, s12, s21, s22 = cl.S
    trS2 = s11 * s11 + 2.0 * s12 * s21 + s22 * s22
    res = _restrict_rho(cl.eta.diff(2) - trS2 - 2.0 * cl.curvature)
    return float(np.max(np.abs(res.coeffs)))


def odd_trace_powers(cl, up_to=5):
    S = np.array([[_value(cl.S[0]), _value(cl.S[1])], [_value(cl.S[2]), _value(cl.S[3])]])
    return {n: float(np.trace(np.linalg.matrix_power(S, n))) for n in range(1, up_to + 1, 2)}


def _default_w(u, v, rho):
    return series.sin(u) * series.cos(v) + 0.5 * u * v * v + 0.3 * v


def _default_h(rho):
    return 0.7 * rho * rho - 0.2 * rho ** 3 + 0.1 * series.cos(rho)


def _covariant_d_rho(cl, Y):
    """Covariant derivative along the normal geodesics of an ambient vector jet field."""
    d = [y.diff(2) for y in Y]
    if cl.curvature == 0:
        return d
    P = [p.truncate(d[0].order) for p in cl.P]
    coef = cl.curvature * spaceform.inner(cl.curvature, d, P)
    return [a - coef * p for a, p in zip(d, P)]


def _ambient_from_coords(cl, Y):
    Pu = [p.diff(0) for p in cl.P]
    Pv = [p.diff(1) for p in cl.P]
    return [Y[0] * a + Y[1] * b for a, b in zip(Pu, Pv)]


def _ambient_shape(cl, Y):
    """S(Y) computed in the model as -nabla_Y of the unit normal field d_rho P."""
    Nf = [p.diff(2) for p in cl.P]
    out = []
    for i, var in enumerate((0, 1)):
        dN = [n.diff(var) for n in Nf]
        if cl.curvature != 0:
            P = [p.truncate(dN[0].order) for p in cl.P]
            coef = cl.curvature * spaceform.inner(cl.curvature, dN, P)
            dN = [a - coef * p for a, p in zip(dN, P)]
        out.append([-x for x in dN])
    return [Y[0] * a + Y[1] * b for a, b in zip(*out)]


@dataclass(frozen=True)
class IdentityReport:
    technical_lhs: float
    technical_rhs: float
    technical_residual: float
    lemma_lhs: float
    lemma_rhs: float
    lemma_residual: float
    commutation_residual: float
    even_eta: dict
    riccati_trace_residual: float
    scale: float

    def as_dict(self):
        return dict(self.__dict__)


def identity_checks(chart, u, v, order=DEFAULT_ORDER, w=None, h=None):
    """Residuals of the normal-derivative identities at (u, v).

    * technical identity: ``d^2/dN^2 Lbar eta = 8 div(S grad K)`` on minimal
      surfaces (``-8 delta(S grad K)`` with ``delta = -div``);
    * second-derivative lemma for ``phi = h(rho) + rho w + rho^2 w``:
      ``d^2/dN^2 Lbar phi = Lbar(phi'') - 4 div(S grad phi')``;
    * commutation ``nabla_N grad phi = grad(phi') + S(grad phi)`` computed
      in the ambient model for the same ``phi``.
    """
    from .surface import divergence_residual

    cl = collar(chart, u, v, order)
    scale = max(1.0, abs(cl.K0) * max(abs(k) for k in cl.k_principal))
    div = divergence_residual(chart, u, v)
    lhs_t = 2.0 * float(_restrict_rho(cl.lap_bar(cl.eta)).coeffs[2])
    rhs_t = 8.0 * div

    w = _default_w if w is None else w
    h = _default_h if h is None else h
    wj = cl.lift(w)
    rho = Jet.variable(2, 3, cl.order)
    phi = cl.lift(lambda a, b, r: h(r)) + rho * wj + rho * rho * wj
    lhs_l = 2.0 * float(_restrict_rho(cl.lap_bar(phi)).coeffs[2])
    d1 = phi.diff(2)
    d2 = d1.diff(2)
    rhs_l = _value(cl.lap_bar(d2)) - 4.0 * _value(cl.div_bar(cl.apply_S(cl.grad_bar(d1))))

    grad = _ambient_from_coords(cl, cl.grad_bar(phi))
    lhs_c = _covariant_d_rho(cl, grad)
    rhs_c1 = _ambient_from_coords(cl, cl.grad_bar(d1))
    rhs_c2 = _ambient_shape(cl, cl.grad_bar(phi))
    comm = max(abs(_value(a - b - c)) for a, b, c in zip(lhs_c, rhs_c1, rhs_c2))

    return IdentityReport(lhs_t, rhs_t, abs(lhs_t - rhs_t), lhs_l, rhs_l, abs(lhs_l - rhs_l), comm,
                          even_eta_coefficients(cl), riccati_trace_residual(cl), scale)
