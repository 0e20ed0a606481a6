"""The acceptance suite: ten criteria, each a list of named sub-checks."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import catalog, density, heat, identities, invariants, surface

GRID_U = (-1.5, 1.5)
GRID_V = (-1.2, 1.2)
HELICOID_ALPHAS = (0.14, 0.2, 0.4, 1.0)
DENSITY_RADII = (0.3, 0.7, 1.0, 1.5, 2.5)
HEAT_TIMES = (0.05, 0.5, 2.0)


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    passed: bool
    note: str = ""


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list = field(default_factory=list)
    runtime: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        failed = [c.name for c in self.checks if not c.passed]
        tail = f" failed: {', '.join(failed)}" if failed else ""
        return f"[{status}] {self.number:2d}. {self.title} ({len(self.checks)} checks, {self.runtime:.1f}s){tail}"

    def as_dict(self):
        return {"number": self.number, "title": self.title, "passed": self.passed, "runtime": self.runtime,
                "checks": [c.__dict__ for c in self.checks], "extra": self.extra}


def _below(name, value, threshold, note=""):
    value = float(value)
    return Check(name, value, threshold, bool(value < threshold), note)


def _grid(n):
    return [(u, v) for u in np.linspace(*GRID_U, n) for v in np.linspace(*GRID_V, n)]


def minimal_fixtures():
    out = [catalog.get("right_helicoid"), catalog.get("clifford_torus")]
    out += [catalog.get("hyperbolic_helicoid", alpha=a) for a in HELICOID_ALPHAS]
    out.append(catalog.get("spherical_helicoid", alpha=1.0))
    return out


def helicoid_fixtures():
    return ([catalog.get("right_helicoid"), catalog.get("clifford_torus")]
            + [catalog.get("hyperbolic_helicoid", alpha=a) for a in HELICOID_ALPHAS])


def catenoid_divergence_closed_form(v):
    """div(S grad K) on the catenoid (cosh v cos u, cosh v sin u, v), oriented into Omega_+."""
    ch, sh = math.cosh(v), math.sinh(v)
    return 4 * (ch * ch - 7 * sh * sh) / ch ** 10


# ---------------------------------------------------------------------------

def criterion_1(grid=20):
    r = CriterionResult(1, "minimality: max |eta| on helicoid fixtures")
    for s in minimal_fixtures():
        m = max(abs(surface.fundamental_data(s.chart, u, v).eta) for u, v in _grid(grid))
        r.checks.append(_below(f"{s.label()} max|eta|", m, 1e-8))
    return r


def criterion_2(grid=20):
    r = CriterionResult(2, "divergence condition div(S grad K) = 0")
    for s in minimal_fixtures():
        m = max(abs(surface.divergence_residual(s.chart, u, v)) / surface.scale_normalizer(s.chart, u, v)
                for u, v in _grid(grid))
        r.checks.append(_below(f"{s.label()} scaled residual", m, 1e-6))
    cat = catalog.get("catenoid")
    for v in (0.0, 0.3, -0.7):
        got = surface.divergence_residual(cat.chart, 0.2, v)
        want = catenoid_divergence_closed_form(v)
        r.checks.append(_below(f"catenoid v={v:g} vs closed form (relative)", abs(got - want) / abs(want), 2e-2))
    r.extra["catenoid_waist"] = surface.divergence_residual(cat.chart, 0.0, 0.0)
    return r


def criterion_3(order=invariants.DEFAULT_ORDER):
    r = CriterionResult(3, "gamma_0 = gamma_2 = 0 and gamma_4 = (5/16) div(S grad K)")
    cat = catalog.get("catenoid")
    cat_pts = [(0.0, 0.0), (0.4, 0.15), (-0.7, -0.8)]
    for u, v in cat_pts:
        rep = invariants.invariants(cat.chart, u, v, order)
        tag = f"catenoid ({u:g},{v:g})"
        r.checks.append(_below(f"{tag} |gamma0|", abs(rep.gamma0), 1e-9))
        r.checks.append(_below(f"{tag} |gamma2|", abs(rep.gamma2), 1e-4))
        rel = abs(rep.gamma4 - rep.predicted_gamma4) / max(abs(rep.gamma4), 1e-8)
        r.checks.append(_below(f"{tag} gamma4 vs 5/16 div (relative)", rel, 1e-2))
        wr = abs(rep.gamma4 - rep.gamma4_reduced) / max(abs(rep.gamma4), 1e-300)
        r.checks.append(_below(f"{tag} word vs reduced gamma4 (relative)", wr, 1e-6))
    for s in helicoid_fixtures():
        worst = {"g0": 0.0, "g2": 0.0, "g4": 0.0, "div": 0.0}
        for u, v in s.sample_params[:3]:
            rep = invariants.invariants(s.chart, u, v, order)
            worst["g0"] = max(worst["g0"], abs(rep.gamma0))
            worst["g2"] = max(worst["g2"], abs(rep.gamma2))
            worst["g4"] = max(worst["g4"], abs(rep.gamma4), abs(rep.gamma4_reduced))
            worst["div"] = max(worst["div"], abs(rep.predicted_gamma4))
        r.checks.append(_below(f"{s.label()} |gamma0|", worst["g0"], 1e-9))
        r.checks.append(_below(f"{s.label()} |gamma2|", worst["g2"], 1e-4))
        r.checks.append(_below(f"{s.label()} |gamma4|", worst["g4"], 1e-4))
        r.checks.append(_below(f"{s.label()} |5/16 div|", worst["div"], 1e-4))
    return r


def catenoid_identity_points():
    us = (0.0, 0.5, -1.1, 2.0, -2.6)
    vs = (0.0, 0.15, -0.7, 0.9, -1.2)
    return [(u, v) for u, v in zip(us, vs)] + [(u + 0.3, -v) for u, v in zip(us, vs)]


def criterion_4(order=invariants.DEFAULT_ORDER):
    r = CriterionResult(4, "second normal derivative of Lbar eta equals 8 div(S grad K)")
    cat = catalog.get("catenoid")
    for u, v in catenoid_identity_points():
        rep = invariants.identity_checks(cat.chart, u, v, order)
        rel = rep.technical_residual / max(abs(rep.technical_lhs), abs(rep.technical_rhs), 1e-12)
        r.checks.append(_below(f"catenoid ({u:g},{v:g}) relative", rel, 1e-3))
    return r


def criterion_5(order=invariants.DEFAULT_ORDER):
    r = CriterionResult(5, "even normal derivatives of eta vanish; ball eta matches Riccati")
    minimal = minimal_fixtures() + [catalog.get("catenoid"), catalog.get("euclidean_plane"),
                                    catalog.get("totally_geodesic_h2"), catalog.get("great_sphere")]
    for s in minimal:
        worst = 0.0
        for u, v in s.sample_params[:3]:
            cl = invariants.collar(s.chart, u, v, order)
            worst = max(worst, max(abs(x) for x in invariants.even_eta_coefficients(cl, 4).values()))
        r.checks.append(_below(f"{s.label()} even eta derivatives", worst, 1e-9))
    ball = catalog.get("round_sphere", radius=1.0)
    cl = invariants.collar(ball.chart, 0.3, 0.4, order)
    jet = invariants.eta_jet(cl)
    # eta(rho) = 2 / (1 - rho): every Taylor coefficient is 2
    err = max(abs(float(c) - 2.0) for c in jet.coeffs)
    r.checks.append(_below("unit ball eta jet vs 2/(1-rho)", err, 1e-10))
    return r


def _density_points(s):
    return s.boundary_points(5)


def criterion_6(n=32, tol=1e-9, radii=DENSITY_RADII, threads=None):
    r = CriterionResult(6, "1/2-uniform density")
    for s in catalog.half_domain_fixtures():
        worst = conv = 0.0
        for x in _density_points(s):
            p = density.profile(s, x, radii, n=n, tol=tol, threads=threads)
            q = density.profile(s, x, radii, n=2 * n, tol=tol, threads=threads)
            worst = max(worst, float(np.max(np.abs(p.sigma - 0.5))))
            conv = max(conv, float(np.max(np.abs(p.sigma - q.sigma))))
        r.checks.append(_below(f"{s.label()} max |density - 1/2|", worst, 2e-3))
        r.checks.append(_below(f"{s.label()} change on doubling n", conv, 1e-4))
    cat = catalog.get("catenoid")
    waist = cat.point(0.0, 0.0)
    dev = abs(density.density(cat, waist, 1.0, n=n, tol=tol) - 0.5)
    r.checks.append(Check("catenoid waist |density - 1/2| at r = 1", dev, 5e-3, dev > 5e-3,
                          "must exceed the threshold"))
    prof = density.profile(cat, waist, np.geomspace(0.04, 0.4, 8), n=n, tol=1e-12, threads=threads)
    fit = density.expansion_fit(prof)
    slope = fit.leading_order if not fit.inconclusive else float("nan")
    r.checks.append(Check("catenoid waist log-log slope", slope, 0.5, bool(abs(slope - 5) <= 0.5),
                          "|slope - 5| <= threshold"))
    r.extra["catenoid_fit"] = {"order": fit.leading_order, "coeff": fit.leading_coeff, "residual": fit.residual}
    for name, kw in (("right_helicoid", {}), ("hyperbolic_helicoid", {"alpha": 0.4}), ("clifford_torus", {})):
        s = catalog.get(name, **kw)
        split = density.ball_split(s, s.boundary_points(2)[1], 1.5, n=n, tol=tol, threads=threads)
        r.checks.append(_below(f"{s.label()} ball split relative gap", split.relative_gap, 2e-3))
    return r


def criterion_7(times=HEAT_TIMES, threads=None):
    r = CriterionResult(7, "boundary temperature 1/2")
    for s in catalog.half_domain_fixtures():
        worst = 0.0
        for x in s.boundary_points(5):
            uc = heat.cauchy_temperatures(s, times, x, threads=threads, dist=0.0)
            worst = max(worst, float(np.max(np.abs(uc - 0.5))))
        r.checks.append(_below(f"{s.label()} max |u_C - 1/2|", worst, 5e-3))
    for c in (-1, 0, 1):
        m = max(abs(heat.normalization(c, t) - 1) for t in times)
        r.checks.append(_below(f"kernel normalization, curvature {c}", m, 1e-6))
    plane = catalog.get("euclidean_plane")
    rep = heat.dirichlet_relation_check(plane, (0.05, 0.3, 1.0, 2.0), (0.2, 0.5, -0.4, 1.5), threads=threads)
    r.checks.append(_below("half-space vs erf oracle", rep.max_oracle_deviation, 1e-8))
    r.checks.append(_below("half-space u_D = 2 u_C - 1", rep.max_relation_deviation, 1e-8))
    flux = heat.halfspace_flux(0.25)
    r.checks.append(Check("half-space flux at t = 1/4 equals 2/sqrt(pi)", abs(flux - 2 / math.sqrt(math.pi)),
                          0.0, flux == 2 / math.sqrt(math.pi)))
    num = rep.flux_numeric[0.3]
    r.checks.append(_below("numeric flux at t = 0.3 vs 1/sqrt(pi t) (relative)",
                           abs(num - heat.halfspace_flux(0.3)) * math.sqrt(math.pi * 0.3), 1e-5))
    return r


def criterion_8():
    r = CriterionResult(8, "coefficient identities (exact)")
    ids = identities.verify_all()
    for c in ids.checks:
        r.checks.append(Check(c.label, 0.0 if c.passed else 1.0, 0.0, c.passed, repr(c.residual)))
    psi = identities.psi_condition()
    r.extra["psi"] = psi.as_dict()
    r.checks.append(Check("psi condition computed", float(psi.computed_locus), 0.0, True,
                          f"locus k^2 = {psi.computed_locus} sigma (stated: {psi.claimed_locus} sigma)"))
    ce = identities.counterexample()
    r.checks.append(Check("counterexample psi constant", float(ce.phi_coefficient), 0.0, ce.psi_is_constant,
                          f"psi = {ce.psi}"))
    return r


def criterion_9(n_random=1000, tol=1e-12):
    r = CriterionResult(9, "symmetry harness")
    for s in catalog.half_domain_fixtures():
        rep = catalog.symmetry_check(s, n_random=n_random, tol=tol, strict=False)
        r.checks.append(_below(f"{s.label()} chart identities",
                               max(rep.flow_chart_residual, rep.swap_chart_residual, rep.transport_residual), tol))
        r.checks.append(Check(f"{s.label()} side preserved/swapped", float(rep.side_preserved + rep.side_swapped),
                              2 * rep.points_tested, rep.side_preserved == rep.side_swapped == rep.points_tested))
    return r


def criterion_10(grid=7):
    r = CriterionResult(10, "asymptotic isothermal charts and rulings")
    for s in helicoid_fixtures():
        ch = s.asymptotic_chart
        (u0, u1), (v0, v1) = ch.domain
        us = np.linspace(max(u0, -1.5), min(u1, 1.5), grid)
        vs = np.linspace(max(v0, -1.2), min(v1, 1.2), grid)
        worst = {"E": 0.0, "Eid": 0.0, "Q": 0.0, "pde": 0.0}
        for u in us:
            for v in vs:
                d = surface.isothermal_diagnostics(ch, u, v)
                if s.name == "right_helicoid":
                    worst["E"] = max(worst["E"], abs(d.E - math.cosh(v) ** 2))
                worst["Eid"] = max(worst["Eid"], abs(d.E_identity) / max(1.0, d.E ** 2))
                worst["Q"] = max(worst["Q"], abs(d.Q_uv))
                worst["pde"] = max(worst["pde"], abs(d.logE_pde_residual))
        if s.name == "right_helicoid":
            r.checks.append(_below(f"{s.label()} E - cosh^2 v", worst["E"], 1e-12))
        r.checks.append(_below(f"{s.label()} E E_uv - 4 E_u E_v", worst["Eid"], 1e-8))
        r.checks.append(_below(f"{s.label()} Q_uv", worst["Q"], 1e-8))
        r.checks.append(_below(f"{s.label()} log E equation", worst["pde"], 1e-8))
        amb = max(surface.geodesic_ruling_check(s.chart, s.ruling_line, c).ambient_geodesic_residual
                  for c in (-0.9, 0.0, 1.3))
        r.checks.append(_below(f"{s.label()} ruling ambient geodesic", amb, 1e-8))
    return r


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}


def run_criterion(k, **kw):
    t0 = time.perf_counter()
    res = CRITERIA[k](**kw)
    res.runtime = time.perf_counter() - t0
    return res


def run_all(which=None, threads=None, echo=None):
    out = []
    for k in which or sorted(CRITERIA):
        kw = {"threads": threads} if k in (6, 7) else {}
        res = run_criterion(k, **kw)
        if echo:
            echo(res.line())
        out.append(res)
    return out
