"""Exact coefficient identities for P = 1 + f(u) + g(v) with P^2 Lap log P = psi(P).

With the positive flat Laplacian the condition reads

    f'^2 + g'^2 - (1 + f + g)(f'' + g'') = psi(1 + f + g),

where f = a1 u + ... + a5 u^5, g = b1 v + ... + b5 v^5 and psi is expanded
about 1 through its derivatives G0..G4.  Everything here is rational
arithmetic on :class:`ExactPoly`; nothing is evaluated in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .series import ExactPoly, poly_vars

TRUNCATION = 4

a1, a2, a3, a4, a5 = poly_vars("a1", "a2", "a3", "a4", "a5")
b1, b2, b3, b4, b5 = poly_vars("b1", "b2", "b3", "b4", "b5")
G0, G1, G2, G3, G4 = poly_vars("G0", "G1", "G2", "G3", "G4")
u, v = poly_vars("u", "v")
k_, sigma_ = poly_vars("k", "sigma")

HALF = Fraction(1, 2)

# (LHS - RHS) normal forms, keyed by the monomial u^i v^j they come from
RELATIONS = {
    "zero": ((0, 0), a1 ** 2 + b1 ** 2 - 2 * (a2 + b2) - G0),
    "onet": ((1, 0), 2 * a1 * (a2 - b2) - 6 * a3 - G1 * a1),
    "two": ((0, 1), 2 * b1 * (b2 - a2) - 6 * b3 - G1 * b1),
    "three": ((2, 0), 2 * a2 ** 2 - 12 * a4 - 2 * a2 * b2 - (a2 * G1 + HALF * a1 ** 2 * G2)),
    "four": ((0, 2), 2 * b2 ** 2 - 12 * b4 - 2 * a2 * b2 - (b2 * G1 + HALF * b1 ** 2 * G2)),
    "five": ((1, 1), -6 * a1 * b3 - 6 * a3 * b1 - a1 * b1 * G2),
    "six": ((2, 1), -12 * a4 * b1 - 6 * a2 * b3 - HALF * (G3 * a1 ** 2 * b1 + 2 * G2 * a2 * b1)),
    "seven": ((1, 2), -12 * a1 * b4 - 6 * a3 * b2 - HALF * (G3 * b1 ** 2 * a1 + 2 * G2 * b2 * a1)),
    "eight": ((2, 2), -12 * (a2 * b4 + a4 * b2) - G2 * a2 * b2),
}
# (eight) only holds in this form once a1 = b1 = 0
CONDITIONAL = {"eight": {"a1": 0, "b1": 0}}

# derived identities: target, multipliers on the coefficient relations, side condition
DERIVED = {
    "idone": ((G2 - 2 * G1) * a1 * b1,
              {"onet": b1, "two": a1, "five": ExactPoly.const(-1)}, {}),
    "idtwo": (b1 * ((G3 - G2) * a1 ** 2 + 2 * (G2 - 2 * G1) * a2),
              {"two": 2 * a2, "three": 2 * b1, "six": ExactPoly.const(-2)}, {}),
    "idthree": (a1 * ((G3 - G2) * b1 ** 2 + 2 * (G2 - 2 * G1) * b2),
                {"onet": 2 * b2, "four": 2 * a1, "seven": ExactPoly.const(-2)}, {}),
    "idfour": ((G2 - 2 * G1) * a2 * b2,
               {"three": b2, "four": a2, "eight": ExactPoly.const(-1)}, {"a1": 0, "b1": 0}),
}

LABELS = tuple(RELATIONS) + tuple(DERIVED)


class IdentityRegressionError(AssertionError):
    pass


def _truncate(p, order):
    keep = {}
    for mono, c in p.terms.items():
        d = dict(mono)
        if d.get("u", 0) + d.get("v", 0) <= order:
            keep[mono] = c
    return ExactPoly(keep)


def _uv_coefficient(p, i, j):
    """Coefficient of u^i v^j as a polynomial in the remaining indeterminates."""
    out = {}
    for mono, c in p.terms.items():
        d = dict(mono)
        if d.get("u", 0) == i and d.get("v", 0) == j:
            rest = tuple((n, e) for n, e in mono if n not in ("u", "v"))
            out[rest] = c
    return ExactPoly(out)


def _series(cs, x):
    return sum((c * x ** (i + 1) for i, c in enumerate(cs)), ExactPoly())


def _d(p, name):
    out = {}
    for mono, c in p.terms.items():
        d = dict(mono)
        e = d.get(name, 0)
        if e:
            d[name] = e - 1
            out[tuple(d.items())] = c * e
    return ExactPoly(out)


def main_identity_residual(order=TRUNCATION):
    """LHS - RHS of the main identity, truncated at total degree ``order`` in (u, v)."""
    f = _series((a1, a2, a3, a4, a5), u)
    g = _series((b1, b2, b3, b4, b5), v)
    h = f + g
    fu, gv = _d(f, "u"), _d(g, "v")
    lhs = fu * fu + gv * gv - (1 + h) * (_d(fu, "u") + _d(gv, "v"))
    rhs = ExactPoly()
    power = ExactPoly.const(1)
    for kk, gam in enumerate((G0, G1, G2, G3, G4)):
        rhs = rhs + gam * power / factorial(kk)
        power = _truncate(power * h, order)
    return _truncate(lhs - rhs, order)


def expand_main_identity(order=TRUNCATION):
    """Map (i, j) -> coefficient of u^i v^j for i + j <= order; checks the stored relations."""
    res = main_identity_residual(order)
    coeffs = {(i, j): _uv_coefficient(res, i, j) for i in range(order + 1) for j in range(order + 1 - i)}
    for label, (mono, rel) in RELATIONS.items():
        got = coeffs[mono]
        diff = got - rel
        if label in CONDITIONAL:
            diff = diff.substitute(CONDITIONAL[label])
        if not diff.is_zero():
            raise IdentityRegressionError(f"coefficient of u^{mono[0]} v^{mono[1]} ({label}) differs by {diff}")
    return coeffs


@dataclass
class IdentityCheck:
    label: str
    residual: ExactPoly
    multipliers: dict = field(default_factory=dict)
    condition: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.residual.is_zero()


@dataclass
class IdentitySet:
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def table(self):
        return [(c.label, "PASS" if c.passed else "FAIL", repr(c.residual)) for c in self.checks]

    def __getitem__(self, label):
        return next(c for c in self.checks if c.label == label)


def coefficient_checks(order=TRUNCATION):
    res = main_identity_residual(order)
    out = []
    for label, (mono, rel) in RELATIONS.items():
        diff = _uv_coefficient(res, *mono) - rel
        cond = CONDITIONAL.get(label, {})
        if cond:
            diff = diff.substitute(cond)
        out.append(IdentityCheck(label, diff, condition=cond))
    return out


def derive_lemma_identities():
    """Each derived identity as an explicit combination of the coefficient relations."""
    out = []
    for label, (target, mult, cond) in DERIVED.items():
        combo = sum((m * RELATIONS[name][1] for name, m in mult.items()), ExactPoly())
        diff = combo - target
        if cond:
            diff = diff.substitute(cond)
        out.append(IdentityCheck(label, diff, {n: repr(m) for n, m in mult.items()}, cond))
    return out


def verify_all(order=TRUNCATION):
    return IdentitySet(coefficient_checks(order) + derive_lemma_identities())


def degenerate_substitution():
    """Derived targets after G2 = 2 G1 (all should vanish identically)."""
    return {label: t.substitute({"G2": 2 * G1}) for label, (t, _, _) in DERIVED.items()}


# ---------------------------------------------------------------------------
# the psi condition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerSum:
    """sum_i c_i x^{p_i} with ExactPoly coefficients and rational exponents."""

    terms: tuple

    def derivative(self):
        return PowerSum(tuple((c * p, p - 1) for c, p in self.terms if p != 0))

    def at_one(self):
        return sum((c for c, _ in self.terms), ExactPoly())


def psi_of_k():
    """psi(x) = 6 k x^{7/3} - (6 sigma / k) x^{5/3}."""
    return PowerSum(((6 * k_, Fraction(7, 3)), (-6 * sigma_ / k_, Fraction(5, 3))))


CLAIMED_LOCUS = Fraction(5, 6)


@dataclass
class PsiReport:
    psi: PowerSum
    d1: ExactPoly
    d2: ExactPoly
    condition: ExactPoly
    computed_locus: Fraction
    claimed_locus: Fraction
    by_curvature: dict

    @property
    def agrees_with_claim(self):
        return self.computed_locus == self.claimed_locus

    def as_dict(self):
        return {"psi_prime_1": repr(self.d1), "psi_second_1": repr(self.d2),
                "psi_second_minus_twice_prime": repr(self.condition),
                "computed_locus_k2_over_sigma": str(self.computed_locus),
                "claimed_locus_k2_over_sigma": str(self.claimed_locus),
                "agrees": self.agrees_with_claim,
                "by_curvature": {str(s): v for s, v in self.by_curvature.items()}}


def _locus(cond):
    # cond = A k + B sigma / k; vanishes iff k^2 = -(B / A) sigma
    A = cond.coefficient_of({"k": 1})
    B = cond.coefficient_of({"sigma": 1, "k": -1})
    rest = cond - A * k_ - B * sigma_ / k_
    if not rest.is_zero() or A == 0:
        raise IdentityRegressionError(f"unexpected shape of the psi condition: {cond}")
    return -B / A


def psi_condition(sigma=None, k=None):
    """psi'(1), psi''(1), psi''(1) - 2 psi'(1) and the locus where the latter vanishes.

    With ``sigma``/``k`` given the condition is also evaluated exactly.
    """
    psi = psi_of_k()
    d1p = psi.derivative()
    d1 = d1p.at_one()
    d2 = d1p.derivative().at_one()
    cond = d2 - 2 * d1
    locus = _locus(cond)
    by = {}
    for s in (-1, 0, 1):
        c = cond.substitute({"sigma": s})
        if s == 0:
            by[s] = f"{c}; nonzero for every k > 0"
        elif locus * s > 0:
            by[s] = f"{c}; vanishes iff k^2 = {locus * s}"
        else:
            by[s] = f"{c}; nonzero for every k > 0"
    rep = PsiReport(psi, d1, d2, cond, locus, CLAIMED_LOCUS, by)
    if sigma is not None and k is not None:
        vals = {"sigma": Fraction(sigma), "k": Fraction(k)}
        rep.by_curvature["value"] = str(cond.evaluate(vals))
    return rep


@dataclass(frozen=True)
class Counterexample:
    psi: ExactPoly
    phi_coefficient: Fraction
    psi_condition: ExactPoly

    @property
    def psi_is_constant(self):
        return not any(n in ("u", "v") for n in self.psi.variables)


def counterexample():
    """P = 1 + u^2 + v^2: P^2 Lap log P is constant, so psi is constant.

    Returns psi, the constant c in phi(r) = c r^{-2} and the (vanishing)
    psi'' - 2 psi' for the constant psi.
    """
    P = 1 + u * u + v * v
    Pu, Pv = _d(P, "u"), _d(P, "v")
    lap = -(_d(Pu, "u") + _d(Pv, "v"))
    psi = Pu * Pu + Pv * Pv + P * lap
    c = psi.coefficient_of({})
    cond = ExactPoly()  # derivatives of a constant
    return Counterexample(psi, c, cond)


# ---------------------------------------------------------------------------
# case analysis
# ---------------------------------------------------------------------------

COEFFS = ("a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4")


@dataclass
class Deduction:
    statement: str
    source: str
    holds: bool


@dataclass
class CaseAnalysis:
    branch: str
    deductions: list
    depends_on: str

    @property
    def consistent(self):
        return all(d.holds for d in self.deductions)


def _val(values, name):
    return Fraction(values.get(name, 0))


def relations_hold(values):
    """True when every coefficient relation vanishes exactly at ``values``."""
    full = {n: Fraction(values.get(n, 0)) for n in
            ("a1", "a2", "a3", "a4", "a5", "b1", "b2", "b3", "b4", "b5", "G0", "G1", "G2", "G3", "G4")}
    for label, (_, rel) in RELATIONS.items():
        if label in CONDITIONAL and any(full[n] != 0 for n in CONDITIONAL[label]):
            continue
        if rel.evaluate(full) != 0:
            return False
    return True


def case_analysis(values):
    """Replay the case split on an exact assignment satisfying the relations.

    Requires G2 != 2 G1.  Every deduction is checked against ``values``;
    ``depends_on`` reports which variable survives through degree 4.
    """
    if not relations_hold(values):
        raise ValueError("assignment does not satisfy the coefficient relations")
    if _val(values, "G2") == 2 * _val(values, "G1"):
        raise ValueError("the case split needs G2 != 2 G1")
    z = lambda *names: all(_val(values, n) == 0 for n in names)
    steps = [Deduction("a1 b1 = 0", "idone", _val(values, "a1") * _val(values, "b1") == 0)]
    if _val(values, "b1") == 0:
        branch, mine, other = "b1 = 0", "b", "a"
    else:
        branch, mine, other = "a1 = 0", "a", "b"
    m = lambda i: f"{mine}{i}"
    o = lambda i: f"{other}{i}"
    steps.append(Deduction(f"{m(3)} = 0", "two" if mine == "b" else "onet", z(m(3))))
    steps.append(Deduction(f"{o(1)} {m(2)} = 0", "idthree" if mine == "b" else "idtwo",
                           _val(values, o(1)) * _val(values, m(2)) == 0))
    if _val(values, m(2)) == 0:
        steps.append(Deduction(f"{m(4)} = 0", "four" if mine == "b" else "three", z(m(4))))
        survivor = "u" if mine == "b" else "v"
    else:
        steps.append(Deduction(f"{o(3)} = 0", "onet" if mine == "b" else "two", z(o(3))))
        steps.append(Deduction(f"{o(1)} = 0", "idthree" if mine == "b" else "idtwo", z(o(1))))
        steps.append(Deduction(f"{o(2)} = 0", "idfour", z(o(2))))
        steps.append(Deduction(f"{o(4)} = 0", "three" if mine == "b" else "four", z(o(4))))
        survivor = "v" if mine == "b" else "u"
    dead = "b" if survivor == "u" else "a"
    steps.append(Deduction(f"{dead}1 = {dead}2 = {dead}3 = {dead}4 = 0", "conclusion",
                           z(*(f"{dead}{i}" for i in range(1, 5)))))
    return CaseAnalysis(branch, steps, survivor)


def solve_branch(branch, free, mirror=False):
    """An exact assignment satisfying the relations on one branch of the case split.

    ``branch`` is "flat" (the second function vanishes to degree 4) or
    "switched" (its quadratic coefficient is nonzero, forcing the first
    to vanish).  ``free`` supplies the free rationals: for "flat" the keys
    a1, a2, G1..G4; for "switched" b2, G1..G4.  ``mirror`` swaps a and b.
    """
    F = {k2: Fraction(v2) for k2, v2 in free.items()}
    g1, g2 = F["G1"], F["G2"]
    vals = {n: Fraction(0) for n in COEFFS}
    vals.update({"G1": g1, "G2": g2, "G3": F["G3"], "G4": F.get("G4", Fraction(0))})
    if branch == "flat":
        x1, x2 = F["a1"], F["a2"]
        vals["a1"], vals["a2"] = x1, x2
        vals["a3"] = x1 * (2 * x2 - g1) / 6
        vals["a4"] = (2 * x2 * x2 - x2 * g1 - HALF * x1 * x1 * g2) / 12
        vals["G0"] = x1 * x1 - 2 * x2
    elif branch == "switched":
        y2 = F["b2"]
        vals["b2"] = y2
        vals["b4"] = (2 * y2 * y2 - y2 * g1) / 12
        vals["G0"] = -2 * y2
    else:
        raise ValueError(f"unknown branch {branch!r}")
    if mirror:
        swapped = {}
        for n, val in vals.items():
            if n[0] in "ab" and n[1:].isdigit():
                swapped[("b" if n[0] == "a" else "a") + n[1:]] = val
            else:
                swapped[n] = val
        vals = swapped
    return vals
