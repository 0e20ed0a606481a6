from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import assume, given
from hypothesis import strategies as st

from halfheat import identities as I

NAMES = ("a1", "a2", "a3", "a4", "a5", "b1", "b2", "b3", "b4", "b5", "G0", "G1", "G2", "G3", "G4")
SYM = {n: sp.Symbol(n) for n in NAMES + ("u", "v", "k", "sigma")}


def to_sympy(p):
    out = sp.Integer(0)
    for mono, c in p.terms.items():
        term = sp.Rational(c.numerator, c.denominator)
        for name, e in mono:
            term *= SYM[name] ** e
        out += term
    return sp.expand(out)


@pytest.fixture(scope="module")
def sympy_coefficients():
    # independent expansion of f'^2 + g'^2 - P (f'' + g'') - psi(P) with P = 1 + f + g
    u, v = SYM["u"], SYM["v"]
    f = sum(SYM[f"a{i}"] * u ** i for i in range(1, 6))
    g = sum(SYM[f"b{i}"] * v ** i for i in range(1, 6))
    h = f + g
    psi = sum(SYM[f"G{i}"] * h ** i / sp.factorial(i) for i in range(5))
    expr = sp.expand(sp.diff(f, u) ** 2 + sp.diff(g, v) ** 2 - (1 + h) * (sp.diff(f, u, 2) + sp.diff(g, v, 2)) - psi)
    poly = sp.Poly(expr, u, v)
    return {m: c for m, c in zip(poly.monoms(), poly.coeffs())}


def test_all_identities_pass():
    res = I.verify_all()
    assert res.passed
    assert [label for label, _, _ in res.table()] == list(I.LABELS)
    assert len(I.LABELS) == 13


@pytest.mark.parametrize("label", list(I.RELATIONS))
def test_relations_against_sympy(sympy_coefficients, label):
    (i, j), rel = I.RELATIONS[label]
    want = sympy_coefficients.get((i, j), sp.Integer(0))
    cond = {SYM[n]: 0 for n in I.CONDITIONAL.get(label, {})}
    assert sp.expand((to_sympy(rel) - want).subs(cond)) == 0


def test_eight_needs_its_condition(sympy_coefficients):
    _, rel = I.RELATIONS["eight"]
    assert sp.expand(to_sympy(rel) - sympy_coefficients[(2, 2)]) != 0


@pytest.mark.parametrize("mono,expected", [
    ((0, 0), "a1**2 + b1**2 - 2*a2 - 2*b2 - G0"),
    ((1, 1), "-6*a1*b3 - 6*a3*b1 - a1*b1*G2"),
    ((2, 1), "-12*a4*b1 - 6*a2*b3 - G3*a1**2*b1/2 - G2*a2*b1"),
])
def test_named_coefficients(mono, expected):
    coeffs = I.expand_main_identity()
    assert sp.expand(to_sympy(coeffs[mono]) - sp.sympify(expected, locals=SYM)) == 0


@pytest.mark.parametrize("label", list(I.DERIVED))
def test_derived_multipliers(label):
    target, mult, cond = I.DERIVED[label]
    combo = sum(to_sympy(m) * to_sympy(I.RELATIONS[n][1]) for n, m in mult.items())
    subs = {SYM[n]: val for n, val in cond.items()}
    assert sp.expand((combo - to_sympy(target)).subs(subs)) == 0


def test_degenerate_substitution():
    # G2 = 2 G1 kills idone and idfour; idtwo and idthree keep a G3 - 2 G1 term
    out = I.degenerate_substitution()
    assert out["idone"].is_zero() and out["idfour"].is_zero()
    a1, b1, G1, G3 = (SYM[n] for n in ("a1", "b1", "G1", "G3"))
    assert sp.expand(to_sympy(out["idtwo"]) - (G3 - 2 * G1) * a1 ** 2 * b1) == 0
    assert sp.expand(to_sympy(out["idthree"]) - (G3 - 2 * G1) * a1 * b1 ** 2) == 0


def test_psi_condition():
    k, s, x = sp.symbols("k sigma x", positive=True)
    psi = 6 * k * x ** sp.Rational(7, 3) - 6 * s / k * x ** sp.Rational(5, 3)
    d1 = sp.diff(psi, x).subs(x, 1)
    d2 = sp.diff(psi, x, 2).subs(x, 1)
    rep = I.psi_condition()
    ours = {SYM["k"]: k, SYM["sigma"]: s}
    assert sp.simplify(to_sympy(rep.d1).subs(ours) - d1) == 0
    assert sp.simplify(to_sympy(rep.condition).subs(ours) - (d2 - 2 * d1)) == 0
    roots = sp.solve(d2 - 2 * d1, k)
    assert len(roots) == 1 and sp.simplify(roots[0] ** 2 - sp.Rational(10, 7) * s) == 0
    assert rep.computed_locus == Fraction(10, 7)
    assert not rep.agrees_with_claim
    assert rep.as_dict()["agrees"] is False


def test_psi_condition_value():
    rep = I.psi_condition(sigma=1, k=Fraction(1))
    assert rep.by_curvature["value"] == str(Fraction(-28, 3) + Fraction(40, 3))


def test_counterexample():
    ce = I.counterexample()
    assert ce.psi_is_constant
    assert ce.phi_coefficient == -4
    u, v = sp.symbols("u v")
    P = 1 + u ** 2 + v ** 2
    lap = -(sp.diff(sp.log(P), u, 2) + sp.diff(sp.log(P), v, 2))
    assert sp.simplify(P ** 2 * lap) == -4


_FLOAT = {label: sp.lambdify([SYM[n] for n in NAMES], to_sympy(rel))
          for label, (_, rel) in I.RELATIONS.items()}
_FLOAT = {label: (lambda fn: lambda **kw: fn(*(kw[n] for n in NAMES)))(fn) for label, fn in _FLOAT.items()}

rational = st.fractions(min_value=-5, max_value=5, max_denominator=12)


@given(a1=rational, a2=rational, G1=rational, G2=rational, G3=rational, mirror=st.booleans())
def test_flat_branch(a1, a2, G1, G2, G3, mirror):
    assume(G2 != 2 * G1 and (a1 != 0 or a2 != 0))
    vals = I.solve_branch("flat", {"a1": a1, "a2": a2, "G1": G1, "G2": G2, "G3": G3}, mirror=mirror)
    assert I.relations_hold(vals)
    res = I.case_analysis(vals)
    assert res.consistent
    assert res.depends_on == ("v" if mirror else "u")


@given(b2=rational, G1=rational, G2=rational, G3=rational, mirror=st.booleans())
def test_switched_branch(b2, G1, G2, G3, mirror):
    assume(G2 != 2 * G1 and b2 != 0)
    vals = I.solve_branch("switched", {"b2": b2, "G1": G1, "G2": G2, "G3": G3}, mirror=mirror)
    assert I.relations_hold(vals)
    res = I.case_analysis(vals)
    assert res.consistent
    assert res.depends_on == ("u" if mirror else "v")


def test_case_analysis_rejects_bad_input():
    vals = I.solve_branch("flat", {"a1": 1, "a2": 1, "G1": 1, "G2": 2, "G3": 0})
    with pytest.raises(ValueError):
        I.case_analysis(vals)
    vals = I.solve_branch("flat", {"a1": 1, "a2": 1, "G1": 1, "G2": 1, "G3": 0})
    vals["a3"] += 1
    with pytest.raises(ValueError):
        I.case_analysis(vals)
    with pytest.raises(ValueError):
        I.solve_branch("round", {"G1": 0, "G2": 1, "G3": 0})


@given(st.lists(rational, min_size=15, max_size=15))
def test_exact_and_float_evaluation_agree(xs):
    point = dict(zip(NAMES, xs))
    fpoint = {n: float(x) for n, x in point.items()}
    for label, (_, rel) in I.RELATIONS.items():
        exact = rel.evaluate(point)
        approx = _FLOAT[label](**fpoint)
        assert approx == pytest.approx(float(exact), rel=1e-12, abs=1e-9)
