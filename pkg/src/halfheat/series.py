"""Truncated Taylor series and exact multivariate polynomials.

A :class:`Jet` is a multivariate power series truncated at a total degree.
Coefficients are Taylor coefficients (not derivatives): the jet
``sum c[a] x**a`` carries ``d^a f / a! = c[a]``.  Coefficients are either
binary floats (fast path through :mod:`halfheat.kernels`) or exact ring
elements (``Fraction`` or :class:`ExactPoly`), handled by a generic loop.

The module-level functions :func:`sin`, :func:`cos`, :func:`exp`, ... accept
floats, numpy arrays or jets, so analytic chart maps written with them can
be evaluated pointwise or expanded to any order.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from numbers import Number, Rational

import numpy as np

from . import kernels

MAX_ORDER = 8


class JetDomainError(ArithmeticError):
    """Raised for operations outside a jet's domain (e.g. 1/j with j(0) = 0)."""


# ---------------------------------------------------------------------------
# index tables
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def monomials(nvars, order):
    """Exponent tuples of total degree <= order, graded then lexicographic."""
    out = []
    for deg in range(order + 1):
        for e in iproduct(range(deg + 1), repeat=nvars):
            if sum(e) == deg:
                out.append(e)
    out.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return tuple(out)


@lru_cache(maxsize=None)
def _index(nvars, order):
    return {e: i for i, e in enumerate(monomials(nvars, order))}


@lru_cache(maxsize=None)
def _product_table(nvars, order):
    mons = monomials(nvars, order)
    idx = _index(nvars, order)
    p, q, r = [], [], []
    for i, a in enumerate(mons):
        da = sum(a)
        for j, b in enumerate(mons):
            if da + sum(b) > order:
                continue
            p.append(i)
            q.append(j)
            r.append(idx[tuple(x + y for x, y in zip(a, b))])
    return (np.array(p, dtype=np.intp), np.array(q, dtype=np.intp),
            np.array(r, dtype=np.intp))


@lru_cache(maxsize=None)
def _deriv_table(nvars, order, var):
    src = _index(nvars, order)
    tgt, s, fac = [], [], []
    for i, e in enumerate(monomials(nvars, order - 1)):
        up = list(e)
        up[var] += 1
        tgt.append(i)
        s.append(src[tuple(up)])
        fac.append(up[var])
    return np.array(tgt, dtype=np.intp), np.array(s, dtype=np.intp), np.array(fac)


def _is_float_ring(arr):
    return arr.dtype != object


# ---------------------------------------------------------------------------
# Jet
# ---------------------------------------------------------------------------

class Jet:
    """Truncated multivariate Taylor series around a base point.

    Parameters
    ----------
    coeffs : array_like
        Flat coefficient array in the order of :func:`monomials`.
    nvars, order : int
        Number of variables and truncation degree.
    """

    __slots__ = ("coeffs", "nvars", "order")
    __array_priority__ = 1000

    def __init__(self, coeffs, nvars, order):
        if order < 0:
            raise ValueError("jet order must be non-negative")
        if order > MAX_ORDER + 1:
            raise ValueError(f"jet order {order} exceeds the supported maximum")
        coeffs = np.asarray(coeffs)
        if coeffs.dtype != object:
            coeffs = coeffs.astype(float)
        size = len(monomials(nvars, order))
        if coeffs.shape != (size,):
            raise ValueError(f"expected {size} coefficients, got {coeffs.shape}")
        self.coeffs = coeffs
        self.nvars = nvars
        self.order = order

    # construction -----------------------------------------------------------
    @classmethod
    def constant(cls, value, nvars, order, exact=False):
        c = cls._zeros(nvars, order, exact)
        c[0] = value
        return cls(c, nvars, order)

    @classmethod
    def variable(cls, var, nvars, order, value=0.0, exact=False):
        """The jet of ``x_var`` expanded around ``value``."""
        c = cls._zeros(nvars, order, exact)
        c[0] = value
        if order >= 1:
            e = [0] * nvars
            e[var] = 1
            c[_index(nvars, order)[tuple(e)]] = 1 if exact else 1.0
        return cls(c, nvars, order)

    @classmethod
    def from_dict(cls, terms, nvars, order, exact=False):
        c = cls._zeros(nvars, order, exact)
        idx = _index(nvars, order)
        for e, val in terms.items():
            e = tuple(e) if not isinstance(e, int) else (e,)
            if sum(e) <= order:
                c[idx[e]] = val
        return cls(c, nvars, order)

    @staticmethod
    def _zeros(nvars, order, exact):
        n = len(monomials(nvars, order))
        if exact:
            c = np.empty(n, dtype=object)
            c[:] = [Fraction(0)] * n
            return c
        return np.zeros(n)

    def _like(self, coeffs, order=None):
        return Jet(coeffs, self.nvars, self.order if order is None else order)

    @property
    def exact(self):
        return not _is_float_ring(self.coeffs)

    @property
    def const(self):
        return self.coeffs[0]

    def __getitem__(self, exps):
        """Taylor coefficient of the monomial with exponent tuple ``exps``."""
        if isinstance(exps, int):
            exps = (exps,)
        if sum(exps) > self.order:
            raise IndexError("monomial above truncation order")
        return self.coeffs[_index(self.nvars, self.order)[tuple(exps)]]

    def derivative_value(self, exps):
        """Partial derivative d^exps f at the base point."""
        if isinstance(exps, int):
            exps = (exps,)
        return self[exps] * math.prod(math.factorial(k) for k in exps)

    def terms(self):
        return dict(zip(monomials(self.nvars, self.order), self.coeffs))

    # truncation / embedding -------------------------------------------------
    def truncate(self, order):
        if order > self.order:
            raise ValueError("cannot raise the order of a jet by truncation")
        n = len(monomials(self.nvars, order))
        return Jet(self.coeffs[:n].copy(), self.nvars, order)

    def embed(self, nvars, positions):
        """View this jet as a jet in ``nvars`` variables; variable i maps to positions[i]."""
        c = Jet._zeros(nvars, self.order, self.exact)
        idx = _index(nvars, self.order)
        for e, val in zip(monomials(self.nvars, self.order), self.coeffs):
            full = [0] * nvars
            for k, pos in enumerate(positions):
                full[pos] = e[k]
            c[idx[tuple(full)]] = val
        return Jet(c, nvars, self.order)

    def restrict(self, fixed):
        """Coefficients as a jet in the remaining variables.

        ``fixed`` maps variable index -> exponent; returns the jet (in the
        other variables) of the coefficient of ``prod x_k**fixed[k]``.
        """
        keep = [k for k in range(self.nvars) if k not in fixed]
        shift = sum(fixed.values())
        order = self.order - shift
        if order < 0:
            raise ValueError("restriction above truncation order")
        c = Jet._zeros(len(keep), order, self.exact)
        idx = _index(len(keep), order)
        for e, val in zip(monomials(self.nvars, self.order), self.coeffs):
            if all(e[k] == v for k, v in fixed.items()):
                c[idx[tuple(e[k] for k in keep)]] = val
        return Jet(c, len(keep), order)

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError("jets over different numbers of variables")
            order = min(self.order, other.order)
            a = self if self.order == order else self.truncate(order)
            b = other if other.order == order else other.truncate(order)
            return a, b
        return None, None

    def __add__(self, other):
        a, b = self._coerce(other)
        if a is not None:
            return a._like(a.coeffs + b.coeffs)
        c = self.coeffs.copy()
        c[0] = c[0] + other
        return self._like(c)

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return self._like(self.coeffs * other)
        return a._like(_mul_coeffs(a.coeffs, b.coeffs, a.nvars, a.order))

    __rmul__ = __mul__

    def reciprocal(self):
        c0 = self.const
        if c0 == 0:
            raise JetDomainError("reciprocal of a jet with zero constant term")
        inv = Fraction(1) / c0 if self.exact and isinstance(c0, Rational) else 1 / c0
        derivs = [math.factorial(k) * (-1) ** k * inv ** (k + 1) for k in range(self.order + 1)]
        return compose_analytic(self, c0, derivs)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        if self.exact and isinstance(other, int):
            other = Fraction(other)
        return self._like(self.coeffs / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if isinstance(n, int) and n >= 0:
            out = Jet.constant(1 if self.exact else 1.0, self.nvars, self.order, self.exact)
            base = self
            while n:
                if n & 1:
                    out = out * base
                base = base * base
                n >>= 1
            return out
        return power(self, n)

    # calculus ---------------------------------------------------------------
    def diff(self, var=0):
        """Partial derivative in ``var``; the result has order - 1."""
        if self.order == 0:
            raise JetDomainError("cannot differentiate an order-0 jet")
        tgt, src, fac = _deriv_table(self.nvars, self.order, var)
        c = Jet._zeros(self.nvars, self.order - 1, self.exact)
        c[tgt] = self.coeffs[src] * fac
        return Jet(c, self.nvars, self.order - 1)

    def integrate(self, var=0):
        """Antiderivative in ``var`` vanishing at the base point; order + 1."""
        order = self.order + 1
        idx = _index(self.nvars, order)
        c = Jet._zeros(self.nvars, order, self.exact)
        for e, val in zip(monomials(self.nvars, self.order), self.coeffs):
            up = list(e)
            up[var] += 1
            c[idx[tuple(up)]] = val / (Fraction(up[var]) if self.exact else up[var])
        return Jet(c, self.nvars, order)

    def __call__(self, *offsets):
        """Evaluate the truncated polynomial at displacement ``offsets`` from the base."""
        if len(offsets) != self.nvars:
            raise ValueError("wrong number of offsets")
        total = 0
        for e, val in zip(monomials(self.nvars, self.order), self.coeffs):
            total = total + val * math.prod(o ** k for o, k in zip(offsets, e))
        return total

    def __repr__(self):
        return f"Jet(nvars={self.nvars}, order={self.order}, coeffs={self.coeffs!r})"


def _mul_coeffs(a, b, nvars, order):
    p, q, r = _product_table(nvars, order)
    n = len(monomials(nvars, order))
    if _is_float_ring(a) and _is_float_ring(b):
        return kernels.mul(a, b, p, q, r, n)
    out = Jet._zeros(nvars, order, exact=True)
    for i, j, k in zip(p, q, r):
        ai, bj = a[i], b[j]
        if ai == 0 or bj == 0:
            continue
        out[k] = out[k] + ai * bj
    return out


def jet1(coeffs, order=None):
    """Univariate jet from a coefficient list c0, c1, ..."""
    coeffs = list(coeffs)
    order = len(coeffs) - 1 if order is None else order
    exact = any(not isinstance(c, (float, np.floating)) and not isinstance(c, int) for c in coeffs)
    c = Jet._zeros(1, order, exact)
    for k, val in enumerate(coeffs[: order + 1]):
        c[k] = val
    return Jet(c, 1, order)


def jet2(terms, order, exact=False):
    """Bivariate jet from a ``{(i, j): c_ij}`` mapping."""
    return Jet.from_dict(terms, 2, order, exact)


def compose_analytic(j, base, derivs):
    """Taylor composition h(j) for a function with derivatives ``derivs`` at ``base``.

    ``derivs[k]`` is h^(k)(base); at least ``j.order + 1`` entries are used.
    """
    if not isinstance(j, Jet):
        raise TypeError("compose_analytic expects a Jet")
    c0 = j.const
    if j.exact:
        if c0 != base:
            raise ValueError(f"jet constant term {c0} does not match base {base}")
    elif abs(c0 - base) > 1e-12 * max(1.0, abs(base)):
        raise ValueError(f"jet constant term {c0} does not match base {base}")
    derivs = list(derivs)
    if len(derivs) < j.order + 1:
        raise ValueError("not enough derivatives for the jet order")
    m = j.order
    if j.exact or any(isinstance(d, (Fraction, ExactPoly)) for d in derivs[: m + 1]):
        taylor = [_exact_div(derivs[k], math.factorial(k)) for k in range(m + 1)]
        delta = j.coeffs.copy()
        delta[0] = Fraction(0)
        if not j.exact:
            delta = np.array([Fraction(x) for x in delta], dtype=object)
        dj = Jet(delta, j.nvars, m)
        acc = Jet.constant(taylor[m], j.nvars, m, exact=True)
        for k in range(m - 1, -1, -1):
            acc = acc * dj + taylor[k]
        return acc
    taylor = np.array([float(derivs[k]) / math.factorial(k) for k in range(m + 1)])
    delta = j.coeffs.copy()
    delta[0] = 0.0
    p, q, r = _product_table(j.nvars, m)
    return Jet(kernels.horner(delta, taylor, p, q, r, len(delta)), j.nvars, m)


def _exact_div(x, n):
    if isinstance(x, ExactPoly):
        return x / n
    return Fraction(x) / n


def revert(j):
    """Series reversion of a univariate jet ``w = j(delta)``.

    Returns the jet of ``delta`` as a function of ``w - j(0)``; requires a
    non-zero linear coefficient.
    """
    if j.nvars != 1:
        raise ValueError("revert expects a univariate jet")
    c1 = j[1]
    if c1 == 0:
        raise JetDomainError("series reversion needs a non-zero linear term")
    m = j.order
    shifted = j - j.const
    eps = Jet.variable(0, 1, m, exact=j.exact)
    delta = eps / c1
    for _ in range(m):
        higher = compose_poly(shifted, delta) - delta * c1
        delta = (eps - higher) / c1
    return delta


def compose_poly(outer, inner):
    """Substitute the jet ``inner`` (zero constant term) into the univariate ``outer``."""
    acc = Jet.constant(outer.coeffs[outer.order], inner.nvars, inner.order, inner.exact)
    for k in range(outer.order - 1, -1, -1):
        acc = acc * inner + outer.coeffs[k]
    return acc


# ---------------------------------------------------------------------------
# elementary functions on floats, arrays and jets
# ---------------------------------------------------------------------------

def _cyclic(values, m):
    return [values[k % len(values)] for k in range(m + 1)]


def sin(x):
    if isinstance(x, Jet):
        s, c = math.sin(x.const), math.cos(x.const)
        return compose_analytic(x, x.const, _cyclic([s, c, -s, -c], x.order))
    return np.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s, c = math.sin(x.const), math.cos(x.const)
        return compose_analytic(x, x.const, _cyclic([c, -s, -c, s], x.order))
    return np.cos(x)


def sinh(x):
    if isinstance(x, Jet):
        s, c = math.sinh(x.const), math.cosh(x.const)
        return compose_analytic(x, x.const, _cyclic([s, c], x.order))
    return np.sinh(x)


def cosh(x):
    if isinstance(x, Jet):
        s, c = math.sinh(x.const), math.cosh(x.const)
        return compose_analytic(x, x.const, _cyclic([c, s], x.order))
    return np.cosh(x)


def exp(x):
    if isinstance(x, Jet):
        e = math.exp(x.const)
        return compose_analytic(x, x.const, [e] * (x.order + 1))
    return np.exp(x)


def log(x):
    if isinstance(x, Jet):
        c = x.const
        if c <= 0:
            raise JetDomainError("log of a jet with non-positive constant term")
        d = [math.log(c)] + [(-1) ** (k - 1) * math.factorial(k - 1) / c ** k
                             for k in range(1, x.order + 1)]
        return compose_analytic(x, c, d)
    return np.log(x)


def power(x, p):
    """x**p for real ``p`` (jets need a positive constant term unless p is a whole number)."""
    if isinstance(x, Jet):
        c = x.const
        if c <= 0 and not float(p).is_integer():
            raise JetDomainError("fractional power of a jet with non-positive constant term")
        d, fall = [], 1.0
        for k in range(x.order + 1):
            d.append(fall * c ** (p - k) if fall != 0 else 0.0)
            fall *= p - k
        return compose_analytic(x, c, d)
    return np.power(x, p)


def sqrt(x):
    return power(x, 0.5) if isinstance(x, Jet) else np.sqrt(x)


def arctanh(x):
    if isinstance(x, Jet):
        c = x.const
        if abs(c) >= 1:
            raise JetDomainError("arctanh outside (-1, 1)")
        # d/dx arctanh = 1/(1 - x^2); expand the derivative as a jet and integrate.
        t = Jet.variable(0, 1, max(x.order - 1, 0), c)
        dj = (1.0 - t * t).reciprocal()
        d = [math.atanh(c)] + [dj.coeffs[k] * math.factorial(k) for k in range(x.order)]
        return compose_analytic(x, c, d)
    return np.arctanh(x)


# ---------------------------------------------------------------------------
# exact polynomials
# ---------------------------------------------------------------------------

#: Canonical indeterminate order; unknown names sort after these, alphabetically.
INDETERMINATES = (
    "a1", "a2", "a3", "a4", "a5",
    "b1", "b2", "b3", "b4", "b5",
    "G0", "G1", "G2", "G3", "G4",
    "k", "sigma", "u", "v",
)
_RANK = {name: i for i, name in enumerate(INDETERMINATES)}


def _var_key(name):
    return (_RANK.get(name, len(_RANK)), name)


def _mono_mul(m1, m2):
    d = dict(m1)
    for name, e in m2:
        d[name] = d.get(name, 0) + e
    return tuple(sorted(((n, e) for n, e in d.items() if e != 0), key=lambda t: _var_key(t[0])))


class ExactPoly:
    """Sparse multivariate (Laurent) polynomial with rational coefficients.

    Monomials are tuples of ``(name, exponent)`` pairs in canonical order;
    zero coefficients are never stored.  Negative exponents are allowed so
    that expressions such as ``6*sigma/k`` stay polynomial-like.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c != 0:
                mono = tuple(sorted(((n, e) for n, e in mono if e != 0), key=lambda t: _var_key(t[0])))
                clean[mono] = clean.get(mono, Fraction(0)) + c
                if clean[mono] == 0:
                    del clean[mono]
        self.terms = clean

    @classmethod
    def var(cls, name):
        return cls({((name, 1),): 1})

    @classmethod
    def const(cls, c):
        return cls({(): c})

    @staticmethod
    def _lift(x):
        if isinstance(x, ExactPoly):
            return x
        if isinstance(x, (int, Fraction)):
            return ExactPoly.const(x)
        if isinstance(x, Number) and float(x).is_integer():
            return ExactPoly.const(int(x))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, Fraction(0)) + c
        return ExactPoly(t)

    __radd__ = __add__

    def __neg__(self):
        return ExactPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                t[m] = t.get(m, Fraction(0)) + c1 * c2
        return ExactPoly(t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return ExactPoly({m: c / other for m, c in self.terms.items()})
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if len(other.terms) == 1:
            (mono, c), = other.terms.items()
            inv = ExactPoly({tuple((n, -e) for n, e in mono): 1 / c})
            return self * inv
        raise ZeroDivisionError("exact division only by monomials")

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, n):
        out = ExactPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def variables(self):
        names = {n for m in self.terms for n, _ in m}
        return tuple(sorted(names, key=_var_key))

    def coefficient_of(self, exponents):
        """Exact coefficient of the monomial given as ``{name: exponent}``."""
        mono = tuple(sorted(((n, e) for n, e in dict(exponents).items() if e != 0),
                            key=lambda t: _var_key(t[0])))
        return self.terms.get(mono, Fraction(0))

    def substitute(self, values):
        """Replace indeterminates by numbers or polynomials."""
        out = ExactPoly()
        for mono, c in self.terms.items():
            term = ExactPoly.const(c)
            for name, e in mono:
                if name in values:
                    val = self._lift(values[name])
                    if e < 0:
                        term = term / (val ** (-e))
                    else:
                        term = term * val ** e
                else:
                    term = term * ExactPoly({((name, e),): 1})
            out = out + term
        return out

    def evaluate(self, values):
        """Numeric value; exact when all ``values`` are rationals."""
        total = 0
        for mono, c in self.terms.items():
            term = c if all(isinstance(values[n], (int, Fraction)) for n, _ in mono) else float(c)
            for name, e in mono:
                term = term * values[name] ** e
            total = total + term
        return total

    def degree(self):
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def __repr__(self):
        if not self.terms:
            return "0"
        def key(item):
            mono = item[0]
            return (-sum(e for _, e in mono), [(_var_key(n), -e) for n, e in mono])
        parts = []
        for mono, c in sorted(self.terms.items(), key=key):
            body = "*".join(n if e == 1 else f"{n}^{e}" for n, e in mono)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_vars(*names):
    return tuple(ExactPoly.var(n) for n in names)
