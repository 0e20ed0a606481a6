"""The three simply connected 3-dimensional space forms.

Models
------
* curvature 0: Euclidean R^3, points are 3-vectors;
* curvature +1: unit sphere in R^4;
* curvature -1: upper sheet of the hyperboloid ``p0^2 - p1^2 - p2^2 - p3^2 = 1``
  in Minkowski space.

:func:`ambient_form` is the bilinear form of the linear model (Lorentz
signature ``+---`` for the hyperboloid).  The Riemannian metric on tangent
vectors is :func:`inner`, which for curvature -1 equals ``-ambient_form``;
with it every model point satisfies ``inner(p, p) = curvature`` and the
covariant derivative of a curve is the flat second derivative minus
``curvature * inner(c'', p) * p``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import series

MEMBERSHIP_TOL = 1e-10
CURVATURES = (-1, 0, 1)


class SpaceFormError(ValueError):
    """Usage error: bad curvature, wrong dimension, off-model data."""


def check_curvature(c):
    if c not in CURVATURES:
        raise SpaceFormError(f"curvature must be one of {CURVATURES}, got {c!r}")
    return int(c)


def dim(c):
    """Ambient dimension of the linear model."""
    return 3 if check_curvature(c) == 0 else 4


def metric_signs(c):
    """Diagonal of the Riemannian (tangent) form in the linear model."""
    if check_curvature(c) == -1:
        return np.array([-1.0, 1.0, 1.0, 1.0])
    return np.ones(dim(c))


def _check_dims(c, *vecs):
    n = dim(c)
    for x in vecs:
        if np.shape(x)[-1] != n:
            raise SpaceFormError(f"curvature {c} model needs {n}-vectors, got shape {np.shape(x)}")


def ambient_form(c, a, b):
    """Euclidean dot product (c = 0, +1) or Lorentz form ``a0 b0 - a1 b1 - a2 b2 - a3 b3`` (c = -1)."""
    c = check_curvature(c)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_dims(c, a, b)
    if c == -1:
        return a[..., 0] * b[..., 0] - np.sum(a[..., 1:] * b[..., 1:], axis=-1)
    return np.sum(a * b, axis=-1)


def inner(c, a, b):
    """Riemannian inner product of tangent vectors (works on arrays and jet lists)."""
    signs = metric_signs(c)
    if isinstance(a, (list, tuple)) or isinstance(b, (list, tuple)):
        total = 0
        for s, x, y in zip(signs, a, b):
            total = total + (x * y if s > 0 else -(x * y))
        return total
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_dims(c, a, b)
    return np.sum(signs * a * b, axis=-1)


def cs_sn(c, s):
    """Generalized cosine and sine: (cos, sin), (1, s) or (cosh, sinh)."""
    c = check_curvature(c)
    if c == 1:
        return series.cos(s), series.sin(s)
    if c == -1:
        return series.cosh(s), series.sinh(s)
    if isinstance(s, series.Jet):
        return series.Jet.constant(1.0, s.nvars, s.order) + 0 * s, s
    return np.ones_like(np.asarray(s, dtype=float)), s


def on_model(c, p, tol=MEMBERSHIP_TOL):
    c = check_curvature(c)
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != dim(c):
        return False
    if c == 0:
        return bool(np.all(np.isfinite(p)))
    resid = inner(c, p, p) - c
    scale = np.maximum(1.0, np.sum(p * p, axis=-1))
    ok = np.abs(resid) <= tol * scale
    if c == -1:
        ok = ok & (p[..., 0] >= 1.0 - tol)
    return bool(np.all(ok))


@dataclass(frozen=True)
class AmbientPoint:
    curvature: int
    coords: tuple

    def __post_init__(self):
        check_curvature(self.curvature)
        if not on_model(self.curvature, self.coords):
            raise SpaceFormError(f"{self.coords} is not on the curvature-{self.curvature} model")

    @classmethod
    def of(cls, c, coords):
        return cls(c, tuple(float(x) for x in coords))

    def array(self):
        return np.array(self.coords)


@dataclass(frozen=True)
class TangentVector:
    base: AmbientPoint
    vec: tuple

    def __post_init__(self):
        c = self.base.curvature
        _check_dims(c, np.asarray(self.vec))
        if c != 0:
            r = inner(c, self.base.array(), np.asarray(self.vec))
            if abs(r) > MEMBERSHIP_TOL * max(1.0, float(np.dot(self.vec, self.vec))):
                raise SpaceFormError("vector is not tangent at its base point")

    def array(self):
        return np.array(self.vec)


def project_tangent(c, p, w):
    """Orthogonal projection of an ambient vector onto T_p M."""
    p = np.asarray(p, dtype=float)
    w = np.asarray(w, dtype=float)
    if check_curvature(c) == 0:
        return w
    return w - (inner(c, w, p) / c)[..., None] * p


def geodesic(c, p, xi, s, tol=1e-9):
    """Point at arclength ``s`` along the unit-speed geodesic from ``p`` in direction ``xi``.

    ``p``, ``xi`` may carry leading batch axes; ``s`` broadcasts against them.
    """
    c = check_curvature(c)
    p = np.asarray(p, dtype=float)
    xi = np.asarray(xi, dtype=float)
    _check_dims(c, p, xi)
    norm = inner(c, xi, xi)
    if np.any(np.abs(norm - 1.0) > tol):
        raise SpaceFormError("geodesic direction must be a unit tangent vector")
    s = np.asarray(s, dtype=float)
    cs, sn = cs_sn(c, s)
    return p * np.asarray(cs)[..., None] + xi * np.asarray(sn)[..., None]


def distance(c, p, q):
    c = check_curvature(c)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    _check_dims(c, p, q)
    if c == 0:
        return np.linalg.norm(p - q, axis=-1)
    if c == 1:
        # the chord formula is well conditioned near 0 and near pi
        chord = np.linalg.norm(p - q, axis=-1)
        return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))
    d = p - q
    h = np.sqrt(np.maximum(inner(c, d, d), 0.0))  # Riemannian chord length
    return 2.0 * np.arcsinh(h / 2.0)


def sphere_area(c, r):
    """Area of a geodesic sphere of radius r."""
    c = check_curvature(c)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise SpaceFormError("radius must be non-negative")
    if c == 1 and np.any(r >= np.pi):
        raise SpaceFormError("geodesic spheres in S^3 need r < pi")
    if c == 0:
        return 4.0 * np.pi * r ** 2
    if c == 1:
        return 4.0 * np.pi * np.sin(r) ** 2
    return 4.0 * np.pi * np.sinh(r) ** 2


def ball_volume(c, r):
    c = check_curvature(c)
    if c == 0:
        return 4.0 / 3.0 * np.pi * r ** 3
    if c == 1:
        return np.pi * (2.0 * r - np.sin(2.0 * r))
    return np.pi * (np.sinh(2.0 * r) - 2.0 * r)


def poincare_from_hyperboloid(p):
    """Poincare-ball coordinates ``(p1, p2, p3) / (1 + p0)``."""
    p = np.asarray(p, dtype=float)
    _check_dims(-1, p)
    return p[..., 1:] / (1.0 + p[..., :1])


def hyperboloid_from_poincare(x):
    x = np.asarray(x, dtype=float)
    n2 = np.sum(x * x, axis=-1, keepdims=True)
    if np.any(n2 >= 1.0):
        raise SpaceFormError("Poincare coordinates must lie in the open unit ball")
    return np.concatenate([(1 + n2) / (1 - n2), 2 * x / (1 - n2)], axis=-1)


def tangent_frame(c, p, first=None):
    """Orthonormal basis (rows) of T_p M; if given, ``first`` is the first vector's direction."""
    c = check_curvature(c)
    p = np.asarray(p, dtype=float)
    n = dim(c)
    cands = [] if first is None else [np.asarray(first, dtype=float)]
    cands += list(np.eye(n))
    frame = []
    for w in cands:
        w = project_tangent(c, p, w)
        for e in frame:
            w = w - inner(c, w, e) * e
        nn = inner(c, w, w)
        if nn > 1e-8:
            frame.append(w / np.sqrt(nn))
        if len(frame) == 3:
            break
    return np.array(frame)


@dataclass(frozen=True)
class Isometry:
    """Affine map ``x -> matrix @ x + shift`` of the linear model.

    ``shift`` is only non-zero for curvature 0 (Euclidean motions).
    """

    curvature: int
    matrix: np.ndarray
    shift: np.ndarray = None

    def __post_init__(self):
        c = check_curvature(self.curvature)
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        n = dim(c)
        shift = np.zeros(n) if self.shift is None else np.asarray(self.shift, dtype=float)
        object.__setattr__(self, "shift", shift)
        if m.shape != (n, n):
            raise SpaceFormError(f"isometry of curvature-{c} model must be {n}x{n}")
        if c != 0 and np.any(shift != 0):
            raise SpaceFormError("only Euclidean isometries carry a translation")
        J = np.diag(metric_signs(c))
        if np.max(np.abs(m.T @ J @ m - J)) > 1e-12 * max(1.0, np.max(np.abs(m)) ** 2):
            raise SpaceFormError("matrix does not preserve the ambient form")
        if c == -1 and m[0, 0] < 0:
            raise SpaceFormError("hyperbolic isometries must preserve the upper sheet")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.matrix.T + self.shift

    def compose(self, other):
        return Isometry(self.curvature, self.matrix @ other.matrix,
                        self.matrix @ other.shift + self.shift)

    def preserves_form(self, a, b, tol=1e-12):
        """Check the tangent-vector form is preserved (linear part only)."""
        la = np.asarray(a, dtype=float) @ self.matrix.T
        lb = np.asarray(b, dtype=float) @ self.matrix.T
        return abs(inner(self.curvature, la, lb) - inner(self.curvature, a, b)) <= tol * max(
            1.0, float(np.abs(inner(self.curvature, a, b))))
