"""Definition-level invariants of a front computed by finite differences.

:class:`FrontOracle` only sees a map ``f(u, v)`` into ``R^3`` and a unit normal
``nu(u, v)``.  Every quantity is evaluated from its general definition (signed
area density, null direction, singular curve found by bisection, covariant
derivative as tangential projection), which makes it an independent check on
the closed forms used elsewhere.  The singular set is assumed to be a graph
``u = u*(v)`` over the second coordinate, bracketed by ``lam_bracket``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable

import numpy as np

from .errors import NoLimit

Map = Callable[[np.ndarray, np.ndarray], np.ndarray]


@lru_cache(maxsize=None)
def fd_weights(order: int, half: int = 5) -> np.ndarray:
    """Exact central-difference weights on the nodes ``-half..half`` (unit spacing)."""
    nodes = list(range(-half, half + 1))
    n = len(nodes)
    a = [[Fraction(x) ** i for x in nodes] + [Fraction(factorial(order) if i == order else 0)] for i in range(n)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                fac = a[r][c]
                a[r] = [x - fac * y for x, y in zip(a[r], a[c])]
    return np.array([float(a[i][n]) for i in range(n)])


def derivative(fun: Callable, x: float, order: int, h: float = 1e-2, half: int = 5,
               vectorized: bool = False):
    """Central finite-difference derivative of a scalar- or vector-valued ``fun`` at ``x``.

    With ``vectorized=True`` ``fun`` receives all stencil nodes as one array and
    must return values stacked along the first axis.
    """
    w = fd_weights(order, half)
    xs = x + h * np.arange(-half, half + 1)
    vals = np.asarray(fun(xs)) if vectorized else np.array([fun(t) for t in xs])
    return np.tensordot(w, vals, axes=(0, 0)) / h**order


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _det3(a, b, c):
    return float(np.linalg.det(np.stack([a, b, c])))


class FrontOracle:
    """Finite-difference invariants of a front ``(f, nu)`` on a parameter surface."""

    def __init__(self, f: Map, nu: Map, lam_bracket=(0.0, 1.0), h: float = 1e-2, half: int = 5):
        self.f = f
        self.nu = nu
        self.lam_bracket = lam_bracket
        self.h = h
        self.half = half

    # -- directional derivatives ---------------------------------------------

    def directional(self, fun: Map, u, v, direction, order: int):
        """``order``-th derivative of ``fun`` along ``direction`` at ``(u, v)`` (vectorised).

        All stencil nodes are passed to ``fun`` in a single call.
        """
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        d = np.asarray(direction, dtype=float)
        du, dv = np.broadcast_to(d[..., 0], u.shape), np.broadcast_to(d[..., 1], u.shape)
        w = fd_weights(order, self.half)
        keep = np.nonzero(w)[0]
        steps = (keep - self.half) * self.h
        shape = (len(keep),) + (1,) * u.ndim
        vals = np.asarray(fun(u + steps.reshape(shape) * du, v + steps.reshape(shape) * dv))
        return np.tensordot(w[keep], vals, axes=(0, 0)) / self.h**order

    def jacobian(self, u, v):
        return (self.directional(self.f, u, v, (1.0, 0.0), 1),
                self.directional(self.f, u, v, (0.0, 1.0), 1))

    def area_density(self, u, v):
        fu, fv = self.jacobian(u, v)
        return np.linalg.det(np.stack([fu, fv, self.nu(u, v)], axis=-2))

    # -- singular set -----------------------------------------------------------

    def singular_u(self, v, iterations: int = 64):
        """Root of the area density in ``u`` inside ``lam_bracket`` by vectorised bisection."""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        lo = np.full(v.shape, self.lam_bracket[0])
        hi = np.full(v.shape, self.lam_bracket[1])
        flo = self.area_density(lo, v)
        fhi = self.area_density(hi, v)
        if np.any(np.sign(flo) == np.sign(fhi)):
            raise ValueError("area density does not change sign across the bracket")
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            fm = self.area_density(mid, v)
            left = np.sign(fm) == np.sign(flo)
            lo = np.where(left, mid, lo)
            flo = np.where(left, fm, flo)
            hi = np.where(left, hi, mid)
        return 0.5 * (lo + hi)

    def singular_image(self, v):
        v = np.atleast_1d(np.asarray(v, float))
        return self.f(self.singular_u(v), v)

    def singular_velocity(self, v):
        """Velocity ``(u*'(v), 1)`` of the singular curve in parameter space (vectorised in ``v``)."""
        v = np.atleast_1d(np.asarray(v, float))
        nodes = v[None, :] + self.h * np.arange(-self.half, self.half + 1)[:, None]
        us = self.singular_u(nodes.ravel()).reshape(nodes.shape)
        du = np.tensordot(fd_weights(1, self.half), us, axes=(0, 0)) / self.h
        return np.stack([du, np.ones_like(du)], axis=-1)

    def null_direction(self, u, v):
        """Unit kernel direction of the 3x2 Jacobian (smallest right singular vector)."""
        fu, fv = self.jacobian(np.atleast_1d(u), np.atleast_1d(v))
        jac = np.stack([fu, fv], axis=-1)
        return np.linalg.svd(jac)[2][..., -1, :]

    def oriented_null(self, v):
        """Null direction over ``v`` with ``det(sigma', eta) > 0``; returns ``(eta, sigma', u*)``."""
        v = np.atleast_1d(np.asarray(v, float))
        u = self.singular_u(v)
        sig = self.singular_velocity(v)
        eta = self.null_direction(u, v)
        flip = sig[:, 0] * eta[:, 1] - sig[:, 1] * eta[:, 0] < 0
        eta = np.where(flip[:, None], -eta, eta)
        return eta, sig, u

    def singular_jet(self, v: float, n: int) -> list[np.ndarray]:
        out = [self.singular_image(v)[0]]
        for o in range(1, n + 1):
            out.append(derivative(self.singular_image, v, o, self.h, self.half, vectorized=True))
        return out

    # -- curvatures ---------------------------------------------------------------

    def geodesic_curvature(self, curve: Callable[[float], tuple[float, float]], t: float) -> float:
        """Geodesic curvature of a regular curve in parameter space, ``det(c', c'', nu)/|c'|^3``."""
        img = lambda s: self.f(*map(np.atleast_1d, curve(s)))[0]
        d1 = derivative(img, t, 1, self.h, self.half)
        d2 = derivative(img, t, 2, self.h, self.half)
        nu = self.nu(*map(np.atleast_1d, curve(t)))[0]
        return _det3(d1, d2, nu) / np.linalg.norm(d1) ** 3

    def singular_curvature(self, v: float) -> float:
        """``sgn(d lambda(eta)) * det(c', c'', nu) / |c'|^3`` along the image of the singular curve."""
        eta, _, u = self.oriented_null(v)
        dlam = float(self.directional(self.area_density, u, v, eta, 1)[0])
        u = float(u[0])
        _, d1, d2 = self.singular_jet(v, 2)
        nu = self.nu(np.array([u]), np.array([v]))[0]
        return np.sign(dlam) * _det3(d1, d2, nu) / np.linalg.norm(d1) ** 3

    def limiting_normal_curvature(self, v: float) -> float:
        _, d1, d2 = self.singular_jet(v, 2)
        u = self.singular_u(v)
        nu = self.nu(u, np.atleast_1d(v))[0]
        return float(d2 @ nu) / float(d1 @ d1)

    def _f_eta(self, v, order: int):
        """``order``-th derivative of ``f`` along the oriented null direction, stacked over ``v``."""
        v = np.atleast_1d(np.asarray(v, float))
        eta, _, u = self.oriented_null(v)
        return self.directional(self.f, u, v, eta, order)

    def cuspidal_curvature(self, v: float) -> float:
        """``|c'|^{3/2} det(c', f_etaeta, f_etaetaeta) / |c' x f_etaeta|^{5/2}``."""
        d1 = self.singular_jet(v, 1)[1]
        f2, f3 = self._f_eta(v, 2)[0], self._f_eta(v, 3)[0]
        cross = np.linalg.norm(np.cross(d1, f2))
        return np.linalg.norm(d1) ** 1.5 * _det3(d1, f2, f3) / cross**2.5

    def cusp_directional_torsion(self, v: float) -> float:
        _, d1, d2 = self.singular_jet(v, 2)
        f2 = self._f_eta(v, 2)[0]
        df2 = derivative(lambda t: self._f_eta(t, 2), v, 1, self.h, self.half, vectorized=True)
        cross2 = float(np.sum(np.cross(d1, f2) ** 2))
        first = _det3(d1, f2, df2) / cross2
        second = _det3(d1, f2, d2) * float(d1 @ f2) / (float(d1 @ d1) * cross2)
        return first - second

    # -- initial vectors ---------------------------------------------------------

    def pushforward(self, curve: Callable[[float], tuple[float, float]], t: float) -> np.ndarray:
        """``df(c'(t))`` with ``c'`` by central differences of the curve and ``df`` from the Jacobian."""
        ht = max(abs(t), 1e-3) * 1e-3
        c = np.array(curve(t), dtype=float)
        dc = (np.array(curve(t + ht), dtype=float) - np.array(curve(t - ht), dtype=float)) / (2 * ht)
        fu, fv = self.jacobian(np.array([c[0]]), np.array([c[1]]))
        return fu[0] * dc[0] + fv[0] * dc[1]

    def initial_vector(self, curve: Callable[[float], tuple[float, float]], t0: float = 1e-2,
                       levels: int = 5, null_tol: float = 1e-7, tol: float = 1e-6) -> np.ndarray:
        """Normalised limit of ``df(c'(t))`` as ``t -> 0+``.

        If ``df(c'(0))`` vanishes (null initial velocity) the limit is the
        normalised covariant derivative ``D/dt df(c'(t))`` at ``t = 0``, i.e. the
        ambient derivative projected onto the plane orthogonal to ``nu``.

        Raises
        ------
        NoLimit
            If the limit sequence fails to settle.
        """
        c0 = np.array(curve(0.0), dtype=float)
        fu, fv = self.jacobian(np.array([c0[0]]), np.array([c0[1]]))
        jnorm = max(np.linalg.norm(fu), np.linalg.norm(fv))
        v0 = self.pushforward(curve, 0.0)
        dc0 = (np.array(curve(1e-6), dtype=float) - np.array(curve(-1e-6), dtype=float)) / 2e-6
        if np.linalg.norm(v0) < null_tol * jnorm * np.linalg.norm(dc0):
            acc = derivative(lambda s: self.pushforward(curve, s), 0.0, 1, 1e-3, 3)
            nu = self.nu(np.array([c0[0]]), np.array([c0[1]]))[0]
            acc = acc - (acc @ nu) * nu
            if np.linalg.norm(acc) == 0.0:
                raise NoLimit("covariant derivative vanishes at the null point")
            return _unit(acc)
        seq = [_unit(self.pushforward(curve, t0 * 0.5**n)) for n in range(levels)]
        diffs = [np.linalg.norm(b - a) for a, b in zip(seq, seq[1:])]
        if diffs[-1] > tol and diffs[-1] > 0.75 * diffs[-2]:
            raise NoLimit(f"initial-vector sequence not converging (last step {diffs[-1]:.2e})")
        # sequence behaves like u0 + a t; one Richardson step removes the linear term
        return _unit(2 * seq[-1] - seq[-2])
