"""Branches of the extended affine wave front as fronts in ``R^3 = R_lambda x R^2``."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import comb
from typing import Callable, NamedTuple

import numpy as np

from .equidistant import CssBranch, curvature_ratio, width_values
from .errors import DegenerateSingularity, NearSingular
from .quadrature import scan_roots
from .rosette import Rosette
from .support import quotient_derivatives

NEAR_SINGULAR = 1e-6


class Kind(enum.Enum):
    CUSPIDAL_EDGE = "cuspidal_edge"
    SWALLOWTAIL = "swallowtail"


class SingularPoint(NamedTuple):
    theta: float
    lam: float
    kind: Kind
    peak: int  # +1 positive peak, -1 negative peak, 0 for cuspidal edges
    location: np.ndarray
    css_shadow: np.ndarray

    @property
    def label(self) -> str:
        if self.kind is Kind.CUSPIDAL_EDGE:
            return "cuspidal_edge"
        return "swallowtail_positive_peak" if self.peak > 0 else "swallowtail_negative_peak"


def leibniz_scale(a: list, b: list, n: int):
    """``n``-th derivative of ``a * b`` from jets (``b`` may carry a trailing vector axis)."""
    return sum(comb(n, j) * np.asarray(a[j])[..., None] * b[n - j] for j in range(n + 1))


@dataclass(frozen=True)
class FrontBranch:
    """Branch ``f_k(lam, theta) = (lam, lam*gamma(theta) + (1-lam)*gamma(theta + k pi))``, ``k`` odd."""

    parent: Rosette
    k: int
    normal_sign: float = field(init=False, default=1.0)
    notes: tuple = field(init=False, default=())

    def __post_init__(self):
        m = self.parent.m
        if not (1 <= self.k <= m and self.k % 2 == 1):
            raise ValueError(f"front branch index must be odd in 1..{m}, got {self.k}")
        # density must be negative below the singular curve; flip the normal once if it is not
        theta0 = 0.3
        lam0 = float(self.singular_lambda(theta0))
        probe = float(self._density(max(lam0 - 1e-2, 0.0), theta0))
        if probe > 0:
            object.__setattr__(self, "normal_sign", -1.0)
            object.__setattr__(self, "notes", ("normal flipped so that the density is negative below the singular curve",))
        else:
            object.__setattr__(self, "notes", ("normal orientation kept: density negative below the singular curve",))

    @property
    def m(self) -> int:
        return self.parent.m

    @property
    def period(self) -> float:
        return self.parent.period

    @property
    def shift(self) -> float:
        return self.k * np.pi

    # -- parameterisation -------------------------------------------------------

    def _planar(self, theta, order: int):
        theta = np.asarray(theta, dtype=float)
        return self.parent.point(theta, order), self.parent.point(theta + self.shift, order)

    def f(self, lam, theta):
        lam, theta = np.broadcast_arrays(np.asarray(lam, float), np.asarray(theta, float))
        g, gt = self._planar(theta, 0)
        xy = lam[..., None] * g + (1.0 - lam)[..., None] * gt
        return np.concatenate([lam[..., None], xy], axis=-1)

    def partials(self, lam, theta):
        """``(f_lam, f_theta)``."""
        lam, theta = np.broadcast_arrays(np.asarray(lam, float), np.asarray(theta, float))
        g, gt = self._planar(theta, 0)
        g1, gt1 = self._planar(theta, 1)
        ones = np.ones(lam.shape + (1,))
        f_lam = np.concatenate([ones, g - gt], axis=-1)
        f_th = np.concatenate([0 * ones, lam[..., None] * g1 + (1.0 - lam)[..., None] * gt1], axis=-1)
        return f_lam, f_th

    def second_partials(self, lam, theta):
        """``(f_lamlam, f_lamtheta, f_thetatheta)``."""
        lam, theta = np.broadcast_arrays(np.asarray(lam, float), np.asarray(theta, float))
        g1, gt1 = self._planar(theta, 1)
        g2, gt2 = self._planar(theta, 2)
        zeros = np.zeros(lam.shape + (1,))
        f_ll = np.zeros(lam.shape + (3,))
        f_lt = np.concatenate([zeros, g1 - gt1], axis=-1)
        f_tt = np.concatenate([zeros, lam[..., None] * g2 + (1.0 - lam)[..., None] * gt2], axis=-1)
        return f_ll, f_lt, f_tt

    def width(self, theta, order: int = 0):
        return width_values(self.parent, self.k, theta, order)[order]

    def normal(self, lam, theta):
        """Unit normal ``(w, -cos, -sin) / sqrt(1 + w^2)``; independent of ``lam``."""
        lam, theta = np.broadcast_arrays(np.asarray(lam, float), np.asarray(theta, float))
        w = self.width(theta)
        nu = np.stack([w, -np.cos(theta), -np.sin(theta)], axis=-1) / np.sqrt(1.0 + w * w)[..., None]
        return self.normal_sign * nu

    def _density(self, lam, theta):
        f_l, f_t = self.partials(lam, theta)
        nu = np.stack([self.width(theta), -np.cos(theta), -np.sin(theta)], axis=-1)
        nu = nu / np.linalg.norm(nu, axis=-1, keepdims=True)
        return np.linalg.det(np.stack([f_l, f_t, nu], axis=-2))

    def signed_area_density(self, lam, theta):
        """``det(f_lam, f_theta, nu)``; zero exactly on the singular set."""
        f_l, f_t = self.partials(lam, theta)
        return np.linalg.det(np.stack([f_l, f_t, self.normal(lam, theta)], axis=-2))

    def density_gradient(self, lam, theta):
        """``(d/dlam, d/dtheta)`` of the signed area density via the closed form ``s * sqrt(1+w^2)``."""
        theta = np.asarray(theta, dtype=float)
        rho, drho = self.parent.rho(theta), self.parent.rho(theta, 1)
        rt, drt = self.parent.rho(theta + self.shift), self.parent.rho(theta + self.shift, 1)
        w, dw = self.width(theta), self.width(theta, 1)
        q = np.sqrt(1 + w * w)
        s = lam * rho - (1 - lam) * rt
        ds_dth = lam * drho - (1 - lam) * drt
        return self.normal_sign * (rho + rt) * q, self.normal_sign * (ds_dth * q + s * w * dw / q)

    # -- singular set -----------------------------------------------------------

    def singular_lambda(self, theta, order: int = 0):
        """``lambda_k = kappa / (kappa + kappa~) = rho~ / (rho + rho~)`` or a derivative of it."""
        return self.singular_lambda_jet(theta, order)[order]

    def singular_lambda_jet(self, theta, n: int):
        theta = np.asarray(theta, dtype=float)
        rho = self.parent.rho_jet(theta, n)
        rt = self.parent.rho_jet(theta + self.shift, n)
        return quotient_derivatives(rt, [a + b for a, b in zip(rho, rt)])

    def curvature_ratio(self, theta, order: int = 0):
        return curvature_ratio(self.parent, self.k, theta, order)

    def css(self) -> CssBranch:
        return CssBranch(self.parent, self.k)

    def swallowtails(self, n_scan: int | None = None) -> list[float]:
        """Local extrema of ``lambda_k`` on ``[0, 2 m pi)``."""
        n = n_scan or 8192 * self.m
        return scan_roots(lambda t: self.singular_lambda(t, 1), 0.0, self.period, n)

    def classify(self, theta: float, tol: float = 1e-9) -> SingularPoint:
        """Classify the singular point over ``theta``.

        Raises
        ------
        DegenerateSingularity
            If the first two derivatives of the curvature ratio both vanish.
        """
        r0, r1, r2 = (float(self.curvature_ratio(theta, o)) for o in range(3))
        lam = float(self.singular_lambda(theta))
        loc = self.f(lam, theta)
        shadow = self.css().point(theta)
        scale = 1.0 + abs(r0)
        if abs(r1) > tol * scale:
            return SingularPoint(float(theta), lam, Kind.CUSPIDAL_EDGE, 0, loc, shadow)
        if abs(r2) <= tol * scale:
            raise DegenerateSingularity(f"r' and r'' both vanish at theta={theta:.12g}")
        # local maximum of lambda_k is a positive peak
        peak = 1 if float(self.singular_lambda(theta, 2)) < 0 else -1
        return SingularPoint(float(theta), lam, Kind.SWALLOWTAIL, peak, loc, shadow)

    def singular_points(self, n: int = 256) -> list[SingularPoint]:
        """Uniformly sampled cuspidal edges plus every swallowtail, sorted by ``theta``."""
        sw = self.swallowtails()
        grid = np.linspace(0.0, self.period, n, endpoint=False)
        pts = [self.classify(t) for t in grid if min((abs(t - s) for s in sw), default=1.0) > 1e-6]
        pts += [self.classify(t) for t in sw]
        return sorted(pts, key=lambda p: p.theta)

    # -- curves on the front ---------------------------------------------------

    def curve_jet(self, lam_jet: list, theta, n: int) -> list[np.ndarray]:
        """Derivatives ``0..n`` of ``theta -> f(lam(theta), theta)`` from the jet of ``lam``."""
        theta = np.asarray(theta, dtype=float)
        g = [self.parent.point(theta, o) for o in range(n + 1)]
        gt = [self.parent.point(theta + self.shift, o) for o in range(n + 1)]
        delta = [a - b for a, b in zip(g, gt)]
        out = []
        for o in range(n + 1):
            xy = gt[o] + leibniz_scale(lam_jet, delta, o)
            out.append(np.concatenate([np.asarray(lam_jet[o], float)[..., None], xy], axis=-1))
        return out

    def singular_curve_jet(self, theta, n: int) -> list[np.ndarray]:
        """Derivatives of the image of the singular curve ``theta -> f(lambda_k(theta), theta)``."""
        return self.curve_jet(self.singular_lambda_jet(theta, n), theta, n)

    def gaussian_curvature(self, lam, theta):
        """Gaussian curvature at a regular point from first and second partials.

        Raises
        ------
        NearSingular
            If ``|lam - lambda_k(theta)|`` is inside the guard band.
        """
        lam, theta = np.broadcast_arrays(np.asarray(lam, float), np.asarray(theta, float))
        if np.any(np.abs(lam - self.singular_lambda(theta)) < NEAR_SINGULAR):
            raise NearSingular("Gaussian curvature requested inside the singular guard band")
        f_l, f_t = self.partials(lam, theta)
        f_ll, f_lt, f_tt = self.second_partials(lam, theta)

        def d(a):
            return np.linalg.det(np.stack([a, f_l, f_t], axis=-2))

        ee = np.einsum("...i,...i", f_l, f_l)
        gg = np.einsum("...i,...i", f_t, f_t)
        ff = np.einsum("...i,...i", f_l, f_t)
        return (d(f_ll) * d(f_tt) - d(f_lt) ** 2) / (ee * gg - ff * ff) ** 2

    def oracle(self):
        from .frontgeom import FrontOracle

        return FrontOracle(self.f, self.normal, lam_bracket=(0.0, 1.0))

    def initial_vector(self, curve: Callable[[float], tuple[float, float]], **kw) -> np.ndarray:
        """Initial vector of a curve in parameter space emanating from a singular point."""
        return self.oracle().initial_vector(curve, **kw)
