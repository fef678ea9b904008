"""Affine equidistants, the Wigner caustic and the Centre Symmetry Set of a rosette."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil

import numpy as np

from .errors import CuspSingularity, DegenerateZero
from .quadrature import scan_roots
from .rosette import Rosette
from .support import SupportFunction, quotient_derivatives

SCAN_PER_PERIOD = 8192


def branch_indices(m: int, lam: float) -> list[int]:
    """Branch labels of the equidistant: ``1..m`` at ``lam = 1/2``, ``1..2m-1`` otherwise."""
    if lam == 0.5:
        return list(range(1, m + 1))
    return list(range(1, 2 * m))


def css_indices(m: int) -> list[int]:
    """Odd labels ``1, 3, ..., 2*ceil(m/2) - 1``."""
    return list(range(1, 2 * ceil(m / 2), 2))


def _jets(r: Rosette, theta, shift: float, n: int):
    return r.rho_jet(np.asarray(theta, dtype=float) + shift, n)


def curvature_ratio(r: Rosette, k: int, theta, order: int = 0):
    """``order``-th derivative of ``kappa(theta + k pi) / kappa(theta) = rho(theta) / rho(theta + k pi)``."""
    num = _jets(r, theta, 0.0, order)
    den = _jets(r, theta, k * np.pi, order)
    return quotient_derivatives(num, den)[order]


@dataclass(frozen=True)
class EquidistantBranch:
    """Branch ``k`` of the affine ``lam``-equidistant.

    For ``k <= m`` the branch is ``lam*gamma(theta) + (1-lam)*gamma(theta + k pi)``;
    for ``k > m`` it is ``(1-lam)*gamma(theta) + lam*gamma(theta + (k-m) pi)``.
    """

    parent: Rosette
    lam: float
    k: int
    derived_sf: SupportFunction = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = self.parent.m
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")
        if self.k not in branch_indices(m, self.lam):
            raise ValueError(f"branch index {self.k} invalid for m={m}, lambda={self.lam}")
        object.__setattr__(self, "derived_sf", self._support())

    # coefficients (a, b) of the two terms and the shift of the partner point
    def _mix(self) -> tuple[float, float, int]:
        m, k, lam = self.parent.m, self.k, self.lam
        if k <= m:
            return lam, (-1) ** k * (1.0 - lam), k
        j = k - m
        # the partner of gamma(theta) is gamma(theta + j pi), whose support is read off with sign (-1)^j
        return 1.0 - lam, (-1) ** j * lam, j

    def _support(self) -> SupportFunction:
        a, b, j = self._mix()
        sf = self.parent.sf
        return a * sf + b * sf.shifted(j * np.pi)

    @property
    def weights(self) -> tuple[float, float, int]:
        """``(weight of gamma(theta), weight of partner, partner shift in units of pi)``."""
        a, b, j = self._mix()
        return a, abs(b), j

    @property
    def domain(self) -> float:
        """Length of the fundamental parameter interval."""
        m = self.parent.m
        if self.lam == 0.5 and self.k == m:
            return m * np.pi
        return 2 * m * np.pi

    def point(self, theta):
        """Convex-combination route."""
        a, b, j = self.weights
        theta = np.asarray(theta, dtype=float)
        return a * self.parent.point(theta) + b * self.parent.point(theta + j * np.pi)

    def point_from_sf(self, theta):
        """Support-function route: the standard parameterisation applied to ``derived_sf``."""
        theta = np.asarray(theta, dtype=float)
        p, dp = self.derived_sf(theta, 0), self.derived_sf(theta, 1)
        c, s = np.cos(theta), np.sin(theta)
        return np.stack([p * c - dp * s, p * s + dp * c], axis=-1)

    def radius(self, theta, order: int = 0):
        """Signed radius of curvature of the branch, ``p_E + p_E''``."""
        return self.derived_sf(theta, order) + self.derived_sf(theta, order + 2)

    def cusps(self, n_scan: int | None = None) -> list[float]:
        """Zeros of the branch radius in ``[0, domain)``.

        Raises
        ------
        DegenerateZero
            If the radius vanishes identically or touches zero without changing sign.
        """
        n = n_scan or SCAN_PER_PERIOD * self.parent.m
        return scan_roots(lambda t: self.radius(t), 0.0, self.domain, n)

    def rotation_number(self) -> float:
        """Rotation number from the shortest parameter length after which the branch closes.

        The normal angle of the branch advances by the parameter length, so a
        branch closing after ``L`` has rotation number ``L / 2 pi``.
        """
        m = self.parent.m
        for j in range(1, 2 * m + 1):
            if self.closes_after(j * np.pi):
                return j / 2.0
        raise RuntimeError("branch does not close within 2 m pi")

    def closes_after(self, length: float, tol: float = 1e-9) -> bool:
        theta = np.linspace(0.0, 2 * np.pi, 17)
        gap = np.max(np.abs(self.point(theta + length) - self.point(theta)))
        return bool(gap < tol * (1 + self.parent.scale))


@dataclass(frozen=True)
class CssBranch:
    """Branch ``k`` (odd) of the Centre Symmetry Set."""

    parent: Rosette
    k: int

    def __post_init__(self):
        if self.k not in css_indices(self.parent.m):
            raise ValueError(f"CSS branch index must be odd in 1..{2 * ceil(self.parent.m / 2) - 1}, got {self.k}")

    @property
    def domain(self) -> float:
        m = self.parent.m
        return m * np.pi if self.k == m else 2 * m * np.pi

    def _kappas(self, theta, order: int = 0):
        r, kp = self.parent, self.k * np.pi
        theta = np.asarray(theta, dtype=float)
        return [r.curvature(theta, o) for o in range(order + 1)], [r.curvature(theta + kp, o) for o in range(order + 1)]

    def point(self, theta):
        (ka,), (kb,) = self._kappas(theta)
        r = self.parent
        theta = np.asarray(theta, dtype=float)
        wa = np.asarray(ka / (ka + kb))[..., None]
        return wa * r.point(theta) + (1.0 - wa) * r.point(theta + self.k * np.pi)

    def cusp_function(self, theta):
        """``kappa'(theta + k pi) kappa(theta) - kappa'(theta) kappa(theta + k pi)``."""
        (ka, dka), (kb, dkb) = self._kappas(theta, 1)
        return dkb * ka - dka * kb

    def curvature(self, theta):
        """Signed curvature of the branch in closed form.

        The sign refers to the branch traversed against increasing ``theta``.

        Raises
        ------
        CuspSingularity
            Inside the cusp guard, where the closed form diverges.
        """
        (ka, dka), (kb, dkb) = self._kappas(theta, 1)
        d = np.abs(dkb * ka - dka * kb)
        if np.any(d < 1e-10 * self.parent.scale ** -2):
            raise CuspSingularity("CSS curvature requested at (or too near) a cusp")
        w = width_values(self.parent, self.k, theta, 1)
        return -((ka + kb) ** 3) / (ka * kb * d) * w[0] / (w[0] ** 2 + w[1] ** 2) ** 1.5

    def cusps(self, n_scan: int | None = None) -> list[float]:
        """Zeros of the derivative of the curvature ratio in ``[0, domain)``."""
        n = n_scan or SCAN_PER_PERIOD * self.parent.m
        return scan_roots(lambda t: curvature_ratio(self.parent, self.k, t, 1), 0.0, self.domain, n)


def width_values(r: Rosette, k: int, theta, order: int = 0) -> list[np.ndarray]:
    """``[w_k, w_k', ..., w_k^(order)]`` with ``w_k = p(theta) - (-1)^k p(theta + k pi)``."""
    theta = np.asarray(theta, dtype=float)
    sign = (-1) ** k
    return [r.sf(theta, o) - sign * r.sf(theta + k * np.pi, o) for o in range(order + 1)]


def cusp_parity_ok(n_cusps: int, rotation_number: float) -> bool:
    """Parity rule: even count for integer rotation number, odd for half-integer."""
    twice = round(2 * rotation_number)
    if abs(2 * rotation_number - twice) > 1e-9:
        raise ValueError(f"rotation number {rotation_number} is not a multiple of 1/2")
    return (n_cusps % 2 == 0) if twice % 2 == 0 else (n_cusps % 2 == 1)
