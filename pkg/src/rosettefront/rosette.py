"""Planar m-rosettes parameterised by the normal angle of their support function."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import NotARosette
from .support import SupportFunction, quotient_derivatives


def unit_tangent(theta):
    theta = np.asarray(theta, dtype=float)
    return np.stack([-np.sin(theta), np.cos(theta)], axis=-1)


def unit_normal(theta):
    # fixed convention n = -(cos, sin); makes the extended front normal orthogonal to f_lambda
    theta = np.asarray(theta, dtype=float)
    return -np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def winding_number(vectors) -> float:
    """Total turning of a closed sequence of planar vectors, in full turns."""
    v = np.asarray(vectors, dtype=float)
    ang = np.unwrap(np.arctan2(v[:, 1], v[:, 0]))
    closing = np.angle(np.exp(1j * (np.arctan2(v[0, 1], v[0, 0]) - ang[-1])))
    return float((ang[-1] - ang[0] + closing) / (2 * np.pi))


@dataclass(frozen=True)
class Rosette:
    """A regular closed curve with positive curvature and rotation number ``m``.

    Construction validates ``p + p'' > 0`` and raises :class:`NotARosette` with
    the violating angle otherwise.
    """

    sf: SupportFunction

    def __post_init__(self):
        check = self.sf.is_rosette()
        if not check.ok:
            raise NotARosette(check.theta_min, check.rho_min)

    @property
    def m(self) -> int:
        return self.sf.m

    @property
    def period(self) -> float:
        return self.sf.period

    @property
    def scale(self) -> float:
        """Mean radius of curvature (equals the constant Fourier term)."""
        return abs(self.sf.a0)

    def rho(self, theta, order: int = 0):
        """``order``-th derivative of the radius of curvature ``p + p''``."""
        return self.sf(theta, order) + self.sf(theta, order + 2)

    def rho_jet(self, theta, n: int):
        return [np.asarray(self.rho(theta, j), dtype=float) for j in range(n + 1)]

    def point(self, theta, order: int = 0):
        """``gamma^(order)(theta)`` as an array with trailing axis of length 2."""
        theta = np.asarray(theta, dtype=float)
        e = np.exp(1j * theta)
        if order == 0:
            z = (self.sf(theta, 0) + 1j * self.sf(theta, 1)) * e
        else:
            # z' = i rho e^{i theta}; differentiate the product n-1 more times
            z = np.zeros(theta.shape, dtype=complex)
            for j in range(order):
                z = z + comb(order - 1, j) * self.rho(theta, j) * (1j) ** (order - j)
            z = z * e
        return np.stack([z.real, z.imag], axis=-1)

    def frame(self, theta):
        """Unit tangent ``t`` and normal ``n = -(cos, sin)``; ``gamma' = rho t``."""
        return unit_tangent(theta), unit_normal(theta)

    def curvature(self, theta, order: int = 0):
        """Curvature ``1/rho`` or its ``order``-th derivative."""
        if order == 0:
            return 1.0 / self.rho(theta)
        rho = self.rho_jet(theta, order)
        one = [np.ones_like(rho[0])] + [np.zeros_like(rho[0])] * order
        return quotient_derivatives(one, rho)[order]

    def parallel_partner(self, theta, k: int):
        if not 1 <= k <= self.m:
            raise ValueError(f"k must be in 1..{self.m}, got {k}")
        return np.mod(np.asarray(theta, dtype=float) + k * np.pi, self.period)

    def tangent_winding(self, n: int | None = None) -> float:
        """Rotation number from the accumulated angle of ``gamma'`` over one period."""
        n = n or 4096 * self.m
        theta = np.linspace(0.0, self.period, n, endpoint=False)
        return winding_number(self.point(theta, 1))

    def sample(self, n: int):
        theta = np.linspace(0.0, self.period, n, endpoint=False)
        xy = self.point(theta)
        return theta, xy, self.curvature(theta), self.rho(theta)
