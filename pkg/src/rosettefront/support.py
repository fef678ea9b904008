"""Support functions as truncated Fourier series with base frequency 1/m.

A support function ``p`` of an m-rosette is ``2*m*pi``-periodic.  It is stored as

    p(theta) = a0 + sum_j  a_j cos(j theta / m) + b_j sin(j theta / m)

so that derivatives of every order are again finite Fourier series and are
evaluated exactly from the coefficients.  The same class doubles as a generic
periodic trigonometric series (widths, random test functions).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

MAX_ORDER = 6


class RosetteCheck(NamedTuple):
    """Outcome of :meth:`SupportFunction.is_rosette`."""

    ok: bool
    theta_min: float
    rho_min: float

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class SupportFunction:
    """Finite Fourier series ``a0 + sum a_j cos(j t/m) + b_j sin(j t/m)``.

    Parameters
    ----------
    m : int
        Period divisor; the series is ``2*m*pi``-periodic.
    a0 : float
        Constant term.
    terms : sequence of (j, a_j, b_j)
        Positive integer harmonic index and its cosine/sine coefficients.
        Repeated indices are summed.
    """

    m: int = 1
    a0: float = 0.0
    terms: tuple = ()
    _freq: np.ndarray = field(init=False, repr=False, compare=False)
    _coef: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        merged: dict[int, list[float]] = {}
        for term in self.terms:
            j, a, b = term
            if int(j) != j or j < 1:
                raise ValueError(f"harmonic index must be a positive integer, got {j!r}")
            acc = merged.setdefault(int(j), [0.0, 0.0])
            acc[0] += float(a)
            acc[1] += float(b)
        clean = tuple((j, a, b) for j, (a, b) in sorted(merged.items()))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "terms", clean)
        js = np.array([t[0] for t in clean], dtype=float)
        object.__setattr__(self, "_freq", js / self.m)
        # a cos + b sin = Re[(a - i b) exp(i w t)]
        coef = np.array([complex(a, -b) for _, a, b in clean], dtype=complex)
        object.__setattr__(self, "_coef", coef)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, value: float, m: int = 1) -> "SupportFunction":
        return cls(m=m, a0=value)

    @classmethod
    def from_arrays(cls, m, a0, freqs, a, b) -> "SupportFunction":
        return cls(m=m, a0=a0, terms=tuple(zip(freqs, a, b)))

    @property
    def period(self) -> float:
        return 2.0 * np.pi * self.m

    @property
    def bandwidth(self) -> float:
        """Largest angular frequency present (0 for a constant)."""
        return float(self._freq.max()) if len(self._freq) else 0.0

    # -- evaluation -------------------------------------------------------------

    def __call__(self, theta, order: int = 0):
        return self.eval(theta, order)

    def eval(self, theta, order: int = 0):
        """Return ``d^order p / dtheta^order`` at ``theta`` (scalar or array)."""
        if order < 0 or order > MAX_ORDER:
            raise ValueError(f"derivative order must be in [0, {MAX_ORDER}], got {order}")
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, self.a0 if order == 0 else 0.0)
        if len(self._freq):
            w = self._freq
            c = self._coef * (1j * w) ** order
            phase = np.exp(1j * np.multiply.outer(theta, w))
            out = out + np.real(phase @ c)
        return out if out.ndim else float(out)

    def radius_of_curvature(self, theta):
        """``rho = p + p''``; the curve's radius of curvature at normal angle theta."""
        return self.eval(theta, 0) + self.eval(theta, 2)

    def is_rosette(self, samples_per_period: int | None = None) -> RosetteCheck:
        """Check ``min rho > 0`` by a dense scan refined with a bounded 1-D minimiser."""
        n = samples_per_period or 4096 * self.m
        # keep the scan well above Nyquist for the top harmonic
        n = max(n, int(16 * self.bandwidth * self.m) + 16)
        grid = np.linspace(0.0, self.period, n, endpoint=False)
        rho = self.radius_of_curvature(grid)
        i = int(np.argmin(rho))
        h = self.period / n
        res = minimize_scalar(
            lambda t: float(self.radius_of_curvature(t)),
            bounds=(grid[i] - h, grid[i] + h),
            method="bounded",
            options={"xatol": 1e-12},
        )
        theta_min, rho_min = float(res.x), float(res.fun)
        if rho[i] < rho_min:
            theta_min, rho_min = float(grid[i]), float(rho[i])
        theta_min = theta_min % self.period
        return RosetteCheck(rho_min > 0.0, theta_min, rho_min)

    # -- algebra on coefficients ----------------------------------------------------

    def shifted(self, delta: float) -> "SupportFunction":
        """Series for ``theta -> p(theta + delta)``."""
        terms = []
        for (j, a, b), w in zip(self.terms, self._freq):
            c = complex(a, -b) * np.exp(1j * w * delta)
            terms.append((j, c.real, -c.imag))
        return SupportFunction(self.m, self.a0, tuple(terms))

    def __add__(self, other: "SupportFunction") -> "SupportFunction":
        if not isinstance(other, SupportFunction):
            return NotImplemented
        if other.m != self.m:
            raise ValueError("cannot add series with different period divisors")
        return SupportFunction(self.m, self.a0 + other.a0, self.terms + other.terms)

    def __mul__(self, scalar: float) -> "SupportFunction":
        s = float(scalar)
        return SupportFunction(self.m, s * self.a0, tuple((j, s * a, s * b) for j, a, b in self.terms))

    __rmul__ = __mul__

    def __neg__(self) -> "SupportFunction":
        return self * -1.0

    def __sub__(self, other: "SupportFunction") -> "SupportFunction":
        return self + (-other)

    def coefficients(self) -> dict[int, tuple[float, float]]:
        """Map harmonic index ``j`` to ``(a_j, b_j)``."""
        return {j: (a, b) for j, a, b in self.terms}

    def to_dict(self) -> dict:
        return {"m": self.m, "a0": self.a0, "terms": [list(t) for t in self.terms]}


def support_function(a0: float, terms: Iterable[Sequence[float]] = (), m: int = 1) -> SupportFunction:
    """Shorthand constructor: ``support_function(31, [(2, 2, 0), (5, 0, 1)])``."""
    return SupportFunction(m=m, a0=a0, terms=tuple(tuple(t) for t in terms))


def quotient_derivatives(num: Sequence[np.ndarray], den: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Derivatives of ``num/den`` from derivative lists ``[u, u', ...]``, ``[v, v', ...]``.

    Uses the Leibniz recursion ``q^(n) = (u^(n) - sum_{j>=1} C(n,j) v^(j) q^(n-j)) / v``.
    """
    from math import comb

    n = min(len(num), len(den))
    q: list[np.ndarray] = []
    for k in range(n):
        acc = num[k]
        for j in range(1, k + 1):
            acc = acc - comb(k, j) * den[j] * q[k - j]
        q.append(acc / den[0])
    return q
