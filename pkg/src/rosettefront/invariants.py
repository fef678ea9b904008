"""Closed-form invariants of the front branches and their definition-level counterparts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NearSingular, NotOnSlice, SwallowtailPoint
from .quadrature import QuadratureConfig, integrate_with_guards
from .rosette import Rosette, unit_tangent
from .support import SupportFunction
from .wavefront import NEAR_SINGULAR, FrontBranch

SWALLOWTAIL_TOL = 1e-12
CLAMP_EVENTS = {"count": 0}


def clamped_arccos(x):
    """``arccos`` with the argument clamped to ``[-1, 1]``; clamps are counted in ``CLAMP_EVENTS``."""
    x = np.asarray(x, dtype=float)
    outside = np.abs(x) > 1.0
    CLAMP_EVENTS["count"] += int(np.count_nonzero(outside))
    return np.arccos(np.clip(x, -1.0, 1.0))


@dataclass(frozen=True)
class WidthFunction:
    """The k-width ``w_k(theta) = p(theta) - (-1)^k p(theta + k pi)`` of a rosette."""

    parent: Rosette
    k: int
    series: SupportFunction = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.k <= self.parent.m:
            raise ValueError(f"k must be in 1..{self.parent.m}")
        sf = self.parent.sf
        object.__setattr__(self, "series", sf - (-1) ** self.k * sf.shifted(self.k * np.pi))

    @property
    def period(self) -> float:
        return self.parent.period

    def __call__(self, theta, order: int = 0):
        return self.series(theta, order)

    def odd_coefficients(self) -> np.ndarray:
        """Magnitudes of the odd-harmonic Fourier coefficients (in the ``theta`` variable)."""
        m = self.parent.m
        mags = [np.hypot(a, b) for j, a, b in self.series.terms if (j / m) % 2 == 1]
        return np.array(mags)


def _cache_jets(b: FrontBranch, theta, n: int):
    r, sh = b.parent, b.shift
    theta = np.asarray(theta, dtype=float)
    return r.rho_jet(theta, n), r.rho_jet(theta + sh, n)


def _wq(b: FrontBranch, theta):
    w, dw = b.width(theta), b.width(theta, 1)
    return w, dw, 1.0 + w * w, 1.0 + w * w + dw * dw


def _require_edge(b: FrontBranch, theta):
    r0, r1 = b.curvature_ratio(theta), b.curvature_ratio(theta, 1)
    if np.any(np.abs(r1) < SWALLOWTAIL_TOL * (1 + np.abs(r0))):
        raise SwallowtailPoint(f"cuspidal-edge invariant requested at a swallowtail (r'={np.min(np.abs(r1)):.2e})")
    return r0, r1


# -- geodesic curvature of the slices ------------------------------------------

def geodesic_curvature(b: FrontBranch, lam, theta):
    """Signed determinant route ``det(f_t, f_tt, nu) / |f_t|^3`` along ``{lam} x S^1``."""
    lam, theta = np.broadcast_arrays(np.asarray(lam, float), np.asarray(theta, float))
    if np.any(np.abs(lam - b.singular_lambda(theta)) < NEAR_SINGULAR):
        raise NearSingular("geodesic curvature requested inside the singular guard band")
    _, f_t = b.partials(lam, theta)
    _, _, f_tt = b.second_partials(lam, theta)
    nu = b.normal(lam, theta)
    det = np.linalg.det(np.stack([f_t, f_tt, nu], axis=-2))
    return det / np.linalg.norm(f_t, axis=-1) ** 3


def geodesic_curvature_closed(b: FrontBranch, lam, theta):
    """``w / (|lam rho - (1-lam) rho~| sqrt(1 + w^2))``."""
    theta = np.asarray(theta, dtype=float)
    w = b.width(theta)
    s = lam * b.parent.rho(theta) - (1 - lam) * b.parent.rho(theta + b.shift)
    return w / (np.abs(s) * np.sqrt(1 + w * w))


def geodesic_measure(b: FrontBranch, lam, theta):
    """Literal product ``kappa_g * |f_theta|`` (geodesic curvature measure per unit ``theta``)."""
    lam, theta = np.broadcast_arrays(np.asarray(lam, float), np.asarray(theta, float))
    _, f_t = b.partials(lam, theta)
    _, _, f_tt = b.second_partials(lam, theta)
    nu = b.normal(lam, theta)
    det = np.linalg.det(np.stack([f_t, f_tt, nu], axis=-2))
    return det / np.sum(f_t * f_t, axis=-1)


def width_measure(b: FrontBranch, theta):
    """Simplified geodesic measure ``w / sqrt(1 + w^2)``; the same on every slice."""
    w = b.width(theta)
    return w / np.sqrt(1 + w * w)


def curve_geodesic_measure(b: FrontBranch, lam_jet: list, theta):
    """Geodesic curvature measure ``det(c', c'', nu) / |c'|^2`` of ``theta -> (lam(theta), theta)``."""
    _, d1, d2 = b.curve_jet(lam_jet, theta, 2)
    nu = b.normal(lam_jet[0], theta)
    return np.linalg.det(np.stack([d1, d2, nu], axis=-2)) / np.sum(d1 * d1, axis=-1)


# -- invariants along the singular curve ------------------------------------------

def singular_speed(b: FrontBranch, theta):
    """``|d/dtheta f(lambda_k(theta), theta)| = |lambda_k'| sqrt(1 + w^2 + w'^2)``."""
    _, _, _, big = _wq(b, theta)
    return np.abs(b.singular_lambda(theta, 1)) * np.sqrt(big)


def singular_curvature(b: FrontBranch, theta):
    """Closed form via the CSS curvature and the width factors.

    Raises
    ------
    SwallowtailPoint
        If the derivative of the curvature ratio vanishes.
    """
    _require_edge(b, theta)
    w, dw, small, big = _wq(b, theta)
    k_css = b.css().curvature(theta)
    return k_css * np.sqrt(small) / w * ((w * w + dw * dw) / big) ** 1.5


def singular_curvature_measure(b: FrontBranch, theta):
    """``kappa_s * dtau / dtheta`` with the vanishing factors cancelled: ``-(rho + rho~) sqrt(1+w^2) / (1+w^2+w'^2)``."""
    theta = np.asarray(theta, dtype=float)
    _, _, small, big = _wq(b, theta)
    rr = b.parent.rho(theta) + b.parent.rho(theta + b.shift)
    return -rr * np.sqrt(small) / big


def limiting_normal_curvature(b: FrontBranch, theta):
    """``<c'', nu> / |c'|^2`` along the image of the singular curve, from analytic jets."""
    _require_edge(b, theta)
    _, d1, d2 = b.singular_curve_jet(theta, 2)
    nu = b.normal(b.singular_lambda(theta), theta)
    return np.sum(d2 * nu, axis=-1) / np.sum(d1 * d1, axis=-1)


def cuspidal_curvature(b: FrontBranch, theta):
    """Cuspidal curvature ``2 sqrt(k k~ (k + k~)) / sqrt|k~' k - k' k~| * (1+w^2+w'^2)^{3/4} / (1+w^2)^{5/4}``."""
    _require_edge(b, theta)
    r = b.parent
    theta = np.asarray(theta, dtype=float)
    ka, kb = r.curvature(theta), r.curvature(theta + b.shift)
    dka, dkb = r.curvature(theta, 1), r.curvature(theta + b.shift, 1)
    _, _, small, big = _wq(b, theta)
    d = np.abs(dkb * ka - dka * kb)
    return 2 * np.sqrt(ka * kb * (ka + kb)) / np.sqrt(d) * big**0.75 / small**1.25


def cuspidal_curvature_printed(b: FrontBranch, theta):
    """Variant with ``|(k~/k)'|`` under the root; larger than :func:`cuspidal_curvature` by ``kappa(theta)``."""
    _require_edge(b, theta)
    r = b.parent
    theta = np.asarray(theta, dtype=float)
    ka, kb = r.curvature(theta), r.curvature(theta + b.shift)
    r1 = b.curvature_ratio(theta, 1)
    _, _, small, big = _wq(b, theta)
    return 2 * np.sqrt(ka * kb * (ka + kb)) / np.sqrt(np.abs(r1)) * big**0.75 / small**1.25


def cusp_directional_torsion(b: FrontBranch, theta):
    """``-(k + k~)^2 / (k^2 (k~/k)') / (1 + w^2)``."""
    _, r1 = _require_edge(b, theta)
    r = b.parent
    theta = np.asarray(theta, dtype=float)
    ka, kb = r.curvature(theta), r.curvature(theta + b.shift)
    _, _, small, _ = _wq(b, theta)
    return -((ka + kb) ** 2) / (ka**2 * r1) / small


def cusp_directional_torsion_measure(b: FrontBranch, theta):
    """Literal product ``kappa_t * |c'|`` (bounded; jumps at swallowtails)."""
    return cusp_directional_torsion(b, theta) * singular_speed(b, theta)


def torsion_measure(b: FrontBranch, theta):
    """``tau |c'|`` with ``tau = det(c', c'', c''') / |c' x c''|^2`` from analytic jets."""
    _, d1, d2, d3 = b.singular_curve_jet(theta, 3)
    cr = np.cross(d1, d2)
    det = np.sum(cr * d3, axis=-1)
    return det / np.sum(cr * cr, axis=-1) * np.linalg.norm(d1, axis=-1)


@dataclass
class TorsionResult:
    total: float
    turns: float
    n: int
    residual: float
    kappa_t_total: float
    kappa_t_residual: float
    guards: list

    @property
    def distance_to_integer(self) -> float:
        return abs(self.turns - self.n)


def total_torsion(b: FrontBranch, cfg: QuadratureConfig | None = None) -> TorsionResult:
    """Total torsion of the image of the singular curve over ``theta in [0, 2 m pi)``.

    Swallowtail parameters are excised by guard intervals and the guarded
    integrals are extrapolated in the guard width.  The total cusp-directional
    torsion is computed alongside.
    """
    cfg = cfg or QuadratureConfig()
    guards = b.swallowtails()
    tor = integrate_with_guards(lambda t: torsion_measure(b, t), b.period, guards, cfg)
    kt = integrate_with_guards(lambda t: cusp_directional_torsion_measure(b, t), b.period, guards, cfg)
    turns = tor.value / (2 * np.pi)
    return TorsionResult(tor.value, turns, int(round(turns)), tor.error, kt.value, kt.error, list(guards))


# -- sector angles at the half slice ------------------------------------------------

def beta(b: FrontBranch, theta, oriented: bool = True):
    """Angle between the tangent of the rosette at ``gamma(theta)`` and the chord to its partner.

    With ``oriented=True`` the tangent is taken along increasing ``lambda_k``
    (multiplied by the sign of ``lambda_k'``); otherwise along increasing ``theta``.
    """
    theta = np.asarray(theta, dtype=float)
    r = b.parent
    chord = r.point(theta + b.shift) - r.point(theta)
    t = unit_tangent(theta)
    if oriented:
        t = t * np.sign(b.singular_lambda(theta, 1))[..., None]
    c = np.sum(t * chord, axis=-1) / np.linalg.norm(chord, axis=-1)
    return clamped_arccos(c)


def sector_angle(b: FrontBranch, theta, oriented: bool = True):
    """Angle of the positive sector cut out by the slice ``{lambda_k(theta)} x S^1``."""
    w, dw, _, big = _wq(b, theta)
    return clamped_arccos(np.sqrt((w * w + dw * dw) / big) * np.cos(beta(b, theta, oriented)))


def alpha_plus(b: FrontBranch, theta, oriented: bool = True, tol: float = 1e-10):
    """Positive sector angle at a point where the singular curve meets the half slice.

    Raises
    ------
    NotOnSlice
        If ``|lambda_k(theta) - 1/2| > tol``.
    """
    off = np.abs(b.singular_lambda(theta) - 0.5)
    if np.any(off > tol):
        raise NotOnSlice(f"lambda_k(theta) differs from 1/2 by {np.max(off):.3e}")
    return sector_angle(b, theta, oriented)


def sector_angle_oracle(b: FrontBranch, theta: float, lam_slice: float | None = None) -> float:
    """Angle between the initial vectors of the singular curve and of the slice curve.

    Both curves start at the singular point over ``theta``; the singular curve
    runs into ``lam > lam_slice`` and the slice curve into the positive region.
    """
    orc = b.oracle()
    if lam_slice is None:
        lam_slice = float(orc.singular_u(theta)[0])
    sig = orc.singular_velocity(theta)
    eps = 1.0 if sig[0, 0] > 0 else -1.0
    probe = float(orc.area_density(np.array([lam_slice]), np.array([theta + 1e-3]))[0])
    delta = 1.0 if probe > 0 else -1.0

    def singular_curve(t):
        v = theta + eps * t
        return float(orc.singular_u(v)[0]), v

    def slice_curve(t):
        return lam_slice, theta + delta * t

    a = orc.initial_vector(singular_curve)
    c = orc.initial_vector(slice_curve)
    return float(clamped_arccos(float(a @ c)))
