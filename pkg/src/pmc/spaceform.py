"""Geometry of the base surface M2(kappa) and the product M2(kappa) x R.

kappa = +1 is the round unit sphere, kappa = -1 the hyperbolic plane;
the flat case is rejected everywhere.  All operations work in geodesic
polar coordinates (r, theta) about a fixed pole (the rotation axis of
the rest of the library), plus a height coordinate z.  Chart exports to
the quadric model and the Poincare disk happen only at the boundary of
the API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedChartError

VALID_KAPPA = (-1, 1)
CHARTS = ("quadric", "poincare-disk", "polar")

TWO_PI = 2.0 * math.pi


def validate_kappa(kappa: int) -> int:
    """Return kappa as int after checking it is exactly -1 or +1."""
    try:
        k = int(kappa)
    except (TypeError, ValueError):
        raise DomainError(f"curvature sign must be -1 or +1, got {kappa!r}")
    if k != kappa or k not in VALID_KAPPA:
        raise DomainError(f"curvature sign must be -1 or +1, got {kappa!r}")
    return k


def sn(kappa: int, t):
    """Curvature-sign sine: sin t for kappa=+1, sinh t for kappa=-1."""
    k = validate_kappa(kappa)
    if isinstance(t, np.ndarray):
        return np.sin(t) if k == 1 else np.sinh(t)
    return math.sin(t) if k == 1 else math.sinh(t)


def cs(kappa: int, t):
    """Curvature-sign cosine: cos t for kappa=+1, cosh t for kappa=-1."""
    k = validate_kappa(kappa)
    if isinstance(t, np.ndarray):
        return np.cos(t) if k == 1 else np.cosh(t)
    return math.cos(t) if k == 1 else math.cosh(t)


def ct(kappa: int, t):
    """Curvature-sign cotangent cs/sn (cot or coth)."""
    return cs(kappa, t) / sn(kappa, t)


@dataclass(frozen=True)
class AmbientPoint:
    """Point of M2 x R in geodesic polar coordinates about the axis.

    r >= 0 is the geodesic distance to the axis, theta is normalised to
    [0, 2*pi), z is the height.  The kappa-dependent bound r <= pi for
    the spherical base is enforced by the operations that need it.
    """

    r: float
    theta: float
    z: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 0.0:
            raise DomainError(f"radial coordinate must be >= 0, got {self.r!r}")
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "z", float(self.z))


def _check_polar_radius(kappa: int, r: float) -> None:
    if kappa == 1 and r > math.pi:
        raise DomainError(
            f"polar radius {r} exceeds pi; the spherical chart stops at the antipode"
        )


def base_distance(kappa: int, r1, r2, dtheta):
    """Distance in M2(kappa) between (r1, 0) and (r2, dtheta), vectorised.

    Law of cosines in the base: for kappa=+1,
    cos d = cos r1 cos r2 + sin r1 sin r2 cos dtheta, and the hyperbolic
    analogue with cosh/sinh and a minus sign for kappa=-1.
    """
    k = validate_kappa(kappa)
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    dtheta = np.asarray(dtheta, dtype=float)
    if k == 1:
        arg = np.cos(r1) * np.cos(r2) + np.sin(r1) * np.sin(r2) * np.cos(dtheta)
        d = np.arccos(np.clip(arg, -1.0, 1.0))
    else:
        arg = np.cosh(r1) * np.cosh(r2) - np.sinh(r1) * np.sinh(r2) * np.cos(dtheta)
        d = np.arccosh(np.maximum(arg, 1.0))
    if d.ndim == 0:
        return float(d)
    return d


def ambient_distance(kappa: int, p: AmbientPoint, q: AmbientPoint) -> float:
    """Product-metric distance sqrt(d_base^2 + (p.z - q.z)^2)."""
    k = validate_kappa(kappa)
    if k == 1:
        _check_polar_radius(k, p.r)
        _check_polar_radius(k, q.r)
    db = base_distance(k, p.r, q.r, p.theta - q.theta)
    return math.hypot(db, p.z - q.z)


def circle_geodesic_curvature(kappa: int, rho: float) -> float:
    """Inward geodesic curvature ct_kappa(rho) of the circle of geodesic
    radius rho in M2(kappa).

    For kappa=-1 this is coth(rho) > 1 for every rho > 0; for kappa=+1
    it is cot(rho), positive on the cap side rho < pi/2.
    """
    k = validate_kappa(kappa)
    if not rho > 0.0:
        raise DomainError(f"circle radius must be > 0, got {rho!r}")
    if k == 1 and not rho < math.pi / 2:
        raise DomainError(
            f"spherical circle radius must be < pi/2 for positive curvature, got {rho!r}"
        )
    return ct(k, rho)


def export_chart(kappa: int, p: AmbientPoint, chart: str):
    """Map a polar point to an export chart.

    quadric        -> (x1, x2, x3, z) with x1^2 + x2^2 + kappa*x3^2 = 1/kappa,
                      upper sheet (x3 > 0) for the hyperbolic base;
    poincare-disk  -> (tanh(r/2) cos theta, tanh(r/2) sin theta, z), kappa=-1 only;
    polar          -> (r, theta, z) unchanged.
    """
    k = validate_kappa(kappa)
    if chart not in CHARTS:
        raise UnsupportedChartError(f"unknown chart {chart!r}; choose one of {CHARTS}")
    _check_polar_radius(k, p.r)
    if chart == "polar":
        return (p.r, p.theta, p.z)
    if chart == "poincare-disk":
        if k != -1:
            raise UnsupportedChartError("poincare-disk chart exists only for kappa=-1")
        w = math.tanh(p.r / 2.0)
        return (w * math.cos(p.theta), w * math.sin(p.theta), p.z)
    # quadric
    s = sn(k, p.r)
    return (s * math.cos(p.theta), s * math.sin(p.theta), cs(k, p.r), p.z)
