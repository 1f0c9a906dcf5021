"""Rotational surfaces with prescribed mean curvature.

The generating profile (x(s), z(s)) is parametrised by arclength in the
half-plane {x > 0} of geodesic polar coordinates; sigma is the tangent
angle, so x' = cos sigma, z' = sin sigma, and the mean curvature
prescription closes the system with

    sigma' = 2 H(cos sigma) - ct_kappa(x) sin sigma.

The angle function of the revolved surface is nu = cos sigma; the sign
conventions match the upward-oriented graph divergence equation (see
:mod:`pmc.graphs`), which is what the cross-checks in the test suite pin
down.  Integration is classical fixed-step RK4 on a reproducible sample
grid, with Richardson error flagging, tenfold sub-stepping near the
axis, and event location by bisection inside the offending step.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._integrate import locate_event, rk4_step, rk4_step_checked
from .errors import (
    AxisSingularityError,
    ClassViolationError,
    DomainError,
    NoCylinderError,
    NonClosureError,
    StepSizeError,
)
from .prescribed import PrescribedFunction, parse_prescription, validate_class
from .spaceform import base_distance, cs, sn, validate_kappa

AXIS_FLOOR = 1e-12
CLOSURE_TOL = 1e-3
LOCAL_ERR_TOL = 1e-6  # Richardson estimate per unit arclength
EVENT_TOL = 1e-10
_REFINE_X = 0.05
_REFINE_FACTOR = 10

CLOSURES = ("closed-sphere", "equilibrium-cylinder", "graph-arc", "truncated")


@dataclass(frozen=True)
class ProfileState:
    """Single profile sample: position (x, z), tangent angle, arclength."""

    x: float
    z: float
    sigma: float
    s: float = 0.0

    @property
    def nu(self) -> float:
        return math.cos(self.sigma)


@dataclass
class ProfileCurve:
    """Arclength-sampled rotational profile with its generating data."""

    kappa: int
    prescription: PrescribedFunction
    step: float
    closure: str
    s: np.ndarray
    x: np.ndarray
    z: np.ndarray
    sigma: np.ndarray

    @property
    def nu(self) -> np.ndarray:
        return np.cos(self.sigma)

    @property
    def x_max(self) -> float:
        """Equator radius: largest distance of the profile to the axis."""
        return float(self.x.max())

    @property
    def height(self) -> float:
        return float(self.z[-1] - self.z[0])

    def __len__(self) -> int:
        return len(self.s)

    def state(self, i: int) -> ProfileState:
        return ProfileState(x=float(self.x[i]), z=float(self.z[i]),
                            sigma=float(self.sigma[i]), s=float(self.s[i]))

    def states(self):
        return (self.state(i) for i in range(len(self.s)))

    def validate(self) -> None:
        """Check the sampling invariants; raises AssertionError on failure."""
        assert np.all(np.diff(self.s) > 0.0), "arclength not strictly increasing"
        assert np.all(self.x >= 0.0), "profile crossed the axis"
        ds = np.diff(self.s)
        chord = np.hypot(np.diff(self.x), np.diff(self.z))
        dsig = np.abs(np.diff(self.sigma))
        assert np.all(np.abs(chord - ds) <= 0.25 * ds * dsig**2 + 1e-13), \
            "chord length inconsistent with arclength parametrisation"

    def to_csv(self, path, digits: int = 17) -> None:
        write_profile_csv(self, path, digits=digits)


def _fast_trig(kappa: int):
    if kappa == 1:
        return math.sin, math.cos
    return math.sinh, math.cosh


def _make_rhs(H: PrescribedFunction, kappa: int):
    snf, csf = _fast_trig(kappa)
    Hf = H._eval
    k = kappa

    def rhs(s, y):
        x, z, sigma = y
        if x <= 0.0:
            raise AxisSingularityError(f"profile evaluation at x={x} <= 0 (rotation axis)")
        if k == 1 and x >= math.pi:
            raise DomainError(f"profile evaluation at x={x} >= pi (antipodal cut)")
        c = math.cos(sigma)
        sg = math.sin(sigma)
        return (c, sg, 2.0 * Hf(c) - (csf(x) / snf(x)) * sg)

    return rhs


def profile_rhs(H: PrescribedFunction, kappa: int, state: ProfileState):
    """Right-hand side (dx/ds, dz/ds, dsigma/ds) of the profile system."""
    k = validate_kappa(kappa)
    return _make_rhs(H, k)(state.s, (state.x, state.z, state.sigma))


def _integrate_profile_arrays(H, kappa, s0, y0, max_arclength, step):
    """Core fixed-step loop.  Returns (s, x, z, sigma arrays, event name or None)."""
    rhs = _make_rhs(H, kappa)
    k = kappa

    def g_flat(t, y):
        return math.sin(y[2])

    def g_axis(t, y):
        return y[0] - AXIS_FLOOR

    def g_chart(t, y):
        return y[0] - (math.pi - AXIS_FLOOR)

    events = [("sigma-flat", g_flat), ("axis", g_axis)]
    if k == 1:
        events.append(("chart-bound", g_chart))

    s, y = s0, y0
    out_s, out_y = [s], [y]
    g_prev = [g(s, y) for _, g in events]
    s_end = s0 + max_arclength
    fired = None

    while s < s_end - 1e-12 * max(1.0, abs(s_end)) and fired is None:
        target = min(s + step, s_end)
        # advance to the next grid sample, sub-stepping near the singular radii
        while s < target - 1e-15 * max(1.0, abs(target)):
            near = y[0] < _REFINE_X or (k == 1 and y[0] > math.pi - _REFINE_X)
            hs = target - s
            if near:
                hs = min(hs, step / _REFINE_FACTOR)
            y_new = None
            for _ in range(80):
                try:
                    cand, err = rk4_step_checked(rhs, s, y, hs)
                except (AxisSingularityError, DomainError):
                    hs *= 0.5
                    continue
                if all(math.isfinite(v) for v in cand):
                    y_new = cand
                    break
                hs *= 0.5
            if y_new is None or hs < 1e-18:
                # pinched against the axis: report contact at the floor
                fired = "axis"
                break
            if err > LOCAL_ERR_TOL * hs:
                raise StepSizeError(
                    f"local error estimate {err / hs:.3e} per unit arclength exceeds "
                    f"{LOCAL_ERR_TOL:.0e} at s={s:.6g}; reduce the step"
                )
            crossing = None  # (h_cross, y_cross, name)
            for idx, (name, g) in enumerate(events):
                gp = g_prev[idx]
                gn = g(s + hs, y_new)
                if gp != 0.0 and gp * gn < 0.0:

                    def g_guarded(t, yy, _g=g, _gn=gn):
                        try:
                            return _g(t, yy)
                        except (AxisSingularityError, DomainError):
                            return _gn

                    h_c, y_c = locate_event(rhs, s, y, hs, g_guarded, gp, gn, tol=EVENT_TOL)
                    if crossing is None or h_c < crossing[0]:
                        crossing = (h_c, y_c, name)
            if crossing is not None:
                h_c, y_c, name = crossing
                s, y = s + h_c, y_c
                fired = name
                break
            g_prev = [g(s + hs, y_new) for _, g in events]
            s, y = s + hs, y_new
        out_s.append(s)
        out_y.append(y)

    sa = np.asarray(out_s)
    ya = np.asarray(out_y)
    return sa, ya[:, 0], ya[:, 1], ya[:, 2], fired


def _classify_closure(kappa, xs, sigmas, fired):
    if fired == "axis":
        return "closed-sphere"
    if fired == "sigma-flat":
        return "closed-sphere" if xs[-1] <= CLOSURE_TOL else "truncated"
    if fired == "chart-bound":
        return "truncated"
    # ran to the full arclength without events
    if (np.max(np.abs(xs - xs[0])) <= 1e-8
            and np.max(np.abs(sigmas - sigmas[0])) <= 1e-6
            and abs(math.cos(sigmas[0])) <= 1e-6):
        return "equilibrium-cylinder"
    nu = np.cos(sigmas)
    if np.all(nu > 0.0) or np.all(nu < 0.0):
        return "graph-arc"
    return "truncated"


def integrate_profile(H: PrescribedFunction, kappa: int, initial: ProfileState,
                      max_arclength: float, step: float) -> ProfileCurve:
    """Integrate the profile system from ``initial`` over ``max_arclength``.

    Samples are recorded every ``step``; integration stops early at the
    first event (profile meets the axis, tangent turns horizontal at a
    multiple of pi, or the spherical chart bound is reached) and the
    closure tag records what happened.
    """
    k = validate_kappa(kappa)
    if initial.x <= 0.0:
        raise AxisSingularityError(f"initial profile point must have x > 0, got {initial.x}")
    if step <= 0.0:
        raise DomainError(f"step must be > 0, got {step}")
    if max_arclength <= 0.0:
        raise DomainError(f"max_arclength must be > 0, got {max_arclength}")
    y0 = (initial.x, initial.z, initial.sigma)
    s, x, z, sig, fired = _integrate_profile_arrays(H, k, initial.s, y0, max_arclength, step)
    closure = _classify_closure(k, x, sig, fired)
    return ProfileCurve(kappa=k, prescription=H, step=step, closure=closure,
                        s=s, x=x, z=z, sigma=sig)


def build_sphere(H: PrescribedFunction, kappa: int, step: float,
                 max_arclength: float = 200.0) -> ProfileCurve:
    """Construct the rotational sphere for an even in-class prescription.

    Starts at the regularised pole s0 = 10*step with x = s0, z = 0 and
    sigma = H(1)*s0 (the tangent-angle rate forced at the axis), and
    integrates until the tangent turns horizontal at sigma = pi.  The
    closure is accepted when the profile returns to within 1e-3 of the
    axis; otherwise the step is halved once and the construction retried
    before reporting non-closure.
    """
    k = validate_kappa(kappa)
    report = validate_class(H, k)
    if not report.in_c1k_even:
        raise ClassViolationError(
            "sphere construction requires the even admissibility class: "
            f"even={report.even}, margin={report.margin_even:.6g} at y={report.witness_even:.4g}"
        )
    last_x = None
    for attempt_step in (step, 0.5 * step):
        eps = 10.0 * attempt_step
        y0 = (eps, 0.0, H(1.0) * eps)
        s, x, z, sig, fired = _integrate_profile_arrays(H, k, eps, y0, max_arclength, attempt_step)
        if fired is None:
            raise NonClosureError(
                f"profile did not close within max_arclength={max_arclength}",
                x_at_closure=float(x[-1]),
            )
        last_x = float(x[-1])
        if fired in ("sigma-flat", "axis") and last_x <= CLOSURE_TOL:
            return ProfileCurve(kappa=k, prescription=H, step=attempt_step,
                                closure="closed-sphere", s=s, x=x, z=z, sigma=sig)
    raise NonClosureError(
        f"profile missed the axis by x={last_x:.3e} at sigma=pi (tolerance {CLOSURE_TOL})",
        x_at_closure=last_x,
    )


def first_integral(kappa: int, H0: float, state: ProfileState) -> float:
    """Conserved quantity of the constant-prescription profile system:
    sn_kappa(x) sin(sigma) + (2 H0 / kappa) cs_kappa(x)."""
    k = validate_kappa(kappa)
    return sn(k, state.x) * math.sin(state.sigma) + (2.0 * H0 / k) * cs(k, state.x)


def first_integral_along(kappa: int, H0: float, curve: ProfileCurve) -> np.ndarray:
    """Vectorised first integral over all samples of a profile."""
    k = validate_kappa(kappa)
    return sn(k, curve.x) * np.sin(curve.sigma) + (2.0 * H0 / k) * cs(k, curve.x)


def cylinder_radius(H: PrescribedFunction, kappa: int) -> float:
    """Radius rho of the vertical cylinder with prescribed curvature H.

    Solves ct_kappa(rho) = 2 H(0) by bisection to 1e-12.  For the
    hyperbolic base coth > 1 forces 2 H(0) > 1; for the spherical base
    the cap-side root needs 2 H(0) > 0.
    """
    k = validate_kappa(kappa)
    target = 2.0 * float(H(0.0))
    snf, csf = _fast_trig(k)
    if k == -1:
        if target <= 1.0:
            raise NoCylinderError("no-solution: coth > 1")
        lo = min(0.5 / target, 0.5)
        while csf(lo) / snf(lo) <= target:
            lo *= 0.5
            if lo < 1e-300:
                raise NoCylinderError("no-solution: coth > 1")
        hi = max(1.0, 2.0 * lo)
        while csf(hi) / snf(hi) >= target:
            hi *= 2.0
    else:
        if target <= 0.0:
            raise NoCylinderError("no-solution: cot > 0 requires 2H(0) > 0")
        lo = min(0.5 / target, 0.5)
        while csf(lo) / snf(lo) <= target:
            lo *= 0.5
            if lo < 1e-300:
                raise NoCylinderError("no-solution: cot root below resolution")
        hi = math.pi / 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-13:
            break
        if csf(mid) / snf(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class PhasePlaneReport:
    """Equilibria and orbit polylines of the (x, sigma) reduction.

    ``branches[i]`` is +1 when the i-th equilibrium sits on the
    sigma = +pi/2 branch (ct = +2 H(0)) and -1 on sigma = -pi/2.
    """

    equilibria: list[tuple[float, float]]
    branches: list[int]
    cylinder_radius: float | None
    orbit_samples: list[np.ndarray] = field(default_factory=list)


def phase_plane(H: PrescribedFunction, kappa: int,
                window: tuple[tuple[float, float], tuple[float, float]],
                seeds: int = 0, grid: int = 24, orbit_step: float = 1e-3,
                orbit_length: float | None = None) -> PhasePlaneReport:
    """Locate equilibria of (x', sigma') = (cos sigma, 2H(cos sigma) -
    ct_kappa(x) sin sigma) in the window by Newton iteration from a
    coarse grid, and optionally trace orbit polylines from seed points.
    """
    k = validate_kappa(kappa)
    (x_lo, x_hi), (sg_lo, sg_hi) = window
    if not (0.0 < x_lo < x_hi):
        raise DomainError(f"x-range must satisfy 0 < lo < hi, got ({x_lo}, {x_hi})")
    if k == 1 and not x_hi < math.pi:
        raise DomainError(f"x-range must stay below pi for the spherical base, got hi={x_hi}")
    snf, csf = _fast_trig(k)
    Hf, dHf = H._eval, H._deriv

    def F(x, sg):
        ssg = math.sin(sg)
        return math.cos(sg), 2.0 * Hf(math.cos(sg)) - (csf(x) / snf(x)) * ssg

    x_floor = 1e-8
    x_ceil = math.pi - 1e-8 if k == 1 else math.inf
    found: list[tuple[float, float]] = []
    for xi in np.linspace(x_lo, x_hi, grid):
        for sgi in np.linspace(sg_lo, sg_hi, grid):
            x, sg = float(xi), float(sgi)
            ok = False
            for _ in range(60):
                f1, f2 = F(x, sg)
                if max(abs(f1), abs(f2)) <= 1e-13:
                    ok = True
                    break
                ssg, csg = math.sin(sg), math.cos(sg)
                s_base = snf(x)
                j11, j12 = 0.0, -ssg
                j21 = ssg / (s_base * s_base)
                j22 = -2.0 * dHf(csg) * ssg - (csf(x) / s_base) * csg
                det = j11 * j22 - j12 * j21
                if det == 0.0 or not math.isfinite(det):
                    break
                dx = -(f1 * j22 - j12 * f2) / det
                dsg = -(j11 * f2 - f1 * j21) / det
                dx = max(-0.5, min(0.5, dx))
                dsg = max(-0.5, min(0.5, dsg))
                x = min(max(x + dx, x_floor), x_ceil)
                sg = sg + dsg
            if ok and x_lo <= x <= x_hi and sg_lo <= sg <= sg_hi:
                if not any(abs(x - a) <= 1e-8 and abs(sg - b) <= 1e-8 for a, b in found):
                    found.append((x, sg))
    found.sort()
    branches = [1 if math.sin(sg) > 0.0 else -1 for _, sg in found]
    cyl = None
    for (x, sg), br in zip(found, branches):
        if br == 1:
            cyl = x
            break

    orbits: list[np.ndarray] = []
    if seeds > 0:
        length = orbit_length if orbit_length is not None else \
            4.0 * math.hypot(x_hi - x_lo, sg_hi - sg_lo)

        def rhs(t, y):
            x, sg = y
            if x <= 0.0:
                raise AxisSingularityError(f"orbit at x={x} <= 0")
            if k == 1 and x >= math.pi:
                raise DomainError("orbit past the antipodal cut")
            ssg = math.sin(sg)
            return (math.cos(sg), 2.0 * Hf(math.cos(sg)) - (csf(x) / snf(x)) * ssg)

        m = max(1, math.ceil(math.sqrt(seeds)))
        xs = np.linspace(x_lo, x_hi, m + 2)[1:-1]
        sgs = np.linspace(sg_lo, sg_hi, m + 2)[1:-1]
        pts = [(float(a), float(b)) for a in xs for b in sgs][:seeds]
        for x0, sg0 in pts:
            legs = []
            for direction in (-1.0, 1.0):
                y = (x0, sg0)
                t = 0.0
                leg = [y]
                while t < length:
                    try:
                        y = rk4_step(lambda tt, yy: tuple(direction * v for v in rhs(tt, yy)),
                                     t, y, orbit_step)
                    except (AxisSingularityError, DomainError):
                        break
                    if not all(math.isfinite(v) for v in y):
                        break
                    t += orbit_step
                    leg.append(y)
                    if not (x_lo <= y[0] <= x_hi and sg_lo <= y[1] <= sg_hi):
                        break
                legs.append(leg)
            poly = list(reversed(legs[0]))[:-1] + legs[1]
            orbits.append(np.asarray(poly))

    return PhasePlaneReport(equilibria=found, branches=branches,
                            cylinder_radius=cyl, orbit_samples=orbits)


def cmc_sphere_diameter(H0: float, kappa: int, step: float = 1e-4) -> float:
    """Ambient diameter of the rotational sphere with constant curvature H0.

    Builds the profile and maximises the product-space distance over
    sampled point pairs placed on the same meridian plane (dtheta = 0)
    and on opposite ones (dtheta = pi), with a local full-resolution
    refinement around the coarse maximiser.
    """
    k = validate_kappa(kappa)
    curve = build_sphere(parse_prescription({"type": "constant", "value": float(H0)}), k, step)
    n = len(curve)
    stride = max(1, n // 1200)
    idx = np.unique(np.concatenate([np.arange(0, n, stride),
                                    [0, n - 1, int(np.argmax(curve.x))]]))
    best = 0.0
    best_pair = (0, n - 1)
    for dtheta in (0.0, math.pi):
        X, Z = curve.x[idx], curve.z[idx]
        db = base_distance(k, X[:, None], X[None, :], dtheta)
        d = np.sqrt(db * db + (Z[:, None] - Z[None, :]) ** 2)
        pos = int(np.argmax(d))
        i, j = divmod(pos, len(idx))
        if float(d[i, j]) > best:
            best = float(d[i, j])
            best_pair = (int(idx[i]), int(idx[j]))
    # local refinement at full sample resolution
    i0, j0 = best_pair
    wi = np.arange(max(0, i0 - 2 * stride), min(n, i0 + 2 * stride + 1))
    wj = np.arange(max(0, j0 - 2 * stride), min(n, j0 + 2 * stride + 1))
    for dtheta in (0.0, math.pi):
        db = base_distance(k, curve.x[wi][:, None], curve.x[wj][None, :], dtheta)
        d = np.sqrt(db * db + (curve.z[wi][:, None] - curve.z[wj][None, :]) ** 2)
        best = max(best, float(d.max()))
    return best


def lower_cap_graph(curve: ProfileCurve):
    """Reparametrise the lower cap (the sub-arc with nu > 0) of a closed
    profile as a radial graph u(r), carrying the exact flux and angle
    samples over from the profile."""
    from .graphs import RadialGraph

    k = curve.kappa
    sig = curve.sigma
    stop = len(sig)
    for i, sg in enumerate(sig):
        if sg >= math.pi / 2.0 - 1e-12:
            stop = i
            break
    if stop < 3:
        raise DomainError("profile has no usable lower cap (fewer than 3 samples with nu > 0)")
    # the grid inherits the profile's arclength sampling and starts at the
    # regularised pole offset x = 10*step, not at the axis itself
    r = curve.x[:stop].copy()
    z = curve.z[:stop]
    u = z - z[-1]
    phi = sn(k, r) * np.sin(sig[:stop])
    nu = np.cos(sig[:stop])
    return RadialGraph(kappa=k, prescription=curve.prescription, R=float(r[-1]),
                       r=r, u=u, phi=phi, nu=nu, step=curve.step)


# ---------------------------------------------------------------------------
# profile CSV format: one comment header with the generating data, then
# columns s,x,z,sigma,nu at 17 significant digits (round-trip exact).

def write_profile_csv(curve: ProfileCurve, path, digits: int = 17) -> None:
    fmt = f"%.{digits}g"
    buf = io.StringIO()
    buf.write(
        f"# pmc profile kappa={curve.kappa} step={fmt % curve.step} "
        f"closure={curve.closure} prescription={curve.prescription.descriptor_json()}\n"
    )
    buf.write("s,x,z,sigma,nu\n")
    nu = curve.nu
    for i in range(len(curve)):
        buf.write(",".join(fmt % v for v in
                           (curve.s[i], curve.x[i], curve.z[i], curve.sigma[i], nu[i])))
        buf.write("\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def _parse_header(line: str, tag: str) -> dict:
    prefix = f"# pmc {tag} "
    if not line.startswith(prefix):
        raise DomainError(f"not a pmc {tag} file: bad header {line[:40]!r}")
    meta = {}
    for token in line[len(prefix):].strip().split(" "):
        key, _, val = token.partition("=")
        meta[key] = val
    return meta


def read_profile_csv(path) -> ProfileCurve:
    with open(path) as fh:
        lines = fh.read().splitlines()
    meta = _parse_header(lines[0], "profile")
    if lines[1] != "s,x,z,sigma,nu":
        raise DomainError(f"unexpected profile column header {lines[1]!r}")
    rows = np.asarray([[float(v) for v in ln.split(",")] for ln in lines[2:] if ln])
    return ProfileCurve(
        kappa=validate_kappa(int(meta["kappa"])),
        prescription=parse_prescription(meta["prescription"]),
        step=float(meta["step"]),
        closure=meta["closure"],
        s=rows[:, 0], x=rows[:, 1], z=rows[:, 2], sigma=rows[:, 3],
    )
