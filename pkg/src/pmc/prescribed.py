"""Prescription functions H(y) on [-1, 1] and their admissibility classes.

A prescription assigns the target mean curvature as a C1 function of the
angle function.  Two classes gate the constructions downstream:

* ``c1k``       : 4 H(y) > (1 - kappa) on all of [-1, 1];
* ``c1k_even``  : H even and 4 H(y) > (1 - kappa) sqrt(1 - y^2).

Both inequalities are strict; borderline prescriptions (for instance the
constant 1/2 with hyperbolic base, the critical value for the existence
of constant-mean-curvature spheres) are rejected.  Membership is checked
on a fixed 2001-point grid, which is a documented completeness
limitation for adversarial table specs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import PrescriptionError
from .spaceform import validate_kappa

PARITY_GRID_SIZE = 1001
CLASS_GRID_SIZE = 2001
PARITY_TOL = 1e-12

DESCRIPTOR_TYPES = ("constant", "linear", "poly", "even-poly", "table")


@dataclass(frozen=True)
class PrescribedFunction:
    """Evaluator for a prescription H: [-1,1] -> R with derivative.

    ``descriptor`` is the JSON-style dict the function was parsed from
    (or a synthetic one for hand-built functions).  Instances are
    immutable and safe to share.
    """

    descriptor: dict
    _eval: Callable = field(repr=False)
    _deriv: Callable = field(repr=False)
    even: bool

    def __call__(self, y):
        return self._eval(y)

    def deriv(self, y):
        return self._deriv(y)

    def grid_values(self, n: int = CLASS_GRID_SIZE) -> tuple[np.ndarray, np.ndarray]:
        ys = np.linspace(-1.0, 1.0, n)
        return ys, np.asarray(self._eval(ys), dtype=float)

    def min_value(self, n: int = CLASS_GRID_SIZE) -> float:
        """Grid minimum of H over [-1, 1]."""
        return float(self.grid_values(n)[1].min())

    def descriptor_json(self) -> str:
        return json.dumps(self.descriptor, separators=(",", ":"))

    @classmethod
    def from_callable(cls, f, df=None, descriptor=None, even=None) -> "PrescribedFunction":
        """Wrap plain callables (used by tests and programmatic callers).

        If ``df`` is missing a central difference stands in for the
        derivative; if ``even`` is missing parity is measured on a grid.
        """
        ev = _vectorize_scalar(f)
        if df is None:
            h = 1e-6
            dv = _vectorize_scalar(lambda y: (f(min(y + h, 1.0)) - f(max(y - h, -1.0)))
                                   / (min(y + h, 1.0) - max(y - h, -1.0)))
        else:
            dv = _vectorize_scalar(df)
        if even is None:
            even = _measure_parity(ev)
        desc = descriptor if descriptor is not None else {"type": "callable"}
        pf = cls(descriptor=desc, _eval=ev, _deriv=dv, even=bool(even))
        _check_c1(pf)
        return pf


@dataclass(frozen=True)
class ClassReport:
    """Membership verdicts and slacks for both admissibility classes.

    ``margin_c1k`` is the grid minimum of 4H - (1-kappa), attained at
    ``witness_c1k``; ``margin_even`` the minimum of
    4H - (1-kappa)sqrt(1-y^2) at ``witness_even``.  ``margin`` /
    ``witness`` pick the slack relevant to the function's parity.
    """

    in_c1k: bool
    in_c1k_even: bool
    even: bool
    margin_c1k: float
    witness_c1k: float
    margin_even: float
    witness_even: float

    @property
    def margin(self) -> float:
        return self.margin_even if self.even else self.margin_c1k

    @property
    def witness(self) -> float:
        return self.witness_even if self.even else self.witness_c1k


def _vectorize_scalar(f):
    def wrapped(y):
        if isinstance(y, np.ndarray):
            out = f(y)
            if np.ndim(out) == 0:
                return np.full(y.shape, float(out))
            return np.asarray(out, dtype=float)
        return float(f(y))

    return wrapped


def _measure_parity(ev) -> bool:
    ys = np.linspace(-1.0, 1.0, PARITY_GRID_SIZE)
    vals = ev(ys)
    return bool(np.max(np.abs(vals - vals[::-1])) <= PARITY_TOL)


def _check_c1(pf: PrescribedFunction) -> None:
    ys = np.linspace(-1.0, 1.0, PARITY_GRID_SIZE)
    vals = np.asarray(pf._eval(ys), dtype=float)
    ders = np.asarray(pf._deriv(ys), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise PrescriptionError("prescription is not finite on all of [-1, 1]")
    if not np.all(np.isfinite(ders)):
        raise PrescriptionError("prescription derivative is not finite on [-1, 1]")


def _constant(value: float):
    v = float(value)

    def ev(y):
        if isinstance(y, np.ndarray):
            return np.full(y.shape, v)
        return v

    def dv(y):
        if isinstance(y, np.ndarray):
            return np.zeros(y.shape)
        return 0.0

    return ev, dv


def _poly(coeffs: list[float]):
    cs = [float(c) for c in coeffs]
    rev = np.asarray(cs[::-1], dtype=float)
    drev = np.polyder(rev) if len(cs) > 1 else np.asarray([0.0])

    def ev(y):
        if isinstance(y, np.ndarray):
            return np.polyval(rev, y)
        acc = 0.0
        for c in rev:
            acc = acc * y + c
        return acc

    def dv(y):
        if isinstance(y, np.ndarray):
            return np.polyval(drev, y)
        acc = 0.0
        for c in drev:
            acc = acc * y + c
        return acc

    return ev, dv


def _table(nodes):
    if not isinstance(nodes, (list, tuple)) or len(nodes) < 4:
        raise PrescriptionError("table prescription needs at least 4 nodes")
    try:
        pts = sorted((float(y), float(h)) for y, h in nodes)
    except (TypeError, ValueError) as exc:
        raise PrescriptionError(f"table nodes must be [y, H] pairs: {exc}") from exc
    ys = np.asarray([p[0] for p in pts])
    hs = np.asarray([p[1] for p in pts])
    if np.any(ys < -1.0) or np.any(ys > 1.0):
        raise PrescriptionError("table nodes must lie inside [-1, 1]")
    if np.any(np.diff(ys) <= 0.0):
        raise PrescriptionError("table nodes must have distinct y values")
    if not (np.all(np.isfinite(ys)) and np.all(np.isfinite(hs))):
        raise PrescriptionError("table nodes must be finite")
    interp = PchipInterpolator(ys, hs, extrapolate=True)
    dinterp = interp.derivative()

    def ev(y):
        out = interp(y)
        if isinstance(y, np.ndarray):
            return np.asarray(out, dtype=float)
        return float(out)

    def dv(y):
        out = dinterp(y)
        if isinstance(y, np.ndarray):
            return np.asarray(out, dtype=float)
        return float(out)

    return ev, dv


def parse_prescription(text) -> PrescribedFunction:
    """Parse a JSON descriptor (string or dict) into a PrescribedFunction.

    Supported descriptors::

        {"type": "constant", "value": v}
        {"type": "linear"}                      H(y) = y
        {"type": "poly", "coeffs": [a0, a1, ...]}
        {"type": "even-poly", "coeffs": [a0, a2, ...]}
        {"type": "table", "nodes": [[y, H], ...]}   monotone-cubic interpolation
    """
    if isinstance(text, (bytes, str)):
        try:
            desc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PrescriptionError(f"malformed prescription JSON: {exc}") from exc
    elif isinstance(text, dict):
        desc = dict(text)
    else:
        raise PrescriptionError(f"prescription must be JSON text or a dict, got {type(text)}")
    if not isinstance(desc, dict) or "type" not in desc:
        raise PrescriptionError("prescription descriptor must be an object with a 'type' key")
    kind = desc["type"]

    if kind == "constant":
        if "value" not in desc:
            raise PrescriptionError("constant prescription needs a 'value'")
        ev, dv = _constant(desc["value"])
        even = True
    elif kind == "linear":
        ev, dv = _poly([0.0, 1.0])
        even = False
    elif kind == "poly":
        coeffs = desc.get("coeffs")
        if not coeffs:
            raise PrescriptionError("poly prescription needs nonempty 'coeffs'")
        ev, dv = _poly(coeffs)
        even = None
    elif kind == "even-poly":
        coeffs = desc.get("coeffs")
        if not coeffs:
            raise PrescriptionError("even-poly prescription needs nonempty 'coeffs'")
        full = []
        for c in coeffs:
            full.extend([float(c), 0.0])
        ev, dv = _poly(full[:-1])
        even = True
    elif kind == "table":
        ev, dv = _table(desc.get("nodes"))
        even = None
    else:
        raise PrescriptionError(f"unknown prescription type {kind!r}")

    ev = _vectorize_scalar(ev)
    dv = _vectorize_scalar(dv)
    if even is None:
        even = _measure_parity(ev)
    pf = PrescribedFunction(descriptor=desc, _eval=ev, _deriv=dv, even=even)
    _check_c1(pf)
    return pf


def validate_class(H: PrescribedFunction, kappa: int) -> ClassReport:
    """Report membership of H in the two admissibility classes.

    Never raises on non-membership; the report carries the minimal slack
    of each defining inequality together with the grid point attaining it.
    """
    k = validate_kappa(kappa)
    ys, vals = H.grid_values(CLASS_GRID_SIZE)
    slack_flat = 4.0 * vals - (1.0 - k)
    slack_even = 4.0 * vals - (1.0 - k) * np.sqrt(np.clip(1.0 - ys * ys, 0.0, None))
    i1 = int(np.argmin(slack_flat))
    i2 = int(np.argmin(slack_even))
    margin_c1k = float(slack_flat[i1])
    margin_even = float(slack_even[i2])
    return ClassReport(
        in_c1k=bool(margin_c1k > 0.0),
        in_c1k_even=bool(H.even and margin_even > 0.0),
        even=H.even,
        margin_c1k=margin_c1k,
        witness_c1k=float(ys[i1]),
        margin_even=margin_even,
        witness_even=float(ys[i2]),
    )
