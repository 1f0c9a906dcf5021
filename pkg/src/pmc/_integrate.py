"""Classical fixed-step 4th-order stepping on small tuple states.

Kept deliberately tiny: the profile and flux ODEs downstream want
reproducible sample grids, event location by bisection on a sub-step,
and a Richardson error estimate, none of which an adaptive library
integrator provides in this form.
"""

from __future__ import annotations

from scipy.optimize import brentq


def rk4_step(rhs, t, y, h):
    """One classical Runge-Kutta step of size h on a tuple state."""
    k1 = rhs(t, y)
    h2 = 0.5 * h
    y2 = tuple(yi + h2 * ki for yi, ki in zip(y, k1))
    k2 = rhs(t + h2, y2)
    y3 = tuple(yi + h2 * ki for yi, ki in zip(y, k2))
    k3 = rhs(t + h2, y3)
    y4 = tuple(yi + h * ki for yi, ki in zip(y, k3))
    k4 = rhs(t + h, y4)
    s = h / 6.0
    return tuple(
        yi + s * (a + 2.0 * (b + c) + d) for yi, a, b, c, d in zip(y, k1, k2, k3, k4)
    )


def rk4_step_checked(rhs, t, y, h):
    """Advance by two half steps and estimate the local error.

    Returns ``(y_new, err)`` where ``y_new`` is the two-half-step result
    and ``err`` the max-norm Richardson estimate of its full-step
    counterpart's local error (difference / 15).
    """
    y_full = rk4_step(rhs, t, y, h)
    y_mid = rk4_step(rhs, t, y, 0.5 * h)
    y_new = rk4_step(rhs, t + 0.5 * h, y_mid, 0.5 * h)
    err = max(abs(a - b) for a, b in zip(y_full, y_new)) / 15.0
    return y_new, err


def locate_event(rhs, t, y, h, event, g_start, g_end, tol=1e-10):
    """Find the sub-step fraction where ``event`` changes sign.

    ``event(t, y) -> float`` must bracket a root between the start of the
    step and its end (``g_start * g_end < 0``).  Returns ``(h_cross,
    y_cross)`` with ``|event| <= tol`` at the crossing, located by root
    finding on single RK4 steps of varying length from the step start.
    """

    def g_of(hh):
        if hh <= 0.0:
            return g_start
        return event(t + hh, rk4_step(rhs, t, y, hh))

    h_cross = brentq(g_of, 0.0, h, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    y_cross = rk4_step(rhs, t, y, h_cross) if h_cross > 0.0 else y
    # polish by bisection if the bracket endpoints were steep
    g = event(t + h_cross, y_cross)
    if abs(g) > tol:
        lo, hi = 0.0, h
        glo = g_start
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            ym = rk4_step(rhs, t, y, mid) if mid > 0.0 else y
            gm = event(t + mid, ym)
            if abs(gm) <= tol:
                return mid, ym
            if glo * gm < 0.0:
                hi = mid
            else:
                lo, glo = mid, gm
        h_cross, y_cross = mid, ym
    return h_cross, y_cross
