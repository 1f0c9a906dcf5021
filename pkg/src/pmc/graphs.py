"""Dirichlet solvers for the prescribed-mean-curvature graph equation on
geodesic disks, plus residual verification.

A vertical graph u over the base satisfies, in divergence form,

    div( grad u / W ) = 2 H(1/W),      W = sqrt(1 + |grad u|^2),

with the upward angle function nu = 1/W.  Radially this reduces to the
self-contained first-order flux equation

    phi'(r) = 2 sn_kappa(r) H(nu),     phi = sn_kappa(r) u'/W,
    nu = sqrt(1 - (phi/sn_kappa)^2),

which detects the loss of graphicality (nu -> 0) intrinsically; u is
recovered alongside by quadrature and normalised to u(R) = 0.  The 2D
solver runs damped Picard iteration on a conservative five-point flux
stencil over a uniform polar grid.
"""

from __future__ import annotations

import io
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import spsolve

from ._integrate import rk4_step
from .errors import DomainError, NonConvergenceError, VerticalPointError
from .prescribed import PrescribedFunction, parse_prescription
from .spaceform import cs, sn, validate_kappa

QMAX = 1.0 - 1e-9
VERTICAL_WARN_NU = 1e-3


@dataclass
class RadialGraph:
    """Rotationally symmetric graph: heights, flux and angle samples on a
    radial grid with u(R) = 0."""

    kappa: int
    prescription: PrescribedFunction
    R: float
    r: np.ndarray
    u: np.ndarray
    phi: np.ndarray
    nu: np.ndarray
    step: float
    r_star: float | None = None

    @property
    def depth(self) -> float:
        """Cap depth |u(0)|."""
        return float(abs(self.u[0]))

    def validate(self) -> None:
        assert np.all(np.diff(self.r) > 0.0)
        pos = self.r > 0.0
        assert np.all(np.abs(self.phi[pos]) < sn(self.kappa, self.r[pos])), \
            "flux bound |phi| < sn violated"
        if self.r[0] == 0.0:
            assert self.phi[0] == 0.0 and self.nu[0] == 1.0
        assert abs(self.u[-1]) == 0.0
        assert np.all(self.nu > 0.0) and np.all(self.nu <= 1.0)

    def to_csv(self, path, digits: int = 17) -> None:
        write_radial_csv(self, path, digits=digits)

    @classmethod
    def from_heights(cls, kappa: int, prescription: PrescribedFunction,
                     r: np.ndarray, u: np.ndarray, step: float | None = None
                     ) -> "RadialGraph":
        """Build a graph from height samples alone, deriving flux and
        angle by finite differences (for imported or hand-made data)."""
        k = validate_kappa(kappa)
        r = np.asarray(r, dtype=float)
        u = np.asarray(u, dtype=float)
        du = np.gradient(u, r)
        w = np.sqrt(1.0 + du * du)
        phi = sn(k, r) * du / w
        phi[0] = 0.0 if r[0] == 0.0 else phi[0]
        nu = 1.0 / w
        return cls(kappa=k, prescription=prescription, R=float(r[-1]), r=r,
                   u=u - u[-1], phi=phi, nu=nu,
                   step=float(step) if step else float(np.min(np.diff(r))))


@dataclass
class DiskGraph:
    """Solution of the 2D Dirichlet problem on the uniform polar grid.

    ``u`` has shape (nr+1, ntheta); row 0 repeats the origin value, row
    nr carries the boundary samples.  ``residual`` is the max-norm
    discrete residual of the divergence equation at the final iterate.
    """

    kappa: int
    prescription: PrescribedFunction
    R: float
    nr: int
    ntheta: int
    u: np.ndarray
    boundary: np.ndarray
    iterations: int
    residual: float
    history: list[float] = field(default_factory=list)

    @property
    def r(self) -> np.ndarray:
        return np.linspace(0.0, self.R, self.nr + 1)

    @property
    def theta(self) -> np.ndarray:
        return np.arange(self.ntheta) * (2.0 * math.pi / self.ntheta)

    def radial_mean(self) -> np.ndarray:
        """Average of u over theta at each radius (for radial cross-checks)."""
        return self.u.mean(axis=1)

    def to_text(self, path, digits: int = 17) -> None:
        write_disk_text(self, path, digits=digits)


@dataclass(frozen=True)
class ResidualReport:
    """Summary of the pointwise divergence-equation residual."""

    max_residual: float
    mean_residual: float
    worst_point: tuple
    nu_range: tuple[float, float]


# ---------------------------------------------------------------------------
# radial solver

def solve_radial(H: PrescribedFunction, kappa: int, R: float, step: float) -> RadialGraph:
    """Integrate the radial flux equation out to R on a fixed grid.

    Starts from the axis with the series phi = H(1) r^2 + a4 r^4, which
    the equation forces there.  If |phi/sn| reaches 1 - 1e-9 before R,
    the graph turns vertical: the solve stops at the maximal radius
    r_star and raises VerticalPointError carrying the truncated graph.
    """
    k = validate_kappa(kappa)
    if not R > 0.0:
        raise DomainError(f"disk radius must be > 0, got {R}")
    if k == 1 and not R < math.pi:
        raise DomainError(f"disk radius must be < pi on the spherical base, got {R}")
    if not step > 0.0:
        raise DomainError(f"step must be > 0, got {step}")

    snf = math.sin if k == 1 else math.sinh
    Hf = H._eval
    a2 = float(Hf(1.0))
    a4 = -(k * a2 / 12.0 + float(H._deriv(1.0)) * a2 * a2 / 4.0)
    c3 = a4 + k * a2 / 6.0 + a2**3 / 2.0

    def rhs(r, y):
        q = y[0] / snf(r)
        nusq = 1.0 - q * q
        nu = math.sqrt(nusq) if nusq > 1e-24 else 1e-12
        return (2.0 * snf(r) * Hf(nu), q / nu)

    grid = [0.0]
    j = 1
    while j * step < R - 1e-12 * max(1.0, R):
        grid.append(j * step)
        j += 1
    grid.append(R)

    rs = [0.0]
    phis = [0.0]
    us = [0.0]
    h0 = grid[1]
    y = (a2 * h0 * h0 + a4 * h0**4, 0.5 * a2 * h0 * h0 + 0.25 * c3 * h0**4)
    r_cur = h0
    rs.append(r_cur)
    phis.append(y[0])
    us.append(y[1])

    vertical = False
    for target in grid[2:]:
        while r_cur < target - 1e-15 * max(1.0, target):
            q = y[0] / snf(r_cur)
            nu = math.sqrt(max(1.0 - q * q, 0.0))
            hs = target - r_cur
            if nu < 0.5:
                hs = min(hs, max(step * (nu / 0.5) ** 2, step * 1e-8))
            trial = rk4_step(rhs, r_cur, y, hs)
            q_new = trial[0] / snf(r_cur + hs)
            if not all(math.isfinite(v) for v in trial) or abs(q_new) >= QMAX:
                # vertical point inside this sub-step: bisect |q| to QMAX
                def excess(hh):
                    if hh <= 0.0:
                        return abs(q) - QMAX
                    yy = rk4_step(rhs, r_cur, y, hh)
                    return abs(yy[0] / snf(r_cur + hh)) - QMAX

                h_c = brentq(excess, 0.0, hs, xtol=1e-16, rtol=8.9e-16, maxiter=200)
                y = rk4_step(rhs, r_cur, y, h_c) if h_c > 0.0 else y
                r_cur += h_c
                vertical = True
                break
            y = trial
            r_cur += hs
        rs.append(r_cur)
        phis.append(y[0])
        us.append(y[1])
        if vertical:
            break

    rs = np.asarray(rs)
    phis = np.asarray(phis)
    us = np.asarray(us)
    us = us - us[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        q_arr = np.where(rs > 0.0, phis / sn(k, np.where(rs > 0.0, rs, 1.0)), 0.0)
    nus = np.sqrt(np.clip(1.0 - q_arr * q_arr, 0.0, 1.0))
    nus[0] = 1.0
    graph = RadialGraph(kappa=k, prescription=H, R=float(rs[-1]), r=rs, u=us,
                        phi=phis, nu=nus, step=step,
                        r_star=float(rs[-1]) if vertical else None)
    if vertical:
        raise VerticalPointError(
            f"graph turns vertical at r_star={rs[-1]:.6g} before R={R:.6g}",
            r_star=float(rs[-1]), graph=graph)
    return graph


def maximal_radial_graph(H: PrescribedFunction, kappa: int, step: float,
                         r_max: float | None = None) -> RadialGraph:
    """Solve out to the vertical point if one occurs before ``r_max``.

    Returns the full graph on [0, r_max] when the prescription never
    forces verticality in that range (graph.r_star is then None).
    """
    k = validate_kappa(kappa)
    if r_max is None:
        r_max = math.pi - 1e-9 if k == 1 else 50.0
    try:
        return solve_radial(H, k, r_max, step)
    except VerticalPointError as exc:
        return exc.graph


def residual_radial(graph: RadialGraph, H: PrescribedFunction, kappa: int) -> ResidualReport:
    """Central-difference residual of the radial divergence equation.

    Differences the stored flux samples on the (possibly non-uniform)
    grid: res_i = (phi_{i+1} - phi_{i-1}) / ((r_{i+1} - r_{i-1}) sn(r_i))
    - 2 H(nu_i) at interior samples.
    """
    k = validate_kappa(kappa)
    r, phi, nu = graph.r, graph.phi, graph.nu
    if len(r) < 3:
        raise DomainError("need at least 3 samples for a residual")
    dphi = phi[2:] - phi[:-2]
    dr2 = r[2:] - r[:-2]
    res = dphi / (dr2 * sn(k, r[1:-1])) - 2.0 * np.asarray(H(nu[1:-1]), dtype=float)
    a = np.abs(res)
    i = int(np.argmax(a))
    return ResidualReport(
        max_residual=float(a.max()),
        mean_residual=float(a.mean()),
        worst_point=(float(r[1 + i]),),
        nu_range=(float(nu.min()), float(nu.max())),
    )


# ---------------------------------------------------------------------------
# 2D polar-grid solver

def _disk_setup(kappa, R, nr, ntheta):
    dr = R / nr
    dth = 2.0 * math.pi / ntheta
    r_nodes = np.linspace(0.0, R, nr + 1)
    r_faces = (np.arange(nr) + 0.5) * dr
    sn_nodes = sn(kappa, r_nodes)
    sn_faces = sn(kappa, r_faces)
    area0 = 2.0 * math.pi * (1.0 - cs(kappa, 0.5 * dr)) / kappa
    return dr, dth, r_nodes, sn_nodes, sn_faces, area0


def _grad_pieces(U, dr, dth, sn_nodes, ntheta):
    """Nodal and face gradient data used by both assembly and residuals."""
    # nodal theta-derivative (periodic); meaningless at the origin row -> 0
    u_th = (np.roll(U, -1, axis=1) - np.roll(U, 1, axis=1)) / (2.0 * dth)
    u_th[0, :] = 0.0
    # nodal radial derivative at interior rows
    u_r = (U[2:, :] - U[:-2, :]) / (2.0 * dr)
    # radial faces i+1/2, i = 0..nr-1
    u_r_face = (U[1:, :] - U[:-1, :]) / dr
    u_th_face_r = 0.5 * (u_th[1:, :] + u_th[:-1, :])
    # theta faces j+1/2 at interior rows i = 1..nr-1
    u_th_face_t = (np.roll(U, -1, axis=1) - U)[1:-1, :] / dth
    u_r_node_int = u_r
    u_r_face_t = 0.5 * (u_r_node_int + np.roll(u_r_node_int, -1, axis=1))
    return u_th, u_r, u_r_face, u_th_face_r, u_th_face_t, u_r_face_t


def _disk_w(U, kappa, nr, ntheta, dr, dth, sn_nodes, sn_faces):
    """Face and node W = sqrt(1+|grad u|^2) for the current iterate."""
    u_th, u_r, u_r_face, u_th_face_r, u_th_face_t, u_r_face_t = _grad_pieces(
        U, dr, dth, sn_nodes, ntheta)
    Wr = np.sqrt(1.0 + u_r_face**2 + (u_th_face_r / sn_faces[:, None]) ** 2)
    sn_int = sn_nodes[1:-1][:, None]
    Wt = np.sqrt(1.0 + u_r_face_t**2 + (u_th_face_t / sn_int) ** 2)
    Wn = np.sqrt(1.0 + u_r**2 + (u_th[1:-1, :] / sn_int) ** 2)
    # origin: first-Fourier-mode gradient from the innermost ring
    th = np.arange(ntheta) * dth
    du0 = (U[1, :] - U[0, 0]) / dr
    gx = 2.0 * np.mean(du0 * np.cos(th))
    gy = 2.0 * np.mean(du0 * np.sin(th))
    W0 = math.sqrt(1.0 + gx * gx + gy * gy)
    return Wr, Wt, Wn, W0


def _disk_coefficients(kappa, nr, ntheta, dr, dth, sn_nodes, sn_faces, area0, Wr, Wt):
    """Conductances of the conservative five-point stencil."""
    sn_int = sn_nodes[1:-1][:, None]
    c_rp = sn_faces[1:, None] / (dr * dr * sn_int * Wr[1:, :])
    c_rm = sn_faces[:-1, None] / (dr * dr * sn_int * Wr[:-1, :])
    c_tp = 1.0 / (dth * dth * sn_int * sn_int * Wt)
    c_tm = np.roll(c_tp, 1, axis=1)
    c0 = sn_faces[0] * dth / (area0 * dr * Wr[0, :])
    return c_rp, c_rm, c_tp, c_tm, c0


def _disk_residual_arrays(U, H, kappa, nr, ntheta, dr, dth, sn_nodes, sn_faces, area0):
    """Discrete residual of the solver's own stencil at the current U."""
    Wr, Wt, Wn, W0 = _disk_w(U, kappa, nr, ntheta, dr, dth, sn_nodes, sn_faces)
    c_rp, c_rm, c_tp, c_tm, c0 = _disk_coefficients(
        kappa, nr, ntheta, dr, dth, sn_nodes, sn_faces, area0, Wr, Wt)
    Ui = U[1:-1, :]
    res = (c_rp * (U[2:, :] - Ui) - c_rm * (Ui - U[:-2, :])
           + c_tp * (np.roll(U, -1, axis=1)[1:-1, :] - Ui)
           - c_tm * (Ui - np.roll(U, 1, axis=1)[1:-1, :])
           - 2.0 * np.asarray(H(1.0 / Wn), dtype=float))
    res0 = float(np.sum(c0 * (U[1, :] - U[0, 0])) - 2.0 * float(H(1.0 / W0)))
    return res, res0, Wn, W0


def solve_disk(H: PrescribedFunction, kappa: int, R: float, boundary=None,
               nr: int = 64, ntheta: int = 32, tol: float = 1e-10,
               max_iter: int = 200, damping: float = 0.5,
               u0: np.ndarray | None = None) -> DiskGraph:
    """Damped Picard iteration for the Dirichlet problem on a geodesic disk.

    At each sweep the face coefficients 1/W and right-hand side 2H(1/W)
    are frozen at the previous iterate, the linear system is solved
    sparsely, and the update is relaxed with the damping factor.  Stops
    when the max-norm change drops below ``tol``; raises
    NonConvergenceError (carrying the residual history) otherwise.
    """
    k = validate_kappa(kappa)
    if not R > 0.0:
        raise DomainError(f"disk radius must be > 0, got {R}")
    if k == 1 and not R < math.pi:
        raise DomainError(f"disk radius must be < pi on the spherical base, got {R}")
    if nr < 8 or ntheta < 8:
        raise DomainError(f"grid counts must be >= 8, got nr={nr}, ntheta={ntheta}")
    if not tol > 0.0:
        raise DomainError(f"tolerance must be > 0, got {tol}")
    if not 0.0 < damping <= 1.0:
        raise DomainError(f"damping must be in (0, 1], got {damping}")

    dr, dth, r_nodes, sn_nodes, sn_faces, area0 = _disk_setup(k, R, nr, ntheta)
    th = np.arange(ntheta) * dth
    if boundary is None:
        g = np.zeros(ntheta)
    elif callable(boundary):
        g = np.asarray([float(boundary(t)) for t in th])
    else:
        g = np.asarray(boundary, dtype=float)
        if g.shape != (ntheta,):
            raise DomainError(f"boundary samples must have shape ({ntheta},), got {g.shape}")

    if u0 is not None:
        U = np.asarray(u0, dtype=float).copy()
        if U.shape != (nr + 1, ntheta):
            raise DomainError(f"u0 must have shape ({nr + 1}, {ntheta})")
        U[0, :] = U[0, 0]
    else:
        U = np.zeros((nr + 1, ntheta))
    U[nr, :] = g

    n_unk = 1 + (nr - 1) * ntheta

    def col(i, j):
        return 1 + (i - 1) * ntheta + j

    ii, jj = np.meshgrid(np.arange(1, nr), np.arange(ntheta), indexing="ij")
    rows_int = col(ii, jj).ravel()
    history: list[float] = []
    warned = False

    def sweep_once(U, lam):
        nonlocal warned
        Wr, Wt, Wn, W0 = _disk_w(U, k, nr, ntheta, dr, dth, sn_nodes, sn_faces)
        if not warned and min(float(1.0 / Wn.max() if Wn.size else 1.0), 1.0 / W0) < VERTICAL_WARN_NU:
            warnings.warn(
                "disk solve is leaving the graph regime (min nu < 1e-3); "
                "the boundary data may be too steep for a graph solution",
                RuntimeWarning, stacklevel=3)
            warned = True
        c_rp, c_rm, c_tp, c_tm, c0 = _disk_coefficients(
            k, nr, ntheta, dr, dth, sn_nodes, sn_faces, area0, Wr, Wt)
        f_int = 2.0 * np.asarray(H(1.0 / Wn), dtype=float)
        f0 = 2.0 * float(H(1.0 / W0))

        rows, cols, vals = [], [], []
        b = np.zeros(n_unk)
        diag = -(c_rp + c_rm + c_tp + c_tm)
        rows.append(rows_int); cols.append(rows_int); vals.append(diag.ravel())
        # theta neighbours
        rows.append(rows_int); cols.append(col(ii, (jj + 1) % ntheta).ravel()); vals.append(c_tp.ravel())
        rows.append(rows_int); cols.append(col(ii, (jj - 1) % ntheta).ravel()); vals.append(c_tm.ravel())
        # inner radial neighbour (origin for i=1)
        inner_cols = np.where(ii - 1 == 0, 0, col(np.maximum(ii - 1, 1), jj)).ravel()
        rows.append(rows_int); cols.append(inner_cols); vals.append(c_rm.ravel())
        # outer radial neighbour; last ring couples to the Dirichlet row
        mask_out = (ii + 1 < nr)
        rows.append(rows_int[mask_out.ravel()])
        cols.append(col(np.minimum(ii + 1, nr - 1), jj).ravel()[mask_out.ravel()])
        vals.append(c_rp.ravel()[mask_out.ravel()])
        b_int = f_int.copy()
        b_int[-1, :] -= c_rp[-1, :] * g
        b[1:] = b_int.ravel()
        # origin row
        rows.append(np.full(ntheta, 0)); cols.append(col(1, np.arange(ntheta))); vals.append(c0)
        rows.append(np.asarray([0])); cols.append(np.asarray([0])); vals.append(np.asarray([-c0.sum()]))
        b[0] = f0

        A = coo_matrix((np.concatenate(vals),
                        (np.concatenate(rows), np.concatenate(cols))),
                       shape=(n_unk, n_unk)).tocsr()
        sol = spsolve(A, b)
        U_new = U.copy()
        U_new[0, :] = sol[0]
        U_new[1:nr, :] = sol[1:].reshape(nr - 1, ntheta)
        U_next = (1.0 - lam) * U + lam * U_new
        U_next[nr, :] = g
        U_next[0, :] = U_next[0, 0]
        return U_next, float(np.max(np.abs(U_next - U)))

    def residual_now(U):
        res_int, res0, _, _ = _disk_residual_arrays(
            U, H, k, nr, ntheta, dr, dth, sn_nodes, sn_faces, area0)
        return max(float(np.max(np.abs(res_int))), abs(res0))

    converged = False
    sweeps = 0
    for _ in range(max_iter):
        U, change = sweep_once(U, damping)
        sweeps += 1
        history.append(residual_now(U))
        if change < tol:
            converged = True
            break
    if not converged:
        raise NonConvergenceError(
            f"Picard iteration did not reach tol={tol} in {max_iter} sweeps "
            f"(last residual {history[-1]:.3e})",
            history=history, residual=history[-1])
    # one undamped finishing sweep: the recorded residual then measures the
    # discrete solution itself, not the relaxation blend
    U, _ = sweep_once(U, 1.0)
    sweeps += 1
    history.append(residual_now(U))
    return DiskGraph(kappa=k, prescription=H, R=R, nr=nr, ntheta=ntheta,
                     u=U, boundary=g, iterations=sweeps, residual=history[-1],
                     history=history)


def residual_disk(graph: DiskGraph, H: PrescribedFunction, kappa: int) -> ResidualReport:
    """Independent nodal central-difference residual on the polar grid.

    Uses the wide stencil (nodal fluxes differenced across two cells),
    a genuinely different discretisation from the solver's face scheme,
    so it measures truncation error rather than solver convergence.
    For strongly theta-dependent solutions the pointwise truncation
    concentrates near the polar origin (the two O(1/r) flux terms cancel
    only to O(dtheta^2/r) there); refine ntheta accordingly.
    """
    k = validate_kappa(kappa)
    U = graph.u
    nr, ntheta, R = graph.nr, graph.ntheta, graph.R
    if nr < 4:
        raise DomainError("need nr >= 4 for the wide-stencil residual")
    dr, dth, r_nodes, sn_nodes, sn_faces, area0 = _disk_setup(k, R, nr, ntheta)
    u_th = (np.roll(U, -1, axis=1) - np.roll(U, 1, axis=1)) / (2.0 * dth)
    u_th[0, :] = 0.0
    u_r = np.zeros_like(U)
    u_r[1:-1, :] = (U[2:, :] - U[:-2, :]) / (2.0 * dr)
    sn_col = sn_nodes[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        ang = np.where(sn_col > 0.0, u_th / np.where(sn_col > 0.0, sn_col, 1.0), 0.0)
    Wn = np.sqrt(1.0 + u_r**2 + ang**2)
    G = sn_col * u_r / Wn          # radial nodal flux; exactly 0 at the axis row
    T = u_th / Wn                  # theta nodal flux
    i_in = np.arange(1, nr - 1)
    res = ((G[i_in + 1, :] - G[i_in - 1, :]) / (2.0 * dr * sn_col[i_in])
           + (np.roll(T, -1, axis=1)[i_in, :] - np.roll(T, 1, axis=1)[i_in, :])
           / (2.0 * dth * sn_col[i_in] ** 2)
           - 2.0 * np.asarray(H(1.0 / Wn[i_in, :]), dtype=float))
    a = np.abs(res)
    flat = int(np.argmax(a))
    wi, wj = divmod(flat, ntheta)
    nu_all = 1.0 / Wn[1:nr, :]
    return ResidualReport(
        max_residual=float(a.max()),
        mean_residual=float(a.mean()),
        worst_point=(float(r_nodes[1 + wi]), float(wj * dth)),
        nu_range=(float(nu_all.min()), float(nu_all.max())),
    )


# ---------------------------------------------------------------------------
# file formats

def write_radial_csv(graph: RadialGraph, path, digits: int = 17) -> None:
    fmt = f"%.{digits}g"
    buf = io.StringIO()
    extra = f" r_star={fmt % graph.r_star}" if graph.r_star is not None else ""
    buf.write(
        f"# pmc radial kappa={graph.kappa} R={fmt % graph.R} step={fmt % graph.step}"
        f"{extra} prescription={graph.prescription.descriptor_json()}\n"
    )
    buf.write("r,u,phi,nu\n")
    for i in range(len(graph.r)):
        buf.write(",".join(fmt % v for v in
                           (graph.r[i], graph.u[i], graph.phi[i], graph.nu[i])))
        buf.write("\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def read_radial_csv(path) -> RadialGraph:
    from .rotational import _parse_header

    with open(path) as fh:
        lines = fh.read().splitlines()
    meta = _parse_header(lines[0], "radial")
    if lines[1] != "r,u,phi,nu":
        raise DomainError(f"unexpected radial column header {lines[1]!r}")
    rows = np.asarray([[float(v) for v in ln.split(",")] for ln in lines[2:] if ln])
    return RadialGraph(
        kappa=validate_kappa(int(meta["kappa"])),
        prescription=parse_prescription(meta["prescription"]),
        R=float(meta["R"]), r=rows[:, 0], u=rows[:, 1], phi=rows[:, 2], nu=rows[:, 3],
        step=float(meta["step"]),
        r_star=float(meta["r_star"]) if "r_star" in meta else None,
    )


def write_disk_text(graph: DiskGraph, path, digits: int = 17) -> None:
    fmt = f"%.{digits}g"
    buf = io.StringIO()
    buf.write(
        f"# pmc disk kappa={graph.kappa} R={fmt % graph.R} nr={graph.nr} "
        f"ntheta={graph.ntheta} iterations={graph.iterations} "
        f"residual={fmt % graph.residual} "
        f"prescription={graph.prescription.descriptor_json()}\n"
    )
    pairs = [[float(t), float(v)] for t, v in zip(graph.theta, graph.boundary)]
    buf.write(f"# boundary {json.dumps(pairs, separators=(',', ':'))}\n")
    for i in range(graph.nr + 1):
        buf.write(" ".join(fmt % v for v in graph.u[i]))
        buf.write("\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def read_disk_text(path) -> DiskGraph:
    from .rotational import _parse_header

    with open(path) as fh:
        lines = fh.read().splitlines()
    meta = _parse_header(lines[0], "disk")
    if not lines[1].startswith("# boundary "):
        raise DomainError("missing boundary header line in disk file")
    pairs = json.loads(lines[1][len("# boundary "):])
    g = np.asarray([v for _, v in pairs])
    u = np.asarray([[float(v) for v in ln.split()] for ln in lines[2:] if ln])
    nr, ntheta = int(meta["nr"]), int(meta["ntheta"])
    if u.shape != (nr + 1, ntheta):
        raise DomainError(f"disk data shape {u.shape} does not match header ({nr + 1}, {ntheta})")
    return DiskGraph(
        kappa=validate_kappa(int(meta["kappa"])),
        prescription=parse_prescription(meta["prescription"]),
        R=float(meta["R"]), nr=nr, ntheta=ntheta, u=u, boundary=g,
        iterations=int(meta["iterations"]), residual=float(meta["residual"]),
    )
