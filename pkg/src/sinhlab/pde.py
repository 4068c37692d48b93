"""Newton and continuation solvers for ``-Laplace u = rho^2 (e^u - e^-u)`` with ``u = 0`` on the boundary."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .ansatz import approximate_solution, tau_values
from .errors import ContinuationBroken, JacobianSingular, NewtonDiverged, SinhLabError
from .fields import GridField
from .hamiltonian import SignedConfig
from .mesh import EAST, NORTH, SOUTH, WEST, Mesh, apply_laplacian, assemble_laplacian

log = logging.getLogger(__name__)

MAX_NEWTON = 50
MIN_DAMPING = 2.0 ** -20
EXP_LIMIT = 700.0


@dataclass
class SolverReport:
    converged: bool
    iterations: int
    final_residual: float
    correction_h1: float
    peak_locations: np.ndarray
    history: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "correction_h1": self.correction_h1,
            "peak_locations": np.asarray(self.peak_locations).tolist(),
            "history": list(self.history),
        }


def _nonlinear_residual(lap, u, rho):
    # difference form: rounding scales with local variation, not with |u| / h^2
    nbr, wgt, bdiag = lap.stencil
    inner = nbr >= 0
    diff = u[:, None] - u[np.where(inner, nbr, 0)]
    lap_u = bdiag * u + np.einsum("ij,ij->i", wgt, np.where(inner, diff, 0.0))
    return lap_u - rho**2 * 2.0 * np.sinh(u)


def residual_norm(u: GridField, rho: float, scheme: str = "symmetric") -> float:
    """Max-norm of ``-Laplace_h u - rho^2 (e^u - e^-u)``.

    Evaluated from the mesh neighbour tables with the stencil kernel, not
    from the assembled matrix the solver uses.
    """
    vals = u.values
    lap_u = apply_laplacian(u.mesh, vals, scheme)
    return float(np.max(np.abs(lap_u - rho * rho * (np.exp(vals) - np.exp(-vals))), initial=0.0))


def h1_norm(mesh: Mesh, d, scheme: str = "symmetric") -> float:
    """Discrete ``(|grad d|^2 + d^2)^(1/2)`` in the cell-volume inner product."""
    lap = assemble_laplacian(mesh, scheme)
    d = np.asarray(d, dtype=float)
    return float(np.sqrt(max(d @ (lap.S @ d), 0.0) + d @ (mesh.volumes * d)))


def _vertex(xm, x0, xp, fm, f0, fp):
    # vertex of the parabola through three points on a nonuniform line
    d1 = (f0 - fm) / (x0 - xm)
    d2 = (fp - f0) / (xp - x0)
    c = (d2 - d1) / (xp - xm)
    if c >= 0:
        return x0
    return float(np.clip(0.5 * (xm + x0) - d1 / (2 * c), xm, xp))


def peak_locations(u: GridField, config: SignedConfig) -> np.ndarray:
    """Sub-node maxima of ``a_k u`` over the nodes nearest to each ``xi_k``.

    Nodes are attached to the nearest peak (ties to the lowest index). The
    discrete maximum is refined by a parabola along each grid direction.
    """
    mesh = u.mesh
    pts = mesh.points
    d = np.linalg.norm(pts[:, None, :] - config.points[None, :, :], axis=2)
    owner = np.argmin(d, axis=1)
    out = np.empty((config.m, 2))
    for k in range(config.m):
        idx = np.nonzero(owner == k)[0]
        f = config.signs[k] * u.values
        i = idx[np.argmax(f[idx])]
        loc = pts[i].copy()
        nb = mesh.nbr[i]
        if nb[EAST] >= 0 and nb[WEST] >= 0:
            loc[0] = _vertex(pts[nb[WEST], 0], pts[i, 0], pts[nb[EAST], 0], f[nb[WEST]], f[i], f[nb[EAST]])
        if nb[NORTH] >= 0 and nb[SOUTH] >= 0:
            loc[1] = _vertex(pts[nb[SOUTH], 1], pts[i, 1], pts[nb[NORTH], 1], f[nb[SOUTH]], f[i], f[nb[NORTH]])
        out[k] = loc
    return out


def solve_sinh_poisson(seed: GridField, rho: float, tol: float = 1e-9, config: SignedConfig | None = None,
                       scheme: str = "symmetric", max_iter: int = MAX_NEWTON, reference=None):
    """Damped Newton for the discrete sinh-Poisson problem.

    The step is halved until the Euclidean residual norm decreases (Armijo
    constant 1e-4); falling below ``2^-20`` raises :class:`NewtonDiverged`.
    ``reference`` (default: the seed) is the field the correction norm is
    measured against. ``config`` is only used to locate peaks for the report.
    """
    mesh = seed.mesh
    lap = assemble_laplacian(mesh, scheme)
    u = seed.values.copy()
    if reference is None:
        reference = seed
    u_ref = reference.values if isinstance(reference, GridField) else np.asarray(reference, dtype=float)
    F = _nonlinear_residual(lap, u, rho)
    fnorm = float(np.linalg.norm(F))
    history = [float(np.abs(F).max(initial=0.0))]
    it = 0
    while history[-1] > tol:
        if it >= max_iter:
            raise NewtonDiverged(f"no convergence in {max_iter} Newton steps at rho={rho:g} "
                                 f"(residual {history[-1]:.3e})")
        it += 1
        J = (lap.A - sp.diags(rho**2 * 2.0 * np.cosh(u))).tocsc()
        try:
            lu = splu(J)
        except RuntimeError as exc:
            raise JacobianSingular(f"singular Newton Jacobian at rho={rho:g}: {exc}") from exc
        du = lu.solve(-F)
        if not np.all(np.isfinite(du)):
            raise JacobianSingular(f"Newton step is not finite at rho={rho:g}")
        t = 1.0
        while True:
            trial = u + t * du
            if np.max(np.abs(trial)) < EXP_LIMIT:
                F_t = _nonlinear_residual(lap, trial, rho)
                fn_t = float(np.linalg.norm(F_t))
                if fn_t <= (1.0 - 1e-4 * t) * fnorm:
                    break
            t *= 0.5
            if t < MIN_DAMPING:
                raise NewtonDiverged(f"damping fell below 2^-20 at rho={rho:g} (residual {history[-1]:.3e})")
        u, F, fnorm = trial, F_t, fn_t
        history.append(float(np.abs(F).max()))
        log.debug("newton rho=%g it=%d t=%g residual=%.3e", rho, it, t, history[-1])
    field_u = GridField(mesh, u, f"u rho={rho:g}")
    peaks = peak_locations(field_u, config) if config is not None else np.empty((0, 2))
    report = SolverReport(True, it, history[-1], h1_norm(mesh, u - u_ref, scheme), peaks, history)
    return field_u, report


def continuation_solve(config: SignedConfig, rho_schedule, mesh: Mesh, tol: float = 1e-9,
                       convention: str = "bubble", scheme: str = "symmetric", taus=None):
    """Solve along a strictly descending rho schedule.

    The first rho starts from the ansatz. Each later rho starts from the
    previous solution with its ansatz part swapped for the ansatz at the new
    rho, centred on the measured peaks. The correction norm in each report is
    measured against the ansatz at that rho.
    """
    sched = [float(r) for r in rho_schedule]
    if any(r <= 0 for r in sched):
        raise ValueError("rho values must be positive")
    if any(b >= a for a, b in zip(sched, sched[1:])):
        raise ValueError("rho schedule must be strictly descending")
    if not sched:
        return []
    taus = tau_values(config, convention) if taus is None else np.asarray(taus, dtype=float)
    out = []
    prev = None
    for rho in sched:
        try:
            base = approximate_solution(config, rho, mesh, taus, convention)
            if prev is None:
                seed = base
            else:
                u_prev, rho_prev, peaks = prev
                old = approximate_solution(config, rho_prev, mesh, taus, convention, centers=peaks)
                new = approximate_solution(config, rho, mesh, taus, convention, centers=peaks)
                seed = GridField(mesh, u_prev.values - old.values + new.values, "seed")
            u, rep = solve_sinh_poisson(seed, rho, tol, config, scheme, reference=base)
        except SinhLabError as exc:
            raise ContinuationBroken(rho, exc) from exc
        out.append((rho, u, rep))
        prev = (u, rho, rep.peak_locations)
    return out
