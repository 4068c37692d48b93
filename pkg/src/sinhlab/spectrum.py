"""Linearized eigenproblem ``-Laplace v = mu rho^2 (e^u + e^-u) v`` and Morse counts.

Discretely this is ``S v = mu M v`` with ``S`` the volume-weighted symmetric
Laplacian and ``M = diag(volumes * w)``. Both are symmetric and ``M`` is
positive, so eigenvectors are ``M``-orthogonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

from .errors import EigSolverFailure, ExponentOverflow, OutOfDomain, SpectrumTruncated, ZeroField
from .fields import GridField
from .hamiltonian import SignedConfig

DENSE_LIMIT = 3000
CLUSTER_RTOL = 1e-6
RESCALED_RADIUS = 40.0
EXP_LIMIT = 700.0
EIGSH_SEED = 20240601


@dataclass
class SpectrumResult:
    rho: float
    eigenvalues: np.ndarray
    eigenfields: list
    morse_index: int
    multiplicity_clusters: list
    ambiguous: list = field(default_factory=list)
    residuals: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "morse_index": self.morse_index,
            "multiplicity_clusters": [list(c) for c in self.multiplicity_clusters],
            "ambiguous": [int(j) for j in self.ambiguous],
        }


@dataclass
class RescaledProfile:
    """Samples ``values[i] = v(center + scale * x[i])`` with area weights for L2 fits."""

    k: int
    x: np.ndarray
    values: np.ndarray
    center: np.ndarray = field(default_factory=lambda: np.zeros(2))
    scale: float = 1.0
    weights: np.ndarray | None = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float).reshape(-1, 2)
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if self.weights is None:
            self.weights = np.ones(len(self.values))


def assemble_weight(u: GridField, rho: float) -> GridField:
    vals = u.values
    if np.max(np.abs(vals), initial=0.0) > EXP_LIMIT:
        raise ExponentOverflow(f"|u| exceeds {EXP_LIMIT:g}; the weight would overflow")
    return GridField(u.mesh, rho * rho * (np.exp(vals) + np.exp(-vals)), f"weight rho={rho:g}")


def sup_normalize(v: GridField) -> GridField:
    """Scale to unit max-norm with the largest-magnitude node positive (lowest index on ties)."""
    vals = v.values
    a = np.abs(vals)
    top = a.max(initial=0.0)
    if top == 0.0:
        raise ZeroField("cannot normalize an identically zero field")
    i = int(np.argmax(a))  # first occurrence
    return v.replace(vals / vals[i])


def clusters(mu, rtol: float = CLUSTER_RTOL) -> list:
    """Index groups of consecutive eigenvalues within ``rtol`` relative."""
    groups = []
    for j, x in enumerate(mu):
        if groups and abs(x - mu[groups[-1][-1]]) <= rtol * max(abs(x), 1e-300):
            groups[-1].append(j)
        else:
            groups.append([j])
    return groups


def ambiguity_band(rho: float, solver_tol: float = 1e-10) -> float:
    return max(5.0 * rho * rho, 10.0 * solver_tol)


def eigenpairs(laplacian, weight: GridField, count: int, rho: float = float("nan"),
               solver_tol: float = 1e-10) -> SpectrumResult:
    """The ``count`` smallest eigenpairs of ``S v = mu diag(V w) v``.

    Shift-invert Lanczos about zero is used; below ``DENSE_LIMIT`` nodes a
    dense symmetric solver is used instead.
    """
    mesh = weight.mesh
    n = mesh.n
    if count < 1 or count >= n:
        raise ValueError(f"count must lie in [1, {n - 1}]")
    w = weight.values
    if np.any(w <= 0):
        raise ValueError("weight must be positive")
    S = laplacian.S
    Mdiag = mesh.volumes * w
    if n < DENSE_LIMIT:
        mu, vecs = sla.eigh(S.toarray(), np.diag(Mdiag), subset_by_index=(0, count - 1))
    else:
        try:
            # fixed-seed start vector keeps repeated runs bit-identical
            v0 = np.random.default_rng(EIGSH_SEED).standard_normal(n)
            mu, vecs = eigsh(S.tocsc(), k=count, M=sp.diags(Mdiag).tocsc(), sigma=0.0, which="LM",
                             tol=solver_tol * 1e-2, v0=v0)
        except (ArpackError, ArpackNoConvergence) as exc:
            raise EigSolverFailure(str(exc)) from exc
    order = np.argsort(mu)
    mu = mu[order]
    vecs = vecs[:, order]
    res = np.array([np.linalg.norm(S @ vecs[:, j] - mu[j] * Mdiag * vecs[:, j])
                    / max(np.linalg.norm(Mdiag * vecs[:, j]), 1e-300) for j in range(count)])
    fields = [sup_normalize(GridField(mesh, vecs[:, j], f"v{j + 1} rho={rho:g}")) for j in range(count)]
    band = ambiguity_band(rho, solver_tol) if np.isfinite(rho) else 0.0
    amb = [j for j in range(count) if abs(mu[j] - 1.0) < band]
    return SpectrumResult(rho, mu, fields, int(np.sum(mu < 1.0)), clusters(mu), amb, res)


def morse_index(result: SpectrumResult) -> int:
    """``#{mu < 1}`` with multiplicity; needs an eigenvalue above the ambiguity band."""
    mu = result.eigenvalues
    band = ambiguity_band(result.rho) if np.isfinite(result.rho) else 0.0
    if mu[-1] < 1.0 + band:
        raise SpectrumTruncated(f"largest computed eigenvalue {mu[-1]:.6g} does not clear 1 + {band:.3g}")
    return int(np.sum(mu < 1.0))


def rescale_eigenfunction(v: GridField, config: SignedConfig, taus, rho: float, k: int, center=None,
                          radius: float = RESCALED_RADIUS, n_radial: int = 80, n_angular: int = 64) -> RescaledProfile:
    """Samples of ``v((tau_k rho / sqrt 8) x + xi_k)`` on a polar grid with ``|x| <= radius``.

    ``center`` is the measured peak; it defaults to the configuration point.
    """
    if not 0 <= k < config.m:
        raise IndexError(f"peak index {k} out of range for m={config.m}")
    c = np.asarray(config.points[k] if center is None else center, dtype=float)
    scale = float(taus[k]) * rho / np.sqrt(8.0)
    dr = radius / n_radial
    r = dr * np.arange(1, n_radial + 1)
    th = 2.0 * np.pi * np.arange(n_angular) / n_angular
    R, T = np.meshgrid(r, th, indexing="ij")
    x = np.concatenate([[[0.0, 0.0]], np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])])
    # polar cell areas; the last ring gets a half cell
    ring = r * dr * (2.0 * np.pi / n_angular)
    ring[-1] *= 0.5
    wts = np.concatenate([[np.pi * (dr / 2) ** 2], np.repeat(ring, n_angular)])
    phys = c + scale * x
    if np.min(v.mesh.domain.boundary_distance(phys)) <= 0:
        raise OutOfDomain(f"rescaled radius {radius:g} leaves the domain at rho={rho:g}")
    return RescaledProfile(k, x, v.at(phys), c, scale, wts)
