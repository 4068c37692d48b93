"""Kirchhoff-Routh Hamiltonian of a signed point configuration.

    F(xi_1..xi_m) = 1/2 sum_k s R(xi_k) + 1/2 sum_{k != j} a_k a_j G(xi_k, xi_j)

with ``R`` the Robin function of :mod:`sinhlab.greens` and ``s`` fixed by the
convention:

``"bubble"`` (default), ``s = -1``
    The Robin function enters with the sign of the regular part appearing in
    the projected bubble ``PU = U + 8 pi H - log(8 tau^2)``. That regular part
    vanishes on the boundary only if it equals ``-H`` in our convention, so
    this is the Hamiltonian whose critical points carry blow-up solutions.
``"classical"``, ``s = +1``
    ``R`` enters with the sign of :func:`sinhlab.greens.robin_eval`.

The diagonal ``k = j`` of the pair sum is excluded (``G`` is infinite there).
Vectors and matrices use the coordinate order ``(x_1..x_m, y_1..y_m)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import greens
from .domain import DomainSpec
from .errors import LeftDomain, NoConvergence, OutOfDomain, PointsTooClose

CONVENTIONS = {"bubble": -1.0, "classical": 1.0}
DEGENERACY_BAND = 1e-8
MAX_NEWTON = 200


def robin_sign(convention: str) -> float:
    try:
        return CONVENTIONS[convention]
    except KeyError:
        raise ValueError(f"unknown convention {convention!r}; use one of {sorted(CONVENTIONS)}") from None


@dataclass(frozen=True)
class SignedConfig:
    """Peak locations with signs on a domain.

    ``min_separation`` is the separation floor ``2 eps``: points closer than
    that are rejected with :class:`PointsTooClose`.
    """

    domain: DomainSpec
    points: np.ndarray
    signs: tuple
    min_separation: float = 1e-3

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))
        if len(pts) < 1:
            raise ValueError("a configuration needs at least one point")
        if len(self.signs) != len(pts):
            raise ValueError("one sign per point required")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        self.domain.check_interior(*pts)
        d = self.pairwise_min()
        if d < self.min_separation:
            raise PointsTooClose(f"points are {d:.3g} apart (floor {self.min_separation:g})")

    @property
    def m(self) -> int:
        return len(self.points)

    @property
    def alpha(self) -> np.ndarray:
        return np.array(self.signs, dtype=float)

    def pairwise_min(self) -> float:
        if self.m < 2:
            return np.inf
        diff = self.points[:, None, :] - self.points[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        return float(dist[np.triu_indices(self.m, 1)].min())

    def flat(self) -> np.ndarray:
        """Coordinates as ``(x_1..x_m, y_1..y_m)``."""
        return np.concatenate([self.points[:, 0], self.points[:, 1]])

    def with_flat(self, z) -> SignedConfig:
        z = np.asarray(z, dtype=float)
        return SignedConfig(self.domain, np.column_stack([z[: self.m], z[self.m:]]), self.signs,
                            self.min_separation)

    def to_dict(self) -> dict:
        return {"domain": self.domain.to_dict(), "points": self.points.tolist(), "signs": list(self.signs)}


@dataclass(frozen=True)
class CriticalPointResult:
    config: SignedConfig
    grad_norm: float
    hess: np.ndarray
    classification: str
    negative_count: int
    iterations: int = 0
    eigenvalues: np.ndarray = field(default=None, repr=False)
    convention: str = "bubble"

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "grad_norm": self.grad_norm,
            "hess": self.hess.tolist(),
            "hess_eigenvalues": self.eigenvalues.tolist(),
            "classification": self.classification,
            "negative_count": self.negative_count,
            "iterations": self.iterations,
            "convention": self.convention,
        }


@dataclass(frozen=True)
class ScaledHessian:
    """``D (Hess F) D`` with ``D = diag(tau, tau)``.

    ``mu_pred`` lists ``1 - 3 pi rho^2 eta`` in ascending order, so that it
    pairs with the ascending eigenvalues ``mu_{m+1}..mu_{3m}``.
    """

    D: np.ndarray
    matrix: np.ndarray
    etas: np.ndarray
    rho: float | None = None
    mu_pred: np.ndarray | None = None


def _pair_terms(config: SignedConfig):
    m = config.m
    if m < 2:
        return None
    k, j = np.nonzero(~np.eye(m, dtype=bool))
    return k, j, greens.green_batch(config.domain, config.points[k], config.points[j])


def hamiltonian_value(config: SignedConfig, convention: str = "bubble") -> float:
    s = robin_sign(convention)
    r = greens.robin_batch(config.domain, config.points)[0]
    value = 0.5 * s * float(r.sum())
    if config.m > 1:
        a = config.alpha
        k, j = np.nonzero(~np.eye(config.m, dtype=bool))
        g = greens.green_values(config.domain, config.points[k], config.points[j])
        value += 0.5 * float(np.sum(a[k] * a[j] * g))
    return value


def hamiltonian_derivatives(config: SignedConfig, convention: str = "bubble"):
    """Analytic gradient (2m,) and Hessian (2m, 2m) of F."""
    s = robin_sign(convention)
    m = config.m
    a = config.alpha
    _, rg, rh = greens.robin_batch(config.domain, config.points)
    grad = np.zeros((m, 2))
    blocks = np.zeros((m, m, 2, 2))  # blocks[k, j] = d^2 F / d xi_k d xi_j
    grad += 0.5 * s * rg
    for k in range(m):
        blocks[k, k] += 0.5 * s * rh[k]
    pairs = _pair_terms(config)
    if pairs is not None:
        k, j, (_, gx, _, hxx, hxy) = pairs
        w = a[k] * a[j]
        # each unordered pair appears twice in the sum, cancelling the 1/2
        np.add.at(grad, k, w[:, None] * gx)
        np.add.at(blocks, (k, k), w[:, None, None] * hxx)
        blocks[k, j] += w[:, None, None] * hxy
    gvec = np.concatenate([grad[:, 0], grad[:, 1]])
    hess = np.zeros((2 * m, 2 * m))
    for c in range(2):
        for d in range(2):
            hess[c * m:(c + 1) * m, d * m:(d + 1) * m] = blocks[:, :, c, d]
    return gvec, 0.5 * (hess + hess.T)


def classify(hess: np.ndarray, band: float = DEGENERACY_BAND):
    """Inertia of a symmetric matrix with a relative degeneracy band.

    Returns ``(classification, negative_count, eigenvalues)``; eigenvalues
    inside the band are neither negative nor positive.
    """
    ev = np.linalg.eigvalsh(hess)
    tol = band * max(np.abs(ev).max(), np.finfo(float).tiny)
    neg = int(np.sum(ev < -tol))
    pos = int(np.sum(ev > tol))
    if neg + pos < len(ev):
        kind = "degenerate"
    elif neg == 0:
        kind = "min"
    elif pos == 0:
        kind = "max"
    else:
        kind = "saddle"
    return kind, neg, ev


def find_critical_point(seed: SignedConfig, tol: float = 1e-10, convention: str = "bubble",
                        max_iter: int = MAX_NEWTON) -> CriticalPointResult:
    """Damped Newton on grad F = 0 with Armijo backtracking on |grad F|^2.

    A degenerate Hessian is handled with a least-squares step. Trial points
    that leave the domain or break the separation floor are treated as failed
    line-search trials; if every trial fails that way :class:`LeftDomain` is
    raised.
    """
    cfg = seed
    g, H = hamiltonian_derivatives(cfg, convention)
    phi = float(g @ g)
    it = 0
    while np.sqrt(phi) > tol:
        if it >= max_iter:
            raise NoConvergence(f"no critical point after {max_iter} Newton steps (|grad F| = {np.sqrt(phi):.3e})")
        it += 1
        step = np.linalg.lstsq(H, -g, rcond=1e-14)[0]
        z = cfg.flat()
        t = 1.0
        left = False
        accepted = False
        while t >= 2.0 ** -30:
            try:
                trial = cfg.with_flat(z + t * step)
            except (PointsTooClose, OutOfDomain):
                left = True
                t *= 0.5
                continue
            g_t, H_t = hamiltonian_derivatives(trial, convention)
            phi_t = float(g_t @ g_t)
            if phi_t <= (1.0 - 2e-4 * t) * phi:
                cfg, g, H, phi = trial, g_t, H_t, phi_t
                accepted = True
                break
            left = False
            t *= 0.5
        if not accepted:
            if left:
                raise LeftDomain("Newton iterate left the domain or merged two points")
            raise NoConvergence(f"line search stalled at |grad F| = {np.sqrt(phi):.3e}")
    kind, neg, ev = classify(H)
    return CriticalPointResult(cfg, float(np.sqrt(phi)), H, kind, neg, it, ev, convention)


def scaled_hessian_spectrum(config: SignedConfig, rho: float | None = None,
                            convention: str = "bubble") -> ScaledHessian:
    from .ansatz import tau_values

    tau = np.asarray(tau_values(config, convention))
    D = np.diag(np.concatenate([tau, tau]))
    _, H = hamiltonian_derivatives(config, convention)
    M = D @ H @ D
    M = 0.5 * (M + M.T)
    etas = np.linalg.eigvalsh(M)
    mu = None
    if rho is not None:
        mu = np.sort(1.0 - 3.0 * np.pi * rho**2 * etas)
    return ScaledHessian(D, M, etas, rho, mu)
