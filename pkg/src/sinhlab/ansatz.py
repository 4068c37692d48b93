"""Liouville bubbles, their projections and the m-peak approximate solution.

The bubble ``U(x) = log(8 tau^2 / (tau^2 rho^2 + |x - xi|^2)^2)`` solves
``-Laplace U = rho^2 e^U`` on the plane. Its projection onto the Dirichlet
problem is ``PU = U - 8 pi H(x, xi) - log(8 tau^2)`` with ``H`` from
:mod:`sinhlab.greens`; away from ``xi`` this is ``8 pi G(x, xi) + O(rho^2)``
and on the boundary it is ``O(rho^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import greens
from .errors import RhoTooLarge, TooCloseToPeak
from .fields import GridField
from .hamiltonian import SignedConfig, robin_sign
from .mesh import Mesh

SQRT8 = np.sqrt(8.0)
FAR_FIELD_MIN_DIST = 0.1


@dataclass(frozen=True)
class BubbleParams:
    tau: float
    center: tuple
    rho: float
    sign: int = 1

    def __post_init__(self):
        if not (self.tau > 0 and self.rho > 0):
            raise ValueError("tau and rho must be positive")
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))


def tau_values(config: SignedConfig, convention: str = "bubble") -> np.ndarray:
    """``tau_k = exp(4 pi [s R(xi_k) + sum_{i != k} a_k a_i G(xi_k, xi_i)]) / sqrt 8``.

    ``s`` follows the Hamiltonian convention (``-1`` for ``"bubble"``), which
    makes ``alpha_k u`` match ``U_k`` at the peak to leading order.
    """
    s = robin_sign(convention)
    r = greens.robin_batch(config.domain, config.points)[0]
    expo = s * r
    m = config.m
    if m > 1:
        a = config.alpha
        k, j = np.nonzero(~np.eye(m, dtype=bool))
        g = greens.green_values(config.domain, config.points[k], config.points[j])
        expo = expo + np.bincount(k, weights=a[k] * a[j] * g, minlength=m)
    return np.exp(4.0 * np.pi * expo) / SQRT8


def _r2(center, x):
    x = np.asarray(x, dtype=float)
    d = x - np.asarray(center)
    return np.sum(d * d, axis=-1)


def bubble_value(p: BubbleParams, x):
    """``U`` at ``x``; accepts a point or an ``(..., 2)`` array."""
    t2 = p.tau**2
    out = np.log(8.0 * t2) - 2.0 * np.log(t2 * p.rho**2 + _r2(p.center, x))
    return float(out) if np.ndim(out) == 0 else out


def projected_bubble_value(p: BubbleParams, domain, x):
    """``PU = log(1 / (tau^2 rho^2 + |x - xi|^2)^2) - 8 pi H(x, xi)``."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = pts.reshape(-1, 2)
    if single:
        domain.check_interior(pts[0])
    h = greens.regular_part_batch(domain, pts, np.asarray(p.center)[None, :])[0]
    out = -2.0 * np.log(p.tau**2 * p.rho**2 + _r2(p.center, pts)) - 8.0 * np.pi * h
    return float(out[0]) if single else out


def ansatz_scale(config: SignedConfig) -> float:
    """Separation used by the ``tau rho`` admissibility test: min of pairwise and boundary distances."""
    bd = float(np.min(config.domain.boundary_distance(config.points)))
    return min(config.pairwise_min(), bd)


def approximate_solution(config: SignedConfig, rho: float, mesh: Mesh, taus=None,
                         convention: str = "bubble", centers=None) -> GridField:
    """``u_0 = sum_k a_k PU_k`` on the mesh nodes.

    ``centers`` overrides the peak locations (used to re-center continuation
    seeds on measured peaks); ``taus`` defaults to :func:`tau_values`.
    """
    taus = tau_values(config, convention) if taus is None else np.asarray(taus, dtype=float)
    pts = config.points if centers is None else np.asarray(centers, dtype=float).reshape(-1, 2)
    sep = ansatz_scale(config)
    if np.max(taus) * rho >= sep / 10.0:
        raise RhoTooLarge(f"tau*rho = {np.max(taus) * rho:.3g} is not below separation/10 = {sep / 10:.3g}")
    u = np.zeros(mesh.n)
    for k in range(config.m):
        p = BubbleParams(float(taus[k]), tuple(pts[k]), rho, config.signs[k])
        u += p.sign * projected_bubble_value(p, mesh.domain, mesh.points)
    return GridField(mesh, u, f"ansatz rho={rho:g}")


def far_field_values(config: SignedConfig, x) -> np.ndarray:
    """``8 pi sum_k a_k G(x, xi_k)`` at many points (no distance checks)."""
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    out = np.zeros(len(x))
    for k in range(config.m):
        out += config.signs[k] * greens.green_values(config.domain, x, config.points[k][None, :])
    return 8.0 * np.pi * out


def far_field_limit(config: SignedConfig, x) -> float:
    x = np.asarray(x, dtype=float).reshape(2)
    config.domain.check_interior(x)
    d = np.min(np.hypot(*(config.points - x).T))
    if d < FAR_FIELD_MIN_DIST:
        raise TooCloseToPeak(f"x is {d:.3g} from a peak (minimum {FAR_FIELD_MIN_DIST})")
    return float(far_field_values(config, x)[0])
