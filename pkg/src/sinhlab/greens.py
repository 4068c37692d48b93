"""Dirichlet Green function, regular part and Robin function on model domains.

Sign convention used throughout this module::

    G(x, y) = -(1/2pi) log|x - y| - H(x, y),    -Laplace_x G = delta_y,   G = 0 on the boundary,

so ``H`` is positive-definite-like near the boundary (on the unit disc
``H(x, x) = -(1/2pi) log(1 - |x|^2) >= 0``) and ``R(x) = H(x, x)`` blows up to
``+inf`` at the boundary. Modules that need the opposite regular part (the
one with ``G = -(1/2pi) log|x-y| + H``) negate these values explicitly.

Disc kernels are closed form (method of images). The rectangle kernel sums
the doubly periodic image lattice row by row; each row is collapsed in
closed form into a sine factor, so the remaining row series converges
geometrically and is truncated adaptively (see ``_kernels``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _core
from .domain import DomainSpec
from .errors import MeshTooCoarse, Singularity

TWO_PI = 2.0 * np.pi
SERIES_TOL = 1e-13


@dataclass(frozen=True)
class KernelEval:
    """A two-point kernel and its derivatives at one pair ``(x, y)``.

    ``hess_xy[i, j]`` is the mixed derivative d^2/dx_i dy_j.
    """

    value: float
    grad_x: np.ndarray
    grad_y: np.ndarray
    hess_xx: np.ndarray
    hess_xy: np.ndarray


@dataclass(frozen=True)
class RobinEval:
    value: float
    grad: np.ndarray
    hess: np.ndarray


# ---------------------------------------------------------------- batch kernels


def _unit_disc_regular(x, y):
    z = x[:, 0] + 1j * x[:, 1]
    wc = y[:, 0] - 1j * y[:, 1]
    d = 1.0 - z * wc
    fz = -wc / d
    fw = -z / d
    fzz = -wc * wc / (d * d)
    fzw = -1.0 / (d * d)
    cx = (1.0, 1j)
    cy = (1.0, -1j)
    s = -1.0 / TWO_PI
    n = len(z)
    val = s * np.log(np.abs(d))
    gx = np.empty((n, 2))
    gy = np.empty((n, 2))
    hxx = np.empty((n, 2, 2))
    hxy = np.empty((n, 2, 2))
    for i in range(2):
        gx[:, i] = s * (fz * cx[i]).real
        gy[:, i] = s * (fw * cy[i]).real
        for j in range(2):
            hxx[:, i, j] = s * (fzz * cx[i] * cx[j]).real
            hxy[:, i, j] = s * (fzw * cx[i] * cy[j]).real
    return val, gx, gy, hxx, hxy


def regular_part_batch(domain: DomainSpec, x, y):
    """Vectorized ``H`` and derivatives for paired rows of ``x`` and ``y``.

    Returns ``(value, grad_x, grad_y, hess_xx, hess_xy)`` with shapes
    ``(n,), (n,2), (n,2), (n,2,2), (n,2,2)``. No domain checks are made.
    """
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    y = np.asarray(y, dtype=float).reshape(-1, 2)
    x, y = np.broadcast_arrays(x, y)
    if domain.is_disc:
        c = np.asarray(domain.center)
        r = domain.radius
        val, gx, gy, hxx, hxy = _unit_disc_regular((x - c) / r, (y - c) / r)
        return (val - np.log(r) / TWO_PI, gx / r, gy / r, hxx / r**2, hxy / r**2)
    a, b = domain.width, domain.height
    if a <= b:
        return _core.rect_regular_part(x, y, a, b, SERIES_TOL)
    # reflect across the diagonal so the series runs along the long side
    val, gx, gy, hxx, hxy = _core.rect_regular_part(x[:, ::-1], y[:, ::-1], b, a, SERIES_TOL)
    return (val, gx[:, ::-1], gy[:, ::-1], hxx[:, ::-1, ::-1], hxy[:, ::-1, ::-1])


def _singular_batch(x, y):
    d = x - y
    r2 = np.einsum("ni,ni->n", d, d)
    val = -np.log(r2) / (2.0 * TWO_PI)
    gx = -d / (TWO_PI * r2[:, None])
    eye = np.eye(2)[None]
    hxx = -(eye / r2[:, None, None] - 2.0 * d[:, :, None] * d[:, None, :] / (r2**2)[:, None, None]) / TWO_PI
    return val, gx, -gx, hxx, -hxx


def green_batch(domain: DomainSpec, x, y):
    """Vectorized ``G`` and derivatives; same layout as :func:`regular_part_batch`."""
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    y = np.asarray(y, dtype=float).reshape(-1, 2)
    x, y = np.broadcast_arrays(x, y)
    sing = _singular_batch(x, y)
    reg = regular_part_batch(domain, x, y)
    return tuple(s - h for s, h in zip(sing, reg))


def green_values(domain: DomainSpec, x, y) -> np.ndarray:
    """G(x_i, y_i) for many pairs; used on meshes and probe sets."""
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    y = np.asarray(y, dtype=float).reshape(-1, 2)
    x, y = np.broadcast_arrays(x, y)
    d = x - y
    sing = -np.log(np.einsum("ni,ni->n", d, d)) / (2.0 * TWO_PI)
    return sing - regular_part_batch(domain, x, y)[0]


# ------------------------------------------------------------- point operations


def _check_pair(domain, x, y, allow_equal=False):
    x = np.asarray(x, dtype=float).reshape(2)
    y = np.asarray(y, dtype=float).reshape(2)
    domain.check_interior(x, y)
    if not allow_equal and np.hypot(*(x - y)) <= 1e-14 * domain.diameter:
        raise Singularity(f"G is singular at x = y = {x.tolist()}")
    return x, y


def _pack(parts) -> KernelEval:
    val, gx, gy, hxx, hxy = parts
    return KernelEval(float(val[0]), gx[0].copy(), gy[0].copy(), hxx[0].copy(), hxy[0].copy())


def green_value(domain: DomainSpec, x, y) -> float:
    x, y = _check_pair(domain, x, y)
    return float(green_values(domain, x, y)[0])


def green_regular_part(domain: DomainSpec, x, y) -> float:
    x, y = _check_pair(domain, x, y, allow_equal=True)
    return float(regular_part_batch(domain, x, y)[0][0])


def regular_part_derivatives(domain: DomainSpec, x, y) -> KernelEval:
    x, y = _check_pair(domain, x, y, allow_equal=True)
    return _pack(regular_part_batch(domain, x, y))


def green_derivatives(domain: DomainSpec, x, y) -> KernelEval:
    x, y = _check_pair(domain, x, y)
    return _pack(green_batch(domain, x, y))


def robin_batch(domain: DomainSpec, x):
    """R(x) = H(x, x) with gradient and Hessian, vectorized."""
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    val, gx, gy, hxx, hxy = regular_part_batch(domain, x, x)
    # H is symmetric, so d^2/dy^2 H(x, y) at y = x equals hess_xx there
    hess = 2.0 * hxx + hxy + np.swapaxes(hxy, 1, 2)
    return val, gx + gy, hess


def robin_eval(domain: DomainSpec, x) -> RobinEval:
    x = np.asarray(x, dtype=float).reshape(2)
    domain.check_interior(x)
    val, grad, hess = robin_batch(domain, x)
    h = 0.5 * (hess[0] + hess[0].T)
    return RobinEval(float(val[0]), grad[0].copy(), h)


# ------------------------------------------------------------ discrete oracle


def discrete_green_crosscheck(domain: DomainSpec, h: float, x, y, scheme: str = "symmetric") -> float:
    """Discrete Green function of the 5-point Laplacian, evaluated at ``x``.

    A unit discrete source (bilinearly spread if ``y`` is not a node) is
    placed at ``y``; the discrete Dirichlet problem is solved directly and the
    solution is interpolated at ``x``.
    """
    from .mesh import build_mesh, assemble_laplacian

    x = np.asarray(x, dtype=float).reshape(2)
    y = np.asarray(y, dtype=float).reshape(2)
    domain.check_interior(x, y)
    if np.hypot(*(x - y)) < 2.0 * h:
        raise MeshTooCoarse(f"points are closer than two cells (h={h})")
    mesh = build_mesh(domain, h)
    lap = assemble_laplacian(mesh, scheme)
    src = np.zeros(mesh.n)
    for node, wgt in mesh.locate_weights(y):
        src[node] += wgt / mesh.volumes[node]
    if not np.any(src):
        raise MeshTooCoarse("source point is not surrounded by mesh nodes")
    from scipy.sparse.linalg import spsolve

    g = spsolve(lap.A.tocsc(), src)
    return float(mesh.interpolate(g, x[None, :])[0])
