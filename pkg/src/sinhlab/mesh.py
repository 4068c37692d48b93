"""Cartesian meshes and 5-point Dirichlet Laplacians on model domains.

Meshes are tensor grids: a set of x grid lines and a set of y grid lines,
uniform with spacing ``h`` unless a :class:`Refinement` asks for geometric
grading towards given points. Nodes are the grid points strictly inside the
domain. Where a stencil arm leaves the domain it is cut at the boundary
crossing (Shortley-Weller geometry).

Two difference schemes share this geometry:

``"shortley-weller"``
    the classic scheme, ``-u_xx ~ 2/(a_w+a_e) [(u-u_w)/a_w + (u-u_e)/a_e]``.
    Not symmetric near a curved boundary.
``"symmetric"`` (default)
    the same arms but with the nominal half-spacing ``(g_w+g_e)/2`` in the
    prefactor. Weighted by the dual cell areas it gives an exactly symmetric
    matrix, and it is still second-order convergent. All spectral work uses it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _core
from .domain import DomainSpec
from .errors import ResolutionInvalid

EAST, WEST, NORTH, SOUTH = range(4)
SCHEMES = ("symmetric", "shortley-weller")


@dataclass(frozen=True)
class Refinement:
    """Geometric grading of grid lines towards ``centers``.

    Line spacing grows like ``h_min + (growth - 1) * dist`` away from the
    nearest center coordinate and is capped at the mesh spacing ``h``.
    """

    centers: tuple
    h_min: float
    growth: float = 1.1

    def __post_init__(self):
        pts = tuple(tuple(float(c) for c in p) for p in self.centers)
        object.__setattr__(self, "centers", pts)
        if not self.h_min > 0 or not self.growth > 1.0:
            raise ResolutionInvalid("refinement needs h_min > 0 and growth > 1")

    def to_dict(self):
        return {"centers": [list(c) for c in self.centers], "h_min": self.h_min, "growth": self.growth}


def _spacing(x, h, anchors, h_min, growth):
    if not len(anchors):
        return np.full_like(x, h)
    d = np.min(np.abs(np.asarray(x)[..., None] - np.asarray(anchors)), axis=-1)
    return np.minimum(h, h_min + (growth - 1.0) * d)


def _fill_interval(a, b, h, anchors, h_min, growth):
    """Interior lines of (a, b) so that spacing follows the grading law."""
    t = np.linspace(a, b, 4001)
    inv = 1.0 / _spacing(t, h, anchors, h_min, growth)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (inv[1:] + inv[:-1]) * np.diff(t))])
    n = max(1, int(np.ceil(cum[-1] - 1e-9)))
    targets = np.linspace(0.0, cum[-1], n + 1)[1:-1]
    return np.interp(targets, cum, t)


def _march(start, stop, h, anchors, h_min, growth):
    """Lines from ``start`` (exclusive) moving towards and just past ``stop``."""
    out = []
    x = start
    sgn = 1.0 if stop > start else -1.0
    while sgn * (x - stop) <= 0:
        x = x + sgn * float(_spacing(np.array([x]), h, anchors, h_min, growth)[0])
        out.append(x)
    return out


def _axis_lines(lo, hi, h, anchors, ref, closed):
    """Grid lines along one axis.

    ``closed`` domains (rectangle sides) put lines exactly on ``lo`` and ``hi``.
    Otherwise lines start at the anchors and march past both ends.
    """
    h_min = ref.h_min if ref else h
    growth = ref.growth if ref else 2.0
    grade = list(anchors) if ref else []
    if closed:
        pts = sorted({lo, hi, *[a for a in anchors if lo < a < hi]})
        lines = [pts[0]]
        for a, b in zip(pts[:-1], pts[1:]):
            if ref:
                lines.extend(_fill_interval(a, b, h, grade, h_min, growth))
            else:
                n = int(round((b - a) / h))
                if n < 1 or abs(n * h - (b - a)) > 1e-9 * max(1.0, b - a):
                    raise ResolutionInvalid(f"h={h} does not divide the side length {b - a}")
                lines.extend(a + h * np.arange(1, n))
            lines.append(b)
        return np.array(lines)
    pts = sorted(set(anchors))
    lines = list(pts)
    for a, b in zip(pts[:-1], pts[1:]):
        lines.extend(_fill_interval(a, b, h, grade, h_min, growth))
    lines.extend(_march(pts[0], lo - h, h, grade, h_min, growth))
    lines.extend(_march(pts[-1], hi + h, h, grade, h_min, growth))
    return np.unique(np.array(lines))


@dataclass
class Mesh:
    """Tensor-grid mesh restricted to the interior of a domain.

    Per node ``i``: ``points[i]`` its coordinates, ``nbr[i, d]`` the
    neighbouring node index in direction d (E, W, N, S) or -1 for the
    boundary, ``arm[i, d]`` the distance to that neighbour or boundary
    crossing, ``ghat[i]`` the nominal half-spacings and ``volumes[i]`` the
    dual cell area ``ghat_x * ghat_y``.
    """

    domain: DomainSpec
    h: float
    xs: np.ndarray
    ys: np.ndarray
    ix: np.ndarray
    iy: np.ndarray
    points: np.ndarray
    index_grid: np.ndarray
    nbr: np.ndarray
    arm: np.ndarray
    ghat: np.ndarray
    volumes: np.ndarray
    refinement: Refinement | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def h_min(self) -> float:
        return float(min(np.diff(self.xs).min(), np.diff(self.ys).min()))

    def to_grid(self, values) -> np.ndarray:
        grid = np.zeros(self.index_grid.shape)
        grid[self.iy, self.ix] = values
        return grid

    def interpolate(self, values, pts) -> np.ndarray:
        """Bilinear interpolation; the field is taken as zero off the mesh."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        return _core.tensor_bilinear(self.xs, self.ys, self.to_grid(values), pts[:, 0], pts[:, 1])

    def locate_weights(self, p):
        """Bilinear weights of point ``p`` on the surrounding interior nodes."""
        px, py = float(p[0]), float(p[1])
        i = int(np.clip(np.searchsorted(self.xs, px, side="right") - 1, 0, len(self.xs) - 2))
        j = int(np.clip(np.searchsorted(self.ys, py, side="right") - 1, 0, len(self.ys) - 2))
        tx = (px - self.xs[i]) / (self.xs[i + 1] - self.xs[i])
        ty = (py - self.ys[j]) / (self.ys[j + 1] - self.ys[j])
        out = []
        for di, dj, w in ((0, 0, (1 - tx) * (1 - ty)), (1, 0, tx * (1 - ty)), (0, 1, (1 - tx) * ty), (1, 1, tx * ty)):
            node = self.index_grid[j + dj, i + di]
            if node >= 0 and w > 1e-14:
                out.append((int(node), float(w)))
        return out

    def nearest_node(self, p) -> int:
        d = np.linalg.norm(self.points - np.asarray(p, dtype=float), axis=1)
        return int(np.argmin(d))

    def near_boundary(self) -> np.ndarray:
        """Mask of nodes with at least one arm ending on the boundary."""
        return np.any(self.nbr < 0, axis=1)


def build_mesh(domain: DomainSpec, h: float, refine: Refinement | None = None) -> Mesh:
    """Cartesian interior nodes with boundary-cut stencil arms.

    ``h`` is the (maximum) line spacing. Disc grids are aligned with the disc
    center; rectangle grids have lines on the sides and require ``h`` to
    divide them unless a refinement is given.
    """
    if not (h > 0 and h <= domain.diameter / 16.0):
        raise ResolutionInvalid(f"h={h} must lie in (0, diameter/16]")
    if refine is not None:
        if refine.h_min > h:
            raise ResolutionInvalid("refinement h_min exceeds h")
        for c in refine.centers:
            domain.check_interior(c)
    xmin, xmax, ymin, ymax = domain.bounding_box()
    ax = [c[0] for c in refine.centers] if refine else []
    ay = [c[1] for c in refine.centers] if refine else []
    if domain.is_disc:
        cx, cy = domain.center
        xs = _axis_lines(xmin, xmax, h, ax or [cx], refine, closed=False)
        ys = _axis_lines(ymin, ymax, h, ay or [cy], refine, closed=False)
    else:
        xs = _axis_lines(xmin, xmax, h, ax, refine, closed=True)
        ys = _axis_lines(ymin, ymax, h, ay, refine, closed=True)

    X, Y = np.meshgrid(xs, ys)
    dist = domain.boundary_distance(np.stack([X, Y], axis=-1))
    inside = dist > 1e-9 * h
    # rectangle boundary lines are never nodes
    inside[:, 0] = inside[:, -1] = inside[0, :] = inside[-1, :] = False
    index_grid = -np.ones(X.shape, dtype=np.int64)
    iy, ix = np.nonzero(inside)
    n = len(ix)
    if n < 9:
        raise ResolutionInvalid(f"mesh has only {n} interior nodes")
    index_grid[iy, ix] = np.arange(n)
    points = np.column_stack([xs[ix], ys[iy]])

    nbr = np.empty((n, 4), dtype=np.int64)
    nbr[:, EAST] = index_grid[iy, ix + 1]
    nbr[:, WEST] = index_grid[iy, ix - 1]
    nbr[:, NORTH] = index_grid[iy + 1, ix]
    nbr[:, SOUTH] = index_grid[iy - 1, ix]
    arm = np.empty((n, 4))
    arm[:, EAST] = xs[ix + 1] - xs[ix]
    arm[:, WEST] = xs[ix] - xs[ix - 1]
    arm[:, NORTH] = ys[iy + 1] - ys[iy]
    arm[:, SOUTH] = ys[iy] - ys[iy - 1]
    ghat = np.column_stack([0.5 * (arm[:, EAST] + arm[:, WEST]), 0.5 * (arm[:, NORTH] + arm[:, SOUTH])])
    if domain.is_disc:
        cx, cy = domain.center
        r = domain.radius
        px, py = points[:, 0], points[:, 1]
        hx = np.sqrt(np.maximum(r * r - (py - cy) ** 2, 0.0))
        hy = np.sqrt(np.maximum(r * r - (px - cx) ** 2, 0.0))
        cut = {
            EAST: cx + hx - px,
            WEST: px - (cx - hx),
            NORTH: cy + hy - py,
            SOUTH: py - (cy - hy),
        }
        for d, c in cut.items():
            b = nbr[:, d] < 0
            arm[b, d] = c[b]
    return Mesh(domain, float(h), xs, ys, ix, iy, points, index_grid, nbr, arm, ghat,
                ghat[:, 0] * ghat[:, 1], refine)


@dataclass
class DiscreteLaplacian:
    """Discrete ``-Laplace`` with Dirichlet elimination.

    ``A`` acts pointwise (``(A u)_i ~ -Laplace u(x_i)``). ``S = diag(volumes) A``
    is the form used for eigenproblems; it is symmetric only for the
    ``"symmetric"`` scheme. ``stencil`` holds ``(nbr, wgt, bdiag)`` from
    :func:`stencil_weights`.
    """

    mesh: Mesh
    scheme: str
    A: sp.csr_matrix
    S: sp.csr_matrix
    stencil: tuple

    @property
    def volumes(self) -> np.ndarray:
        return self.mesh.volumes


def stencil_weights(mesh: Mesh, scheme: str = "symmetric"):
    """Arm weights of the pointwise operator in difference form.

    Returns ``(nbr, wgt, bdiag)`` with ``(A u)_i = bdiag_i u_i + sum_d wgt_id (u_i - u_nbr)``:
    ``wgt`` holds the weights of interior arms (zero on boundary arms) and
    ``bdiag`` the summed weights of arms ending on the boundary.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    arm = mesh.arm
    if scheme == "symmetric":
        den_x = mesh.ghat[:, 0]
        den_y = mesh.ghat[:, 1]
    else:
        den_x = 0.5 * (arm[:, EAST] + arm[:, WEST])
        den_y = 0.5 * (arm[:, NORTH] + arm[:, SOUTH])
    den = np.column_stack([den_x, den_x, den_y, den_y])
    w = 1.0 / (den * arm)
    inner = mesh.nbr >= 0
    return mesh.nbr, np.where(inner, w, 0.0), np.where(inner, 0.0, w).sum(axis=1)


def assemble_laplacian(mesh: Mesh, scheme: str = "symmetric") -> DiscreteLaplacian:
    key = ("lap", scheme)
    if key in mesh._cache:
        return mesh._cache[key]
    nbr, wgt, bdiag = stencil_weights(mesh, scheme)
    n = mesh.n
    diag = bdiag + wgt.sum(axis=1)
    rows = np.repeat(np.arange(n), 4)
    cols = nbr.ravel()
    keep = cols >= 0
    A = sp.csr_matrix(
        (np.concatenate([diag, -wgt.ravel()[keep]]),
         (np.concatenate([np.arange(n), rows[keep]]), np.concatenate([np.arange(n), cols[keep]]))),
        shape=(n, n),
    )
    S = (sp.diags(mesh.volumes) @ A).tocsr()
    if scheme == "symmetric":
        # symmetric in exact arithmetic; drop the rounding asymmetry
        S = (0.5 * (S + S.T)).tocsr()
    lap = DiscreteLaplacian(mesh, scheme, A, S, (nbr, wgt, bdiag))
    mesh._cache[key] = lap
    return lap


def apply_laplacian(mesh: Mesh, u, scheme: str = "symmetric") -> np.ndarray:
    """Pointwise ``-Laplace_h u`` evaluated straight from the neighbour tables."""
    nbr, wgt, bdiag = stencil_weights(mesh, scheme)
    return _core.apply_stencil(np.asarray(u, dtype=float), nbr, wgt, bdiag)
