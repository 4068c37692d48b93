"""Checks of the small-rho laws: rates, limit profiles, far fields and integral identities."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import greens
from .domain import DomainSpec
from .errors import (BallNotAdmissible, InsufficientData, InsufficientSamples, IncompleteRuns,
                     MissingFits, QuadratureFailure, RegimeMismatch)
from .fields import GridField
from .hamiltonian import SignedConfig
from .mesh import Refinement, assemble_laplacian, build_mesh
from .spectrum import RescaledProfile, eigenpairs

MODELS = ("constant", "dipole", "radial")
FIT_WINDOW = 20.0
MIN_FIT_SAMPLES = 500
CIRCLE_POINTS = 512
REGIME_TARGETS = {1: 1.0, 3: 1.5}


# ------------------------------------------------------------------ profile fits


@dataclass(frozen=True)
class ProfileFit:
    model: str
    parameters: tuple
    relative_residual: float

    def to_dict(self):
        return {"model": self.model, "parameters": list(self.parameters), "relative_residual": self.relative_residual}


def model_basis(model: str, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    r2 = np.sum(x * x, axis=1)
    if model == "constant":
        return np.ones((len(x), 1))
    if model == "dipole":
        return x / (8.0 + r2)[:, None]
    if model == "radial":
        return ((8.0 - r2) / (8.0 + r2))[:, None]
    raise ValueError(f"unknown model {model!r}; use one of {MODELS}")


def fit_profile(profile: RescaledProfile, model: str, window: float = FIT_WINDOW) -> ProfileFit:
    """Weighted least squares of the profile on one model basis over ``|x| <= window``.

    The residual is ``|v - fit| / |v|`` in the area-weighted L2 norm, so it
    lies in [0, 1].
    """
    r = np.hypot(profile.x[:, 0], profile.x[:, 1])
    sel = r <= window + 1e-12
    if np.count_nonzero(sel) < MIN_FIT_SAMPLES:
        raise InsufficientSamples(f"{np.count_nonzero(sel)} samples within |x| <= {window:g}; "
                                  f"need {MIN_FIT_SAMPLES}")
    sw = np.sqrt(profile.weights[sel])
    v = profile.values[sel] * sw
    B = model_basis(model, profile.x[sel]) * sw[:, None]
    coef = np.linalg.lstsq(B, v, rcond=None)[0]
    vnorm = np.linalg.norm(v)
    res = float(np.linalg.norm(v - B @ coef) / vnorm) if vnorm > 0 else 0.0
    return ProfileFit(model, tuple(float(c) for c in coef), min(max(res, 0.0), 1.0))


def fit_all_models(profile: RescaledProfile, window: float = FIT_WINDOW) -> dict:
    return {m: fit_profile(profile, m, window) for m in MODELS}


# ------------------------------------------------------------------ rate checks


@dataclass
class RateCheck:
    """Rate constants of one eigenvalue index across a descending rho schedule.

    ``rates[i]`` is the regime's rate at ``rhos[i]``; ``extrapolated`` is the
    two-point Richardson limit from the two smallest rho in the regime's small
    parameter; ``previous`` is the same extrapolation one step earlier, kept
    as a slope sanity check.
    """

    regime: int
    rhos: list
    mus: list
    rates: list
    rate: float
    extrapolated: float
    previous: float
    target: float | None = None

    @property
    def relative_error(self) -> float | None:
        if self.target is None or self.target == 0:
            return None
        return abs(self.extrapolated - self.target) / abs(self.target)

    def to_dict(self):
        return {"regime": self.regime, "rhos": self.rhos, "mus": self.mus, "rates": self.rates,
                "rate": self.rate, "extrapolated": self.extrapolated, "previous": self.previous,
                "target": self.target, "relative_error": self.relative_error}

    @classmethod
    def from_dict(cls, d: dict) -> "RateCheck":
        return cls(int(d["regime"]), list(d["rhos"]), list(d["mus"]), list(d["rates"]), d["rate"],
                   d["extrapolated"], d["previous"], d["target"])


def rate_and_parameter(regime: int, rho: float, mu: float):
    L = -np.log(rho)
    if regime == 1:
        return mu * 4.0 * L, 1.0 / L
    if regime == 2:
        return (1.0 - mu) / rho**2, rho**2
    if regime == 3:
        return (mu - 1.0) * L, 1.0 / L
    raise ValueError(f"regime must be 1, 2 or 3, got {regime!r}")


def richardson_linear(e1, r1, e2, r2) -> float:
    """Value at ``e = 0`` of the line through ``(e1, r1)`` and ``(e2, r2)``."""
    return (e1 * r2 - e2 * r1) / (e1 - e2)


def regime_rate_check(mu_series, regime: int, target: float | None = None) -> RateCheck:
    """Validate one regime's law on ``[(rho, mu), ...]`` (rho descending).

    Regime 1 requires ``0 < mu < -1/(2 log rho)``; regime 3 requires
    ``mu > 1``; violations raise :class:`RegimeMismatch`. Regime 2 carries
    no inequality. Rates are ``mu (-4 log rho)``, ``(1 - mu)/rho^2`` and
    ``(mu - 1)(-log rho)``.
    """
    series = [(float(r), float(m)) for r, m in mu_series]
    if len(series) < 3:
        raise InsufficientData(f"need at least 3 rho values, got {len(series)}")
    rhos = [r for r, _ in series]
    if any(b >= a for a, b in zip(rhos, rhos[1:])):
        raise InsufficientData("rho values must be strictly descending")
    for rho, mu in series:
        if regime == 1 and not (0.0 < mu < -1.0 / (2.0 * np.log(rho))):
            raise RegimeMismatch(f"mu={mu:.6g} at rho={rho:g} violates 0 < mu < -1/(2 log rho)")
        if regime == 3 and not mu > 1.0:
            raise RegimeMismatch(f"mu={mu:.6g} at rho={rho:g} is not above 1")
    pairs = [rate_and_parameter(regime, r, m) for r, m in series]
    rates = [p[0] for p in pairs]
    eps = [p[1] for p in pairs]
    ex = richardson_linear(eps[-2], rates[-2], eps[-1], rates[-1])
    prev = richardson_linear(eps[-3], rates[-3], eps[-2], rates[-2])
    if target is None:
        target = REGIME_TARGETS.get(regime)
    return RateCheck(regime, rhos, [m for _, m in series], rates, rates[-1], float(ex), float(prev), target)


# ------------------------------------------------------------------ far fields


def probe_points(mesh, config: SignedConfig, peak_dist: float = 0.3, wall_dist: float = 0.1,
                 max_points: int = 2000) -> np.ndarray:
    pts = mesh.points
    d = np.min(np.linalg.norm(pts[:, None, :] - config.points[None], axis=2), axis=1)
    keep = (d >= peak_dist) & (mesh.domain.boundary_distance(pts) >= wall_dist)
    sel = pts[keep]
    if len(sel) > max_points:
        sel = sel[:: int(np.ceil(len(sel) / max_points))]
    return sel


def far_field_model(regime: int, fits, config: SignedConfig, taus, x) -> np.ndarray:
    """Limit profile away from the peaks.

    Regime 1: ``8 pi sum C_k G(x, xi_k)``; regime 2:
    ``2 pi sum (tau_k/sqrt 8)(s_1 dG/dy_1 + s_2 dG/dy_2)(x, xi_k)`` with the
    derivative taken in the pole; regime 3: ``2 pi sum t_k G(x, xi_k)``.
    """
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    out = np.zeros(len(x))
    for k in range(config.m):
        f = fits[k]
        xi = config.points[k][None, :]
        if regime == 2:
            gy = greens.green_batch(config.domain, x, xi)[2]
            s1, s2 = f.parameters
            out += 2.0 * np.pi * taus[k] / np.sqrt(8.0) * (s1 * gy[:, 0] + s2 * gy[:, 1])
        else:
            g = greens.green_values(config.domain, x, xi)
            c = f.parameters[0]
            out += (8.0 * np.pi if regime == 1 else 2.0 * np.pi) * c * g
    return out


def far_field_scaled(regime: int, v, mu: float, rho: float):
    if regime == 1:
        return v / mu
    if regime == 2:
        return v / rho
    return np.log(rho) * v


def far_field_check(v: GridField, mu: float, rho: float, fits, config: SignedConfig, taus, regime: int,
                    probes=None) -> float:
    """``max |scaled v - model| / max |model|`` over the probe set.

    The probe set defaults to mesh nodes at distance >= 0.3 from every peak
    and >= 0.1 from the boundary. ``fits[k]`` is the peak-k fit of the
    regime's model.
    """
    expected = {1: "constant", 2: "dipole", 3: "radial"}[regime]
    if fits is None or len(fits) != config.m or any(f is None or f.model != expected for f in fits):
        raise MissingFits(f"regime {regime} needs one {expected} fit per peak")
    x = probe_points(v.mesh, config) if probes is None else np.asarray(probes, dtype=float).reshape(-1, 2)
    a = far_field_scaled(regime, v.at(x), mu, rho)
    b = far_field_model(regime, fits, config, taus, x)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


# ------------------------------------------------------------------ limit problem


@dataclass
class LimitSpectrum:
    eigenvalues: np.ndarray
    nodes: int
    radius: float
    near_one: list
    overlap_cosine: float
    principal_cosines: np.ndarray = field(repr=False, default=None)


def limit_basis(x) -> np.ndarray:
    """The three bounded solutions of the linearized limit problem at eigenvalue 1."""
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    r2 = np.sum(x * x, axis=1)
    return np.column_stack([x[:, 0] / (8 + r2), x[:, 1] / (8 + r2), (8 - r2) / (8 + r2)])


def _m_orthonormal(Q, m):
    G = Q.T @ (m[:, None] * Q)
    L = np.linalg.cholesky(G)
    return np.linalg.solve(L, Q.T).T


def limit_eigenproblem(r_max: float = 60.0, h: float = 0.5, count: int = 6, h_min: float = 0.04,
                       growth: float = 1.04, window=(0.97, 1.03)) -> LimitSpectrum:
    """``-Laplace v = mu (1 + |x|^2/8)^-2 v`` on ``B_{r_max}`` with ``v = 0`` on the circle.

    The grid is graded towards the origin (spacing ``h_min`` there, at most
    ``h``). ``overlap_cosine`` is the smallest principal cosine between the
    three eigenvectors closest to 1 and :func:`limit_basis`, both taken
    orthonormal in the weighted inner product.
    """
    if r_max < 50:
        raise ValueError("the truncation radius must be at least 50")
    dom = DomainSpec.disc(r_max)
    mesh = build_mesh(dom, h, Refinement([(0.0, 0.0)], h_min, growth))
    lap = assemble_laplacian(mesh)
    w = GridField(mesh, (1.0 + np.sum(mesh.points**2, axis=1) / 8.0) ** -2)
    res = eigenpairs(lap, w, count)
    mu = res.eigenvalues
    near = sorted(np.argsort(np.abs(mu - 1.0))[:3].tolist())
    mdiag = mesh.volumes * w.values
    Qn = _m_orthonormal(np.column_stack([res.eigenfields[j].values for j in near]), mdiag)
    Qa = _m_orthonormal(limit_basis(mesh.points), mdiag)
    cos = np.linalg.svd(Qn.T @ (mdiag[:, None] * Qa), compute_uv=False)
    return LimitSpectrum(mu, mesh.n, r_max, near, float(cos.min()), cos)


# ------------------------------------------------------------------ integral identities


@dataclass(frozen=True)
class AnalyticField:
    """A function given by callables on ``(n, 2)`` point arrays."""

    value: Callable
    grad: Callable
    laplacian: Callable


def grid_as_analytic(u: GridField) -> AnalyticField:
    """Bilinear interpolant with central-difference gradient and the interpolated discrete Laplacian."""
    from .mesh import apply_laplacian

    mesh = u.mesh
    step = mesh.h
    lap_vals = -apply_laplacian(mesh, u.values)

    def grad(x):
        ex = np.array([step, 0.0])
        ey = np.array([0.0, step])
        gx = (u.at(x + ex) - u.at(x - ex)) / (2 * step)
        gy = (u.at(x + ey) - u.at(x - ey)) / (2 * step)
        return np.column_stack([gx, gy])

    return AnalyticField(u.at, grad, lambda x: mesh.interpolate(lap_vals, x))


@dataclass(frozen=True)
class PohozaevResult:
    lhs: float
    rhs: float
    gap: float


def _disc_quadrature(R, n_r, n_theta):
    t, w = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * R * (t + 1.0)
    wr = 0.5 * R * w * r
    th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    Rg, Tg = np.meshgrid(r, th, indexing="ij")
    pts = np.column_stack([(Rg * np.cos(Tg)).ravel(), (Rg * np.sin(Tg)).ravel()])
    wts = np.repeat(wr, n_theta) * (2.0 * np.pi / n_theta)
    return pts, wts


def _pohozaev_sides(f, g, xi, R, n_r, n_theta):
    off, wts = _disc_quadrature(R, n_r, n_theta)
    x = xi + off
    gf, gg = f.grad(x), g.grad(x)
    integrand = np.sum(off * gf, axis=1) * g.laplacian(x) + np.sum(off * gg, axis=1) * f.laplacian(x)
    lhs = float(np.sum(wts * integrand))
    th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    nu = np.column_stack([np.cos(th), np.sin(th)])
    xb = xi + R * nu
    gfb, ggb = f.grad(xb), g.grad(xb)
    dfn = np.sum(gfb * nu, axis=1)
    dgn = np.sum(ggb * nu, axis=1)
    bnd = 2.0 * dfn * dgn - np.sum(gfb * ggb, axis=1)
    rhs = float(R * np.sum(bnd) * R * (2.0 * np.pi / n_theta))
    if not (np.isfinite(lhs) and np.isfinite(rhs)):
        raise QuadratureFailure("non-finite integrand in the Pohozaev quadrature")
    return lhs, rhs


def pohozaev_check(f, g, xi, R: float, n_r: int = 64, n_theta: int = CIRCLE_POINTS) -> PohozaevResult:
    """Both sides of the ball identity

        int_B [((x-xi).grad f) Lap g + ((x-xi).grad g) Lap f]
            = R int_dB (2 df/dnu dg/dnu - grad f . grad g)

    by Gauss-Legendre x trapezoid quadrature. ``f`` and ``g`` are
    :class:`AnalyticField` or :class:`GridField` objects.
    """
    xi = np.asarray(xi, dtype=float).reshape(2)
    f = grid_as_analytic(f) if isinstance(f, GridField) else f
    g = grid_as_analytic(g) if isinstance(g, GridField) else g
    lhs, rhs = _pohozaev_sides(f, g, xi, R, n_r, n_theta)
    lhs2, rhs2 = _pohozaev_sides(f, g, xi, R, 2 * n_r, n_theta)
    scale = max(1.0, abs(lhs2), abs(rhs2))
    if abs(lhs2 - lhs) > 1e-6 * scale or abs(rhs2 - rhs) > 1e-6 * scale:
        raise QuadratureFailure("quadrature did not settle under refinement")
    return PohozaevResult(lhs2, rhs2, abs(lhs2 - rhs2) / max(1.0, abs(lhs2)))


def _circle(center, R, n=CIRCLE_POINTS):
    th = 2.0 * np.pi * np.arange(n) / n
    nu = np.column_stack([np.cos(th), np.sin(th)])
    return np.asarray(center) + R * nu, nu, R * 2.0 * np.pi / n


def green_boundary_integral_check(config: SignedConfig, k: int, i: int, j: int, R: float,
                                  variant: str = "gradient") -> float:
    """``int_{dB_R(xi_k)} grad G(., xi_i) . grad G(., xi_j)`` (or the normal-derivative product).

    The integral carries a factor ``R`` whenever ``k`` equals ``i`` or ``j``.
    """
    dom = config.domain
    xk = config.points[k]
    if dom.boundary_distance(xk) <= R:
        raise BallNotAdmissible(f"B_{R:g}(xi_{k}) is not inside the domain")
    for other in {i, j} - {k}:
        if np.hypot(*(config.points[other] - xk)) <= 2 * R:
            raise BallNotAdmissible(f"B_{R:g}(xi_{k}) meets B_{R:g}(xi_{other})")
    x, nu, ds = _circle(xk, R)
    gi = greens.green_batch(dom, x, config.points[i][None, :])[1]
    gj = greens.green_batch(dom, x, config.points[j][None, :])[1]
    if variant == "gradient":
        integrand = np.sum(gi * gj, axis=1)
    elif variant == "normal":
        integrand = np.sum(gi * nu, axis=1) * np.sum(gj * nu, axis=1)
    else:
        raise ValueError("variant must be 'gradient' or 'normal'")
    val = float(np.sum(integrand) * ds)
    return R * val if k in (i, j) else val


def hessian_boundary_integral_check(domain: DomainSpec, z1, z2, z3, R: float, i: int, j: int) -> float:
    """``int_{dB_R(z1)} (d^2G/dnu dx_i (x,z2) dG/dy_j (x,z3) - dG/dx_i (x,z2) d^2G/dnu dy_j (x,z3))``.

    Indices ``i, j`` are 0-based coordinate indices.
    """
    z1, z2, z3 = (np.asarray(z, dtype=float).reshape(2) for z in (z1, z2, z3))
    if domain.boundary_distance(z1) <= R:
        raise BallNotAdmissible(f"B_{R:g}(z1) is not inside the domain")
    for z in (z2, z3):
        d = np.hypot(*(z - z1))
        if 1e-12 < d <= R:
            raise BallNotAdmissible("a distinct pole lies inside the ball")
    x, nu, ds = _circle(z1, R)
    _, gx2, _, hxx2, _ = greens.green_batch(domain, x, z2[None, :])
    _, _, gy3, _, hxy3 = greens.green_batch(domain, x, z3[None, :])
    d2_nu_xi = np.einsum("nl,nl->n", nu, hxx2[:, i, :])
    d2_nu_yj = np.einsum("nl,nl->n", nu, hxy3[:, :, j])
    integrand = d2_nu_xi * gy3[:, j] - gx2[:, i] * d2_nu_yj
    return float(np.sum(integrand) * ds)


def hessian_boundary_integral_expected(domain: DomainSpec, z1, z2, z3, i: int, j: int) -> float:
    """Right-hand side of the case table for :func:`hessian_boundary_integral_check`.

    The table's ``R`` carries the opposite sign to :func:`sinhlab.greens.robin_eval`
    (its ``H`` enters the projected bubble as ``+8 pi H``), so the coincident
    case returns ``-1/2`` times our Robin Hessian.
    """
    z1, z2, z3 = (np.asarray(z, dtype=float).reshape(2) for z in (z1, z2, z3))
    same2 = np.hypot(*(z2 - z1)) <= 1e-12
    same3 = np.hypot(*(z3 - z1)) <= 1e-12
    if same2 and same3:
        return -0.5 * float(greens.robin_eval(domain, z1).hess[i, j])
    if same2:
        return float(greens.green_derivatives(domain, z1, z3).hess_xy[i, j])
    if same3:
        return float(greens.green_derivatives(domain, z1, z2).hess_xx[i, j])
    return 0.0


# ------------------------------------------------------------------ report


@dataclass
class AsymptoticReport:
    m: int
    rho_schedule: list
    regimes: dict
    rate_checks: dict
    far_field: dict
    morse: list
    predicted_morse: int
    morse_within_bounds: list
    regime2: dict
    fits: dict
    ambiguous: list
    mismatches: list
    eigenvalues: dict
    hess_negative_count: int
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "rho_schedule": self.rho_schedule,
            "regimes": {str(j): r for j, r in self.regimes.items()},
            "rate_checks": {str(j): rc.to_dict() for j, rc in self.rate_checks.items()},
            "far_field": {str(j): v for j, v in self.far_field.items()},
            "morse": self.morse,
            "predicted_morse": self.predicted_morse,
            "morse_within_bounds": self.morse_within_bounds,
            "regime2": self.regime2,
            "fits": self.fits,
            "ambiguous": self.ambiguous,
            "mismatches": self.mismatches,
            "eigenvalues": dict(self.eigenvalues),
            "hess_negative_count": self.hess_negative_count,
            "extra": self.extra,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AsymptoticReport":
        return cls(
            m=int(d["m"]), rho_schedule=list(d["rho_schedule"]),
            regimes={int(j): int(r) for j, r in d["regimes"].items()},
            rate_checks={int(j): RateCheck.from_dict(rc) for j, rc in d["rate_checks"].items()},
            far_field={int(j): v for j, v in d["far_field"].items()},
            morse=list(d["morse"]), predicted_morse=int(d["predicted_morse"]),
            morse_within_bounds=list(d["morse_within_bounds"]), regime2=d["regime2"], fits=d["fits"],
            ambiguous=d["ambiguous"], mismatches=d["mismatches"], eigenvalues=d["eigenvalues"],
            hess_negative_count=int(d["hess_negative_count"]), extra=d.get("extra", {}),
        )


def regime_of(j: int, m: int) -> int:
    """Index-block regime of the 1-based eigenvalue index ``j``."""
    if j <= m:
        return 1
    if j <= 3 * m:
        return 2
    if j <= 4 * m:
        return 3
    return 0


def build_report(runs, m: int, etas, hess_negative_count: int) -> AsymptoticReport:
    """Assemble the per-rho run records into a report.

    ``runs`` is a list of dicts with keys ``rho``, ``mu`` (eigenvalues used
    for the laws), ``morse``, ``ambiguous``, ``fits`` (``{j: [{model: ProfileFit}
    per peak]}``) and ``far_field`` (``{j: error}``). A record without ``mu``
    counts as incomplete.
    """
    if not runs:
        raise IncompleteRuns("no runs")
    for r in runs:
        if r.get("mu") is None or len(r["mu"]) < 4 * m:
            raise IncompleteRuns(f"spectrum missing or too short at rho={r.get('rho')}")
    rhos = [float(r["rho"]) for r in runs]
    regimes = {j: regime_of(j, m) for j in range(1, 4 * m + 1)}
    eta_desc = np.sort(np.asarray(etas, dtype=float))[::-1]
    checks, mismatches = {}, []
    for j, reg in regimes.items():
        series = [(r["rho"], r["mu"][j - 1]) for r in runs]
        target = 3.0 * np.pi * float(eta_desc[j - m - 1]) if reg == 2 else None
        try:
            checks[j] = regime_rate_check(series, reg, target)
        except RegimeMismatch as exc:
            mismatches.append({"j": j, "regime": reg, "message": str(exc)})
            checks[j] = _unchecked(series, reg, target)
        except InsufficientData as exc:
            mismatches.append({"j": j, "regime": reg, "message": str(exc)})
    morse = [int(r["morse"]) for r in runs]
    pred = 3 * m - int(hess_negative_count)
    r2 = {
        "eta": [float(e) for e in eta_desc],
        "predicted": [3.0 * np.pi * float(e) for e in eta_desc],
        "measured": [checks[j].extrapolated for j in range(m + 1, 3 * m + 1) if j in checks],
    }
    far = {j: [r.get("far_field", {}).get(j) for r in runs] for j in regimes}
    fits = {}
    for r in runs:
        per_j = {}
        for j, per_peak in (r.get("fits") or {}).items():
            per_j[str(j)] = [None if d is None else {mm: f.to_dict() for mm, f in d.items()} for d in per_peak]
        fits[repr(float(r["rho"]))] = per_j
    return AsymptoticReport(
        m=m, rho_schedule=rhos, regimes=regimes, rate_checks=checks, far_field=far, morse=morse,
        predicted_morse=pred, morse_within_bounds=[m <= x <= 3 * m for x in morse], regime2=r2, fits=fits,
        ambiguous=[list(r.get("ambiguous", [])) for r in runs], mismatches=mismatches,
        eigenvalues={repr(float(r["rho"])): [float(x) for x in r["mu"]] for r in runs},
        hess_negative_count=int(hess_negative_count),
    )


def _unchecked(series, regime, target):
    # same numbers as regime_rate_check, without the inequality assertion
    pairs = [rate_and_parameter(regime, r, mu) for r, mu in series]
    rates = [p[0] for p in pairs]
    eps = [p[1] for p in pairs]
    if target is None:
        target = REGIME_TARGETS.get(regime)
    return RateCheck(regime, [r for r, _ in series], [mu for _, mu in series], rates, rates[-1],
                     float(richardson_linear(eps[-2], rates[-2], eps[-1], rates[-1])),
                     float(richardson_linear(eps[-3], rates[-3], eps[-2], rates[-2])), target)
