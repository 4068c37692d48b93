"""Self-checks: kernel derivatives against finite differences and the integral identities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import asymptotics as asy
from . import greens
from .domain import DomainSpec
from .hamiltonian import SignedConfig, hamiltonian_derivatives, hamiltonian_value


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    expected: float
    error: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return bool(self.error <= self.tolerance)

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "expected": self.expected, "error": self.error,
                "tolerance": self.tolerance, "ok": self.ok}


def _fd_grad(f, z, step):
    z = np.asarray(z, dtype=float)
    g = np.empty(len(z))
    for i in range(len(z)):
        e = np.zeros(len(z))
        e[i] = step
        g[i] = (f(z + e) - f(z - e)) / (2 * step)
    return g


def _fd_jac(f, z, step):
    z = np.asarray(z, dtype=float)
    cols = []
    for i in range(len(z)):
        e = np.zeros(len(z))
        e[i] = step
        cols.append((np.asarray(f(z + e)) - np.asarray(f(z - e))) / (2 * step))
    return np.column_stack(cols)


def _rel(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-12))


def derivative_checks(domain: DomainSpec, x, y, config: SignedConfig, step: float = 1e-5,
                      tol: float = 1e-5) -> list[Check]:
    """Analytic first and second derivatives of G, H, R and F against central differences.

    Gradients are differenced from values and Hessians from the analytic
    gradients, so each level is tested against the one below.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = []
    for label, kern, val in (("G", greens.green_derivatives, greens.green_value),
                             ("H", greens.regular_part_derivatives, greens.green_regular_part)):
        k = kern(domain, x, y)
        gx = _fd_grad(lambda p: val(domain, p, y), x, step)
        gy = _fd_grad(lambda p: val(domain, x, p), y, step)
        hxx = _fd_jac(lambda p: kern(domain, p, y).grad_x, x, step)
        hxy = _fd_jac(lambda p: kern(domain, x, p).grad_x, y, step)
        for name, a, b in ((f"{label} grad_x", k.grad_x, gx), (f"{label} grad_y", k.grad_y, gy),
                           (f"{label} hess_xx", k.hess_xx, hxx), (f"{label} hess_xy", k.hess_xy, hxy)):
            out.append(Check(name, float(np.max(np.abs(a))), float(np.max(np.abs(b))), _rel(a, b), tol))
    r = greens.robin_eval(domain, x)
    rg = _fd_grad(lambda p: greens.robin_eval(domain, p).value, x, step)
    rh = _fd_jac(lambda p: greens.robin_eval(domain, p).grad, x, step)
    out.append(Check("R grad", float(np.max(np.abs(r.grad))), float(np.max(np.abs(rg))), _rel(r.grad, rg), tol))
    out.append(Check("R hess", float(np.max(np.abs(r.hess))), float(np.max(np.abs(rh))), _rel(r.hess, rh), tol))
    g, H = hamiltonian_derivatives(config)
    z = config.flat()
    fg = _fd_grad(lambda q: hamiltonian_value(config.with_flat(q)), z, step)
    fh = _fd_jac(lambda q: hamiltonian_derivatives(config.with_flat(q))[0], z, step)
    out.append(Check("F grad", float(np.max(np.abs(g))), float(np.max(np.abs(fg))), _rel(g, fg), tol))
    out.append(Check("F hess", float(np.max(np.abs(H))), float(np.max(np.abs(fh))), _rel(H, fh), tol))
    return out


def quadratic_field() -> asy.AnalyticField:
    return asy.AnalyticField(lambda x: np.sum(x * x, axis=1), lambda x: 2.0 * x,
                             lambda x: np.full(len(x), 4.0))


def analytic_pairs() -> dict:
    """Named ``(f, g)`` pairs for the ball identity with closed-form derivatives."""
    const = asy.AnalyticField(lambda x: np.full(len(x), 2.0), lambda x: np.zeros_like(x),
                              lambda x: np.zeros(len(x)))
    x1 = asy.AnalyticField(lambda x: x[:, 0], lambda x: np.column_stack([np.ones(len(x)), np.zeros(len(x))]),
                           lambda x: np.zeros(len(x)))
    x2 = asy.AnalyticField(lambda x: x[:, 1], lambda x: np.column_stack([np.zeros(len(x)), np.ones(len(x))]),
                           lambda x: np.zeros(len(x)))
    cubic = asy.AnalyticField(
        lambda x: x[:, 0] ** 3 + x[:, 0] * x[:, 1] ** 2,
        lambda x: np.column_stack([3 * x[:, 0] ** 2 + x[:, 1] ** 2, 2 * x[:, 0] * x[:, 1]]),
        lambda x: 8.0 * x[:, 0],
    )
    expo = asy.AnalyticField(
        lambda x: np.exp(x[:, 0]) * np.cos(2 * x[:, 1]),
        lambda x: np.column_stack([np.exp(x[:, 0]) * np.cos(2 * x[:, 1]), -2 * np.exp(x[:, 0]) * np.sin(2 * x[:, 1])]),
        lambda x: -3.0 * np.exp(x[:, 0]) * np.cos(2 * x[:, 1]),
    )
    sq = quadratic_field()
    return {"constant": (const, const), "x1-x2": (x1, x2), "quadratic": (sq, sq), "cubic-exp": (cubic, expo),
            "quadratic-cubic": (sq, cubic)}


def identity_checks(R: float = 0.05) -> list[Check]:
    """The ball identity on analytic pairs and the two boundary-integral lemmas on the unit disc."""
    out = []
    for name, (f, g) in analytic_pairs().items():
        xi = (0.1, -0.2) if name in ("cubic-exp", "quadratic-cubic") else (0.0, 0.0)
        res = asy.pohozaev_check(f, g, xi, 0.3)
        out.append(Check(f"pohozaev {name}", res.lhs, res.rhs, res.gap, 1e-6))
    res = asy.pohozaev_check(quadratic_field(), quadratic_field(), (0.0, 0.0), 0.3)
    exact = 8 * np.pi * 0.3**4
    out.append(Check("pohozaev |x|^2 closed form", res.rhs, exact, abs(res.rhs - exact) / exact, 1e-6))
    disc = DomainSpec.unit_disc()
    center = SignedConfig(disc, [(0.0, 0.0)], [1])
    target = 1.0 / (2.0 * np.pi)
    for variant in ("gradient", "normal"):
        v = asy.green_boundary_integral_check(center, 0, 0, 0, R, variant)
        out.append(Check(f"green boundary k=i=j ({variant})", v, target, abs(v - target) / target, 0.1))
    off = SignedConfig(disc, [(0.0, 0.0), (0.5, 0.1)], [1, -1])
    # this case is O(R) with no R prefactor, so it is checked on a smaller ball
    v = asy.green_boundary_integral_check(off, 0, 1, 1, R / 5)
    out.append(Check("green boundary k!=i,j", v, 0.0, abs(v), 0.1 * target))
    z = np.zeros(2)
    v = asy.hessian_boundary_integral_check(disc, z, z, z, R, 0, 0)
    e = asy.hessian_boundary_integral_expected(disc, z, z, z, 0, 0)
    out.append(Check("hessian boundary z1=z2=z3", v, e, abs(v - e) / abs(e), 0.02))
    z1, z3 = np.array([0.1, 0.0]), np.array([0.3, 0.2])
    v = asy.hessian_boundary_integral_check(disc, z1, z1, z3, R, 0, 1)
    e = asy.hessian_boundary_integral_expected(disc, z1, z1, z3, 0, 1)
    out.append(Check("hessian boundary z1=z2!=z3", v, e, abs(v - e) / abs(e), 0.02))
    v = asy.hessian_boundary_integral_check(disc, z1, z3, z1, R, 0, 1)
    e = asy.hessian_boundary_integral_expected(disc, z1, z3, z1, 0, 1)
    out.append(Check("hessian boundary z1=z3!=z2", v, e, abs(v - e) / abs(e), 0.02))
    v = asy.hessian_boundary_integral_check(disc, z1, np.array([0.4, 0.0]), z3, R, 0, 1)
    out.append(Check("hessian boundary distinct", v, 0.0, abs(v), 1e-8))
    return out


def kernel_checks() -> list[Check]:
    disc = DomainSpec.unit_disc()
    rect = DomainSpec.rectangle(1.0, 0.7)
    cfg = SignedConfig(disc, [(0.3, 0.1), (-0.2, 0.4)], [1, -1])
    out = derivative_checks(disc, (0.3, 0.1), (-0.2, 0.4), cfg)
    rcfg = SignedConfig(rect, [(0.4, 0.3), (0.7, 0.45)], [1, -1])
    out += [Check(f"rect {c.name}", c.value, c.expected, c.error, c.tolerance)
            for c in derivative_checks(rect, (0.4, 0.3), (0.7, 0.45), rcfg)]
    return out
