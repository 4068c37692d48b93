import numpy as np
import pytest

from sinhlab import asymptotics as asy
from sinhlab import greens
from sinhlab.domain import DomainSpec
from sinhlab.errors import (BallNotAdmissible, IncompleteRuns, InsufficientData, InsufficientSamples, MissingFits,
                            RegimeMismatch)
from sinhlab.fields import GridField
from sinhlab.hamiltonian import SignedConfig
from sinhlab.mesh import build_mesh
from sinhlab.spectrum import RescaledProfile
from sinhlab.verify import analytic_pairs, quadratic_field

DISC = DomainSpec.unit_disc()


def polar_profile(fn, radius=20.0, nr=40, na=64):
    r = radius * np.arange(1, nr + 1) / nr
    th = 2 * np.pi * np.arange(na) / na
    R, T = np.meshgrid(r, th, indexing="ij")
    x = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])
    return RescaledProfile(0, x, fn(x), weights=np.repeat(r, na))


def test_fit_exact_models():
    f = asy.fit_profile(polar_profile(lambda x: np.full(len(x), 0.7)), "constant")
    assert f.parameters[0] == pytest.approx(0.7) and f.relative_residual <= 1e-12
    f = asy.fit_profile(polar_profile(lambda x: 3 * x[:, 0] / (8 + np.sum(x * x, 1))), "dipole")
    np.testing.assert_allclose(f.parameters, [3, 0], atol=1e-10)
    assert f.relative_residual <= 1e-12


def test_fit_model_selection():
    prof = polar_profile(lambda x: (8 - np.sum(x * x, 1)) / (8 + np.sum(x * x, 1)))
    fits = asy.fit_all_models(prof)
    assert fits["radial"].relative_residual < fits["dipole"].relative_residual
    assert all(0 <= f.relative_residual <= 1 for f in fits.values())


def test_fit_needs_samples():
    with pytest.raises(InsufficientSamples):
        asy.fit_profile(polar_profile(lambda x: np.ones(len(x)), nr=5, na=8), "constant")
    with pytest.raises(ValueError):
        asy.fit_profile(polar_profile(lambda x: np.ones(len(x))), "quadrupole")


def test_rate_check_synthetic():
    series = [(r, 1 - 0.1875 * r**2) for r in (0.2, 0.1, 0.05)]
    rc = asy.regime_rate_check(series, 2)
    assert rc.extrapolated == pytest.approx(0.1875, rel=1e-12)
    series = [(r, 1 + 1.5 / (-np.log(r)) + 0.4 / np.log(r) ** 2) for r in (0.2, 0.1, 0.05)]
    rc = asy.regime_rate_check(series, 3)
    assert rc.extrapolated == pytest.approx(1.5, rel=1e-12)
    assert rc.target == 1.5


def test_rate_check_errors():
    with pytest.raises(InsufficientData):
        asy.regime_rate_check([(0.2, 0.1), (0.1, 0.1)], 1)
    with pytest.raises(InsufficientData):
        asy.regime_rate_check([(0.1, 0.1), (0.2, 0.1), (0.05, 0.1)], 1)
    with pytest.raises(RegimeMismatch):
        asy.regime_rate_check([(0.2, 0.9), (0.1, 0.1), (0.05, 0.1)], 1)
    with pytest.raises(RegimeMismatch):
        asy.regime_rate_check([(0.2, 1.1), (0.1, 0.99), (0.05, 1.01)], 3)


def test_far_field_self_consistency():
    c = SignedConfig(DISC, [(0.0, 0.0)], [1])
    mesh = build_mesh(DISC, 1 / 64)
    fit = asy.ProfileFit("radial", (0.8,), 0.0)
    rho = 0.05
    g = greens.green_values(DISC, np.where(np.hypot(*mesh.points.T)[:, None] > 1e-9, mesh.points, 0.5),
                            np.zeros((1, 2)))
    v = GridField(mesh, 2 * np.pi * 0.8 * g / np.log(rho))
    err = asy.far_field_check(v, 1.1, rho, [fit], c, [8**-0.5], 3)
    assert err <= 1e-3
    with pytest.raises(MissingFits):
        asy.far_field_check(v, 1.1, rho, [asy.ProfileFit("dipole", (1.0, 0.0), 0.0)], c, [8**-0.5], 3)


def test_pohozaev_pairs():
    for name, (f, g) in analytic_pairs().items():
        res = asy.pohozaev_check(f, g, (0.0, 0.0), 0.4)
        assert res.gap <= 1e-6, name
    res = asy.pohozaev_check(quadratic_field(), quadratic_field(), (0, 0), 0.5)
    assert res.lhs == pytest.approx(8 * np.pi * 0.5**4, rel=1e-12)


def test_pohozaev_grid_field():
    mesh = build_mesh(DISC, 1 / 64)
    u = GridField(mesh, np.sum(mesh.points**2, axis=1))
    res = asy.pohozaev_check(u, u, (0.0, 0.0), 0.3)
    assert res.gap <= 1e-3


def test_green_boundary_integral():
    c = SignedConfig(DISC, [(0.1, 0.0), (-0.4, 0.2)], [1, -1])
    vals = [asy.green_boundary_integral_check(c, 0, 0, 0, R) for R in (0.2, 0.1, 0.05)]
    target = 1 / (2 * np.pi)
    errs = [abs(v - target) for v in vals]
    assert errs[2] < errs[1] < errs[0]
    a = asy.green_boundary_integral_check(c, 0, 0, 0, 0.01, "gradient")
    b = asy.green_boundary_integral_check(c, 0, 0, 0, 0.01, "normal")
    assert a == pytest.approx(b, rel=0.05)
    with pytest.raises(BallNotAdmissible):
        asy.green_boundary_integral_check(c, 0, 0, 1, 0.4)
    with pytest.raises(BallNotAdmissible):
        asy.green_boundary_integral_check(SignedConfig(DISC, [(0.95, 0)], [1]), 0, 0, 0, 0.1)


def test_hessian_boundary_cases():
    z1, z3 = np.array([0.1, 0.0]), np.array([0.3, 0.2])
    assert abs(asy.hessian_boundary_integral_check(DISC, z1, np.array([0.5, 0]), z3, 0.05, 1, 0)) <= 1e-10
    v = asy.hessian_boundary_integral_check(DISC, z1, z1, z3, 0.05, 1, 0)
    assert v == pytest.approx(greens.green_derivatives(DISC, z1, z3).hess_xy[1, 0], rel=1e-8)
    with pytest.raises(BallNotAdmissible):
        asy.hessian_boundary_integral_check(DISC, z1, np.array([0.12, 0.0]), z3, 0.05, 0, 0)


def test_limit_basis_solves_limit_equation():
    x = np.array([[0.7, -1.3]])
    h = 1e-3
    off = np.array([[h, 0], [-h, 0], [0, h], [0, -h]])
    for col in range(3):
        f = lambda p: asy.limit_basis(p)[:, col]  # noqa: E731
        lap = (np.sum(f(x + off)) - 4 * f(x)[0]) / h**2
        w = (1 + np.sum(x**2) / 8) ** -2
        assert -lap == pytest.approx(w * f(x)[0], rel=1e-5)


def _run(rho, mu):
    return {"rho": rho, "mu": np.asarray(mu), "morse": int(np.sum(np.asarray(mu) < 1)), "ambiguous": [],
            "fits": {}, "far_field": {}}


def test_build_report():
    runs = [_run(r, [0.3 / -np.log(r), 1 + 0.375 * r**2, 1 + 0.375 * r**2, 1 + 0.75 / -np.log(r), 3.0])
            for r in (0.2, 0.1, 0.05)]
    rep = asy.build_report(runs, 1, [-0.02, -0.02], 2)
    assert rep.regimes == {1: 1, 2: 2, 3: 2, 4: 3}
    assert rep.morse == [1, 1, 1] and rep.predicted_morse == 1
    assert rep.rate_checks[2].extrapolated == pytest.approx(-0.375)
    back = asy.AsymptoticReport.from_dict(rep.to_dict())
    assert back.to_dict() == rep.to_dict()
    with pytest.raises(IncompleteRuns):
        asy.build_report(runs[:2] + [{"rho": 0.05, "mu": None}], 1, [0, 0], 0)
