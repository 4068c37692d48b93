import numpy as np
import pytest
from scipy.integrate import quad

from sinhlab import greens
from sinhlab.ansatz import (BubbleParams, approximate_solution, bubble_value, far_field_limit,
                            projected_bubble_value, tau_values)
from sinhlab.domain import DomainSpec
from sinhlab.errors import OutOfDomain, RhoTooLarge, TooCloseToPeak
from sinhlab.hamiltonian import SignedConfig
from sinhlab.mesh import Refinement, build_mesh

DISC = DomainSpec.unit_disc()


def test_tau_center():
    assert tau_values(SignedConfig(DISC, [(0, 0)], [1]))[0] == pytest.approx(8**-0.5, rel=1e-14)


def test_tau_off_center_sign_convention():
    r = greens.robin_eval(DISC, (0.9, 0)).value
    c = SignedConfig(DISC, [(0.9, 0)], [1])
    assert tau_values(c, "classical")[0] == pytest.approx(np.exp(4 * np.pi * r) / np.sqrt(8), rel=1e-12)
    assert tau_values(c)[0] == pytest.approx(np.exp(-4 * np.pi * r) / np.sqrt(8), rel=1e-12)


def test_tau_permutation():
    c = SignedConfig(DISC, [(0.3, 0.1), (-0.2, 0.4), (0.1, -0.5)], [1, -1, 1])
    p = SignedConfig(DISC, c.points[[2, 0, 1]], [1, 1, -1])
    np.testing.assert_allclose(tau_values(p), tau_values(c)[[2, 0, 1]], rtol=1e-13)


def test_bubble_peak_and_pde():
    p = BubbleParams(0.4, (0.1, 0.2), 0.3)
    assert bubble_value(p, (0.1, 0.2)) == pytest.approx(np.log(8 / (0.16 * 0.3**4)), rel=1e-13)
    x = np.array([0.2, 0.2])
    for h in (1e-3,):
        st = np.array([x + [h, 0], x - [h, 0], x + [0, h], x - [0, h]])
        lap = (4 * bubble_value(p, x) - np.sum(bubble_value(p, st))) / h**2
        assert lap == pytest.approx(p.rho**2 * np.exp(bubble_value(p, x)), rel=1e-5)


def test_bubble_mass():
    t, rho = 0.35, 0.1
    mass, _ = quad(lambda r: 2 * np.pi * r * 8 * t**2 * rho**2 / (t**2 * rho**2 + r**2) ** 2, 0, np.inf,
                   epsabs=1e-12)
    assert mass == pytest.approx(8 * np.pi, rel=1e-6)


def test_projection_boundary_and_identity():
    p = BubbleParams(8**-0.5, (0.0, 0.0), 0.05)
    x = (1 - 1e-6, 0.0)
    assert abs(projected_bubble_value(p, DISC, x)) <= 4 * p.tau**2 * p.rho**2 + 1e-4
    y = (0.3, -0.2)
    p2 = BubbleParams(0.3, (0.1, 0.1), 0.1)
    h_ours = greens.green_regular_part(DISC, y, (0.1, 0.1))
    lhs = projected_bubble_value(p2, DISC, y)
    assert lhs == pytest.approx(bubble_value(p2, y) - 8 * np.pi * h_ours - np.log(8 * p2.tau**2), rel=1e-13)
    with pytest.raises(OutOfDomain):
        projected_bubble_value(p2, DISC, (1.0, 0.0))


def test_invalid_params():
    with pytest.raises(ValueError):
        BubbleParams(-1.0, (0, 0), 0.1)
    with pytest.raises(ValueError):
        BubbleParams(1.0, (0, 0), 0.1, sign=2)


def test_approximate_solution_far_field_convergence():
    c = SignedConfig(DISC, [(0.0, 0.0)], [1])
    mesh = build_mesh(DISC, 1 / 32, Refinement([(0, 0)], 0.005))
    mask = np.hypot(*mesh.points.T) >= 0.25
    far = np.array([far_field_limit(c, p) for p in mesh.points[mask][::7]])
    errs = []
    for rho in (0.2, 0.1, 0.05):
        u = approximate_solution(c, rho, mesh)
        errs.append(np.max(np.abs(u.values[mask][::7] - far)))
    assert errs[0] > errs[1] > errs[2]
    with pytest.raises(RhoTooLarge):
        approximate_solution(c, 0.5, mesh)
    with pytest.raises(TooCloseToPeak):
        far_field_limit(c, (0.05, 0.0))
