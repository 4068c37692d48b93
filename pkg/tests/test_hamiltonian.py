import numpy as np
import pytest

from sinhlab import greens
from sinhlab.domain import DomainSpec
from sinhlab.errors import LeftDomain, NoConvergence, OutOfDomain, PointsTooClose
from sinhlab.hamiltonian import (SignedConfig, classify, find_critical_point, hamiltonian_derivatives,
                                 hamiltonian_value, scaled_hessian_spectrum)

DISC = DomainSpec.unit_disc()


def test_value_examples():
    assert hamiltonian_value(SignedConfig(DISC, [(0, 0)], [1])) == 0.0
    r09 = greens.robin_eval(DISC, (0.9, 0)).value
    assert hamiltonian_value(SignedConfig(DISC, [(0.9, 0)], [1]), "classical") == pytest.approx(0.5 * r09)
    assert hamiltonian_value(SignedConfig(DISC, [(0.9, 0)], [1])) == pytest.approx(-0.5 * r09)
    dip = SignedConfig(DISC, [(0.3, 0), (-0.3, 0)], [1, -1])
    r = greens.robin_eval(DISC, (0.3, 0)).value
    g = greens.green_value(DISC, (0.3, 0), (-0.3, 0))
    assert hamiltonian_value(dip, "classical") == pytest.approx(r - g, rel=1e-12)
    assert hamiltonian_value(dip) == pytest.approx(-r - g, rel=1e-12)


def test_symmetries():
    c = SignedConfig(DISC, [(0.3, 0.1), (-0.2, 0.4), (0.1, -0.5)], [1, -1, 1])
    perm = SignedConfig(DISC, c.points[[2, 0, 1]], [1, 1, -1])
    flip = SignedConfig(DISC, c.points, [-1, 1, -1])
    v = hamiltonian_value(c)
    assert hamiltonian_value(perm) == pytest.approx(v, rel=1e-13)
    assert hamiltonian_value(flip) == pytest.approx(v, rel=1e-13)


def test_dipole_gradient_y_components_vanish():
    g, _ = hamiltonian_derivatives(SignedConfig(DISC, [(0.35, 0), (-0.35, 0)], [1, -1]))
    np.testing.assert_allclose(g[2:], 0, atol=1e-14)


def test_center_hessian_both_conventions():
    c = SignedConfig(DISC, [(0, 0)], [1])
    _, H = hamiltonian_derivatives(c, "classical")
    np.testing.assert_allclose(H, np.eye(2) / (2 * np.pi), rtol=1e-12)
    _, H = hamiltonian_derivatives(c)
    np.testing.assert_allclose(H, -np.eye(2) / (2 * np.pi), rtol=1e-12)


def test_critical_point_m1():
    seed = SignedConfig(DISC, [(0.2, 0.1)], [1])
    res = find_critical_point(seed, 1e-10, "classical")
    np.testing.assert_allclose(res.config.points, 0, atol=1e-10)
    assert res.classification == "min" and res.negative_count == 0
    res = find_critical_point(seed)
    assert res.classification == "max" and res.negative_count == 2


def test_critical_point_dipole_matches_scan():
    res = find_critical_point(SignedConfig(DISC, [(0.4, 0), (-0.4, 0)], [1, -1]))
    d = res.config.points[0, 0]
    assert res.grad_norm <= 1e-10
    np.testing.assert_allclose(res.config.points[1], [-d, 0], atol=1e-10)
    ds = np.linspace(0.3, 0.7, 4001)
    vals = [hamiltonian_value(SignedConfig(DISC, [(s, 0), (-s, 0)], [1, -1])) for s in ds]
    assert abs(ds[int(np.argmax(vals))] - d) <= 2e-4
    # rotation of the pair is a zero mode of the Hessian
    assert res.classification == "degenerate"


def test_errors():
    with pytest.raises(PointsTooClose):
        SignedConfig(DISC, [(0.1, 0.1), (0.1, 0.1)], [1, -1])
    with pytest.raises(OutOfDomain):
        SignedConfig(DISC, [(1.1, 0)], [1])
    with pytest.raises((NoConvergence, LeftDomain)):
        find_critical_point(SignedConfig(DISC, [(0.4, 0), (-0.4, 0)], [1, -1]), convention="classical")


def test_scaled_hessian():
    sh = scaled_hessian_spectrum(SignedConfig(DISC, [(0, 0)], [1]), 0.1, "classical")
    np.testing.assert_allclose(sh.etas, 1 / (16 * np.pi), rtol=1e-12)
    np.testing.assert_allclose(sh.mu_pred, 1 - 0.001875, rtol=1e-12)


def test_inertia_matches():
    c = SignedConfig(DISC, [(0.3, 0.1), (-0.2, 0.4)], [1, -1])
    _, H = hamiltonian_derivatives(c)
    sh = scaled_hessian_spectrum(c)
    assert np.sum(sh.etas < 0) == np.sum(np.linalg.eigvalsh(H) < 0)


def test_classify_bands():
    assert classify(np.diag([1.0, 2.0]))[0] == "min"
    assert classify(np.diag([-1.0, -2.0]))[0] == "max"
    assert classify(np.diag([-1.0, 2.0]))[0] == "saddle"
    assert classify(np.diag([1e-12, 2.0]))[0] == "degenerate"
