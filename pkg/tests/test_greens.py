import numpy as np
import pytest

from sinhlab import greens
from sinhlab.domain import DomainSpec
from sinhlab.errors import ConfigError, MeshTooCoarse, OutOfDomain, Singularity

DISC = DomainSpec.unit_disc()
RECT = DomainSpec.rectangle(1.0, 1.0)


def test_disc_center_value():
    assert greens.green_value(DISC, (0, 0), (0.5, 0)) == pytest.approx(np.log(2) / (2 * np.pi), rel=1e-12)


def test_symmetry_disc_and_rectangle():
    for dom, x, y in ((DISC, (0.3, 0.1), (-0.2, 0.4)), (RECT, (0.2, 0.7), (0.6, 0.3))):
        assert greens.green_value(dom, x, y) == pytest.approx(greens.green_value(dom, y, x), abs=1e-12)
        assert greens.green_regular_part(dom, x, y) == pytest.approx(greens.green_regular_part(dom, y, x), abs=1e-12)


def test_regular_part_closed_form():
    assert greens.green_regular_part(DISC, (0, 0), (0.4, -0.3)) == pytest.approx(0.0, abs=1e-15)
    expected = -np.log(1 - 0.81) / (2 * np.pi)
    assert greens.green_regular_part(DISC, (0.9, 0), (0.9, 0)) == pytest.approx(expected, rel=1e-12)
    assert greens.robin_eval(DISC, (0.9, 0)).value == pytest.approx(expected, rel=1e-12)


def test_robin_at_center():
    r = greens.robin_eval(DISC, (0, 0))
    assert r.value == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(r.grad, 0, atol=1e-14)
    np.testing.assert_allclose(r.hess, np.eye(2) / np.pi, rtol=1e-12)


def test_boundary_vanishing():
    y = (0.2, -0.3)
    for t in np.linspace(0, 2 * np.pi, 7):
        x = (1 - 1e-6) * np.array([np.cos(t), np.sin(t)])
        assert abs(greens.green_value(DISC, x, y)) <= 1e-4
    assert abs(greens.green_value(RECT, (1 - 1e-6, 0.4), (0.5, 0.5))) <= 1e-4


def test_scaled_disc_matches_unit_disc():
    c = np.array([1.0, -1.0])
    big = DomainSpec.disc(2.0, tuple(c))
    x, y = np.array([0.3, 0.1]), np.array([-0.2, 0.4])
    # G is invariant under similarity maps of the domain
    assert greens.green_value(big, c + 2 * x, c + 2 * y) == pytest.approx(greens.green_value(DISC, x, y), rel=1e-12)


def test_wide_rectangle_uses_swap():
    wide = DomainSpec.rectangle(2.0, 1.0)
    tall = DomainSpec.rectangle(1.0, 2.0)
    assert greens.green_value(wide, (0.3, 0.4), (1.2, 0.7)) == pytest.approx(
        greens.green_value(tall, (0.4, 0.3), (0.7, 1.2)), rel=1e-12)


def test_derivative_swap_and_transpose():
    k = greens.green_derivatives(DISC, (0.3, 0.1), (-0.2, 0.4))
    ks = greens.green_derivatives(DISC, (-0.2, 0.4), (0.3, 0.1))
    np.testing.assert_allclose(k.grad_x, ks.grad_y, atol=1e-13)
    np.testing.assert_allclose(k.hess_xy, ks.hess_xy.T, atol=1e-12)


def test_errors():
    with pytest.raises(Singularity):
        greens.green_value(DISC, (0.1, 0.1), (0.1, 0.1))
    with pytest.raises(OutOfDomain):
        greens.green_value(DISC, (1.0, 0.0), (0.1, 0.1))
    with pytest.raises(OutOfDomain):
        greens.robin_eval(RECT, (1.2, 0.5))
    with pytest.raises(MeshTooCoarse):
        greens.discrete_green_crosscheck(DISC, 1 / 16, (0, 0), (0.05, 0))
    with pytest.raises(ConfigError):
        DomainSpec.from_dict({"kind": "disc", "radius": 1, "colour": "red"})


def test_discrete_green_rectangle_and_rate():
    x, y = (0.5, 0.5), (0.25, 0.5)
    exact = greens.green_value(RECT, x, y)
    e1 = abs(greens.discrete_green_crosscheck(RECT, 1 / 32, x, y) - exact)
    e2 = abs(greens.discrete_green_crosscheck(RECT, 1 / 64, x, y) - exact)
    assert e2 / exact <= 1e-3
    assert 3.0 <= e1 / e2 <= 5.0
