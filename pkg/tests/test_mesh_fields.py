import numpy as np
import pytest

from sinhlab import _kernels_py
from sinhlab._core import BACKEND
from sinhlab.domain import DomainSpec
from sinhlab.errors import ResolutionInvalid
from sinhlab.fields import GridField, load_field, read_field_binary
from sinhlab.mesh import Refinement, apply_laplacian, assemble_laplacian, build_mesh
from sinhlab.spectrum import eigenpairs

DISC = DomainSpec.unit_disc()


def test_rectangle_node_count():
    mesh = build_mesh(DomainSpec.rectangle(1.0, 1.0), 1 / 64)
    assert mesh.n == 63 * 63


def test_resolution_errors():
    with pytest.raises(ResolutionInvalid):
        build_mesh(DISC, 0.5)
    with pytest.raises(ResolutionInvalid):
        Refinement([(0, 0)], 0.0)


def test_symmetric_operator():
    lap = assemble_laplacian(build_mesh(DISC, 1 / 16, Refinement([(0.1, 0.0)], 0.01)))
    d = lap.S - lap.S.T
    assert abs(d).max() <= 1e-9 * abs(lap.S).max()


@pytest.mark.parametrize("scheme", ["symmetric", "shortley-weller"])
def test_quadratic_exact_in_interior(scheme):
    # -Laplace(1 - |x|^2) = 4 holds exactly for the Shortley-Weller stencil at every node
    mesh = build_mesh(DISC, 1 / 32, Refinement([(0.0, 0.0)], 0.005))
    u = 1 - np.sum(mesh.points**2, axis=1)
    lap = apply_laplacian(mesh, u, scheme)
    interior = ~mesh.near_boundary()
    np.testing.assert_allclose(lap[interior], 4.0, rtol=1e-8)
    if scheme == "shortley-weller":
        np.testing.assert_allclose(lap, 4.0, rtol=1e-8)


def test_apply_matches_matrix():
    mesh = build_mesh(DISC, 1 / 32, Refinement([(0.2, 0.1)], 0.004))
    u = np.sin(mesh.points[:, 0] * 3) + mesh.points[:, 1] ** 2
    lap = assemble_laplacian(mesh)
    np.testing.assert_allclose(apply_laplacian(mesh, u), lap.A @ u, rtol=1e-10, atol=1e-8)


def test_disc_eigenvalue_second_order():
    errs = []
    for h in (1 / 16, 1 / 32):
        mesh = build_mesh(DISC, h)
        lam = eigenpairs(assemble_laplacian(mesh), GridField(mesh, np.ones(mesh.n)), 1).eigenvalues[0]
        errs.append(abs(lam - 5.783185962946784))
    assert 2.5 <= errs[0] / errs[1] <= 6


def test_graded_mesh_spacing():
    mesh = build_mesh(DISC, 1 / 16, Refinement([(0.0, 0.0)], 1e-3, 1.1))
    assert mesh.h_min == pytest.approx(1e-3, rel=0.2)
    assert np.max(np.diff(mesh.xs)) <= 1 / 16 + 1e-12


def test_interpolation_reproduces_bilinear():
    mesh = build_mesh(DISC, 1 / 32)
    f = lambda p: 2 * p[:, 0] - p[:, 1] + 0.5  # noqa: E731
    pts = np.array([[0.11, -0.23], [0.4, 0.4], [-0.6, 0.05]])
    np.testing.assert_allclose(mesh.interpolate(f(mesh.points), pts), f(pts), atol=1e-12)


def test_field_roundtrip(tmp_path):
    mesh = build_mesh(DISC, 1 / 16, Refinement([(0.1, 0.0)], 0.01))
    u = GridField(mesh, np.cos(mesh.points[:, 0]), "u")
    paths = u.save(tmp_path / "u")
    assert [p.suffix for p in paths] == [".bin", ".json", ".csv"]
    kind, h, pts, vals = read_field_binary(paths[0])
    assert kind == "disc" and h == mesh.h
    np.testing.assert_array_equal(vals, u.values)
    back = load_field(tmp_path / "u")
    np.testing.assert_array_equal(back.values, u.values)
    np.testing.assert_array_equal(back.mesh.points, mesh.points)
    first = paths[2].read_bytes()
    u.save(tmp_path / "u")
    assert paths[2].read_bytes() == first


def test_field_rejects_nonfinite():
    mesh = build_mesh(DISC, 1 / 16)
    vals = np.zeros(mesh.n)
    vals[3] = np.nan
    with pytest.raises(ValueError):
        GridField(mesh, vals)


def test_backends_agree():
    mesh = build_mesh(DISC, 1 / 32, Refinement([(0.0, 0.0)], 0.004))
    nbr, wgt, bdiag = assemble_laplacian(mesh).stencil
    u = np.exp(mesh.points[:, 0]) * np.cos(mesh.points[:, 1])
    a = _kernels_py.apply_stencil(u, nbr, wgt, bdiag)
    b = apply_laplacian(mesh, u)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12 * np.abs(a).max())
    assert BACKEND in ("cython", "python")
