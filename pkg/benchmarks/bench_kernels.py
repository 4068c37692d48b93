"""Compare the compiled and NumPy kernel backends on representative inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel is run on identical inputs under both backends; the table lists
the best wall time of ``--repeat`` runs and the max difference relative to
the largest output entry.
"""

import argparse
import timeit

import numpy as np

from sinhlab import _kernels_py
from sinhlab.domain import DomainSpec
from sinhlab.mesh import Refinement, assemble_laplacian, build_mesh

try:
    from sinhlab import _kernels as _compiled
except ImportError:
    _compiled = None


def cases():
    rng = np.random.default_rng(7)
    a, b = 1.0, 0.7
    x = np.column_stack([rng.uniform(0.05, a - 0.05, 2000), rng.uniform(0.05, b - 0.05, 2000)])
    y = np.column_stack([rng.uniform(0.05, a - 0.05, 2000), rng.uniform(0.05, b - 0.05, 2000)])
    mesh = build_mesh(DomainSpec.unit_disc(), 1 / 256, Refinement([(0.0, 0.0)], 1e-3, 1.05))
    nbr, wgt, bdiag = assemble_laplacian(mesh).stencil
    u = np.cos(3 * mesh.points[:, 0]) * np.exp(mesh.points[:, 1])
    px = rng.uniform(-0.7, 0.7, 50000)
    py = rng.uniform(-0.7, 0.7, 50000)
    grid = mesh.to_grid(u)
    return {
        "rect_regular_part (2000 pairs)": lambda k: k.rect_regular_part(x, y, a, b, 1e-13)[0],
        f"apply_stencil ({mesh.n} nodes)": lambda k: k.apply_stencil(u, nbr, wgt, bdiag),
        "tensor_bilinear (50000 probes)": lambda k: k.tensor_bilinear(mesh.xs, mesh.ys, grid, px, py),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled extension not built; only the NumPy backend is available")
    print(f"{'kernel':<36}{'numpy [ms]':>12}{'cython [ms]':>13}{'speedup':>9}{'rel diff':>11}")
    for name, fn in cases().items():
        t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if _compiled is None:
            print(f"{name:<36}{t_py:>12.2f}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(_compiled), number=1, repeat=args.repeat)) * 1e3
        ref = np.asarray(fn(_kernels_py))
        diff = float(np.nanmax(np.abs(ref - np.asarray(fn(_compiled)))) / np.nanmax(np.abs(ref)))
        print(f"{name:<36}{t_py:>12.2f}{t_cy:>13.2f}{t_py / t_cy:>8.1f}x{diff:>11.1e}")


if __name__ == "__main__":
    main()
