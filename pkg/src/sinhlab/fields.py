"""Grid fields and their on-disk format.

A field file ``name.bin`` is little-endian::

    magic   4 bytes  b"SLF1"
    kind    uint8    0 = disc, 1 = rectangle
    pad     3 bytes
    h       float64
    n       uint64
    coords  n x 2 float64   (x, y) per node
    values  n float64

``name.json`` is a sidecar with the domain, mesh refinement and field name,
and ``name.csv`` lists ``x,y,value`` per node.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .domain import DomainSpec
from .mesh import Mesh, Refinement, build_mesh

MAGIC = b"SLF1"
_HEADER = struct.Struct("<4sB3xdQ")


@dataclass
class GridField:
    """One value per mesh node."""

    mesh: Mesh
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if self.values.shape != (self.mesh.n,):
            raise ValueError(f"field has {self.values.size} values for {self.mesh.n} nodes")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    def __neg__(self) -> GridField:
        return GridField(self.mesh, -self.values, self.name)

    def replace(self, values, name=None) -> GridField:
        return GridField(self.mesh, values, self.name if name is None else name)

    def sup(self) -> float:
        return float(np.abs(self.values).max())

    def at(self, pts) -> np.ndarray:
        return self.mesh.interpolate(self.values, pts)

    def save(self, stem) -> list[Path]:
        return save_field(self, stem)


def _sibling(stem: Path, suffix: str) -> Path:
    # append rather than replace, so stems like "u_rho0.05" keep their digits
    return stem.with_name(stem.name + suffix)


def save_field(field: GridField, stem) -> list[Path]:
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    mesh = field.mesh
    kind = 0 if mesh.domain.is_disc else 1
    bin_path = _sibling(stem, ".bin")
    with open(bin_path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, kind, mesh.h, mesh.n))
        fh.write(np.ascontiguousarray(mesh.points, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())
    meta = {
        "name": field.name,
        "domain": mesh.domain.to_dict(),
        "h": mesh.h,
        "nodes": mesh.n,
        "refinement": mesh.refinement.to_dict() if mesh.refinement else None,
        "binary": bin_path.name,
        "layout": "magic,kind,h,n,coords[n,2],values[n] little-endian",
    }
    json_path = _sibling(stem, ".json")
    json_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    csv_path = _sibling(stem, ".csv")
    with open(csv_path, "w", newline="") as fh:
        fh.write("x,y,value\n")
        for (x, y), v in zip(mesh.points, field.values):
            fh.write(f"{x:.17g},{y:.17g},{v:.17g}\n")
    return [bin_path, json_path, csv_path]


def read_field_binary(path):
    """Return ``(kind, h, points, values)`` from a ``.bin`` field file."""
    raw = Path(path).read_bytes()
    magic, kind, h, n = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise ValueError(f"{path} is not a field file")
    off = _HEADER.size
    pts = np.frombuffer(raw, dtype="<f8", count=2 * n, offset=off).reshape(n, 2)
    vals = np.frombuffer(raw, dtype="<f8", count=n, offset=off + 16 * n)
    return ("disc" if kind == 0 else "rectangle"), h, pts.copy(), vals.copy()


def load_field(stem) -> GridField:
    """Rebuild the mesh from the sidecar and attach the stored values."""
    stem = Path(stem)
    meta = json.loads(_sibling(stem, ".json").read_text())
    domain = DomainSpec.from_dict(meta["domain"])
    ref = meta.get("refinement")
    refine = Refinement(tuple(map(tuple, ref["centers"])), ref["h_min"], ref["growth"]) if ref else None
    mesh = build_mesh(domain, meta["h"], refine)
    _, _, pts, vals = read_field_binary(_sibling(stem, ".bin"))
    if pts.shape != mesh.points.shape or not np.array_equal(pts, mesh.points):
        raise ValueError("stored node coordinates do not match the rebuilt mesh")
    return GridField(mesh, vals, meta.get("name", ""))
