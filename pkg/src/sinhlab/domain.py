"""Model domains: discs and axis-aligned rectangles."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ConfigError, OutOfDomain

# Points closer than this to the boundary are rejected by the kernels.
BOUNDARY_REJECT = 1e-9


@dataclass(frozen=True)
class DomainSpec:
    """A disc ``|x - center| < radius`` or the rectangle ``(0, width) x (0, height)``.

    Use the constructors :meth:`unit_disc`, :meth:`disc` and :meth:`rectangle`.
    """

    kind: str
    radius: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)
    width: float = 1.0
    height: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("disc", "rectangle"):
            raise ConfigError(f"unknown domain kind {self.kind!r}")
        if self.kind == "disc" and not self.radius > 0:
            raise ConfigError("disc radius must be positive")
        if self.kind == "rectangle" and not (self.width > 0 and self.height > 0):
            raise ConfigError("rectangle sides must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @classmethod
    def unit_disc(cls) -> DomainSpec:
        return cls("disc", radius=1.0, center=(0.0, 0.0))

    @classmethod
    def disc(cls, radius: float, center=(0.0, 0.0)) -> DomainSpec:
        return cls("disc", radius=float(radius), center=tuple(center))

    @classmethod
    def rectangle(cls, width: float, height: float) -> DomainSpec:
        return cls("rectangle", width=float(width), height=float(height))

    @property
    def is_disc(self) -> bool:
        return self.kind == "disc"

    @property
    def diameter(self) -> float:
        if self.is_disc:
            return 2.0 * self.radius
        return float(np.hypot(self.width, self.height))

    def bounding_box(self) -> tuple[float, float, float, float]:
        """Return ``(xmin, xmax, ymin, ymax)``."""
        if self.is_disc:
            cx, cy = self.center
            r = self.radius
            return cx - r, cx + r, cy - r, cy + r
        return 0.0, self.width, 0.0, self.height

    def boundary_distance(self, x) -> np.ndarray:
        """Signed distance to the boundary, positive inside. Works on ``(..., 2)`` arrays."""
        x = np.asarray(x, dtype=float)
        if self.is_disc:
            c = np.asarray(self.center)
            return self.radius - np.linalg.norm(x - c, axis=-1)
        return np.minimum.reduce(
            [x[..., 0], self.width - x[..., 0], x[..., 1], self.height - x[..., 1]]
        )

    def contains(self, x, margin: float = 0.0) -> np.ndarray:
        return self.boundary_distance(x) > margin

    def check_interior(self, *points) -> None:
        """Raise :class:`OutOfDomain` unless every point is strictly interior."""
        for p in points:
            d = self.boundary_distance(p)
            if np.any(d <= BOUNDARY_REJECT * max(1.0, self.diameter)):
                raise OutOfDomain(f"point {np.asarray(p).tolist()} is not interior to {self}")

    def to_dict(self) -> dict[str, Any]:
        if self.is_disc:
            return {"kind": "disc", "radius": self.radius, "center": list(self.center)}
        return {"kind": "rectangle", "width": self.width, "height": self.height}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> DomainSpec:
        d = dict(d)
        kind = d.pop("kind", None)
        if kind == "unit-disc":
            if d:
                raise ConfigError(f"unit-disc takes no parameters, got {sorted(d)}")
            return cls.unit_disc()
        if kind == "disc":
            allowed = {"radius", "center"}
        elif kind == "rectangle":
            allowed = {"width", "height"}
        else:
            raise ConfigError(f"unknown domain kind {kind!r}")
        extra = set(d) - allowed
        if extra:
            raise ConfigError(f"unknown domain keys {sorted(extra)}")
        if kind == "disc":
            return cls.disc(d.get("radius", 1.0), tuple(d.get("center", (0.0, 0.0))))
        return cls.rectangle(d["width"], d["height"])
