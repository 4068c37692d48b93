"""Experiment configuration: a single JSON document, validated strictly."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .domain import DomainSpec
from .errors import ConfigError

TOLERANCE_KEYS = ("newton", "critical", "eigen")
DEFAULT_TOLERANCES = {"newton": 1e-8, "critical": 1e-10, "eigen": 1e-10}


@dataclass
class ExperimentConfig:
    domain: DomainSpec
    m: int
    signs: list
    seeds: list
    rho_schedule: list
    h: float
    eig_count: int
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_dir: str = "out"
    h_min: float = 2e-3
    growth: float = 1.1
    fine_mesh: bool = True
    convention: str = "bubble"
    scheme: str = "symmetric"
    fit_window: float = 20.0
    profile_radius: float = 40.0

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise ConfigError("m must be a positive integer")
        if len(self.signs) != self.m or any(s not in (-1, 1) for s in self.signs):
            raise ConfigError(f"signs must be {self.m} values in {{-1, +1}}")
        if len(self.seeds) != self.m or any(len(p) != 2 for p in self.seeds):
            raise ConfigError(f"seeds must be {self.m} points")
        sched = [float(r) for r in self.rho_schedule]
        if len(sched) < 1 or any(r <= 0 for r in sched):
            raise ConfigError("rho_schedule must be a non-empty list of positive values")
        if any(b >= a for a, b in zip(sched, sched[1:])):
            raise ConfigError("rho_schedule must be strictly descending")
        if self.eig_count < 4 * self.m + 1:
            raise ConfigError(f"eig_count={self.eig_count} is below 4m+1 = {4 * self.m + 1}")
        unknown = set(self.tolerances) - set(TOLERANCE_KEYS)
        if unknown:
            raise ConfigError(f"unknown tolerance keys: {sorted(unknown)}")
        self.tolerances = {**DEFAULT_TOLERANCES, **self.tolerances}
        if any(not float(v) > 0 for v in self.tolerances.values()):
            raise ConfigError("tolerances must be positive")
        for name in ("h", "h_min", "fit_window", "profile_radius"):
            if not float(getattr(self, name)) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.growth <= 1.0:
            raise ConfigError("growth must exceed 1")
        if self.convention not in ("bubble", "classical"):
            raise ConfigError("convention must be 'bubble' or 'classical'")
        if self.scheme not in ("symmetric", "shortley-weller"):
            raise ConfigError("scheme must be 'symmetric' or 'shortley-weller'")
        if self.profile_radius < self.fit_window:
            raise ConfigError("profile_radius must cover fit_window")
        self.rho_schedule = sched

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        allowed = set(cls.__dataclass_fields__)
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"domain", "m", "signs", "seeds", "rho_schedule", "h", "eig_count"} - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        kw = dict(data)
        kw["domain"] = DomainSpec.from_dict(data["domain"])
        kw["seeds"] = [tuple(float(c) for c in p) for p in data["seeds"]]
        kw["signs"] = [int(s) for s in data["signs"]]
        try:
            return cls(**kw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.to_dict(),
            "m": self.m,
            "signs": list(self.signs),
            "seeds": [list(p) for p in self.seeds],
            "rho_schedule": list(self.rho_schedule),
            "h": self.h,
            "eig_count": self.eig_count,
            "tolerances": dict(self.tolerances),
            "output_dir": self.output_dir,
            "h_min": self.h_min,
            "growth": self.growth,
            "fine_mesh": self.fine_mesh,
            "convention": self.convention,
            "scheme": self.scheme,
            "fit_window": self.fit_window,
            "profile_radius": self.profile_radius,
        }


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return ExperimentConfig.from_dict(data)


def bundled_config(name: str = "disc-m1.json") -> ExperimentConfig:
    from importlib.resources import files

    return ExperimentConfig.from_dict(json.loads(files("sinhlab").joinpath("data", name).read_text()))
