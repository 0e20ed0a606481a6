"""Run configuration shared by the command-line drivers."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    surface: str = "right_helicoid"
    alpha: float | None = None
    radius: float | None = None
    u_range: tuple = (-1.5, 1.5)
    v_range: tuple = (-1.2, 1.2)
    u_count: int = 5
    v_count: int = 5
    points: tuple = ()
    n_points: int = 5
    r_grid: tuple = (0.3, 0.7, 1.0, 1.5, 2.5)
    t_grid: tuple = (0.05, 0.5, 2.0)
    density_order: int = 32
    density_method: str = "refine"
    density_tol: float = 1e-9
    invariant_order: int = 6
    heat_nodes: int = 8
    heat_tol: float = 1e-6
    symmetry_tol: float = 1e-12
    n_random: int = 1000
    format: str = "csv"
    output: str | None = None
    threads: int | None = None
    seed: int = 0

    def __post_init__(self):
        for name in ("u_range", "v_range", "points", "r_grid", "t_grid"):
            val = getattr(self, name)
            if name == "points":
                setattr(self, name, tuple(tuple(float(c) for c in p) for p in val))
            else:
                setattr(self, name, tuple(float(c) for c in val))
        self.validate()

    def validate(self):
        for name in ("density_tol", "heat_tol", "symmetry_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not self.r_grid or not self.t_grid:
            raise ConfigError("r and t grids must be non-empty")
        if any(r <= 0 for r in self.r_grid):
            raise ConfigError("radii must be positive")
        if any(t <= 0 for t in self.t_grid):
            raise ConfigError("times must be positive")
        if self.u_count < 1 or self.v_count < 1 or self.n_points < 1:
            raise ConfigError("grid counts must be at least 1")
        if len(self.u_range) != 2 or len(self.v_range) != 2:
            raise ConfigError("ranges are (low, high) pairs")
        if any(len(p) != 2 for p in self.points):
            raise ConfigError("points are (u, v) pairs")
        if self.alpha is not None and not self.alpha > 0:
            raise ConfigError("alpha must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.density_method not in ("refine", "classify"):
            raise ConfigError("density method must be refine or classify")
        if self.density_order < 2 or self.invariant_order < 4 or self.heat_nodes < 2:
            raise ConfigError("quadrature orders are too small")

    def to_dict(self):
        d = dataclasses.asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = [list(p) if isinstance(p, tuple) else p for p in v]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**d)

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from None

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def replace(self, **changes):
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    def digest(self):
        """Hash of the settings that affect results (output location excluded)."""
        d = self.to_dict()
        d.pop("output")
        d.pop("threads")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]
