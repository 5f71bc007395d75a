"""Run configuration: YAML file -> validated, frozen dataclasses.

Every section has defaults, so an empty file is a valid configuration. Unknown
keys, wrong types and inconsistent choices raise ConfigError before any
computation starts.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .errors import ConfigError, ModelError
from .thermo import MaterialSet, default_materials, materials_from_spec, materials_to_spec


@dataclass(frozen=True)
class GeometryConfig:
    n: int = 3
    container_radius: float = 2.0
    m: int = 1
    centers: Optional[list] = None
    radius: Optional[float] = 1.0
    mass: Optional[float] = None
    theta: Optional[float] = 1.0
    energy: Optional[float] = None

    def check(self):
        if self.n not in (2, 3):
            raise ConfigError("geometry.n must be 2 or 3")
        if (self.radius is None) == (self.mass is None):
            raise ConfigError("geometry: give exactly one of radius, mass")
        if (self.theta is None) == (self.energy is None):
            raise ConfigError("geometry: give exactly one of theta, energy")
        if self.m < 1:
            raise ConfigError("geometry.m must be >= 1")


@dataclass(frozen=True)
class VariationsConfig:
    lmax: int = 8
    tol: float = 1e-10

    def check(self):
        if self.lmax < 2:
            raise ConfigError("variations.lmax must be >= 2")


@dataclass(frozen=True)
class SpectrumConfig:
    lmax: int = 6
    nodes: int = 48
    lam_min: float = 1e-4
    lam_max: float = 1e3
    lam_points: int = 64
    direct: bool = True

    def check(self):
        if self.lmax < 1 or self.nodes < 8 or self.lam_points < 2:
            raise ConfigError("spectrum: need lmax >= 1, nodes >= 8, lam_points >= 2")
        if not 0 < self.lam_min < self.lam_max:
            raise ConfigError("spectrum: need 0 < lam_min < lam_max")


@dataclass(frozen=True)
class RadialConfig:
    cells: int = 40
    dt: float = 0.05
    steps: int = 2000
    family: str = "cosine"
    amplitude: float = 0.3
    scheme: str = "implicit_euler"
    record_every: int = 10

    def check(self):
        from .dynamics.radial import INITIAL_FAMILIES

        if self.family not in INITIAL_FAMILIES + ("two_constant",):
            raise ConfigError(f"radial.family must be one of {INITIAL_FAMILIES + ('two_constant',)}")
        if self.scheme not in ("implicit_euler", "trapezoidal"):
            raise ConfigError("radial.scheme must be implicit_euler or trapezoidal")
        if self.cells < 2 or self.dt <= 0 or self.steps < 1 or self.record_every < 1:
            raise ConfigError("radial: need cells >= 2, dt > 0, steps >= 1, record_every >= 1")


@dataclass(frozen=True)
class RipeningConfig:
    radii: list = field(default_factory=lambda: [1.01, 0.99])
    T: float = 20.0
    dt: float = 0.05
    r_min: Optional[float] = None

    def check(self):
        if len(self.radii) < 1 or min(self.radii) <= 0:
            raise ConfigError("ripening.radii must be a nonempty list of positive numbers")
        if self.T <= 0 or self.dt <= 0:
            raise ConfigError("ripening: need T > 0 and dt > 0")


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 20240611
    thermo_draws: int = 1000
    equilibrium_draws: int = 100
    lemma_fixtures: int = 1000
    spectral_nodes: list = field(default_factory=lambda: [48, 96])
    radial_steps: int = 10000
    checks: Optional[list] = None

    def check(self):
        if any(k < 8 for k in self.spectral_nodes):
            raise ConfigError("suite.spectral_nodes entries must be >= 8")


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "out"


@dataclass(frozen=True)
class RunConfig:
    materials: Optional[dict] = None
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    variations: VariationsConfig = field(default_factory=VariationsConfig)
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    radial: RadialConfig = field(default_factory=RadialConfig)
    ripening: RipeningConfig = field(default_factory=RipeningConfig)
    suite: SuiteConfig = field(default_factory=SuiteConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def material_set(self) -> MaterialSet:
        if self.materials is None:
            return default_materials()
        return materials_from_spec(self.materials)

    def check(self):
        try:
            self.material_set()
        except ConfigError:
            raise
        except (ModelError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"materials: {exc}") from exc
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if hasattr(value, "check"):
                value.check()

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["materials"] = materials_to_spec(self.material_set())
        return out

    def sha256(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def _coerce(value, hint, where):
    origin = typing.get_origin(hint)
    if origin is typing.Union:
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        if value is None:
            return None
        return _coerce(value, args[0], where)
    if dataclasses.is_dataclass(hint):
        return _build(hint, value, where)
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be true or false")
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer")
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number")
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where} must be a string")
        return value
    if hint is list:
        if not isinstance(value, list):
            raise ConfigError(f"{where} must be a list")
        return value
    if hint is dict:
        if not isinstance(value, dict):
            raise ConfigError(f"{where} must be a mapping")
        return value
    raise ConfigError(f"{where}: unsupported type {hint}")


def _build(cls, data, where: str):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{where or 'config'} must be a mapping")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown key(s) in {where or 'config'}: {sorted(unknown)}")
    kwargs = {k: _coerce(v, hints[k], f"{where}.{k}" if where else k) for k, v in data.items()}
    return cls(**kwargs)


def config_from_dict(data: dict | None) -> RunConfig:
    cfg = _build(RunConfig, data, "")
    cfg.check()
    return cfg


def apply_override(data: dict, assignment: str) -> dict:
    """Apply ``a.b.c=value`` (value parsed as YAML) to a nested dict in place."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not key=value")
    key, raw = assignment.split("=", 1)
    parts = key.strip().split(".")
    if not all(parts):
        raise ConfigError(f"bad override key {key!r}")
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"override {assignment!r}: {exc}") from exc
    node = data
    for p in parts[:-1]:
        child = node.get(p)
        if child is None:
            child = node[p] = {}
        if not isinstance(child, dict):
            raise ConfigError(f"override {key!r}: {p} is not a section")
        node = child
    node[parts[-1]] = value
    return data


def load_config(path: str | Path | None = None, overrides=()) -> RunConfig:
    data = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config root must be a mapping")
    if overrides and data.get("materials") is None and any(o.startswith("materials.") for o in overrides):
        data["materials"] = materials_to_spec(default_materials())
    for o in overrides:
        apply_override(data, o)
    return config_from_dict(data)
