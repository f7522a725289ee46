"""Run configuration: defaults, YAML round trip, validation.

The defaults reproduce the reference benchmark setup: a 180 x 180
angular grid over [-90, 90] degrees on both axes, a 32 x 32 selectable
port lattice at quarter-wavelength spacing with a half-wavelength
minimum selection distance, a 16 x 16 fixed reference array at
half-wavelength spacing, 256 active ports, flat-top target region
azimuth [30, 60] x elevation [0, 30] degrees, index-linear phase slope
0.1, residual coefficient -0.01, and 50 refinement iterations.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import yaml

from .geometry import AngularGrid, PortGrid, build_angular_grid, build_port_grid
from .patterns import TargetRegion
from .steering import DEFAULT_DENSE_CAP, VMode

SCHEMES = ("fixed", "fixed-phaseopt", "fluid-phaseopt")

_CHOICES = {
    "vmode": ("coupled", "decoupled"),
    "storage": ("factored", "dense"),
    "block_mode": ("centered", "corner"),
    "residual_update": ("unit-beam", "least-squares"),
    "phase_basis": ("index", "radian"),
}


class ConfigError(ValueError):
    """Configuration file or override is invalid."""


@dataclass(frozen=True)
class RunConfig:
    """Complete declarative description of one synthesis run."""

    num_azimuth: int = 180
    num_elevation: int = 180
    port_rows: int = 32
    port_cols: int = 32
    port_spacing: float = 0.25
    min_spacing: float = 0.5
    wavelength: float = 1.0
    fixed_array_size: int = 16
    region_azimuth_deg: tuple[float, float] = (30.0, 60.0)
    region_elevation_deg: tuple[float, float] = (0.0, 30.0)
    phase_slope: float = 0.1
    phase_basis: str = "index"
    num_active: int = 256
    residual_coef: float = -0.01
    phase_iterations: int = 50
    phase_tol: float | None = None
    vmode: str = "decoupled"
    storage: str = "factored"
    block_mode: str = "centered"
    residual_update: str = "unit-beam"
    column_normalize: bool = True
    guard_cells: int = 3
    xsec_elevation_deg: float = 20.0
    xsec_azimuth_deg: float = 55.0
    scheme: str | None = None
    output_root: str | None = None
    max_dense_bytes: int = DEFAULT_DENSE_CAP

    # -- derived objects -------------------------------------------------

    def angular_grid(self) -> AngularGrid:
        return build_angular_grid(self.num_azimuth, self.num_elevation)

    def fluid_grid(self) -> PortGrid:
        """Selectable port lattice."""
        return build_port_grid(self.port_rows, self.port_cols,
                               self.port_spacing, self.wavelength)

    def fixed_grid(self) -> PortGrid:
        """Reference array: fixed_array_size squared at half wavelength."""
        return build_port_grid(self.fixed_array_size, self.fixed_array_size,
                               self.wavelength / 2.0, self.wavelength)

    def region(self) -> TargetRegion:
        return TargetRegion(
            azimuth_lo=math.radians(self.region_azimuth_deg[0]),
            azimuth_hi=math.radians(self.region_azimuth_deg[1]),
            elevation_lo=math.radians(self.region_elevation_deg[0]),
            elevation_hi=math.radians(self.region_elevation_deg[1]))

    def vmode_enum(self) -> VMode:
        return VMode.from_name(self.vmode)

    # -- mapping round trip ----------------------------------------------

    def to_mapping(self) -> dict:
        out = dataclasses.asdict(self)
        out["region_azimuth_deg"] = list(self.region_azimuth_deg)
        out["region_elevation_deg"] = list(self.region_elevation_deg)
        return out


def _check_int(value, name, minimum) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


def _check_float(value, name, *, minimum=None, exclusive=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value}")
    if minimum is not None:
        if exclusive and value <= minimum:
            raise ConfigError(f"{name} must be > {minimum}, got {value}")
        if not exclusive and value < minimum:
            raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


def _check_pair(value, name) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{name} must be a [lo, hi] pair, got {value!r}")
    lo = _check_float(value[0], f"{name}[0]")
    hi = _check_float(value[1], f"{name}[1]")
    if not (-90.0 <= lo < hi <= 90.0):
        raise ConfigError(f"{name} must satisfy -90 <= lo < hi <= 90, got {value!r}")
    return (lo, hi)


def from_mapping(mapping) -> RunConfig:
    """Validated RunConfig from a plain mapping; unknown keys are errors."""
    if mapping is None:
        mapping = {}
    if not isinstance(mapping, dict):
        raise ConfigError(f"config must be a mapping, got {type(mapping).__name__}")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(mapping) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged = RunConfig().to_mapping()
    merged.update(mapping)

    merged["num_azimuth"] = _check_int(merged["num_azimuth"], "num_azimuth", 2)
    merged["num_elevation"] = _check_int(merged["num_elevation"], "num_elevation", 2)
    merged["port_rows"] = _check_int(merged["port_rows"], "port_rows", 1)
    merged["port_cols"] = _check_int(merged["port_cols"], "port_cols", 1)
    merged["fixed_array_size"] = _check_int(merged["fixed_array_size"], "fixed_array_size", 1)
    merged["num_active"] = _check_int(merged["num_active"], "num_active", 1)
    merged["phase_iterations"] = _check_int(merged["phase_iterations"], "phase_iterations", 0)
    merged["guard_cells"] = _check_int(merged["guard_cells"], "guard_cells", 0)
    merged["max_dense_bytes"] = _check_int(merged["max_dense_bytes"], "max_dense_bytes", 1)
    merged["port_spacing"] = _check_float(merged["port_spacing"], "port_spacing",
                                          minimum=0.0, exclusive=True)
    merged["wavelength"] = _check_float(merged["wavelength"], "wavelength",
                                        minimum=0.0, exclusive=True)
    merged["min_spacing"] = _check_float(merged["min_spacing"], "min_spacing", minimum=0.0)
    merged["residual_coef"] = _check_float(merged["residual_coef"], "residual_coef")
    merged["phase_slope"] = _check_float(merged["phase_slope"], "phase_slope")
    if merged["phase_tol"] is not None:
        merged["phase_tol"] = _check_float(merged["phase_tol"], "phase_tol",
                                           minimum=0.0, exclusive=True)
    merged["region_azimuth_deg"] = _check_pair(merged["region_azimuth_deg"],
                                               "region_azimuth_deg")
    merged["region_elevation_deg"] = _check_pair(merged["region_elevation_deg"],
                                                 "region_elevation_deg")
    for name, choices in _CHOICES.items():
        if merged[name] not in choices:
            raise ConfigError(f"{name} must be one of {choices}, got {merged[name]!r}")
    if not isinstance(merged["column_normalize"], bool):
        raise ConfigError(f"column_normalize must be true or false, "
                          f"got {merged['column_normalize']!r}")
    for name in ("xsec_elevation_deg", "xsec_azimuth_deg"):
        v = _check_float(merged[name], name)
        if not (-90.0 <= v <= 90.0):
            raise ConfigError(f"{name} must lie in [-90, 90], got {v}")
        merged[name] = v
    if merged["scheme"] is not None and merged["scheme"] not in SCHEMES:
        raise ConfigError(f"scheme must be one of {SCHEMES}, got {merged['scheme']!r}")
    if merged["output_root"] is not None and not isinstance(merged["output_root"], str):
        raise ConfigError("output_root must be a string path")

    needs_square = merged["scheme"] != "fixed"
    if needs_square:
        side = math.isqrt(merged["num_active"])
        if side * side != merged["num_active"]:
            raise ConfigError(
                f"num_active must be a perfect square for phase refinement, "
                f"got {merged['num_active']}")
        if side > min(merged["num_azimuth"], merged["num_elevation"]):
            raise ConfigError("sqrt(num_active) exceeds the angular grid")
    if merged["num_active"] > merged["port_rows"] * merged["port_cols"]:
        raise ConfigError("num_active exceeds the number of candidate ports")
    return RunConfig(**merged)


def load_config(path) -> RunConfig:
    """Read a YAML config file; missing keys fall back to defaults."""
    try:
        with open(path) as handle:
            data = yaml.safe_load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return from_mapping(data)


def save_config(config: RunConfig, path) -> None:
    """Write a config as YAML; load_config(save_config(c)) == c."""
    with open(path, "w", newline="\n") as handle:
        yaml.safe_dump(config.to_mapping(), handle, sort_keys=True,
                       default_flow_style=False)


def with_overrides(config: RunConfig, overrides: dict) -> RunConfig:
    """New config with the given fields replaced, re-validated."""
    mapping = config.to_mapping()
    for key, value in overrides.items():
        if key not in mapping:
            raise ConfigError(f"unknown config key {key!r}")
        mapping[key] = value
    return from_mapping(mapping)
