"""Desired beam construction and pattern vectorization.

A beam pattern is a complex (P, Q) matrix over an angular grid; entry
(p, q) is the field toward (azimuth_p, elevation_q).  Patterns flatten to
length P*Q vectors in Fortran order, z = q * P + p, matching the global
index convention in :mod:`fluidbeam.geometry`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import HALF_TURN, AngularGrid


class DegenerateRegionError(ValueError):
    """Target region contains no grid samples."""


class DegenerateBeamError(ValueError):
    """Beam is identically zero where a nonzero beam is required."""


@dataclass(frozen=True)
class TargetRegion:
    """Closed angular rectangle [azimuth_lo, azimuth_hi] x [elevation_lo, elevation_hi].

    Bounds are radians and must lie inside [-pi/2, pi/2] with lo < hi on
    both axes.
    """

    azimuth_lo: float
    azimuth_hi: float
    elevation_lo: float
    elevation_hi: float

    def __post_init__(self):
        for name in ("azimuth_lo", "azimuth_hi", "elevation_lo", "elevation_hi"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or abs(v) > HALF_TURN + 1e-12:
                raise ValueError(f"{name} must lie in [-pi/2, pi/2], got {v}")
            object.__setattr__(self, name, v)
        if not (self.azimuth_lo < self.azimuth_hi):
            raise ValueError("require azimuth_lo < azimuth_hi")
        if not (self.elevation_lo < self.elevation_hi):
            raise ValueError("require elevation_lo < elevation_hi")


@dataclass(frozen=True, eq=False)
class BeamPattern:
    """Complex field samples over an angular grid."""

    grid: AngularGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {values.shape} does not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("pattern values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)


def region_mask(grid: AngularGrid, region: TargetRegion) -> np.ndarray:
    """Boolean (P, Q) mask of grid samples inside the closed region."""
    az = (grid.azimuth >= region.azimuth_lo) & (grid.azimuth <= region.azimuth_hi)
    el = (grid.elevation >= region.elevation_lo) & (grid.elevation <= region.elevation_hi)
    return np.outer(az, el)


def make_desired_beam(grid: AngularGrid, region: TargetRegion,
                      phase_slope: float = 0.0, phase_basis: str = "index") -> BeamPattern:
    """Flat-top desired beam: unit magnitude inside the region, zero outside.

    The phase ramp is linear with slope ``phase_slope``:

    * ``phase_basis="index"``: phase = slope * (p + q) in grid indices.
    * ``phase_basis="radian"``: phase = slope * (azimuth_p + elevation_q).

    Raises DegenerateRegionError when no grid sample falls inside the region.
    """
    phase_slope = float(phase_slope)
    if not np.isfinite(phase_slope):
        raise ValueError("phase_slope must be finite")
    if phase_basis not in ("index", "radian"):
        raise ValueError(f"unknown phase_basis {phase_basis!r}")
    mask = region_mask(grid, region)
    if not mask.any():
        raise DegenerateRegionError("target region contains no grid samples")
    if phase_basis == "index":
        ramp = np.add.outer(np.arange(grid.num_azimuth, dtype=float),
                            np.arange(grid.num_elevation, dtype=float))
    else:
        ramp = np.add.outer(grid.azimuth, grid.elevation)
    values = mask * np.exp(1j * phase_slope * ramp)
    return BeamPattern(grid=grid, values=values)


def vectorize(pattern: BeamPattern) -> np.ndarray:
    """Column-stack a pattern into a length P*Q vector, z = q * P + p."""
    return pattern.values.ravel(order="F").copy()


def matricize(vector, grid: AngularGrid) -> BeamPattern:
    """Inverse of :func:`vectorize` for the given grid."""
    vec = np.asarray(vector, dtype=np.complex128).ravel()
    if vec.size != grid.num_directions:
        raise ValueError(
            f"vector length {vec.size} does not match grid size {grid.num_directions}")
    return BeamPattern(grid=grid, values=vec.reshape(grid.shape, order="F"))
