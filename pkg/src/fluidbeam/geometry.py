"""Port lattices and angular sampling grids.

Index conventions used throughout the package:

* A port grid has ``rows`` positions along x (index m) and ``cols``
  positions along y (index n).  The flat port index is ``l = n * rows + m``,
  i.e. the x index varies fastest.  This matches Fortran-order flattening
  of any (rows, cols) matrix indexed [m, n].
* An angular grid samples azimuth (index p, P points) and elevation
  (index q, Q points).  The flat direction index is ``z = q * P + p``.
  Beam matrices of shape (P, Q) flatten the same way (order="F").

Both lattices are centered on the origin: position(m, n) =
((m - (rows-1)/2) * spacing, (n - (cols-1)/2) * spacing).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HALF_TURN = np.pi / 2.0
"""Angular grids always span [-pi/2, pi/2] on both axes."""


def _positive_int(value, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return int(value)


def _positive_float(value, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be finite and > 0, got {value}")
    return value


@dataclass(frozen=True, eq=False)
class PortGrid:
    """Regular rectangular lattice of candidate antenna ports.

    Attributes
    ----------
    rows, cols : int
        Lattice extent along x and y.
    spacing : float
        Inter-port spacing in meters.
    wavelength : float
        Carrier wavelength in meters.
    positions : ndarray, shape (rows * cols, 2)
        Port coordinates (x, y) in flat-index order, x index fastest.
    """

    rows: int
    cols: int
    spacing: float
    wavelength: float
    positions: np.ndarray = field(repr=False)

    @property
    def num_ports(self) -> int:
        return self.rows * self.cols

    @property
    def aperture(self) -> tuple[float, float]:
        """Physical extent (x span, y span) in meters."""
        return ((self.rows - 1) * self.spacing, (self.cols - 1) * self.spacing)

    def port_index(self, m: int, n: int) -> int:
        """Flat index of lattice site (m, n)."""
        if not (0 <= m < self.rows and 0 <= n < self.cols):
            raise ValueError(f"lattice site ({m}, {n}) outside {self.rows}x{self.cols} grid")
        return n * self.rows + m

    def port_site(self, index: int) -> tuple[int, int]:
        """Lattice site (m, n) of a flat index."""
        index = int(index)
        if not (0 <= index < self.num_ports):
            raise ValueError(f"port index {index} outside [0, {self.num_ports})")
        return (index % self.rows, index // self.rows)


def build_port_grid(rows: int, cols: int, spacing: float, wavelength: float = 1.0) -> PortGrid:
    """Construct an origin-centered port lattice.

    Parameters
    ----------
    rows, cols : int
        Number of lattice sites along x and y, both >= 1.
    spacing : float
        Inter-port spacing in meters, > 0.
    wavelength : float
        Carrier wavelength in meters, > 0.
    """
    rows = _positive_int(rows, "rows")
    cols = _positive_int(cols, "cols")
    spacing = _positive_float(spacing, "spacing")
    wavelength = _positive_float(wavelength, "wavelength")
    x = (np.arange(rows) - (rows - 1) / 2.0) * spacing
    y = (np.arange(cols) - (cols - 1) / 2.0) * spacing
    # flat order: x index fastest, matching l = n * rows + m
    xx = np.tile(x, cols)
    yy = np.repeat(y, rows)
    positions = np.column_stack([xx, yy])
    positions.setflags(write=False)
    return PortGrid(rows=rows, cols=cols, spacing=spacing, wavelength=wavelength,
                    positions=positions)


@dataclass(frozen=True, eq=False)
class AngularGrid:
    """Uniform angular sampling of [-pi/2, pi/2] x [-pi/2, pi/2].

    ``azimuth`` holds the P azimuth samples, ``elevation`` the Q elevation
    samples; both include the interval endpoints.
    """

    azimuth: np.ndarray = field(repr=False)
    elevation: np.ndarray = field(repr=False)

    @property
    def num_azimuth(self) -> int:
        return self.azimuth.size

    @property
    def num_elevation(self) -> int:
        return self.elevation.size

    @property
    def num_directions(self) -> int:
        return self.azimuth.size * self.elevation.size

    @property
    def shape(self) -> tuple[int, int]:
        return (self.azimuth.size, self.elevation.size)

    def matches(self, other: "AngularGrid") -> bool:
        return (self.shape == other.shape
                and np.array_equal(self.azimuth, other.azimuth)
                and np.array_equal(self.elevation, other.elevation))


def build_angular_grid(num_azimuth: int, num_elevation: int) -> AngularGrid:
    """Uniform inclusive sampling with num_azimuth x num_elevation points.

    Both counts must be >= 2 so the endpoints are distinct samples.
    """
    num_azimuth = _positive_int(num_azimuth, "num_azimuth")
    num_elevation = _positive_int(num_elevation, "num_elevation")
    if num_azimuth < 2 or num_elevation < 2:
        raise ValueError("angular grids need at least 2 samples per axis")
    azimuth = np.linspace(-HALF_TURN, HALF_TURN, num_azimuth)
    elevation = np.linspace(-HALF_TURN, HALF_TURN, num_elevation)
    azimuth.setflags(write=False)
    elevation.setflags(write=False)
    return AngularGrid(azimuth=azimuth, elevation=elevation)


def pairwise_min_distance(grid: PortGrid, indices) -> float:
    """Smallest pairwise Euclidean distance among the given port indices.

    Returns +inf for a single index.  Duplicate indices are rejected.
    """
    idx = np.asarray(indices, dtype=np.intp).ravel()
    if idx.size == 0:
        raise ValueError("need at least one port index")
    if np.any(idx < 0) or np.any(idx >= grid.num_ports):
        raise ValueError("port index outside grid")
    if np.unique(idx).size != idx.size:
        raise ValueError("duplicate port indices")
    if idx.size == 1:
        return float("inf")
    pts = grid.positions[idx]
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    iu = np.triu_indices(idx.size, k=1)
    return float(dist[iu].min())
