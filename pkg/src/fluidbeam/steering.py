"""Steering dictionary between port positions and sampled directions.

Each dictionary entry has unit modulus:

    D[z, l] = exp(-2j * pi * (u_z * x_l + v_z * y_l))

with direction components (u, v) defined by the v-mode:

* COUPLED:   u = sin(el) * cos(az) / wavelength, v = sin(el) * sin(az) / wavelength
* DECOUPLED: u = sin(el) * cos(az) / wavelength, v = sin(az) / wavelength

DECOUPLED keeps the azimuth response alive on the el = 0 plane (under the
coupled form every direction with el = 0 maps to u = v = 0) and is the
default for broadside experiments.

The dictionary separates over the lattice axes, so besides the dense
(Z, L) matrix a factored storage holds only the (Z, rows) and (Z, cols)
axis factors and contracts them on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .geometry import AngularGrid, PortGrid
from .patterns import BeamPattern

DEFAULT_DENSE_CAP = 256 * 1024 * 1024
"""Default ceiling on dense dictionary storage, in bytes."""

_ENTRY_BYTES = 16  # complex128


class DictionaryCapacityError(ValueError):
    """Requested dictionary storage exceeds the configured memory cap."""


class VMode(Enum):
    """Direction-component convention for the second lattice axis."""

    COUPLED = "coupled"
    DECOUPLED = "decoupled"

    @classmethod
    def from_name(cls, name) -> "VMode":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f"unknown v-mode {name!r}; expected 'coupled' or 'decoupled'")


def direction_components(grid: AngularGrid, vmode: VMode,
                         wavelength: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-direction (u, v) components, flattened with z = q * P + p."""
    vmode = VMode.from_name(vmode)
    wavelength = float(wavelength)
    if not np.isfinite(wavelength) or wavelength <= 0:
        raise ValueError("wavelength must be finite and > 0")
    az = grid.azimuth[:, None]
    el = grid.elevation[None, :]
    u = np.sin(el) * np.cos(az) / wavelength
    if vmode is VMode.COUPLED:
        v = np.sin(el) * np.sin(az) / wavelength
    else:
        v = np.broadcast_to(np.sin(az) / wavelength, u.shape)
    return (np.ascontiguousarray(u.ravel(order="F")),
            np.ascontiguousarray(v.ravel(order="F")))


def steering_entry(x, y, azimuth, elevation, wavelength: float,
                   vmode: VMode = VMode.DECOUPLED):
    """Unit-modulus phase factor from a port at (x, y) toward a direction.

    Vectorized over broadcastable inputs; angles in radians, lengths in
    meters.
    """
    vmode = VMode.from_name(vmode)
    wavelength = float(wavelength)
    if not np.isfinite(wavelength) or wavelength <= 0:
        raise ValueError("wavelength must be finite and > 0")
    u = np.sin(elevation) * np.cos(azimuth) / wavelength
    if vmode is VMode.COUPLED:
        v = np.sin(elevation) * np.sin(azimuth) / wavelength
    else:
        v = np.sin(azimuth) / wavelength
    return np.exp(-2j * np.pi * (np.asarray(u) * x + np.asarray(v) * y))


def storage_footprint(num_directions: int, rows: int, cols: int, storage: str) -> int:
    """Bytes needed to hold the dictionary in the given storage mode."""
    if storage == "dense":
        return num_directions * rows * cols * _ENTRY_BYTES
    if storage == "factored":
        return num_directions * (rows + cols) * _ENTRY_BYTES
    raise ValueError(f"unknown storage mode {storage!r}")


@dataclass(frozen=True, eq=False)
class SteeringDictionary:
    """Steering matrix between a port grid and an angular grid.

    Column l corresponds to lattice site (m, n) = (l % rows, l // rows);
    row z to direction (p, q) = (z % P, z // P).  Every column has
    Euclidean norm sqrt(Z).
    """

    ports: PortGrid
    directions: AngularGrid
    vmode: VMode
    storage: str
    row_factor: np.ndarray = field(repr=False)   # (Z, rows), exp(-2j pi u x_m)
    col_factor: np.ndarray = field(repr=False)   # (Z, cols), exp(-2j pi v y_n)
    dense: np.ndarray | None = field(repr=False, default=None)

    @property
    def num_directions(self) -> int:
        return self.directions.num_directions

    @property
    def num_ports(self) -> int:
        return self.ports.num_ports

    @property
    def column_norm(self) -> float:
        """Norm shared by every column: sqrt(Z)."""
        return float(np.sqrt(self.num_directions))

    def column(self, index: int) -> np.ndarray:
        """Dictionary column for one flat port index, shape (Z,)."""
        m, n = self.ports.port_site(index)
        if self.dense is not None:
            return self.dense[:, index].copy()
        return self.row_factor[:, m] * self.col_factor[:, n]

    def toarray(self) -> np.ndarray:
        """Dense (Z, L) matrix; materializes the factors if needed."""
        if self.dense is not None:
            return self.dense.copy()
        mm = np.arange(self.num_ports) % self.ports.rows
        nn = np.arange(self.num_ports) // self.ports.rows
        return self.row_factor[:, mm] * self.col_factor[:, nn]

    def correlate(self, vec) -> np.ndarray:
        """Adjoint application D^H vec, shape (L,).

        Entry l is the inner product <D_l, vec> = sum_z conj(D[z, l]) vec_z.
        """
        vec = np.asarray(vec, dtype=np.complex128).ravel()
        if vec.size != self.num_directions:
            raise ValueError(
                f"vector length {vec.size} does not match Z = {self.num_directions}")
        if self.dense is not None:
            return self.dense.conj().T @ vec
        # two-stage contraction: fold vec into the column factor, then the row factor
        folded = vec[:, None] * self.col_factor.conj()
        result = self.row_factor.conj().T @ folded
        return result.ravel(order="F")


def build_dictionary(ports: PortGrid, directions: AngularGrid,
                     vmode: VMode = VMode.DECOUPLED, storage: str = "factored",
                     max_dense_bytes: int = DEFAULT_DENSE_CAP) -> SteeringDictionary:
    """Assemble the steering dictionary for a port grid and angular grid.

    Parameters
    ----------
    storage : {"factored", "dense"}
        Factored keeps only the per-axis factors; dense materializes the
        full (Z, L) matrix and is refused above ``max_dense_bytes``.
    """
    vmode = VMode.from_name(vmode)
    if storage not in ("dense", "factored"):
        raise ValueError(f"unknown storage mode {storage!r}")
    footprint = storage_footprint(directions.num_directions, ports.rows, ports.cols, storage)
    if footprint > max_dense_bytes:
        hint = "; retry with storage='factored'" if storage == "dense" else ""
        raise DictionaryCapacityError(
            f"{storage} dictionary needs {footprint} bytes, cap is {max_dense_bytes}{hint}")
    u, v = direction_components(directions, vmode, ports.wavelength)
    x = (np.arange(ports.rows) - (ports.rows - 1) / 2.0) * ports.spacing
    y = (np.arange(ports.cols) - (ports.cols - 1) / 2.0) * ports.spacing
    row_factor = np.exp(-2j * np.pi * np.outer(u, x))
    col_factor = np.exp(-2j * np.pi * np.outer(v, y))
    row_factor.setflags(write=False)
    col_factor.setflags(write=False)
    dense = None
    if storage == "dense":
        mm = np.arange(ports.num_ports) % ports.rows
        nn = np.arange(ports.num_ports) // ports.rows
        dense = row_factor[:, mm] * col_factor[:, nn]
        dense.setflags(write=False)
    return SteeringDictionary(ports=ports, directions=directions, vmode=vmode,
                              storage=storage, row_factor=row_factor,
                              col_factor=col_factor, dense=dense)


def synthesize_beam(dictionary: SteeringDictionary, selection) -> BeamPattern:
    """Beam radiated by the selected ports: y = D[:, support] @ weights.

    ``selection`` is anything with ``support`` and ``weights`` attributes
    (see :class:`fluidbeam.selection.Selection`) or a (support, weights)
    pair.  An empty support yields the zero pattern.
    """
    if hasattr(selection, "support") and hasattr(selection, "weights"):
        support, weights = selection.support, selection.weights
    else:
        support, weights = selection
    support = np.asarray(support, dtype=np.intp).ravel()
    weights = np.asarray(weights, dtype=np.complex128).ravel()
    if support.size != weights.size:
        raise ValueError("support and weights must have equal length")
    if support.size and (support.min() < 0 or support.max() >= dictionary.num_ports):
        raise ValueError("support index outside dictionary")
    if np.unique(support).size != support.size:
        raise ValueError("duplicate indices in support")
    grid = dictionary.directions
    if support.size == 0:
        vec = np.zeros(dictionary.num_directions, dtype=np.complex128)
    elif dictionary.dense is not None:
        vec = dictionary.dense[:, support] @ weights
    else:
        # scatter weights onto the lattice and contract one axis at a time
        lattice = np.zeros((dictionary.ports.rows, dictionary.ports.cols),
                           dtype=np.complex128)
        mm = support % dictionary.ports.rows
        nn = support // dictionary.ports.rows
        lattice[mm, nn] = weights
        partial = dictionary.row_factor @ lattice
        vec = np.einsum("zn,zn->z", partial, dictionary.col_factor)
    return BeamPattern(grid=grid, values=vec.reshape(grid.shape, order="F"))
