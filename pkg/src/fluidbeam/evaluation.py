"""Beam quality metrics, cross-sections, and result exporters.

Comparisons between synthesis schemes happen on peak-normalized
magnitude patterns: raw synthesized fields differ by orders of magnitude
in scale depending on how many ports radiate, so every metric here
except ``peak_gain_db`` is computed after dividing by the pattern's own
peak magnitude.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, fields

import numpy as np

from .geometry import PortGrid
from .patterns import BeamPattern, DegenerateBeamError, TargetRegion, region_mask

DB_FLOOR = -80.0
"""Default floor applied to log-scale exports, in dB."""

_FLOAT_FMT = "%.12g"


@dataclass(frozen=True)
class BeamMetrics:
    """Scalar quality summary of one synthesized beam.

    reconstruction_error
        Squared error between the normalized desired magnitude and the
        normalized synthesized magnitude, summed over the grid.
    mainlobe_mean_gain
        Mean normalized magnitude over the target region.
    peak_sidelobe
        Largest normalized magnitude outside the target region dilated
        by the guard band; 0 when the guard band covers the whole grid.
    peak_gain_db
        20 log10 of the raw (unnormalized) peak magnitude.
    """

    reconstruction_error: float
    mainlobe_mean_gain: float
    peak_sidelobe: float
    peak_gain_db: float


@dataclass(frozen=True)
class ComparisonTable:
    """Per-label metrics plus pairwise metric differences."""

    rows: tuple[tuple[str, BeamMetrics], ...]
    deltas: tuple[tuple[str, str, BeamMetrics], ...]

    def metrics(self, label: str) -> BeamMetrics:
        for name, row in self.rows:
            if name == label:
                return row
        raise KeyError(label)

    def as_text(self) -> str:
        names = [f.name for f in fields(BeamMetrics)]
        width = max(len(label) for label, _ in self.rows)
        width = max(width, max(len(a) + len(b) + 3 for a, b, _ in self.deltas)
                    if self.deltas else 0)
        lines = ["  ".join(["label".ljust(width)] + [n.rjust(21) for n in names])]
        for label, row in self.rows:
            cells = [f"{getattr(row, n):21.12g}" for n in names]
            lines.append("  ".join([label.ljust(width)] + cells))
        for a, b, row in self.deltas:
            cells = [f"{getattr(row, n):21.12g}" for n in names]
            lines.append("  ".join([f"{a} - {b}".ljust(width)] + cells))
        return "\n".join(lines)


def reconstruction_error(desired: BeamPattern, actual: BeamPattern) -> float:
    """Summed squared deviation between two patterns on one grid."""
    if not desired.grid.matches(actual.grid):
        raise ValueError("patterns live on different angular grids")
    diff = desired.values - actual.values
    return float(np.sum(diff.real ** 2 + diff.imag ** 2))


def normalize_beam(pattern: BeamPattern) -> np.ndarray:
    """Magnitude pattern scaled to unit peak.

    Raises DegenerateBeamError for an identically zero pattern.
    """
    mag = pattern.magnitude
    peak = float(mag.max())
    if peak == 0.0:
        raise DegenerateBeamError("cannot normalize an identically zero beam")
    return mag / peak


def to_db(normalized, floor_db: float = DB_FLOOR) -> np.ndarray:
    """Log-scale view of a normalized magnitude array, floored at floor_db."""
    normalized = np.asarray(normalized, dtype=float)
    floor = 10.0 ** (float(floor_db) / 20.0)
    return 20.0 * np.log10(np.maximum(normalized, floor))


def cross_section(pattern: BeamPattern, fixed_axis: str, angle: float
                  ) -> tuple[np.ndarray, np.ndarray]:
    """Normalized magnitude along one grid line.

    Parameters
    ----------
    fixed_axis : {"elevation", "azimuth"}
        Which angle is held fixed.  "elevation" cuts along azimuth at the
        grid line nearest ``angle``, "azimuth" cuts along elevation.
    angle : float
        The fixed angle in radians; must lie within the sampled range.
        Ties between two equally near grid lines go to the lower index.

    Returns
    -------
    (angles_deg, values)
        The varying angle in degrees and the normalized magnitude.
    """
    angle = float(angle)
    grid = pattern.grid
    if fixed_axis not in ("elevation", "azimuth"):
        raise ValueError(f"unknown fixed_axis {fixed_axis!r}")
    axis_samples = grid.elevation if fixed_axis == "elevation" else grid.azimuth
    if angle < axis_samples[0] or angle > axis_samples[-1]:
        raise ValueError(f"{fixed_axis} angle {angle} outside sampled range")
    norm = normalize_beam(pattern)
    line = int(np.argmin(np.abs(axis_samples - angle)))
    if fixed_axis == "elevation":
        return np.degrees(grid.azimuth).copy(), norm[:, line].copy()
    return np.degrees(grid.elevation).copy(), norm[line, :].copy()


def dilate_mask(mask: np.ndarray, cells: int) -> np.ndarray:
    """Chebyshev dilation of a boolean mask by ``cells`` grid cells."""
    cells = int(cells)
    if cells < 0:
        raise ValueError("guard band must be >= 0 cells")
    if cells == 0:
        return mask.copy()
    out = np.zeros_like(mask)
    rows, cols = mask.shape
    for dr in range(-cells, cells + 1):
        rs = slice(max(dr, 0), rows + min(dr, 0))
        rd = slice(max(-dr, 0), rows + min(-dr, 0))
        for dc in range(-cells, cells + 1):
            cs = slice(max(dc, 0), cols + min(dc, 0))
            cd = slice(max(-dc, 0), cols + min(-dc, 0))
            out[rd, cd] |= mask[rs, cs]
    return out


def compute_metrics(desired: BeamPattern, actual: BeamPattern, region: TargetRegion,
                    guard_cells: int = 3) -> BeamMetrics:
    """Evaluate one synthesized beam against the desired pattern."""
    if not desired.grid.matches(actual.grid):
        raise ValueError("patterns live on different angular grids")
    grid = desired.grid
    desired_norm = normalize_beam(desired)
    actual_norm = normalize_beam(actual)
    mask = region_mask(grid, region)
    if not mask.any():
        raise ValueError("target region contains no grid samples")
    err = float(np.sum((desired_norm - actual_norm) ** 2))
    mainlobe = float(actual_norm[mask].mean())
    guarded = dilate_mask(mask, guard_cells)
    outside = ~guarded
    sidelobe = float(actual_norm[outside].max()) if outside.any() else 0.0
    peak_db = float(20.0 * np.log10(actual.magnitude.max()))
    return BeamMetrics(reconstruction_error=err, mainlobe_mean_gain=mainlobe,
                       peak_sidelobe=sidelobe, peak_gain_db=peak_db)


def compare_configs(desired: BeamPattern, labeled_patterns, region: TargetRegion,
                    guard_cells: int = 3) -> ComparisonTable:
    """Metrics for several labeled beams plus all pairwise differences.

    ``labeled_patterns`` is a sequence of (label, BeamPattern) pairs; the
    delta rows follow the given order, earlier minus later.
    """
    labeled = list(labeled_patterns)
    labels = [label for label, _ in labeled]
    if len(set(labels)) != len(labels):
        raise ValueError("labels must be unique")
    rows = []
    for label, pattern in labeled:
        rows.append((label, compute_metrics(desired, pattern, region, guard_cells)))
    names = [f.name for f in fields(BeamMetrics)]
    deltas = []
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            la, ma = rows[i]
            lb, mb = rows[j]
            diff = BeamMetrics(**{n: getattr(ma, n) - getattr(mb, n) for n in names})
            deltas.append((la, lb, diff))
    return ComparisonTable(rows=tuple(rows), deltas=tuple(deltas))


def write_heatmap_csv(path, normalized: np.ndarray, scale: str = "linear",
                      floor_db: float = DB_FLOOR) -> None:
    """P x Q magnitude matrix as CSV, one azimuth sample per row."""
    if scale == "db":
        normalized = to_db(normalized, floor_db)
    elif scale != "linear":
        raise ValueError(f"unknown scale {scale!r}")
    np.savetxt(path, np.asarray(normalized, dtype=float),
               fmt=_FLOAT_FMT, delimiter=",", newline="\n")


def write_phase_map_csv(path, pattern: BeamPattern) -> None:
    """P x Q phase matrix in radians as CSV."""
    np.savetxt(path, np.angle(pattern.values),
               fmt=_FLOAT_FMT, delimiter=",", newline="\n")


def write_cross_section_csv(path, angles_deg: np.ndarray, series: dict) -> None:
    """Cross-section CSV: angle_deg column plus one column per label."""
    labels = list(series)
    with open(path, "w", newline="\n") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["angle_deg"] + labels)
        columns = [np.asarray(series[label], dtype=float) for label in labels]
        for i, angle in enumerate(np.asarray(angles_deg, dtype=float)):
            writer.writerow([_FLOAT_FMT % angle] + [_FLOAT_FMT % col[i] for col in columns])


def write_metrics_csv(path, table: ComparisonTable) -> None:
    """Metrics table as CSV, delta rows labeled 'a - b'."""
    names = [f.name for f in fields(BeamMetrics)]
    with open(path, "w", newline="\n") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["label"] + names)
        for label, row in table.rows:
            writer.writerow([label] + [_FLOAT_FMT % getattr(row, n) for n in names])
        for a, b, row in table.deltas:
            writer.writerow([f"{a} - {b}"] + [_FLOAT_FMT % getattr(row, n) for n in names])


def write_ports_csv(path, grid: PortGrid, support, weights) -> None:
    """Selected ports in pick order with lattice site, position, weight."""
    support = np.asarray(support, dtype=np.intp).ravel()
    weights = np.asarray(weights, dtype=np.complex128).ravel()
    if support.size != weights.size:
        raise ValueError("support and weights must have equal length")
    with open(path, "w", newline="\n") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["step", "port", "row", "col", "x_m", "y_m",
                         "weight_re", "weight_im"])
        for step, (port, weight) in enumerate(zip(support, weights)):
            m, n = grid.port_site(int(port))
            x, y = grid.positions[int(port)]
            writer.writerow([step, int(port), m, n, _FLOAT_FMT % x, _FLOAT_FMT % y,
                             _FLOAT_FMT % weight.real, _FLOAT_FMT % weight.imag])
