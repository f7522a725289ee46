"""Greedy port selection with a minimum-spacing constraint.

The selector walks a matching-pursuit loop over the steering dictionary:
pick the port whose column correlates strongest with the current
residual, retire that port and every port closer than the minimum
spacing, then nudge the residual with the unit-norm beam of everything
selected so far,

    e_k = g - coef * y_k / ||y_k||_2

where y_k uses the matched-filter weight of each selected port (the
weights do not change as the support grows).  A negative ``coef`` pushes
the residual away from what the selected set already radiates, steering
later picks toward uncovered directions.  The conventional least-squares
residual update is available behind ``residual_update="least-squares"``.

Ties in the correlation argmax resolve to the lowest port index, so a
run is a pure function of its inputs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .geometry import PortGrid
from .patterns import BeamPattern, DegenerateBeamError
from .steering import SteeringDictionary

logger = logging.getLogger(__name__)


class InfeasibleSpacingError(RuntimeError):
    """Spacing constraint exhausted the candidate pool before the target count."""

    def __init__(self, achieved: int, requested: int, min_spacing: float):
        self.achieved = achieved
        self.requested = requested
        self.min_spacing = min_spacing
        super().__init__(
            f"selected {achieved} of {requested} ports before min spacing "
            f"{min_spacing} exhausted the candidate pool")


@dataclass(frozen=True)
class TraceStep:
    """One selection step: chosen port, winning correlation, residual norm."""

    step: int
    port: int
    correlation: float
    residual_norm: float


@dataclass(frozen=True, eq=False)
class Selection:
    """Ordered result of a selection run."""

    support: np.ndarray          # port indices in pick order
    weights: np.ndarray          # matched-filter weight per selected port
    trace: tuple[TraceStep, ...]

    @property
    def num_selected(self) -> int:
        return self.support.size


def excluded_neighbors(grid: PortGrid, index: int, min_spacing: float) -> np.ndarray:
    """Ports strictly closer than min_spacing to the given port.

    The port itself is not in the result; a port at exactly min_spacing
    stays eligible.  min_spacing = 0 excludes nothing.
    """
    index = int(index)
    if not (0 <= index < grid.num_ports):
        raise ValueError(f"port index {index} outside [0, {grid.num_ports})")
    min_spacing = float(min_spacing)
    if not np.isfinite(min_spacing) or min_spacing < 0:
        raise ValueError("min_spacing must be finite and >= 0")
    diff = grid.positions - grid.positions[index]
    dist_sq = np.einsum("ij,ij->i", diff, diff)
    hit = (dist_sq > 0.0) & (dist_sq < min_spacing * min_spacing)
    return np.flatnonzero(hit)


def select_ports(dictionary: SteeringDictionary, target, num_active: int,
                 residual_coef: float = -0.01, min_spacing: float = 0.0,
                 column_normalize: bool = True,
                 residual_update: str = "unit-beam") -> Selection:
    """Select ``num_active`` ports approximating a desired beam.

    Parameters
    ----------
    dictionary : SteeringDictionary
        Steering map over the candidate port grid.
    target : BeamPattern or (Z,) complex array
        Desired beam, flattened z = q * P + p when given as a vector.
    num_active : int
        Ports to activate; 1 <= num_active <= number of candidates.
    residual_coef : float
        Coefficient of the unit-norm synthesized beam in the residual
        update.
    min_spacing : float
        Minimum pairwise distance (meters) between selected ports;
        distances of exactly min_spacing are allowed.
    column_normalize : bool
        Scale correlations by 1/sqrt(Z), the shared column norm.  The
        scale is uniform across columns so it never changes which port
        wins a step; it is kept as an explicit switch for fidelity with
        the normalized-dictionary formulation.
    residual_update : {"unit-beam", "least-squares"}
        "least-squares" restores the conventional matching-pursuit
        residual e = g - D_A w_LS; the reported weights stay the
        matched-filter ones either way.

    Returns
    -------
    Selection
        Support in pick order, matched-filter weights, per-step trace.

    Raises
    ------
    InfeasibleSpacingError
        The spacing constraint ran out of candidates early.
    DegenerateBeamError
        The selected set radiates an identically zero beam.
    """
    if isinstance(target, BeamPattern):
        if not target.grid.matches(dictionary.directions):
            raise ValueError("target pattern grid does not match dictionary grid")
        g = target.values.ravel(order="F")
    else:
        g = np.asarray(target, dtype=np.complex128).ravel()
        if g.size != dictionary.num_directions:
            raise ValueError(
                f"target length {g.size} does not match Z = {dictionary.num_directions}")
    if not np.all(np.isfinite(g)):
        raise ValueError("target must be finite")
    num_active = int(num_active)
    num_ports = dictionary.num_ports
    if not (1 <= num_active <= num_ports):
        raise ValueError(f"num_active must be in [1, {num_ports}], got {num_active}")
    residual_coef = float(residual_coef)
    if not np.isfinite(residual_coef):
        raise ValueError("residual_coef must be finite")
    min_spacing = float(min_spacing)
    if not np.isfinite(min_spacing) or min_spacing < 0:
        raise ValueError("min_spacing must be finite and >= 0")
    if residual_update not in ("unit-beam", "least-squares"):
        raise ValueError(f"unknown residual_update {residual_update!r}")

    scale = 1.0 / dictionary.column_norm if column_normalize else 1.0
    matched = dictionary.correlate(g)          # per-port weight, support-independent
    residual = g.copy()
    beam = np.zeros(dictionary.num_directions, dtype=np.complex128)
    forbidden = np.zeros(num_ports, dtype=bool)
    support: list[int] = []
    picked_columns: list[np.ndarray] = []
    trace: list[TraceStep] = []

    for step in range(num_active):
        if forbidden.all():
            raise InfeasibleSpacingError(step, num_active, min_spacing)
        correlation = np.abs(dictionary.correlate(residual)) * scale
        correlation[forbidden] = -1.0          # magnitudes are >= 0, never wins
        port = int(np.argmax(correlation))     # ties resolve to lowest index
        winning = float(correlation[port])
        support.append(port)
        forbidden[port] = True
        if min_spacing > 0.0:
            forbidden[excluded_neighbors(dictionary.ports, port, min_spacing)] = True
        column = dictionary.column(port)
        if residual_update == "unit-beam":
            beam = beam + matched[port] * column
            beam_norm = float(np.linalg.norm(beam))
            if beam_norm == 0.0:
                raise DegenerateBeamError(
                    f"selected ports radiate a zero beam after step {step}")
            residual = g - residual_coef * (beam / beam_norm)
        else:
            picked_columns.append(column)
            basis = np.column_stack(picked_columns)
            coef, *_ = np.linalg.lstsq(basis, g, rcond=None)
            residual = g - basis @ coef
        resid_norm = float(np.linalg.norm(residual))
        trace.append(TraceStep(step=step, port=port, correlation=winning,
                               residual_norm=resid_norm))
        logger.debug("step=%d port=%d corr=%.6e resid=%.6e",
                     step, port, winning, resid_norm)

    return Selection(support=np.asarray(support, dtype=np.intp),
                     weights=matched[np.asarray(support, dtype=np.intp)],
                     trace=tuple(trace))
