"""Scheme orchestration and result-bundle export.

Three synthesis schemes share one desired beam:

* ``fixed``: reference array, matched-filter weights of the raw desired
  beam, every element active.
* ``fixed-phaseopt``: same array, desired beam first passed through
  phase refinement.
* ``fluid-phaseopt``: phase refinement, then spacing-constrained greedy
  selection over the dense candidate lattice.

A run writes one directory with stable file names (heatmap.csv,
xsec_theta.csv, xsec_phi.csv, metrics.csv, ports.csv, phase_map.csv,
meta).  Output is staged in a temporary sibling directory and renamed
into place on success, so a failed run leaves no partial bundle.  Bundles
contain no timestamps or absolute paths; identical configs produce
byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
import shutil
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import SCHEMES, RunConfig
from .evaluation import (compare_configs, cross_section, normalize_beam,
                         write_cross_section_csv, write_heatmap_csv,
                         write_metrics_csv, write_phase_map_csv, write_ports_csv)
from .fourier import phase_retrieve, weights_from_beam
from .geometry import PortGrid, pairwise_min_distance
from .patterns import BeamPattern, make_desired_beam
from .selection import Selection, select_ports
from .steering import build_dictionary, storage_footprint, synthesize_beam

BUNDLE_FILES = ("heatmap.csv", "xsec_theta.csv", "xsec_phi.csv", "metrics.csv",
                "ports.csv", "phase_map.csv", "meta")


@dataclass(frozen=True, eq=False)
class SchemeResult:
    """Everything one scheme run produced."""

    scheme: str
    desired: BeamPattern          # raw desired beam
    target: BeamPattern           # beam the weights aim at (refined unless "fixed")
    pattern: BeamPattern          # synthesized beam
    ports: PortGrid
    support: np.ndarray
    weights: np.ndarray
    selection: Selection | None
    phase_residuals: np.ndarray | None


def run_scheme(config: RunConfig, scheme: str) -> SchemeResult:
    """Execute one synthesis scheme; pure computation, no I/O."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    angular = config.angular_grid()
    desired = make_desired_beam(angular, config.region(),
                                config.phase_slope, config.phase_basis)
    vmode = config.vmode_enum()
    if scheme == "fixed":
        target, residuals = desired, None
    else:
        target, residuals = phase_retrieve(
            desired, config.num_active, config.phase_iterations,
            block_mode=config.block_mode, tol=config.phase_tol,
            return_residuals=True)
    selection = None
    if scheme == "fluid-phaseopt":
        ports = config.fluid_grid()
        dictionary = build_dictionary(ports, angular, vmode, config.storage,
                                      config.max_dense_bytes)
        selection = select_ports(dictionary, target, config.num_active,
                                 residual_coef=config.residual_coef,
                                 min_spacing=config.min_spacing,
                                 column_normalize=config.column_normalize,
                                 residual_update=config.residual_update)
        support, weights = selection.support, selection.weights
    else:
        ports = config.fixed_grid()
        dictionary = build_dictionary(ports, angular, vmode, config.storage,
                                      config.max_dense_bytes)
        support = np.arange(ports.num_ports, dtype=np.intp)
        weights = weights_from_beam(target, ports, vmode=vmode)
    pattern = synthesize_beam(dictionary, (support, weights))
    return SchemeResult(scheme=scheme, desired=desired, target=target,
                        pattern=pattern, ports=ports, support=support,
                        weights=weights, selection=selection,
                        phase_residuals=residuals)


def _meta_payload(config: RunConfig, extra: dict) -> dict:
    payload = config.to_mapping()
    payload.pop("output_root", None)
    payload.update({
        "angular_span_deg": [-90.0, 90.0],
        "selectable_aperture_m": [(config.port_rows - 1) * config.port_spacing,
                                  (config.port_cols - 1) * config.port_spacing],
        "fixed_aperture_m": [(config.fixed_array_size - 1) * config.wavelength / 2.0,
                             (config.fixed_array_size - 1) * config.wavelength / 2.0],
        "num_directions": config.num_azimuth * config.num_elevation,
    })
    payload.update(extra)
    return payload


def _write_meta(path: Path, payload: dict) -> None:
    with open(path, "w", newline="\n") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _write_scheme_bundle(result: SchemeResult, config: RunConfig, out: Path) -> None:
    write_heatmap_csv(out / "heatmap.csv", normalize_beam(result.pattern))
    angles, values = cross_section(result.pattern, "elevation",
                                   math.radians(config.xsec_elevation_deg))
    write_cross_section_csv(out / "xsec_theta.csv", angles, {result.scheme: values})
    angles, values = cross_section(result.pattern, "azimuth",
                                   math.radians(config.xsec_azimuth_deg))
    write_cross_section_csv(out / "xsec_phi.csv", angles, {result.scheme: values})
    table = compare_configs(result.desired, [(result.scheme, result.pattern)],
                            config.region(), config.guard_cells)
    write_metrics_csv(out / "metrics.csv", table)
    write_ports_csv(out / "ports.csv", result.ports, result.support, result.weights)
    write_phase_map_csv(out / "phase_map.csv", result.target)
    min_dist = pairwise_min_distance(result.ports, result.support)
    extra = {
        "scheme": result.scheme,
        "ports_active": int(result.support.size),
        "min_pairwise_distance_m": min_dist if math.isfinite(min_dist) else None,
    }
    if result.phase_residuals is not None and result.phase_residuals.size:
        extra["phase_residual_final"] = float(result.phase_residuals[-1])
        extra["phase_iterations_run"] = int(result.phase_residuals.size)
    _write_meta(out / "meta", _meta_payload(config, extra))


def _staged(parent: Path):
    parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=parent))
    os.chmod(staging, 0o755)
    return staging


def _commit(staging: Path, out: Path) -> None:
    if out.exists():
        shutil.rmtree(out)
    os.replace(staging, out)


def export_run(config: RunConfig, scheme: str, out_dir) -> SchemeResult:
    """Run one scheme and write its bundle atomically to out_dir."""
    out = Path(out_dir)
    result = run_scheme(config, scheme)
    staging = _staged(out.parent)
    try:
        _write_scheme_bundle(result, config, staging)
        _commit(staging, out)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    return result


def export_compare(config: RunConfig, out_dir) -> list[SchemeResult]:
    """Run all schemes, write per-scheme bundles plus the joint artifacts."""
    out = Path(out_dir)
    results = [run_scheme(config, scheme) for scheme in SCHEMES]
    desired = results[0].desired
    staging = _staged(out.parent)
    try:
        for result in results:
            sub = staging / result.scheme
            sub.mkdir()
            _write_scheme_bundle(result, config, sub)
        labeled = [(r.scheme, r.pattern) for r in results]
        table = compare_configs(desired, labeled, config.region(), config.guard_cells)
        write_metrics_csv(staging / "metrics.csv", table)
        for name, axis, angle_deg in (("xsec_theta.csv", "elevation",
                                       config.xsec_elevation_deg),
                                      ("xsec_phi.csv", "azimuth",
                                       config.xsec_azimuth_deg)):
            angle = math.radians(angle_deg)
            angles, base = cross_section(desired, axis, angle)
            series = {"desired": base}
            for result in results:
                series[result.scheme] = cross_section(result.pattern, axis, angle)[1]
            write_cross_section_csv(staging / name, angles, series)
        extra = {"schemes": list(SCHEMES),
                 "ports_active": {r.scheme: int(r.support.size) for r in results}}
        _write_meta(staging / "meta", _meta_payload(config, extra))
        _commit(staging, out)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    return results


def export_phase_retrieval(config: RunConfig, out_dir) -> np.ndarray:
    """Refine the desired beam's phase and write phase_map, residuals, meta."""
    out = Path(out_dir)
    angular = config.angular_grid()
    desired = make_desired_beam(angular, config.region(),
                                config.phase_slope, config.phase_basis)
    refined, residuals = phase_retrieve(
        desired, config.num_active, config.phase_iterations,
        block_mode=config.block_mode, tol=config.phase_tol, return_residuals=True)
    staging = _staged(out.parent)
    try:
        write_phase_map_csv(staging / "phase_map.csv", refined)
        with open(staging / "residuals.csv", "w", newline="\n") as handle:
            handle.write("iteration,residual\n")
            for i, value in enumerate(residuals):
                handle.write(f"{i},{value:.12g}\n")
        extra = {"phase_iterations_run": int(residuals.size)}
        if residuals.size:
            extra["phase_residual_final"] = float(residuals[-1])
        _write_meta(staging / "meta", _meta_payload(config, extra))
        _commit(staging, out)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    return residuals


def export_dict_stats(config: RunConfig, out_dir) -> list[tuple[str, str, str]]:
    """Dictionary size and footprint statistics for both lattices."""
    out = Path(out_dir)
    directions = config.num_azimuth * config.num_elevation
    rows = []
    for name, grid in (("selectable", config.fluid_grid()),
                       ("fixed", config.fixed_grid())):
        aperture = grid.aperture
        rows.extend([
            (name, "rows", str(grid.rows)),
            (name, "cols", str(grid.cols)),
            (name, "num_ports", str(grid.num_ports)),
            (name, "spacing_m", "%.12g" % grid.spacing),
            (name, "aperture_x_m", "%.12g" % aperture[0]),
            (name, "aperture_y_m", "%.12g" % aperture[1]),
            (name, "num_directions", str(directions)),
            (name, "column_norm", "%.12g" % math.sqrt(directions)),
            (name, "dense_bytes", str(storage_footprint(directions, grid.rows,
                                                        grid.cols, "dense"))),
            (name, "factored_bytes", str(storage_footprint(directions, grid.rows,
                                                           grid.cols, "factored"))),
        ])
    staging = _staged(out.parent)
    try:
        with open(staging / "dict_stats.csv", "w", newline="\n") as handle:
            handle.write("grid,quantity,value\n")
            for grid_name, quantity, value in rows:
                handle.write(f"{grid_name},{quantity},{value}\n")
        _write_meta(staging / "meta", _meta_payload(config, {}))
        _commit(staging, out)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    return rows
