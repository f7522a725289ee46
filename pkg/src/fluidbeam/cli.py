"""Command line front end.

Subcommands
-----------
run                one scheme, full result bundle
compare            all three schemes plus joint metrics and overlays
phase-retrieve     phase refinement only
export-dict-stats  dictionary dimensions and storage footprints

Every config field can come from a YAML file (--config) and be
overridden by a flag.  The output directory defaults to
``<root>/<command name>`` where the root is, in order, the config's
``output_root``, the ``FLUIDBEAM_OUTPUT`` environment variable, or
``./results``.

Exit codes: 0 success, 2 bad configuration, 3 spacing constraint
infeasible, 4 degenerate beam or region.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import (SCHEMES, ConfigError, RunConfig, load_config, save_config,
                     with_overrides)
from .patterns import DegenerateBeamError, DegenerateRegionError
from .runner import (export_compare, export_dict_stats, export_phase_retrieval,
                     export_run)
from .selection import InfeasibleSpacingError

ENV_OUTPUT_ROOT = "FLUIDBEAM_OUTPUT"

_OVERRIDE_SPECS = [
    # (flag, config field, argparse kwargs)
    ("--num-azimuth", "num_azimuth", dict(type=int, metavar="P")),
    ("--num-elevation", "num_elevation", dict(type=int, metavar="Q")),
    ("--port-rows", "port_rows", dict(type=int, metavar="M")),
    ("--port-cols", "port_cols", dict(type=int, metavar="N")),
    ("--port-spacing", "port_spacing", dict(type=float, metavar="METERS")),
    ("--min-spacing", "min_spacing", dict(type=float, metavar="METERS")),
    ("--wavelength", "wavelength", dict(type=float, metavar="METERS")),
    ("--fixed-array-size", "fixed_array_size", dict(type=int, metavar="SIDE")),
    ("--region-azimuth", "region_azimuth_deg",
     dict(type=float, nargs=2, metavar=("LO", "HI"))),
    ("--region-elevation", "region_elevation_deg",
     dict(type=float, nargs=2, metavar=("LO", "HI"))),
    ("--phase-slope", "phase_slope", dict(type=float, metavar="SLOPE")),
    ("--phase-basis", "phase_basis", dict(choices=["index", "radian"])),
    ("--num-active", "num_active", dict(type=int, metavar="S")),
    ("--residual-coef", "residual_coef", dict(type=float, metavar="COEF")),
    ("--phase-iterations", "phase_iterations", dict(type=int, metavar="COUNT")),
    ("--phase-tol", "phase_tol", dict(type=float, metavar="TOL")),
    ("--vmode", "vmode", dict(choices=["coupled", "decoupled"])),
    ("--storage", "storage", dict(choices=["factored", "dense"])),
    ("--block-mode", "block_mode", dict(choices=["centered", "corner"])),
    ("--residual-update", "residual_update",
     dict(choices=["unit-beam", "least-squares"])),
    ("--guard-cells", "guard_cells", dict(type=int, metavar="CELLS")),
    ("--xsec-elevation", "xsec_elevation_deg", dict(type=float, metavar="DEG")),
    ("--xsec-azimuth", "xsec_azimuth_deg", dict(type=float, metavar="DEG")),
    ("--max-dense-bytes", "max_dense_bytes", dict(type=int, metavar="BYTES")),
]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="YAML config file")
    parser.add_argument("--output", metavar="DIR", help="result bundle directory")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for per-step detail")
    for flag, field, kwargs in _OVERRIDE_SPECS:
        parser.add_argument(flag, dest=field, default=None, **kwargs)
    parser.add_argument("--column-normalize", dest="column_normalize",
                        action=argparse.BooleanOptionalAction, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluidbeam",
        description="Flexible beam synthesis over a fluid antenna port grid")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one synthesis scheme")
    p_run.add_argument("--scheme", choices=list(SCHEMES), default=None)
    _add_common(p_run)

    p_cmp = sub.add_parser("compare", help="run and compare all schemes")
    _add_common(p_cmp)

    p_ret = sub.add_parser("phase-retrieve", help="phase refinement only")
    _add_common(p_ret)

    p_stats = sub.add_parser("export-dict-stats",
                             help="dictionary dimensions and footprints")
    _add_common(p_stats)

    p_cfg = sub.add_parser("write-config",
                           help="write the effective config as YAML to --output")
    _add_common(p_cfg)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s", force=True)


def _resolve_config(args) -> RunConfig:
    import os

    config = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    for _, field, _kwargs in _OVERRIDE_SPECS:
        value = getattr(args, field, None)
        if value is not None:
            overrides[field] = list(value) if isinstance(value, (list, tuple)) else value
    if getattr(args, "column_normalize", None) is not None:
        overrides["column_normalize"] = args.column_normalize
    if getattr(args, "scheme", None) is not None:
        overrides["scheme"] = args.scheme
    if overrides:
        config = with_overrides(config, overrides)
    if config.output_root is None:
        env_root = os.environ.get(ENV_OUTPUT_ROOT)
        if env_root:
            config = with_overrides(config, {"output_root": env_root})
    return config


def _output_dir(args, config: RunConfig, default_name: str) -> str:
    if args.output:
        return args.output
    root = config.output_root or "results"
    return f"{root}/{default_name}"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        config = _resolve_config(args)
        if args.command == "run":
            scheme = config.scheme
            if scheme is None:
                raise ConfigError("no scheme: pass --scheme or set it in the config")
            out = _output_dir(args, config, f"run-{scheme}")
            result = export_run(config, scheme, out)
            print(f"scheme={scheme} ports_active={result.support.size} out={out}")
        elif args.command == "compare":
            out = _output_dir(args, config, "compare")
            results = export_compare(config, out)
            from .evaluation import compare_configs
            table = compare_configs(results[0].desired,
                                    [(r.scheme, r.pattern) for r in results],
                                    config.region(), config.guard_cells)
            print(table.as_text())
            print(f"out={out}")
        elif args.command == "phase-retrieve":
            out = _output_dir(args, config, "phase-retrieve")
            residuals = export_phase_retrieval(config, out)
            final = f"{residuals[-1]:.6g}" if residuals.size else "n/a"
            print(f"iterations={residuals.size} final_residual={final} out={out}")
        elif args.command == "export-dict-stats":
            out = _output_dir(args, config, "dict-stats")
            rows = export_dict_stats(config, out)
            for grid_name, quantity, value in rows:
                print(f"{grid_name}.{quantity}={value}")
            print(f"out={out}")
        elif args.command == "write-config":
            out = args.output or "fluidbeam.yaml"
            save_config(config, out)
            print(f"out={out}")
        else:  # pragma: no cover - argparse enforces the choices
            raise ConfigError(f"unknown command {args.command!r}")
    except InfeasibleSpacingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DegenerateBeamError, DegenerateRegionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
