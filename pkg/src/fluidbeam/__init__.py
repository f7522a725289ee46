"""Flexible beam synthesis on fluid antenna port grids.

Pipeline: describe a desired flat-top beam over an angular grid, refine
its phase so the pattern is realizable from a small spatial aperture,
then greedily pick spacing-constrained ports from a dense candidate
lattice and drive them with closed-form matched-filter weights.
"""

from .config import SCHEMES, ConfigError, RunConfig, load_config, save_config, with_overrides
from .estimators import PhaseRetrieval, PortSelector
from .evaluation import (BeamMetrics, ComparisonTable, compare_configs,
                         compute_metrics, cross_section, normalize_beam,
                         reconstruction_error, to_db)
from .fourier import (aperture_mask, dft2_forward, dft2_inverse, phase_retrieve,
                      refine_phase, weights_from_beam)
from .geometry import (AngularGrid, PortGrid, build_angular_grid, build_port_grid,
                       pairwise_min_distance)
from .patterns import (BeamPattern, DegenerateBeamError, DegenerateRegionError,
                       TargetRegion, make_desired_beam, matricize, region_mask,
                       vectorize)
from .runner import (SchemeResult, export_compare, export_dict_stats,
                     export_phase_retrieval, export_run, run_scheme)
from .selection import (InfeasibleSpacingError, Selection, TraceStep,
                        excluded_neighbors, select_ports)
from .steering import (DictionaryCapacityError, SteeringDictionary, VMode,
                       build_dictionary, direction_components, steering_entry,
                       storage_footprint, synthesize_beam)

__version__ = "0.1.0"

__all__ = [
    "AngularGrid", "BeamMetrics", "BeamPattern", "ComparisonTable", "ConfigError",
    "DegenerateBeamError", "DegenerateRegionError", "DictionaryCapacityError",
    "InfeasibleSpacingError", "PhaseRetrieval", "PortGrid", "PortSelector",
    "RunConfig", "SCHEMES", "SchemeResult", "Selection", "SteeringDictionary",
    "TargetRegion", "TraceStep", "VMode", "aperture_mask", "build_angular_grid",
    "build_dictionary", "build_port_grid", "compare_configs", "compute_metrics",
    "cross_section", "dft2_forward", "dft2_inverse", "direction_components",
    "excluded_neighbors", "export_compare", "export_dict_stats",
    "export_phase_retrieval", "export_run", "load_config", "make_desired_beam",
    "matricize", "normalize_beam", "pairwise_min_distance", "phase_retrieve",
    "reconstruction_error", "refine_phase", "region_mask", "run_scheme",
    "save_config", "select_ports", "steering_entry", "storage_footprint",
    "synthesize_beam", "to_db", "vectorize", "weights_from_beam", "with_overrides",
]
