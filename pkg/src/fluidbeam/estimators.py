"""Estimator-style front end for the two core algorithms.

Both classes follow the scikit-learn estimator protocol (``get_params``
and ``set_params`` from ``BaseEstimator``, ``fit`` returning ``self``)
so they clone, grid-search, and compose like any other estimator:

* :class:`PhaseRetrieval` is a stateless transformer: ``transform`` maps
  a complex (P, Q) pattern matrix to its phase-refined counterpart.
* :class:`PortSelector` learns a sparse port support from a steering
  dictionary and a desired beam, exposing ``support_``, ``weights_``,
  and a dense ``coef_`` vector, mirroring sparse linear regressors.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .fourier import refine_phase
from .patterns import BeamPattern
from .selection import select_ports
from .steering import SteeringDictionary, synthesize_beam
from .validation import check_complex_matrix, check_complex_vector, check_positive_int


class PhaseRetrieval(TransformerMixin, BaseEstimator):
    """Aperture-constrained phase refinement as a transformer.

    Parameters
    ----------
    active_count : int
        Active spatial samples; perfect square, sqrt bounded by the
        pattern's smaller dimension.
    iterations : int
        Refinement sweeps per transform.
    block_mode : {"centered", "corner"}
        Where the spatial aperture block sits, see
        :func:`fluidbeam.fourier.aperture_mask`.
    tol : float or None
        Optional early-stop threshold on relative residual improvement.

    The transformer holds no fitted state; ``fit`` only validates.
    """

    def __init__(self, active_count: int = 256, iterations: int = 50,
                 block_mode: str = "centered", tol: float | None = None):
        self.active_count = active_count
        self.iterations = iterations
        self.block_mode = block_mode
        self.tol = tol

    def fit(self, X, y=None):
        check_complex_matrix(X, "X")
        check_positive_int(self.active_count, "active_count")
        return self

    def transform(self, X) -> np.ndarray:
        X = check_complex_matrix(X, "X")
        return refine_phase(X, self.active_count, self.iterations,
                            block_mode=self.block_mode, tol=self.tol)


class PortSelector(BaseEstimator):
    """Spacing-constrained greedy port selection as an estimator.

    ``fit(X, y)`` takes the steering dictionary as ``X`` and the desired
    beam as ``y`` (a length-Z vector or a :class:`BeamPattern`); it runs
    the greedy selection and stores the result.  ``predict`` synthesizes
    the beam the fitted ports radiate.

    Parameters mirror :func:`fluidbeam.selection.select_ports`.

    Attributes
    ----------
    support_ : ndarray
        Selected port indices in pick order.
    weights_ : ndarray
        Matched-filter weight per selected port.
    coef_ : ndarray, shape (num_ports,)
        Dense weight vector, zero outside the support.
    trace_ : tuple
        Per-step selection records.
    """

    def __init__(self, num_active: int = 256, residual_coef: float = -0.01,
                 min_spacing: float = 0.0, column_normalize: bool = True,
                 residual_update: str = "unit-beam"):
        self.num_active = num_active
        self.residual_coef = residual_coef
        self.min_spacing = min_spacing
        self.column_normalize = column_normalize
        self.residual_update = residual_update

    def fit(self, X, y):
        if not isinstance(X, SteeringDictionary):
            raise TypeError(
                "X must be a SteeringDictionary; build one with build_dictionary()")
        if not isinstance(y, BeamPattern):
            y = check_complex_vector(y, X.num_directions, "y")
        selection = select_ports(X, y, self.num_active,
                                 residual_coef=self.residual_coef,
                                 min_spacing=self.min_spacing,
                                 column_normalize=self.column_normalize,
                                 residual_update=self.residual_update)
        self.dictionary_ = X
        self.selection_ = selection
        self.support_ = selection.support.copy()
        self.weights_ = selection.weights.copy()
        self.trace_ = selection.trace
        coef = np.zeros(X.num_ports, dtype=np.complex128)
        coef[self.support_] = self.weights_
        self.coef_ = coef
        return self

    def predict(self, X=None) -> np.ndarray:
        """Beam vector radiated by the fitted ports.

        ``X`` may be another dictionary over the same port grid (for
        example a finer angular sampling); defaults to the fitted one.
        """
        if not hasattr(self, "support_"):
            raise NotFittedError("PortSelector is not fitted; call fit first")
        dictionary = self.dictionary_ if X is None else X
        if not isinstance(dictionary, SteeringDictionary):
            raise TypeError("X must be a SteeringDictionary")
        if dictionary.num_ports != self.coef_.size:
            raise ValueError("dictionary port count does not match fitted support")
        pattern = synthesize_beam(dictionary, (self.support_, self.weights_))
        return pattern.values.ravel(order="F")
