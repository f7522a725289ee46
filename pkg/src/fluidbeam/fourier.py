"""Fourier-domain kernels: DFT pair, closed-form weights, phase refinement.

The forward transform follows the unnormalized convention

    F[u, v] = sum_x sum_y f[x, y] exp(-2j * pi * (u x / M + v y / N))

and the inverse carries the 1 / (M N) factor, so inverse(forward(f)) == f.
Both delegate to the FFT.

Port weights come from the adjoint of the steering map: for a desired
pattern g over directions with components (u_z, v_z),

    w(x, y) = sum_z g_z exp(+2j * pi * (u_z x + v_z y))

which equals one matched-filter inner product per port and needs no matrix
inversion.

Phase refinement alternates between the angular domain (where only the
magnitude is prescribed) and the spatial-frequency domain (where energy
must live on a small square aperture block): transform, zero outside the
block, transform back, keep the new phase under the prescribed magnitude.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import PortGrid
from .patterns import BeamPattern
from .steering import VMode, direction_components

_CHUNK_ENTRIES = 8_000_000  # bound on temporaries in weights_from_beam


def dft2_forward(matrix) -> np.ndarray:
    """Unnormalized 2-D DFT of a complex matrix."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return np.fft.fft2(matrix)


def dft2_inverse(matrix) -> np.ndarray:
    """Inverse 2-D DFT, scaled by 1/(M N); inverse of :func:`dft2_forward`."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return np.fft.ifft2(matrix)


def weights_from_beam(pattern: BeamPattern, ports, wavelength: float | None = None,
                      vmode: VMode = VMode.DECOUPLED) -> np.ndarray:
    """Matched-filter port weights reproducing a desired pattern.

    Parameters
    ----------
    pattern : BeamPattern
        Desired beam over the angular grid.
    ports : PortGrid or (K, 2) array
        Port positions the weights are evaluated at.  A PortGrid supplies
        its own wavelength; raw positions need ``wavelength`` explicitly.
    vmode : VMode
        Direction-component convention, must match the dictionary in use.

    Returns
    -------
    ndarray, shape (K,)
        One complex weight per port, aligned with the position order.
    """
    if isinstance(ports, PortGrid):
        positions = ports.positions
        if wavelength is None:
            wavelength = ports.wavelength
    else:
        positions = np.asarray(ports, dtype=float)
        if positions.ndim != 2 or positions.shape[1] != 2:
            raise ValueError("ports must be a PortGrid or a (K, 2) position array")
        if wavelength is None:
            raise ValueError("wavelength is required with raw positions")
    u, v = direction_components(pattern.grid, vmode, wavelength)
    g = pattern.values.ravel(order="F")
    x = positions[:, 0]
    y = positions[:, 1]
    num_ports = x.size
    weights = np.zeros(num_ports, dtype=np.complex128)
    step = max(1, _CHUNK_ENTRIES // max(num_ports, 1))
    for start in range(0, g.size, step):
        stop = min(start + step, g.size)
        phases = np.outer(u[start:stop], x) + np.outer(v[start:stop], y)
        weights += g[start:stop] @ np.exp(2j * np.pi * phases)
    return weights


def aperture_mask(shape: tuple[int, int], side: int, block_mode: str = "centered") -> np.ndarray:
    """Boolean mask of the spatial aperture block, in unshifted frame.

    ``centered`` places a side x side block around the center of the
    quadrant-swapped (center-shifted) spatial matrix and maps it back to
    the unshifted frame; ``corner`` keeps the leading side x side corner
    as the raw index arithmetic would.
    """
    rows, cols = shape
    if block_mode not in ("centered", "corner"):
        raise ValueError(f"unknown block_mode {block_mode!r}")
    if not (1 <= side <= min(rows, cols)):
        raise ValueError(f"block side {side} does not fit in shape {shape}")
    mask = np.zeros(shape, dtype=bool)
    if block_mode == "corner":
        mask[:side, :side] = True
        return mask
    r0 = rows // 2 - side // 2
    c0 = cols // 2 - side // 2
    mask[r0:r0 + side, c0:c0 + side] = True
    return np.fft.ifftshift(mask)


def refine_phase(matrix, active_count: int, iterations: int = 50,
                 block_mode: str = "centered", tol: float | None = None,
                 return_residuals: bool = False):
    """Iterative phase refinement against a square spatial aperture.

    Each iteration: inverse-transform the current pattern, zero every
    spatial sample outside the sqrt(active_count)-sided block, transform
    forward again, and replace the phase while keeping the prescribed
    magnitude.  With ``tol`` set, iteration stops early once the relative
    residual improvement drops below it.

    Parameters
    ----------
    matrix : (P, Q) complex array
        Desired pattern; its magnitude is the constraint, its phase the
        starting point.
    active_count : int
        Number of active spatial samples; must be a perfect square with
        sqrt(active_count) <= min(P, Q).
    iterations : int
        Number of refinement sweeps; 0 returns the input unchanged.
    return_residuals : bool
        Also return the per-iteration aperture mismatch
        || |desired| - |refined| ||_2.

    Returns
    -------
    (P, Q) complex array, or (array, residuals) when requested.
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    active_count = int(active_count)
    if active_count < 1:
        raise ValueError("active_count must be >= 1")
    side = math.isqrt(active_count)
    if side * side != active_count:
        raise ValueError(f"active_count {active_count} is not a perfect square")
    iterations = int(iterations)
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    if tol is not None and not (float(tol) > 0):
        raise ValueError("tol must be > 0 when given")
    mask = aperture_mask(matrix.shape, side, block_mode)
    magnitude = np.abs(matrix)
    current = matrix.copy()
    residuals = []
    for _ in range(iterations):
        spatial = np.fft.ifft2(current)
        spatial *= mask
        refined = np.fft.fft2(spatial)
        residual = float(np.linalg.norm(magnitude - np.abs(refined)))
        current = magnitude * np.exp(1j * np.angle(refined))
        if residuals and tol is not None:
            prev = residuals[-1]
            residuals.append(residual)
            if prev > 0 and (prev - residual) / prev < tol:
                break
        else:
            residuals.append(residual)
    if return_residuals:
        return current, np.asarray(residuals)
    return current


def phase_retrieve(pattern: BeamPattern, active_count: int, iterations: int = 50,
                   block_mode: str = "centered", tol: float | None = None,
                   return_residuals: bool = False):
    """Pattern-level wrapper around :func:`refine_phase`."""
    out = refine_phase(pattern.values, active_count, iterations,
                       block_mode=block_mode, tol=tol,
                       return_residuals=return_residuals)
    if return_residuals:
        refined, residuals = out
        return BeamPattern(grid=pattern.grid, values=refined), residuals
    return BeamPattern(grid=pattern.grid, values=out)
