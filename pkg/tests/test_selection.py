"""Greedy spacing-constrained selection against a straight-line reference."""

import math

import numpy as np
import pytest

from fluidbeam.geometry import build_angular_grid, build_port_grid, pairwise_min_distance
from fluidbeam.patterns import BeamPattern, DegenerateBeamError
from fluidbeam.selection import (InfeasibleSpacingError, excluded_neighbors,
                                 select_ports)
from fluidbeam.steering import build_dictionary


def reference_selection(dense, positions, g, num_active, coef, min_spacing,
                        normalize=True, update="unit-beam"):
    """Exhaustive-argmax reimplementation of the selection loop.

    Works directly on the dense matrix, scanning every candidate port at
    every step; returns (support, weights, correlations).
    """
    Z, L = dense.shape
    scale = 1.0 / math.sqrt(Z) if normalize else 1.0
    matched = dense.conj().T @ g
    residual = g.copy()
    forbidden = set()
    support = []
    correlations = []
    for _ in range(num_active):
        if len(forbidden) == L:
            raise InfeasibleSpacingError(len(support), num_active, min_spacing)
        best_port, best_score = None, -1.0
        for j in range(L):
            if j in forbidden:
                continue
            score = abs(np.vdot(dense[:, j], residual)) * scale
            if score > best_score:
                best_port, best_score = j, score
        support.append(best_port)
        correlations.append(best_score)
        forbidden.add(best_port)
        for j in range(L):
            d = math.hypot(*(positions[j] - positions[best_port]))
            if 0.0 < d < min_spacing:
                forbidden.add(j)
        if update == "unit-beam":
            beam = dense[:, support] @ matched[support]
            residual = g - coef * beam / np.linalg.norm(beam)
        else:
            basis = dense[:, support]
            coef_ls, *_ = np.linalg.lstsq(basis, g, rcond=None)
            residual = g - basis @ coef_ls
    return (np.asarray(support), matched[np.asarray(support)],
            np.asarray(correlations))


def small_instance(seed, rows=4, cols=4, num_az=8, num_el=8, spacing=0.25):
    ports = build_port_grid(rows, cols, spacing)
    angles = build_angular_grid(num_az, num_el)
    dic = build_dictionary(ports, angles, storage="dense")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal(angles.num_directions) \
        + 1j * rng.standard_normal(angles.num_directions)
    return ports, dic, g


def test_excluded_neighbors_against_brute_distances():
    grid = build_port_grid(4, 4, 0.25)
    for port in range(grid.num_ports):
        want = sorted(j for j in range(grid.num_ports) if j != port
                      and math.hypot(*(grid.positions[j] - grid.positions[port])) < 0.5)
        got = excluded_neighbors(grid, port, 0.5)
        np.testing.assert_array_equal(got, want)


def test_excluded_neighbor_counts_quarter_wave_lattice():
    grid = build_port_grid(32, 32, 0.25)
    interior = grid.port_index(10, 10)
    assert excluded_neighbors(grid, interior, 0.5).size == 8
    corner = grid.port_index(0, 0)
    assert excluded_neighbors(grid, corner, 0.5).size == 3
    edge = grid.port_index(5, 0)
    assert excluded_neighbors(grid, edge, 0.5).size == 5


def test_exactly_min_spacing_stays_eligible():
    grid = build_port_grid(8, 8, 0.25)
    center = grid.port_index(4, 4)
    excluded = set(excluded_neighbors(grid, center, 0.5).tolist())
    # distance-2 axial neighbors sit at exactly 0.5 and must stay in
    for m, n in [(2, 4), (6, 4), (4, 2), (4, 6)]:
        assert grid.port_index(m, n) not in excluded


def test_excluded_neighbors_zero_spacing_empty():
    grid = build_port_grid(4, 4, 0.25)
    assert excluded_neighbors(grid, 5, 0.0).size == 0


def test_excluded_neighbors_validation():
    grid = build_port_grid(3, 3, 0.25)
    with pytest.raises(ValueError):
        excluded_neighbors(grid, 9, 0.5)
    with pytest.raises(ValueError):
        excluded_neighbors(grid, 0, -0.1)
    with pytest.raises(ValueError):
        excluded_neighbors(grid, 0, math.inf)


def test_selection_matches_reference_no_spacing():
    ports, dic, g = small_instance(0)
    sel = select_ports(dic, g, 3, residual_coef=-0.01, min_spacing=0.0)
    want_support, want_weights, want_corr = reference_selection(
        dic.toarray(), ports.positions, g, 3, -0.01, 0.0)
    np.testing.assert_array_equal(sel.support, want_support)
    np.testing.assert_allclose(sel.weights, want_weights, rtol=1e-10)
    got_corr = [step.correlation for step in sel.trace]
    np.testing.assert_allclose(got_corr, want_corr, rtol=1e-9)


def test_selection_matches_reference_with_spacing():
    ports, dic, g = small_instance(1, rows=6, cols=6, num_az=10, num_el=10)
    sel = select_ports(dic, g, 6, residual_coef=-0.01, min_spacing=0.5)
    want_support, want_weights, _ = reference_selection(
        dic.toarray(), ports.positions, g, 6, -0.01, 0.5)
    np.testing.assert_array_equal(sel.support, want_support)
    np.testing.assert_allclose(sel.weights, want_weights, rtol=1e-10)


def test_selection_matches_reference_other_coefs():
    for coef in (0.0, 0.25, -1.0):
        ports, dic, g = small_instance(2)
        sel = select_ports(dic, g, 4, residual_coef=coef, min_spacing=0.5)
        want_support, _, _ = reference_selection(
            dic.toarray(), ports.positions, g, 4, coef, 0.5)
        np.testing.assert_array_equal(sel.support, want_support)


def test_least_squares_update_matches_reference():
    ports, dic, g = small_instance(3, rows=5, cols=5)
    sel = select_ports(dic, g, 5, min_spacing=0.5,
                       residual_update="least-squares")
    want_support, want_weights, _ = reference_selection(
        dic.toarray(), ports.positions, g, 5, -0.01, 0.5, update="least-squares")
    np.testing.assert_array_equal(sel.support, want_support)
    # reported weights stay matched-filter even under the LS residual
    np.testing.assert_allclose(sel.weights, want_weights, rtol=1e-10)


def test_least_squares_residual_norm_decreases():
    ports, dic, g = small_instance(4, rows=5, cols=5)
    sel = select_ports(dic, g, 8, residual_update="least-squares")
    norms = [step.residual_norm for step in sel.trace]
    assert all(b <= a + 1e-9 for a, b in zip(norms, norms[1:]))


def test_trace_replay_confirms_argmax_and_updates():
    # replay the recorded walk on the dense matrix and re-check each step
    ports, dic, g = small_instance(5, rows=6, cols=6)
    num_active, coef, d_min = 7, -0.01, 0.5
    sel = select_ports(dic, g, num_active, residual_coef=coef, min_spacing=d_min)
    dense = dic.toarray()
    scale = 1.0 / dic.column_norm
    matched = dense.conj().T @ g
    residual = g.copy()
    forbidden = np.zeros(dic.num_ports, dtype=bool)
    for k, step in enumerate(sel.trace):
        assert step.step == k
        scores = np.abs(dense.conj().T @ residual) * scale
        scores[forbidden] = -1.0
        assert not forbidden[step.port]
        assert scores[step.port] >= scores.max() * (1 - 1e-12)
        np.testing.assert_allclose(step.correlation, scores[step.port], rtol=1e-9)
        forbidden[step.port] = True
        forbidden[excluded_neighbors(ports, step.port, d_min)] = True
        beam = dense[:, sel.support[:k + 1]] @ matched[sel.support[:k + 1]]
        residual = g - coef * beam / np.linalg.norm(beam)
        np.testing.assert_allclose(step.residual_norm, np.linalg.norm(residual),
                                   rtol=1e-9)


def test_spacing_invariant_random_instances():
    rng = np.random.default_rng(6)
    for trial in range(10):
        rows = int(rng.integers(4, 8))
        cols = int(rng.integers(4, 8))
        ports, dic, g = small_instance(100 + trial, rows=rows, cols=cols)
        num_active = int(rng.integers(2, 5))
        sel = select_ports(dic, g, num_active, min_spacing=0.5)
        assert sel.support.size == num_active
        assert np.unique(sel.support).size == num_active
        assert len(sel.trace) == num_active
        assert pairwise_min_distance(ports, sel.support) >= 0.5


def test_normalization_never_changes_the_walk():
    for seed in range(5):
        _, dic, g = small_instance(200 + seed)
        a = select_ports(dic, g, 4, min_spacing=0.5, column_normalize=True)
        b = select_ports(dic, g, 4, min_spacing=0.5, column_normalize=False)
        np.testing.assert_array_equal(a.support, b.support)
        np.testing.assert_allclose(a.weights, b.weights, rtol=1e-12)


def test_selection_is_deterministic():
    _, dic, g = small_instance(7)
    a = select_ports(dic, g, 4, min_spacing=0.5)
    b = select_ports(dic, g, 4, min_spacing=0.5)
    np.testing.assert_array_equal(a.support, b.support)
    np.testing.assert_array_equal(a.weights, b.weights)
    assert a.trace == b.trace


def test_factored_and_dense_dictionaries_select_identically():
    ports = build_port_grid(6, 6, 0.25)
    angles = build_angular_grid(12, 12)
    rng = np.random.default_rng(8)
    g = rng.standard_normal(144) + 1j * rng.standard_normal(144)
    dense = build_dictionary(ports, angles, storage="dense")
    fact = build_dictionary(ports, angles, storage="factored")
    a = select_ports(dense, g, 6, min_spacing=0.5)
    b = select_ports(fact, g, 6, min_spacing=0.5)
    np.testing.assert_array_equal(a.support, b.support)


def test_perfect_match_column_wins_first():
    ports, dic, _ = small_instance(9)
    g = dic.column(11)
    sel = select_ports(dic, g, 1)
    assert sel.support[0] == 11
    # matched weight of a unit-modulus column against itself is Z
    np.testing.assert_allclose(sel.weights[0], dic.num_directions, rtol=1e-12)


def test_target_as_pattern_or_vector():
    ports, dic, g = small_instance(10)
    pattern = BeamPattern(grid=dic.directions,
                          values=g.reshape(dic.directions.shape, order="F"))
    a = select_ports(dic, g, 3)
    b = select_ports(dic, pattern, 3)
    np.testing.assert_array_equal(a.support, b.support)


def test_infeasible_spacing_reports_achieved_count():
    ports = build_port_grid(3, 3, 0.25)
    angles = build_angular_grid(6, 6)
    dic = build_dictionary(ports, angles)
    rng = np.random.default_rng(11)
    g = rng.standard_normal(36) + 1j * rng.standard_normal(36)
    with pytest.raises(InfeasibleSpacingError) as err:
        select_ports(dic, g, 4, min_spacing=10.0)
    assert err.value.achieved == 1
    assert err.value.requested == 4
    assert err.value.min_spacing == 10.0
    assert "1 of 4" in str(err.value)


def test_zero_target_degenerate_beam():
    _, dic, _ = small_instance(12)
    with pytest.raises(DegenerateBeamError):
        select_ports(dic, np.zeros(dic.num_directions, dtype=complex), 2)


def test_select_ports_validation():
    ports, dic, g = small_instance(13)
    with pytest.raises(ValueError):
        select_ports(dic, g, 0)
    with pytest.raises(ValueError):
        select_ports(dic, g, dic.num_ports + 1)
    with pytest.raises(ValueError):
        select_ports(dic, g[:-1], 2)
    with pytest.raises(ValueError):
        select_ports(dic, g, 2, residual_coef=math.nan)
    with pytest.raises(ValueError):
        select_ports(dic, g, 2, min_spacing=-1.0)
    with pytest.raises(ValueError):
        select_ports(dic, g, 2, residual_update="cg")
    other = BeamPattern(grid=build_angular_grid(5, 5),
                        values=np.zeros((5, 5), dtype=complex))
    with pytest.raises(ValueError):
        select_ports(dic, other, 2)
