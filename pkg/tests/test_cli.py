"""Command line interface: bundles, exit codes, reproducibility."""

import json

import numpy as np
import pytest

from fluidbeam.cli import main
from fluidbeam.config import RunConfig, load_config
from fluidbeam.runner import BUNDLE_FILES

SMALL = ["--num-azimuth", "24", "--num-elevation", "24",
         "--port-rows", "10", "--port-cols", "10",
         "--num-active", "9", "--fixed-array-size", "4",
         "--phase-iterations", "10"]


def read_csv_rows(path):
    return path.read_text().strip().split("\n")


def bundle_bytes(root):
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


def test_run_fixed_writes_full_bundle(tmp_path):
    out = tmp_path / "fixed"
    assert main(["run", "--scheme", "fixed", *SMALL, "--output", str(out)]) == 0
    for name in BUNDLE_FILES:
        assert (out / name).is_file(), name
    heatmap = np.loadtxt(out / "heatmap.csv", delimiter=",")
    assert heatmap.shape == (24, 24)
    assert heatmap.max() == pytest.approx(1.0)
    meta = json.loads((out / "meta").read_text())
    assert meta["scheme"] == "fixed"
    assert meta["ports_active"] == 16
    assert "output_root" not in meta
    # fixed scheme drives every element of its own lattice
    rows = read_csv_rows(out / "ports.csv")
    assert len(rows) == 1 + 16


def test_run_fluid_respects_spacing(tmp_path):
    out = tmp_path / "fluid"
    assert main(["run", "--scheme", "fluid-phaseopt", *SMALL,
                 "--output", str(out)]) == 0
    meta = json.loads((out / "meta").read_text())
    assert meta["ports_active"] == 9
    assert meta["min_pairwise_distance_m"] >= 0.5
    assert meta["phase_iterations_run"] == 10
    rows = read_csv_rows(out / "ports.csv")
    assert len(rows) == 1 + 9


def test_compare_writes_joint_and_per_scheme_bundles(tmp_path):
    out = tmp_path / "compare"
    assert main(["compare", *SMALL, "--output", str(out)]) == 0
    for scheme in ("fixed", "fixed-phaseopt", "fluid-phaseopt"):
        for name in BUNDLE_FILES:
            assert (out / scheme / name).is_file()
    rows = read_csv_rows(out / "metrics.csv")
    assert len(rows) == 1 + 3 + 3  # header, three schemes, three deltas
    xsec = read_csv_rows(out / "xsec_theta.csv")
    assert xsec[0] == "angle_deg,desired,fixed,fixed-phaseopt,fluid-phaseopt"
    meta = json.loads((out / "meta").read_text())
    assert meta["schemes"] == ["fixed", "fixed-phaseopt", "fluid-phaseopt"]


def test_compare_runs_are_byte_identical(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert main(["compare", *SMALL, "--output", str(a)]) == 0
    assert main(["compare", *SMALL, "--output", str(b)]) == 0
    assert bundle_bytes(a) == bundle_bytes(b)


def test_single_port_degenerate_run(tmp_path):
    out = tmp_path / "single"
    code = main(["run", "--scheme", "fluid-phaseopt",
                 "--num-azimuth", "36", "--num-elevation", "36",
                 "--port-rows", "1", "--port-cols", "1", "--num-active", "1",
                 "--output", str(out)])
    assert code == 0
    heatmap = np.loadtxt(out / "heatmap.csv", delimiter=",")
    np.testing.assert_allclose(heatmap, 1.0)  # one port radiates a flat beam
    meta = json.loads((out / "meta").read_text())
    assert meta["ports_active"] == 1
    assert meta["min_pairwise_distance_m"] is None


def test_phase_retrieve_bundle(tmp_path):
    out = tmp_path / "phase"
    assert main(["phase-retrieve", *SMALL, "--output", str(out)]) == 0
    assert (out / "phase_map.csv").is_file()
    assert (out / "meta").is_file()
    rows = read_csv_rows(out / "residuals.csv")
    assert rows[0] == "iteration,residual"
    values = [float(r.split(",")[1]) for r in rows[1:]]
    assert len(values) == 10
    assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))


def test_export_dict_stats_reference_sizes(tmp_path):
    out = tmp_path / "stats"
    assert main(["export-dict-stats", "--output", str(out)]) == 0
    rows = read_csv_rows(out / "dict_stats.csv")
    table = {(r.split(",")[0], r.split(",")[1]): r.split(",")[2] for r in rows[1:]}
    assert table[("selectable", "num_ports")] == "1024"
    assert table[("selectable", "num_directions")] == "32400"
    assert int(table[("selectable", "factored_bytes")]) == 2_073_600 * 16
    assert int(table[("selectable", "dense_bytes")]) == 33_177_600 * 16
    assert table[("fixed", "num_ports")] == "256"
    assert table[("fixed", "spacing_m")] == "0.5"


def test_write_config_round_trip(tmp_path):
    path = tmp_path / "fluidbeam.yaml"
    assert main(["write-config", "--num-active", "16", "--output", str(path)]) == 0
    cfg = load_config(path)
    assert cfg.num_active == 16
    assert cfg.num_azimuth == 180


def test_flag_overrides_beat_config_file(tmp_path):
    base = tmp_path / "base.yaml"
    base.write_text("num_active: 25\nport_rows: 12\n")
    out = tmp_path / "effective.yaml"
    assert main(["write-config", "--config", str(base), "--num-active", "16",
                 "--output", str(out)]) == 0
    cfg = load_config(out)
    assert cfg.num_active == 16   # flag wins
    assert cfg.port_rows == 12    # file survives where no flag was given


def test_output_root_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("FLUIDBEAM_OUTPUT", str(tmp_path / "root"))
    assert main(["run", "--scheme", "fixed", *SMALL]) == 0
    assert (tmp_path / "root" / "run-fixed" / "heatmap.csv").is_file()


def test_explicit_output_beats_env_root(tmp_path, monkeypatch):
    monkeypatch.setenv("FLUIDBEAM_OUTPUT", str(tmp_path / "ignored"))
    out = tmp_path / "direct"
    assert main(["run", "--scheme", "fixed", *SMALL, "--output", str(out)]) == 0
    assert out.is_dir()
    assert not (tmp_path / "ignored").exists()


def test_missing_scheme_is_config_error(tmp_path):
    assert main(["run", *SMALL, "--output", str(tmp_path / "x")]) == 2


def test_invalid_config_exit_code(tmp_path):
    code = main(["run", "--scheme", "fluid-phaseopt", *SMALL,
                 "--num-active", "7", "--output", str(tmp_path / "x")])
    assert code == 2


def test_infeasible_spacing_exit_code(tmp_path):
    out = tmp_path / "never"
    code = main(["run", "--scheme", "fluid-phaseopt",
                 "--num-azimuth", "16", "--num-elevation", "16",
                 "--port-rows", "3", "--port-cols", "3", "--num-active", "4",
                 "--min-spacing", "10", "--output", str(out)])
    assert code == 3
    # the failed run must leave no partial bundle behind
    assert not out.exists()
    assert not list(tmp_path.glob(".staging-*"))


def test_degenerate_region_exit_code(tmp_path):
    code = main(["run", "--scheme", "fixed",
                 "--num-azimuth", "5", "--num-elevation", "5",
                 "--fixed-array-size", "2",
                 "--region-azimuth", "1", "2", "--region-elevation", "1", "2",
                 "--output", str(tmp_path / "x")])
    assert code == 4


def test_config_file_scheme_drives_run(tmp_path):
    cfg_path = tmp_path / "cfg.yaml"
    cfg_path.write_text("scheme: fixed\nnum_azimuth: 24\nnum_elevation: 24\n"
                        "port_rows: 10\nport_cols: 10\nnum_active: 9\n"
                        "fixed_array_size: 4\nphase_iterations: 5\n")
    out = tmp_path / "from-config"
    assert main(["run", "--config", str(cfg_path), "--output", str(out)]) == 0
    meta = json.loads((out / "meta").read_text())
    assert meta["scheme"] == "fixed"


def test_default_config_object_round_trips_through_cli(tmp_path):
    path = tmp_path / "defaults.yaml"
    assert main(["write-config", "--output", str(path)]) == 0
    assert load_config(path) == RunConfig()
