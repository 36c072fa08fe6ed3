"""Config parsing, CSV/manifest round-trips, SVG emission, and the CLI."""

import json
import math
import shutil

import numpy as np
import pytest

from magchain import ChainSpec, scan_spectrum
from magchain.cli_io import emit, plots
from magchain.cli_io.cli import main
from magchain.cli_io.config import ConfigError, RunConfig, load_config, parse_config
from magchain.experiments import SweepResult, SweepRow


class TestFormatFloat:
    def test_round_trip_is_exact(self):
        for x in (1.0 / 3.0, 0.76387457, 1e-300, -math.pi, 5.0):
            assert float(emit.format_float(x)) == x

    def test_none_becomes_empty(self):
        assert emit.format_float(None) == ""
        assert emit.parse_optional_float("") is None
        assert emit.parse_optional_float("2.5") == 2.5


class TestParseConfig:
    def test_full_file(self):
        text = """
        # chain
        preset = Magnonic
        n_cells = 2
        j_hop = 8.0        # strong direct hop
        omega = 3e-4
        j_values = 0.125, 0.5
        n_values = 2,3,4
        plots = off
        initial_site = m1
        init_mode = gap-state
        """
        config = parse_config(text)
        assert config.preset == "Magnonic"
        assert config.n_cells == 2
        assert config.j_hop == 8.0
        assert config.omega == 3e-4
        assert config.j_values == [0.125, 0.5]
        assert config.n_values == [2, 3, 4]
        assert config.plots is False
        assert config.initial_site == "m1"
        assert config.init_mode == "gap-state"

    def test_empty_text_gives_defaults(self):
        config = parse_config("")
        assert config == RunConfig()

    def test_keys_case_insensitive_and_quotes_stripped(self):
        config = parse_config("PRESET = 'PhotonJ0'\nOut_Dir = \"results\"")
        assert config.preset == "PhotonJ0"
        assert config.out_dir == "results"

    @pytest.mark.parametrize("text,fragment", [
        ("bogus_key = 1", "unknown key"),
        ("n_cells = 2\nn_cells = 3", "duplicate key"),
        ("n_cells", "expected 'key = value'"),
        ("n_cells = two", "bad value"),
        ("n_cells =", "empty value"),
        ("plots = maybe", "bad value"),
    ])
    def test_line_errors_name_the_line(self, text, fragment):
        with pytest.raises(ConfigError, match=fragment):
            parse_config(text)

    @pytest.mark.parametrize("text", [
        "preset = Unknown",
        "omega = -0.1",
        "omega = 0",
        "n_cells = 0",
        "g0_prime = 0",
        "omega_min = 0.1\nomega_max = 0.01",
        "omega_points = 0",
        "init_mode = diagonal",
        "initial_site = q7",
        "n_cells = 2\ntarget_site = a9",
        "workers = 0",
        "j_values = -1.0",
    ])
    def test_validation_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_load_config_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(str(tmp_path / "absent.cfg"))

    def test_load_config_round_trip(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("n_cells = 3\nomega = 0.05\n", encoding="utf-8")
        config = load_config(str(path))
        assert config.n_cells == 3 and config.omega == 0.05


class TestRunConfig:
    def test_omega_grid_endpoints(self):
        grid = RunConfig(omega_min=1e-3, omega_max=1e-1, omega_points=5).omega_grid()
        assert grid.shape == (5,)
        assert grid[0] == pytest.approx(1e-3, rel=1e-12)
        assert grid[-1] == pytest.approx(1e-1, rel=1e-12)

    def test_single_point_grid(self):
        grid = RunConfig(omega_points=1, omega_min=0.02).omega_grid()
        assert grid.tolist() == [0.02]

    def test_window_defaults(self):
        config = RunConfig()
        assert config.ramp_window() == (0.0, math.pi)
        assert config.scan_window() == (0.0, 2.0 * math.pi)
        pinned = RunConfig(theta_start=1.0, theta_end=2.0)
        assert pinned.ramp_window() == (1.0, 2.0)
        assert pinned.scan_window() == (1.0, 2.0)

    def test_updated_revalidates(self):
        config = RunConfig()
        assert config.updated(n_cells=4).n_cells == 4
        with pytest.raises(ConfigError):
            config.updated(n_cells=0)

    def test_chain_spec_wraps_errors(self):
        with pytest.raises(ConfigError):
            RunConfig(g0=-1.0).chain_spec()


def sweep_rows():
    return SweepResult(rows=[
        SweepRow(preset="Custom", n_cells=2, g0=1.0, g0_prime=1.0, j_hop=0.0,
                 omega=0.1, fidelity=0.9997, norm_drift=1e-12, wall_time=0.05),
        SweepRow(preset="Custom", n_cells=2, g0=1.0, g0_prime=1.0, j_hop=0.0,
                 omega=0.3, fidelity=0.887, norm_drift=2e-12, wall_time=0.04),
    ])


def gap_rows():
    return SweepResult(rows=[
        SweepRow(preset="GapVsLength", n_cells=n, g0=1.0, g0_prime=1.0, j_hop=8.0,
                 omega=None, fidelity=None, norm_drift=None, wall_time=0.01,
                 gap_width=w)
        for n, w in [(2, 0.7556), (3, 0.1045)]
    ])


class TestCsvRoundTrips:
    def test_spectrum(self, tmp_path):
        scan = scan_spectrum(ChainSpec(n_cells=2), np.linspace(0.0, 2.0, 9))
        path = str(tmp_path / "spectrum.csv")
        emit.emit_spectrum_csv(scan, path)
        thetas, energies = emit.read_spectrum_csv(path)
        assert np.array_equal(thetas, scan.thetas)
        assert np.array_equal(energies, scan.energies)

    def test_spectrum_rejects_empty(self, tmp_path):
        scan = scan_spectrum(ChainSpec(n_cells=2), np.linspace(0.0, 2.0, 9))
        scan.thetas = np.array([])
        with pytest.raises(ValueError):
            emit.emit_spectrum_csv(scan, str(tmp_path / "x.csv"))

    def test_sweep(self, tmp_path):
        path = str(tmp_path / "sweep.csv")
        emit.emit_sweep_csv(sweep_rows(), path)
        back = emit.read_sweep_csv(path)
        assert back.rows == sweep_rows().rows

    def test_sweep_with_gap_rows(self, tmp_path):
        # omega/fidelity/norm_drift serialize as empty cells and come
        # back as None
        path = str(tmp_path / "gaps.csv")
        emit.emit_sweep_csv(gap_rows(), path)
        back = emit.read_sweep_csv(path)
        assert back.rows == gap_rows().rows
        header = open(path, encoding="utf-8").readline().strip().split(",")
        assert header == ["preset", "n_cells", "g0", "g0_prime", "j_hop", "omega",
                          "fidelity", "norm_drift", "wall_time", "gap_width"]

    def test_population(self, tmp_path):
        snapshots = [(0.0, np.array([1.0, 0.0, 0.0])),
                     (0.5, np.array([0.4, 0.5, 0.1]))]
        path = str(tmp_path / "population.csv")
        emit.emit_population_csv(snapshots, ["a1", "m1", "a2"], path)
        lines = open(path, encoding="utf-8").read().splitlines()
        assert lines[0] == "time,a1,m1,a2"
        assert len(lines) == 3
        with pytest.raises(ValueError):
            emit.emit_population_csv([], ["a1"], str(tmp_path / "empty.csv"))

    def test_edge_state(self, tmp_path):
        path = str(tmp_path / "edge.csv")
        emit.emit_edge_state_csv(["a1", "m1", "a2"],
                                 np.array([0.7, 0.0, -0.7]),
                                 np.array([0.71, 0.0, -0.7]), path)
        lines = open(path, encoding="utf-8").read().splitlines()
        assert lines[0].startswith("site,label,analytic_amplitude")
        assert len(lines) == 4


class TestManifest:
    def write_outputs(self, base):
        base.mkdir(parents=True, exist_ok=True)
        a = base / "a.csv"
        b = base / "b.svg"
        a.write_text("x,y\n1,2\n", encoding="utf-8")
        b.write_text("<svg></svg>\n", encoding="utf-8")
        manifest = base / "run_manifest.json"
        emit.write_manifest(str(manifest), {"n_cells": 2}, [str(a), str(b)], 0.1)
        return manifest

    def test_verify_fresh_manifest(self, tmp_path):
        manifest = self.write_outputs(tmp_path / "run")
        ok, lines = emit.verify_manifest(str(manifest))
        assert ok
        assert sorted(line.split()[-1] for line in lines) == ["a.csv", "b.svg"]
        assert all(line.startswith("OK") for line in lines)

    def test_manifest_survives_directory_move(self, tmp_path):
        manifest = self.write_outputs(tmp_path / "run")
        moved = tmp_path / "elsewhere"
        shutil.move(str(tmp_path / "run"), str(moved))
        ok, _ = emit.verify_manifest(str(moved / "run_manifest.json"))
        assert ok

    def test_detects_tampering(self, tmp_path):
        manifest = self.write_outputs(tmp_path / "run")
        (tmp_path / "run" / "a.csv").write_text("x,y\n1,3\n", encoding="utf-8")
        ok, lines = emit.verify_manifest(str(manifest))
        assert not ok
        assert any(line.startswith("MISMATCH") and "a.csv" in line for line in lines)

    def test_detects_missing_file(self, tmp_path):
        manifest = self.write_outputs(tmp_path / "run")
        (tmp_path / "run" / "b.svg").unlink()
        ok, lines = emit.verify_manifest(str(manifest))
        assert not ok
        assert any(line.startswith("MISSING") for line in lines)

    def test_malformed_manifest(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="not valid JSON"):
            emit.verify_manifest(str(bad))
        empty = tmp_path / "empty.json"
        empty.write_text("{}", encoding="utf-8")
        with pytest.raises(ConfigError, match="outputs"):
            emit.verify_manifest(str(empty))
        entry = tmp_path / "entry.json"
        entry.write_text(json.dumps({"outputs": [{"path": 3}]}), encoding="utf-8")
        with pytest.raises(ConfigError, match="malformed"):
            emit.verify_manifest(str(entry))

    def test_content_is_json_with_checksums(self, tmp_path):
        manifest = self.write_outputs(tmp_path / "run")
        data = json.loads(manifest.read_text(encoding="utf-8"))
        assert data["config"] == {"n_cells": 2}
        assert {out["path"] for out in data["outputs"]} == {"a.csv", "b.svg"}
        for out in data["outputs"]:
            assert len(out["sha256"]) == 64
            assert out["bytes"] > 0


class TestPlots:
    def read_svg(self, path):
        text = open(path, encoding="utf-8").read()
        assert text.startswith("<svg")
        assert text.rstrip().endswith("</svg>")
        return text

    def test_spectrum_plot(self, tmp_path):
        scan = scan_spectrum(ChainSpec(n_cells=2), np.linspace(0.0, 6.28, 40))
        path = plots.plot_spectrum(scan, str(tmp_path / "s.svg"))
        assert "polyline" in self.read_svg(path)

    def test_state_profile_plot(self, tmp_path):
        probs = np.array([0.5, 0.0, 0.3, 0.0, 0.2])
        path = plots.plot_state_profile(probs, str(tmp_path / "p.svg"),
                                        ["a1", "m1", "a2", "m2", "a3"])
        assert "rect" in self.read_svg(path)

    def test_fidelity_plot_with_threshold_and_marker(self, tmp_path):
        path = plots.plot_fidelity_sweep(sweep_rows(), str(tmp_path / "f.svg"),
                                         vline_log10_omega=-2.3, threshold=0.99)
        text = self.read_svg(path)
        assert "polyline" in text

    def test_population_plot(self, tmp_path):
        snapshots = [(0.0, np.array([1.0, 0.0])), (1.0, np.array([0.2, 0.8]))]
        path = plots.plot_population(snapshots, ["a1", "m1"], str(tmp_path / "pop.svg"))
        self.read_svg(path)

    def test_gap_plot(self, tmp_path):
        path = plots.plot_gap_vs_length(gap_rows(), str(tmp_path / "g.svg"))
        assert "circle" in self.read_svg(path)

    def test_empty_inputs_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            plots.plot_fidelity_sweep(SweepResult(rows=[]), str(tmp_path / "x.svg"))
        with pytest.raises(ValueError):
            plots.plot_population([], ["a1"], str(tmp_path / "y.svg"))


class TestCli:
    def test_spectrum_then_verify(self, tmp_path, capsys):
        out = str(tmp_path / "run")
        code = main(["spectrum", "--n-cells", "2", "--theta-points", "21",
                     "--out-dir", out])
        assert code == 0
        printed = capsys.readouterr().out
        assert "mid-gap branch energy range" in printed
        assert (tmp_path / "run" / "spectrum.csv").exists()
        assert (tmp_path / "run" / "spectrum.svg").exists()
        assert main(["verify", str(tmp_path / "run" / "run_manifest.json")]) == 0
        assert "outputs verified" in capsys.readouterr().out

    def test_verify_catches_tampering(self, tmp_path, capsys):
        out = str(tmp_path / "run")
        assert main(["spectrum", "--n-cells", "2", "--theta-points", "11",
                     "--out-dir", out, "--no-plots"]) == 0
        target = tmp_path / "run" / "spectrum.csv"
        target.write_text(target.read_text(encoding="utf-8") + "tail\n", encoding="utf-8")
        assert main(["verify", str(tmp_path / "run" / "run_manifest.json")]) == 4
        captured = capsys.readouterr()
        assert "MISMATCH" in captured.out
        assert "FAILED" in captured.err

    def test_verify_malformed_manifest_is_config_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("nope", encoding="utf-8")
        assert main(["verify", str(bad)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_evolve_prints_frozen_fidelity(self, tmp_path, capsys):
        out = str(tmp_path / "run")
        code = main(["evolve", "--n-cells", "2", "--omega", "0.3", "--out-dir", out])
        assert code == 0
        printed = capsys.readouterr().out
        assert "fidelity=0.886999232" in printed
        assert (tmp_path / "run" / "population.csv").exists()
        assert (tmp_path / "run" / "population.svg").exists()

    def test_no_plots_flag(self, tmp_path):
        out = str(tmp_path / "run")
        assert main(["evolve", "--n-cells", "1", "--omega", "0.5",
                     "--out-dir", out, "--no-plots"]) == 0
        assert (tmp_path / "run" / "population.csv").exists()
        assert not (tmp_path / "run" / "population.svg").exists()

    def test_sweep_reports_best_point(self, tmp_path, capsys):
        out = str(tmp_path / "run")
        code = main(["sweep", "--n-cells", "1", "--omega-min", "0.2",
                     "--omega-max", "0.5", "--omega-points", "3", "--out-dir", out])
        assert code == 0
        assert "best fidelity" in capsys.readouterr().out
        assert (tmp_path / "run" / "sweep.csv").exists()
        assert (tmp_path / "run" / "fidelity.svg").exists()

    def test_preset_gap_table(self, tmp_path, capsys):
        out = str(tmp_path / "run")
        code = main(["preset", "gapvslength", "--n-values", "2,3", "--out-dir", out])
        assert code == 0
        printed = capsys.readouterr().out
        assert "gap_width=0.755613772" in printed
        assert (tmp_path / "run" / "preset_GapVsLength.csv").exists()
        assert (tmp_path / "run" / "gap_width.svg").exists()

    def test_edge_state_reports_overlap(self, tmp_path, capsys):
        out = str(tmp_path / "run")
        code = main(["edge-state", "--n-cells", "5", "--out-dir", out])
        assert code == 0
        printed = capsys.readouterr().out
        assert "overlap=1.000000000000" in printed
        assert (tmp_path / "run" / "edge_state.csv").exists()

    def test_config_file_merges_with_flag_overrides(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("n_cells = 2\nomega = 0.1\nplots = false\n", encoding="utf-8")
        out = str(tmp_path / "run")
        code = main(["evolve", "--config", str(cfg), "--omega", "0.3",
                     "--out-dir", out])
        assert code == 0
        # the flag overrides the file; plots stay disabled from the file
        assert "fidelity=0.886999232" in capsys.readouterr().out
        assert not (tmp_path / "run" / "population.svg").exists()

    def test_bad_chain_flag_exits_2(self, tmp_path, capsys):
        assert main(["evolve", "--n-cells", "0", "--out-dir", str(tmp_path)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_out_of_range_site_exits_2(self, tmp_path, capsys):
        assert main(["evolve", "--n-cells", "2", "--initial-site", "a9",
                     "--out-dir", str(tmp_path)]) == 2
        capsys.readouterr()

    def test_unknown_preset_exits_2(self, tmp_path, capsys):
        assert main(["preset", "bogus", "--out-dir", str(tmp_path)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0
        assert "magchain" in capsys.readouterr().out
