import json
import math
from dataclasses import replace
from pathlib import Path

import pytest

from udnsim import cli
from udnsim.config import parse_config

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def tiny_sweep_config(out_path, threads=None):
    return {
        "experiment": "coverage-sweep",
        "seed": 9,
        "trials": 2000,
        "threads": threads,
        "output_csv": str(out_path),
        "scenario": {
            "geometry": {"dimension": "2d"},
            "pathloss": {"exponents": [4.0]},
            "noise": {"sigma2_watts": 0.0},
            "thresholds_linear": [0.5, 5.0],
        },
        "densities": {"list_per_km2": [5.0, 50.0, 500.0]},
    }


def read_rows(path):
    lines = [l for l in Path(path).read_text().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


def run_cli(args):
    return cli.main([str(a) for a in args])


class TestRegionsTable:
    def test_reproduces_boundary_distances(self, tmp_path, capsys):
        out = tmp_path / "regions.csv"
        assert run_cli(["regions-table", "--out", out]) == 0
        header, rows = read_rows(out)
        assert header[0] == "transmitter_type"
        boundaries = {r["transmitter_type"]: float(r["small_scale_boundary_m"]) for r in rows}
        expected = {
            "cellular-macrocell": 432.0,
            "802.11b-access-point": 60.0,
            "802.11a-access-point": 146.0,
            "lte-microcell": 29.0,
            "mmwave-femtocell": 1005.0,
        }
        assert len(rows) == 5
        for name, value in expected.items():
            assert abs(boundaries[name] - value) <= 1.0
        assert "5 transmitter configurations" in capsys.readouterr().out

    def test_custom_rows(self, tmp_path):
        cfg = {
            "experiment": "regions-table",
            "output_csv": str(tmp_path / "custom.csv"),
            "regions": {
                "rows": [{"name": "lab", "frequency_hz": 1e9, "transmit_height_m": 10.0}]
            },
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        assert run_cli(["regions-table", "--config", path]) == 0
        _, rows = read_rows(tmp_path / "custom.csv")
        assert len(rows) == 1
        assert float(rows[0]["small_scale_boundary_m"]) == pytest.approx(
            4.0 * math.pi * 10.0 * 0.2 / 0.3, rel=1e-9
        )


class TestGridExample:
    def test_closed_form_row_and_cell_size_independence(self, tmp_path):
        out = tmp_path / "grid.csv"
        assert run_cli(["grid-example", "--config", CONFIG_DIR / "grid_example.json", "--out", out]) == 0
        _, rows = read_rows(out)
        by_alpha = {float(r["alpha"]): r for r in rows}
        assert set(by_alpha) == {2.0, 3.0, 4.0, 6.0}
        row = by_alpha[4.0]
        assert float(row["sir_closed_form"]) == pytest.approx(0.31522, abs=5e-6)
        assert float(row["closed_vs_sim_rel_err"]) <= 1e-12
        assert float(row["r_independence_max_rel_spread"]) <= 1e-12


class TestDeterminism:
    def test_rerun_is_byte_identical(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        out = tmp_path / "sweep.csv"
        cfg_path.write_text(json.dumps(tiny_sweep_config(out)))
        assert run_cli(["coverage-sweep", "--config", cfg_path]) == 0
        first = out.read_bytes()
        assert run_cli(["coverage-sweep", "--config", cfg_path]) == 0
        assert out.read_bytes() == first

    def test_thread_count_does_not_change_bytes(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        out = tmp_path / "sweep.csv"
        cfg_path.write_text(json.dumps(tiny_sweep_config(out)))
        assert run_cli(["coverage-sweep", "--config", cfg_path, "--threads", 1]) == 0
        solo = out.read_bytes()
        assert run_cli(["coverage-sweep", "--config", cfg_path, "--threads", 2]) == 0
        assert out.read_bytes() == solo

    def test_header_reproduces_file(self, tmp_path):
        # the embedded config is a complete recipe for the file's bytes
        cfg_path = tmp_path / "cfg.json"
        out = tmp_path / "sweep.csv"
        cfg_path.write_text(json.dumps(tiny_sweep_config(out)))
        run_cli(["coverage-sweep", "--config", cfg_path])
        first = out.read_text()
        embedded = next(l for l in first.splitlines() if l.startswith("# config: "))
        config = parse_config(embedded[len("# config: "):])
        again = tmp_path / "again.csv"
        cli.run(replace(config, output_csv=str(again)))
        assert again.read_text() == first

    def test_seed_override_changes_results(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        out = tmp_path / "sweep.csv"
        cfg_path.write_text(json.dumps(tiny_sweep_config(out)))
        run_cli(["coverage-sweep", "--config", cfg_path])
        base = out.read_text()
        run_cli(["coverage-sweep", "--config", cfg_path, "--seed", 10])
        assert out.read_text() != base


class TestCsvFormat:
    def test_columns_and_round_trip(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        out = tmp_path / "sweep.csv"
        cfg_path.write_text(json.dumps(tiny_sweep_config(out)))
        run_cli(["coverage-sweep", "--config", cfg_path])
        header, rows = read_rows(out)
        assert header == ["density_per_km2", "threshold_db", "coverage", "ci_halfwidth", "trials"]
        assert len(rows) == 6  # 3 densities x 2 thresholds
        for row in rows:
            p = float(row["coverage"])
            successes = round(p * 2000)
            assert p == successes / 2000  # 17 significant digits round-trip exactly
        assert math.isclose(float(rows[0]["threshold_db"]), 10.0 * math.log10(0.5))

    def test_throughput_column_added(self, tmp_path):
        cfg = tiny_sweep_config(tmp_path / "t.csv")
        cfg["experiment"] = "throughput-sweep"
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        run_cli(["throughput-sweep", "--config", cfg_path])
        header, rows = read_rows(tmp_path / "t.csv")
        assert header[-1] == "potential_throughput_bps_hz_km2"
        for row in rows:
            expected = (
                float(row["density_per_km2"])
                * math.log2(1.0 + 10.0 ** (float(row["threshold_db"]) / 10.0))
                * float(row["coverage"])
            )
            assert float(row["potential_throughput_bps_hz_km2"]) == pytest.approx(expected, rel=1e-9)

    def test_header_metadata_lines(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        out = tmp_path / "sweep.csv"
        cfg_path.write_text(json.dumps(tiny_sweep_config(out)))
        run_cli(["coverage-sweep", "--config", cfg_path])
        lines = out.read_text().splitlines()
        assert lines[1] == "# experiment: coverage-sweep"
        assert lines[2] == "# seed: 9"
        assert lines[3].startswith("# config: {")
        assert lines[4].startswith("# fingerprint: sha256:")


class TestErrors:
    def test_config_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"experiment": "coverage-sweep"}))
        assert run_cli(["coverage-sweep", "--config", bad]) == 2
        assert "config error" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert run_cli(["coverage-sweep", "--config", tmp_path / "nope.json"]) == 2
        assert "cannot read config" in capsys.readouterr().err

    def test_runtime_error_exit_code(self, tmp_path, capsys):
        # scaling fit with too few usable rows surfaces as a nonzero exit
        cfg = {
            "experiment": "scaling-exponent",
            "trials": 200,
            "output_csv": str(tmp_path / "s.csv"),
            "scenario": {
                "geometry": {"dimension": "2d"},
                "pathloss": {"exponents": [1.5, 4.0], "breakpoints_m": [100.0]},
                "noise": {"sigma2_watts": 0.0},
                "thresholds_linear": [1.0],
            },
            "densities": {"list_per_km2": [1.0, 2.0, 4.0, 8.0]},
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        assert run_cli(["scaling-exponent", "--config", cfg_path]) == 1
        assert "error" in capsys.readouterr().err
