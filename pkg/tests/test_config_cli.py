"""Configuration parsing, artifact emission, command-line interface."""

import json

import numpy as np
import pytest

from couette_euler.analysis import NormSeries
from couette_euler.config import (DEFAULT_CONFIG, default_config, parse_config)
from couette_euler.pipeline import run_config
from couette_euler.cli import main

TINY_CONFIG = """
[params]
gamma = 1.4
mach = 0.5

[grid]
eta_min = -12.0
eta_max = 12.0
n_eta = 48

[initial.rho]
k_set = 1
amp = 1.0
width = 1.0

[initial.alpha]
k_set = 1
amp = 0.5+0.1j
width = 1.2

[run]
t_end = 20.0
sample_dt = 0.5
c_osc = 0.1
out_dir = {out}
seed = 42
"""


class TestConfig:
    def test_default_config_parses(self):
        cfg = default_config()
        assert cfg.params.gamma == 1.4
        assert cfg.params.mach == 0.5
        assert cfg.grid.n == 512
        assert cfg.t_end == 500.0
        assert cfg.fit_window == (50.0, 500.0)
        assert cfg.simulated_ks() == (1,)

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown key"):
            parse_config(DEFAULT_CONFIG + "\nstray = 1\n")

    def test_unknown_section_rejected(self):
        with pytest.raises(ValueError, match="unknown section"):
            parse_config(DEFAULT_CONFIG + "\n[extras]\nfoo = 1\n")

    def test_zero_harmonic_rejected(self):
        bad = DEFAULT_CONFIG.replace("[initial.rho]\nk_set = 1",
                                     "[initial.rho]\nk_set = 0")
        with pytest.raises(ValueError):
            parse_config(bad)

    def test_gamma_bound_rejected(self):
        with pytest.raises(ValueError):
            parse_config(DEFAULT_CONFIG.replace("gamma = 1.4", "gamma = 0.9"))

    def test_grid_must_cover_packets(self):
        bad = DEFAULT_CONFIG.replace("eta_min = -16.0", "eta_min = -2.0")
        bad = bad.replace("eta_max = 16.0", "eta_max = 2.0")
        with pytest.raises(ValueError, match="truncates"):
            parse_config(bad)

    def test_k_set_must_cover_harmonics(self):
        bad = DEFAULT_CONFIG.replace("[run]", "[run]\nk_set = 2")
        with pytest.raises(ValueError, match="cover"):
            parse_config(bad)

    def test_sweep_lists(self):
        cfg = parse_config(DEFAULT_CONFIG
                           + "\n[sweep]\ngamma = 1.4, 2.0\nmach = 0.5\n")
        assert cfg.sweep_gamma == (1.4, 2.0)
        assert cfg.sweep_mach == (0.5,)


class TestArtifacts:
    def test_csv_schema_and_determinism(self, tmp_path):
        cfg = parse_config(TINY_CONFIG.format(out=tmp_path / "a"))
        res1 = run_config(cfg)
        res2 = run_config(cfg.with_out_dir(str(tmp_path / "b")))
        csv_a = (tmp_path / "a" / "norms.csv").read_bytes()
        csv_b = (tmp_path / "b" / "norms.csv").read_bytes()
        assert csv_a == csv_b
        header = csv_a.decode().splitlines()[0]
        assert header == ",".join(NormSeries.CSV_COLUMNS)
        assert res1.passed and res2.passed

    def test_zero_data_writes_zero_series(self, tmp_path):
        cfg = parse_config("""
[params]
gamma = 1.4
mach = 1.0
[grid]
eta_min = -8.0
eta_max = 8.0
n_eta = 17
[run]
t_end = 5.0
sample_dt = 1.0
out_dir = %s
""" % (tmp_path / "zero"))
        res = run_config(cfg)
        assert res.passed
        rows = (tmp_path / "zero" / "norms.csv").read_text().splitlines()[1:]
        for row in rows:
            values = [float(tok) for tok in row.split(",")[1:]]
            assert all(v == 0.0 for v in values)

    def test_report_is_valid_json(self, tmp_path):
        cfg = parse_config(TINY_CONFIG.format(out=tmp_path / "r"))
        run_config(cfg)
        with open(tmp_path / "r" / "report.json") as handle:
            report = json.load(handle)
        assert report["status"] == "pass"
        assert "fits" in report and "bound_constants" in report


class TestCli:
    def test_simulate_exit_code_and_files(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text(TINY_CONFIG.format(out=tmp_path / "out"))
        assert main(["simulate", "--config", str(path)]) == 0
        assert (tmp_path / "out" / "norms.csv").exists()
        assert (tmp_path / "out" / "report.json").exists()

    def test_rates_on_existing_csv(self, tmp_path, capsys):
        t = np.linspace(1.0, 100.0, 120)
        lines = [",".join(NormSeries.CSV_COLUMNS)]
        for ti in t:
            row = [ti, ti ** -0.5, ti ** -1.5, ti ** 0.5, 0.1 * ti ** 0.5,
                   0.05 * ti ** 0.5, 1.0, 1.0, 0.0, 0.0, 0.0]
            lines.append(",".join(repr(float(v)) for v in row))
        csv = tmp_path / "norms.csv"
        csv.write_text("\n".join(lines) + "\n")
        assert main(["rates", "--csv", str(csv), "--t-lo", "2",
                     "--t-hi", "90"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["pvx"]["exponent"] == pytest.approx(-0.5, abs=1e-9)
        assert payload["growth"]["exponent"] == pytest.approx(0.5, abs=1e-9)

    def test_duhamel_bound_command(self, tmp_path, capsys):
        assert main(["duhamel-bound"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["status"] == "pass"
        assert payload["worst_margin"] >= -1e-6

    def test_bad_config_reports_error(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[params]\ngamma = 0.5\nmach = 1\n"
                        "[grid]\neta_min = -4\neta_max = 4\nn_eta = 9\n")
        assert main(["simulate", "--config", str(path)]) == 2

    def test_zero_mode_command(self, tmp_path, capsys):
        out = tmp_path / "zm.json"
        assert main(["zero-mode", "--mach", "1.0", "--n", "4096",
                     "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["status"] == "pass"
        assert payload["checks"][0]["max_error"] < 1e-6

    def test_oracle_compare_command(self, tmp_path):
        out = tmp_path / "oc.json"
        assert main(["oracle-compare", "--n-eta", "256", "--n-y", "1024",
                     "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["status"] == "pass"


def test_convention_comparison_side_by_side(tmp_path):
    from couette_euler.pipeline import run_convention_comparison
    cfg = parse_config(TINY_CONFIG.format(out=tmp_path / "ab"))
    combined = run_convention_comparison(cfg)
    assert combined["status"] == "pass"
    assert (tmp_path / "ab" / "convention_ab.json").exists()
    assert (tmp_path / "ab" / "derived" / "norms.csv").exists()
    assert (tmp_path / "ab" / "printed" / "norms.csv").exists()
    # the printed run reconstructs fields from exact invariants: the drift
    # is one rounding of the reconstruction identity, not a time integration
    assert combined["printed"]["invariants"]["beta_drift_max"] < 1e-14
    # the two conventions integrate genuinely different systems
    d_lyap = combined["derived"]["lyapunov"]["ratio_max"]
    p_lyap = combined["printed"]["lyapunov"]["ratio_max"]
    assert abs(d_lyap - p_lyap) > 1e-6


def test_cli_ab_conventions_flag(tmp_path):
    path = tmp_path / "cfg.ini"
    path.write_text(TINY_CONFIG.format(out=tmp_path / "out"))
    assert main(["simulate", "--config", str(path), "--ab-conventions"]) == 0
    assert (tmp_path / "out" / "convention_ab.json").exists()


def test_sweep_writes_summary(tmp_path):
    cfg_text = TINY_CONFIG.format(out=tmp_path / "sw") + \
        "\n[sweep]\ngamma = 1.4\nmach = 0.5, 1.0\n"
    cfg = parse_config(cfg_text)
    from couette_euler.pipeline import run_sweep
    summary = run_sweep(cfg)
    assert summary["status"] == "pass"
    assert len(summary["points"]) == 2
    assert (tmp_path / "sw" / "sweep_summary.json").exists()
    assert (tmp_path / "sw" / "g1.4_m0.5" / "norms.csv").exists()
