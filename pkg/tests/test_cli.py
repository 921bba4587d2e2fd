import functools
import json
from pathlib import Path

import numpy as np
import pytest

from app.crud.config_store import config_to_flat
from app.crud.export import TRAJECTORY_COLUMNS
from app.main import main
from app.service.closedform import energy_battery_nr, energy_charger_nr
from app.service.verification import verify_config


def read_csv(path):
    with open(path) as handle:
        header = handle.readline().strip().split(",")
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def single_line(err):
    lines = err.strip().splitlines()
    assert len(lines) == 1
    return lines[0]


class TestSimulate:

    def test_writes_trajectory(self, fig2_config, write_config, tmp_path):
        out = tmp_path / "traj.csv"
        code = main(["simulate", "--config", write_config(fig2_config), "--t-end", "10", "--dt-max", "0.1",
                     "--out", str(out)])
        assert code == 0
        header, rows = read_csv(out)
        assert header == TRAJECTORY_COLUMNS
        assert rows.shape == (101, len(TRAJECTORY_COLUMNS))
        assert rows[-1, 0] == 10.0
        np.testing.assert_array_equal(rows[:, -1], rows[:, 6])

    def test_final_energies_match_closed_form(self, fig2_config, write_config, tmp_path):
        out = tmp_path / "traj.csv"
        assert main(["simulate", "--config", write_config(fig2_config), "--t-end", "400", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        final = dict(zip(header, rows[-1]))
        assert final["t"] == 400.0
        assert final["E_B"] == pytest.approx(energy_battery_nr(fig2_config, 400.0), rel=1e-6)
        assert final["E_A"] == pytest.approx(energy_charger_nr(fig2_config, 400.0), rel=1e-6)
        assert final["E_B"] == pytest.approx(74.62, abs=0.01)
        assert final["n_a"] == pytest.approx(abs(complex(final["re_a"], final["im_a"])) ** 2, rel=1e-9)

    def test_runs_are_byte_identical(self, fig4_config, write_config, tmp_path):
        path = write_config(fig4_config)
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (first, second):
            assert main(["simulate", "--config", path, "--t-end", "50", "--out", str(out)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_overrides_apply(self, write_config, tmp_path):
        path = write_config(kappa_a=0.003, kappa_b=0.003, Gamma=0.04, drive_amplitude=0.1)
        out = tmp_path / "traj.csv"
        code = main(["simulate", "--config", path, "--set", "J_im=0.02", "--t-end", "5", "--out", str(out)])
        assert code == 0

    def test_step_guard_exit_code(self, fig5_config, write_config, capsys):
        code = main(["simulate", "--config", write_config(fig5_config), "--dt-max", "5"])
        assert code == 3
        assert single_line(capsys.readouterr().err).startswith("STEP_TOO_LARGE: ")

    def test_unexpected_failure_exit_code(self, fig2_config, write_config, capsys, monkeypatch):
        def broken(*args, **kwargs):
            raise RuntimeError("boom")
        monkeypatch.setattr("app.routers.simulation.integrate", broken)
        code = main(["simulate", "--config", write_config(fig2_config)])
        assert code == 1
        assert single_line(capsys.readouterr().err).startswith("BATTERY_ERROR: ")


class TestConfigErrors:

    def test_negative_rate(self, fig2_config, write_config, capsys):
        code = main(["simulate", "--config", write_config(fig2_config), "--set", "kappa_a=-1"])
        assert code == 2
        assert single_line(capsys.readouterr().err).startswith("NEGATIVE_RATE: ")

    def test_missing_file(self, tmp_path, capsys):
        code = main(["simulate", "--config", str(tmp_path / "absent.json")])
        assert code == 2
        assert single_line(capsys.readouterr().err).startswith("INVALID_CONFIG: ")

    def test_unknown_override_key(self, fig2_config, write_config, capsys):
        code = main(["simulate", "--config", write_config(fig2_config), "--set", "kappa_c=1"])
        assert code == 2
        assert "kappa_c" in single_line(capsys.readouterr().err)

    def test_unknown_file_key(self, write_config, capsys):
        path = write_config(kappa_a=0.1, kappa_b=0.1, Gamma=0.0, drive_amplitude=0.1, colour=3)
        assert main(["simulate", "--config", path]) == 2
        assert single_line(capsys.readouterr().err).startswith("INVALID_CONFIG: ")

    def test_malformed_override(self, fig2_config, write_config, capsys):
        assert main(["simulate", "--config", write_config(fig2_config), "--set", "kappa_a"]) == 2
        single_line(capsys.readouterr().err)

    def test_unknown_verb(self, capsys):
        assert main(["charge"]) == 2
        assert single_line(capsys.readouterr().err).startswith("USAGE_ERROR: ")

    @pytest.mark.parametrize("verb", ["simulate", "closed-form", "verify"])
    def test_format_only_for_optimize(self, fig2_config, write_config, capsys, verb):
        assert main([verb, "--config", write_config(fig2_config), "--format", "json"]) == 2
        assert single_line(capsys.readouterr().err).startswith("USAGE_ERROR: ")


class TestDumpConfig:

    def test_round_trip(self, write_config, capsys, tmp_path):
        path = write_config(kappa_a=0.003, kappa_b=0.003, Gamma=0.02, drive_amplitude=0.1, p_a_re=2.0)
        assert main(["simulate", "--config", path, "--dump-config"]) == 0
        first = capsys.readouterr().out
        dumped = json.loads(first)
        assert dumped["Gamma"] == pytest.approx(0.04, rel=1e-15)

        again = tmp_path / "dumped.json"
        again.write_text(first)
        assert main(["closed-form", "--config", str(again), "--dump-config"]) == 0
        assert capsys.readouterr().out == first

    def test_matches_validated_config(self, fig4_config, write_config, capsys):
        assert main(["verify", "--config", write_config(fig4_config), "--dump-config"]) == 0
        assert json.loads(capsys.readouterr().out) == config_to_flat(fig4_config)


class TestClosedForm:

    def test_nonreciprocal_columns(self, fig2_config, write_config, tmp_path):
        out = tmp_path / "curves.csv"
        assert main(["closed-form", "--config", write_config(fig2_config), "--points", "11", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["t", "E_B_nr", "E_A_nr", "E_B_rec", "eta_AB", "eta_BB"]
        assert rows.shape == (11, 6)
        assert np.isnan(rows[0, 4]) and np.isnan(rows[0, 5])
        assert rows[-1, 1] == pytest.approx(74.62, rel=1e-3)

    def test_reciprocal_config_keeps_defined_columns(self, fig3_reciprocal, write_config, tmp_path):
        out = tmp_path / "curves.csv"
        assert main(["closed-form", "--config", write_config(fig3_reciprocal), "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["t", "E_B_rec"]
        assert rows.shape == (1001, 2)


class TestVerify:

    def test_passing_report(self, fig2_config, write_config, tmp_path):
        out = tmp_path / "report.json"
        assert main(["verify", "--config", write_config(fig2_config), "--points", "200", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["passed"] is True
        assert set(report["variants"]) == {
            "nonreciprocal_general", "nonreciprocal_resonant", "nonreciprocal_symmetric",
            "charger_nonreciprocal", "reciprocal",
        }

    def test_failing_report_exit_code(self, fig2_config, write_config, tmp_path, capsys, monkeypatch):
        strict = functools.partial(verify_config, tolerance=1e-18)
        monkeypatch.setattr("app.routers.simulation.verify_config", strict)
        out = tmp_path / "report.json"
        code = main(["verify", "--config", write_config(fig2_config), "--points", "100", "--out", str(out)])
        assert code == 4
        assert single_line(capsys.readouterr().err).startswith("VERIFICATION_FAILED: ")
        assert json.loads(out.read_text())["passed"] is False


class TestOptimize:

    def test_json_summary(self, fig4_config, write_config, tmp_path):
        out = tmp_path / "opt.json"
        assert main(["optimize", "--config", write_config(fig4_config), "--out", str(out)]) == 0
        summary = json.loads(out.read_text())
        assert summary["x_opt"] == pytest.approx((0.1 / 0.003) ** 0.5, rel=1e-6)

    def test_csv_curve(self, fig4_config, write_config, tmp_path):
        out = tmp_path / "opt.csv"
        assert main(["optimize", "--config", write_config(fig4_config), "--format", "csv", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["x", "energy"]
        assert np.all(np.diff(rows[:, 0]) > 0)

    def test_zero_local_damping_exit_code(self, write_config, capsys):
        path = write_config(kappa_a=0.1, kappa_b=0.0, Gamma=0.01, J_im=0.005, drive_amplitude=0.1)
        assert main(["optimize", "--config", path]) == 5
        assert single_line(capsys.readouterr().err).startswith("ZERO_LOCAL_DAMPING: ")


class TestAdvantage:

    def test_grid_and_summary(self, tmp_path):
        out = tmp_path / "chi.csv"
        assert main(["advantage", "--grid", "r11:y5", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["r", "y", "chi"]
        assert rows.shape == (55, 3)
        summary = json.loads(out.with_suffix(".json").read_text())
        assert summary["violations"] == []
        assert summary["certified_region"] is True

    def test_exploratory_violations_are_reported(self, tmp_path):
        out = tmp_path / "chi.csv"
        assert main(["advantage", "--grid", "r11:y51", "--y-max", "0.5", "--out", str(out)]) == 0
        summary = json.loads(out.with_suffix(".json").read_text())
        assert summary["violations"]
        assert summary["certified_region"] is False

    @pytest.mark.parametrize("grid", ["r1:y5", "11x5", "r11"])
    def test_bad_grid(self, grid, capsys):
        assert main(["advantage", "--grid", grid]) == 2
        assert single_line(capsys.readouterr().err).startswith("INVALID_GRID: ")


class TestFigures:

    def test_writes_bundle(self, tmp_path):
        assert main(["figures", "fig2", "--out", str(tmp_path)]) == 0
        manifest = json.loads((tmp_path / "fig2_manifest.json").read_text())
        assert manifest["files"] == ["fig2a.csv", "fig2b.csv"]
        for name in manifest["files"]:
            assert Path(tmp_path / name).exists()
        header, _ = read_csv(tmp_path / "fig2a.csv")
        assert header == ["Jt", "E_A_nr", "E_B_nr"]

    def test_unknown_figure(self, tmp_path, capsys):
        assert main(["figures", "fig9", "--out", str(tmp_path)]) == 2
        assert single_line(capsys.readouterr().err).startswith("UNKNOWN_FIGURE: ")
