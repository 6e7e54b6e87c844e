"""End-to-end runs of the command line front end."""

import subprocess
import sys

import numpy as np
import pytest

from nematiclab.cli import DECAY_HEADER, ENERGY_HEADER, PICARD_HEADER, VERIFY_HEADER, run_cli
from nematiclab.io import read_csv, read_snapshot


def _cfg(tmp_path, name="run.cfg", **kv):
    base = dict(resolution=16, dt=0.01, t_end=0.05, snapshot_every=1, output_dir=str(tmp_path / "out"))
    base.update(kv)
    p = tmp_path / name
    p.write_text("".join(f"{k} = {v}\n" for k, v in base.items()))
    return p


class TestSimulate:
    def test_zero_scenario(self, tmp_path):
        cfg = _cfg(tmp_path, scenario="zero")
        assert run_cli(["simulate", str(cfg)]) == 0
        out = tmp_path / "out"
        header, rows = read_csv(out / "energy.csv")
        assert tuple(header) == ENERGY_HEADER
        assert len(rows) == 6
        assert all(float(r[2]) == 0 and float(r[3]) == 0 for r in rows)
        snaps = sorted((out / "snapshots").glob("state_*.elsf"))
        assert len(snaps) == 6
        f, t = read_snapshot(snaps[-1])
        assert t == pytest.approx(0.05) and f.ncomp == 6 and not np.any(f.coeffs)
        manifest = (out / "manifest.txt").read_text()
        assert "command = simulate" in manifest and "status = ok" in manifest
        assert "config_hash = " in manifest and "initial_data_hash = " in manifest

    def test_small_data_energy_decreases(self, tmp_path):
        cfg = _cfg(tmp_path, epsilon=1e-2, seed=3)
        assert run_cli(["simulate", str(cfg)]) == 0
        _, rows = read_csv(tmp_path / "out" / "energy.csv")
        e = np.array([float(r[2]) for r in rows])
        assert np.all(np.diff(e) <= 0) and e[0] > 0

    def test_deterministic(self, tmp_path):
        for name in ("a", "b"):
            cfg = _cfg(tmp_path, name=f"{name}.cfg", output_dir=str(tmp_path / name), seed=5)
            assert run_cli(["simulate", str(cfg)]) == 0
        a, b = tmp_path / "a", tmp_path / "b"
        assert (a / "energy.csv").read_bytes() == (b / "energy.csv").read_bytes()
        for p in sorted((a / "snapshots").iterdir()):
            assert p.read_bytes() == (b / "snapshots" / p.name).read_bytes()


class TestConfigErrors:
    def test_unknown_key_reports_line(self, tmp_path, capsys):
        p = tmp_path / "bad.cfg"
        p.write_text("resolution = 16\nresolutoin = 32\n")
        assert run_cli(["simulate", str(p)]) == 1
        assert "bad.cfg:2:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert run_cli(["simulate", str(tmp_path / "none.cfg")]) == 1

    def test_unknown_command(self, tmp_path):
        assert run_cli(["explode", str(_cfg(tmp_path))]) == 1

    def test_no_arguments(self):
        assert run_cli([]) == 1


class TestPicard:
    def test_converges(self, tmp_path):
        cfg = _cfg(tmp_path, epsilon=1e-2, t_end=0.1, dt=0.01)
        assert run_cli(["picard", str(cfg), "--tol", "1e-12"]) == 0
        header, rows = read_csv(tmp_path / "out" / "picard.csv")
        assert tuple(header) == PICARD_HEADER
        assert float(rows[-1][2]) <= 1e-12
        assert (tmp_path / "out" / "picard_final.elsf").exists()
        assert (tmp_path / "out" / "manifest_picard.txt").exists()

    def test_oversized_data_exits_3(self, tmp_path):
        cfg = _cfg(tmp_path, epsilon=5000, t_end=1.0, dt=0.05)
        assert run_cli(["picard", str(cfg)]) == 3
        _, rows = read_csv(tmp_path / "out" / "picard.csv")
        ratios = [float(r[3]) for r in rows[1:]]
        assert ratios[-1] > 1 and ratios[-2] > 1
        assert not (tmp_path / "out" / "picard_final.elsf").exists()

    def test_iteration_budget_exits_2(self, tmp_path):
        cfg = _cfg(tmp_path, epsilon=1e-2, t_end=0.1, dt=0.01)
        assert run_cli(["picard", str(cfg), "--max-iter", "1", "--tol", "1e-15"]) == 2


class TestVerify:
    def test_few_seeds_pass(self, tmp_path):
        cfg = _cfg(tmp_path, seed=10)
        assert run_cli(["verify", str(cfg), "--seeds", "3"]) == 0
        header, rows = read_csv(tmp_path / "out" / "verify.csv")
        assert tuple(header) == VERIFY_HEADER
        assert len(rows) == 15
        assert {int(r[1]) for r in rows} == {10, 11, 12}
        assert all(float(r[4]) >= 0 for r in rows)
        assert [(r[0], int(r[1])) for r in rows] == sorted((r[0], int(r[1])) for r in rows)

    def test_bad_seed_count(self, tmp_path):
        assert run_cli(["verify", str(_cfg(tmp_path)), "--seeds", "0"]) == 1

    def test_deterministic_bytes(self, tmp_path):
        for name in ("a", "b"):
            cfg = _cfg(tmp_path, name=f"{name}.cfg", output_dir=str(tmp_path / name))
            assert run_cli(["verify", str(cfg), "--seeds", "2"]) == 0
        assert (tmp_path / "a" / "verify.csv").read_bytes() == (tmp_path / "b" / "verify.csv").read_bytes()


class TestSemigroupLab:
    def test_slopes_within_tolerance(self, tmp_path):
        cfg = _cfg(tmp_path, resolution=64, box_len=16 * np.pi)
        assert run_cli(["semigroup-lab", str(cfg)]) == 0
        _, fits = read_csv(tmp_path / "out" / "semigroup_fits.csv")
        assert len(fits) == 3
        assert all(abs(float(r[5])) <= 0.05 for r in fits)
        header, rows = read_csv(tmp_path / "out" / "semigroup.csv")
        assert header[0] == "t" and {r[5] for r in rows} == {"torus"}

    def test_small_box_slope_flagged(self, tmp_path):
        # on L = 8 pi the periodic images bend the L^2 curve beyond tolerance
        cfg = _cfg(tmp_path, resolution=32, box_len=8 * np.pi)
        assert run_cli(["semigroup-lab", str(cfg)]) == 2

    def test_box_too_small(self, tmp_path):
        assert run_cli(["semigroup-lab", str(_cfg(tmp_path, box_len=2.0))]) == 1


class TestDecayFitAndReport:
    def test_without_snapshots(self, tmp_path):
        assert run_cli(["decay-fit", str(_cfg(tmp_path))]) == 1

    def test_short_run_window_error(self, tmp_path):
        cfg = _cfg(tmp_path, scenario="localized_bump", box_len=8 * np.pi)
        assert run_cli(["simulate", str(cfg)]) == 0
        # snapshots end at t = 0.05, nowhere near the [1, L^2/16] window
        assert run_cli(["decay-fit", str(cfg)]) == 1

    def test_decay_fit_and_report(self, tmp_path, capsys):
        cfg = _cfg(tmp_path, scenario="localized_bump", box_len=8 * np.pi, dt=0.05, t_end=4.0, snapshot_every=4)
        assert run_cli(["simulate", str(cfg)]) == 0
        code = run_cli(["decay-fit", str(cfg)])
        assert code in (0, 2)
        header, rows = read_csv(tmp_path / "out" / "decay_fit.csv")
        assert tuple(header) == DECAY_HEADER
        assert [r[0] for r in rows] == ["u0", "u1", "d0", "d1"]
        assert run_cli(["report", str(cfg)]) == 0
        text = (tmp_path / "out" / "report.txt").read_text()
        assert "[decay_fit.csv] 4 rows" in text and "[energy.csv]" in text

    def test_report_needs_csv(self, tmp_path):
        assert run_cli(["report", str(_cfg(tmp_path))]) == 1


def test_module_entry_point(tmp_path):
    cfg = _cfg(tmp_path, scenario="zero")
    proc = subprocess.run([sys.executable, "-m", "nematiclab", "simulate", str(cfg)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "simulate:" in proc.stdout
