import json
import subprocess
import sys
import time

import numpy as np
import pytest

from oracles import bh_quadratic
from smrscreen.cli import main
from smrscreen.io import write_f64_matrix
from smrscreen.mr_estimator import NullCalibration
from smrscreen.pvalues import write_pvalues


@pytest.fixture
def toy_file(tmp_path, toy_p):
    path = tmp_path / "toy.txt"
    write_pvalues(path, toy_p)
    return path


def _result(out):
    return json.loads((out / "result.json").read_text())


class TestCalibrate:
    def test_smoke_and_determinism(self, tmp_path):
        args = ["calibrate", "--m", "5000", "--reps", "1000", "--seed", "7"]
        assert main(args + ["--out", str(tmp_path / "a" / "cal.json")]) == 0
        assert main(args + ["--out", str(tmp_path / "b" / "cal.json")]) == 0
        a = (tmp_path / "a" / "cal.json").read_bytes()
        assert a == (tmp_path / "b" / "cal.json").read_bytes()
        assert NullCalibration.load(tmp_path / "a" / "cal.json").c_m > 0
        assert (tmp_path / "a" / "manifest.json").exists()

    def test_too_few_reps(self, tmp_path, capsys):
        assert main(["calibrate", "--m", "100", "--reps", "10", "--out",
                     str(tmp_path / "c.json")]) == 2
        assert "insufficient null replicates" in capsys.readouterr().err

    def test_missing_m(self, tmp_path):
        assert main(["calibrate", "--out", str(tmp_path / "c.json")]) == 2

    def test_from_null_matrix(self, tmp_path):
        mat = np.random.default_rng(0).random((200, 50))
        write_f64_matrix(tmp_path / "null.bin", mat)
        assert main(["calibrate", "--null-matrix", str(tmp_path / "null.bin"),
                     "--out", str(tmp_path / "c.json")]) == 0
        cal = NullCalibration.load(tmp_path / "c.json")
        assert cal.source == "permutation-matrix" and cal.m == 50 and cal.n_reps == 200

    def test_bad_flag_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["calibrate", "--m", "x"])
        assert exc.value.code == 2


class TestScreen:
    def test_forced_s_hat(self, tmp_path, toy_file):
        out = tmp_path / "out"
        assert main(["screen", "--pvals", str(toy_file), "--force-s-hat", "2",
                     "--out", str(out)]) == 0
        res = _result(out)
        assert res["k_star"] == 3 and res["selected"] == [0, 1, 2]
        tsv = (out / "selection.tsv").read_text().splitlines()
        assert len(tsv) == 11 and tsv[1].split("\t")[:2] == ["1", "0"]
        assert (out / "manifest.json").exists()

    def test_bh_matches_oracle(self, tmp_path):
        gen = np.random.default_rng(1)
        p = np.concatenate([gen.random(30) * 1e-3, gen.random(170)])
        path = tmp_path / "p.txt"
        write_pvalues(path, p)
        assert main(["screen", "--pvals", str(path), "--procedure", "bh", "--q", "0.5",
                     "--out", str(tmp_path / "o")]) == 0
        assert _result(tmp_path / "o")["k_star"] == bh_quadratic(p, 0.5)

    @pytest.mark.parametrize("procedure", ["adsmr", "cvsmr", "bh", "mdr"])
    def test_all_ones(self, tmp_path, procedure):
        path = tmp_path / "ones.txt"
        write_pvalues(path, np.ones(100))
        assert main(["calibrate", "--m", "100", "--reps", "200",
                     "--out", str(tmp_path / "cal.json")]) == 0
        assert main(["screen", "--pvals", str(path), "--cal", str(tmp_path / "cal.json"),
                     "--procedure", procedure, "--out", str(tmp_path / "o")]) == 0
        res = _result(tmp_path / "o")
        assert res["k_star"] == 0 and res["selected"] == []

    def test_full_pipeline(self, tmp_path):
        gen = np.random.default_rng(3)
        from scipy import stats
        z = gen.standard_normal(1000)
        z[:100] += 5.0
        path = tmp_path / "p.txt"
        write_pvalues(path, stats.norm.sf(z))
        main(["calibrate", "--m", "1000", "--reps", "500", "--out", str(tmp_path / "cal.json")])
        assert main(["screen", "--pvals", str(path), "--cal", str(tmp_path / "cal.json"),
                     "--out", str(tmp_path / "o")]) == 0
        res = _result(tmp_path / "o")
        assert 50 <= res["s_hat_used"] <= 150
        assert res["k_star"] >= res["s_hat_used"]
        assert main(["estimate", "--pvals", str(path), "--cal", str(tmp_path / "cal.json")]) == 0

    def test_m_mismatch(self, tmp_path, toy_file, capsys):
        main(["calibrate", "--m", "11", "--reps", "100", "--out", str(tmp_path / "cal.json")])
        assert main(["screen", "--pvals", str(toy_file), "--cal", str(tmp_path / "cal.json"),
                     "--out", str(tmp_path / "o")]) == 2
        assert "m mismatch" in capsys.readouterr().err

    def test_unreadable(self, tmp_path):
        assert main(["screen", "--pvals", str(tmp_path / "nope.txt"), "--procedure", "bh",
                     "--out", str(tmp_path / "o")]) == 2

    def test_needs_cal(self, tmp_path, toy_file):
        assert main(["screen", "--pvals", str(toy_file), "--out", str(tmp_path / "o")]) == 2


SMOKE = {"m": 100, "pis": [0.05], "mus": [3.0], "designs": [{"kind": "block", "l": 10, "rho": 0.5}],
         "n_reps": 1, "seed": 1}


class TestSimulate:
    def _run(self, tmp_path, cfg, name):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(cfg))
        return main(["simulate", "--config", str(path), "--out", str(tmp_path / name)])

    def test_smoke_fast(self, tmp_path):
        t0 = time.perf_counter()
        assert self._run(tmp_path, SMOKE, "a") == 0
        assert time.perf_counter() - t0 < 1.0
        lines = (tmp_path / "a" / "summary.tsv").read_text().splitlines()
        assert lines[0] == "scenario\tprocedure\tmetric\tmedian\tmean\tsd"
        procs = {ln.split("\t")[1] for ln in lines[1:]}
        assert {"adsmr", "bh0.5"} <= procs
        assert (tmp_path / "a" / "manifest.json").exists()

    def test_deterministic(self, tmp_path):
        cfg = dict(SMOKE, n_reps=3, mus=[2.0, 4.0])
        assert self._run(tmp_path, cfg, "a") == 0
        assert self._run(tmp_path, cfg, "b") == 0
        assert ((tmp_path / "a" / "summary.tsv").read_bytes()
                == (tmp_path / "b" / "summary.tsv").read_bytes())

    def test_threads_do_not_change_numbers(self, tmp_path):
        cfg = dict(SMOKE, n_reps=4)
        path = tmp_path / "c.json"
        path.write_text(json.dumps(cfg))
        main(["simulate", "--config", str(path), "--out", str(tmp_path / "t1"), "--threads", "1"])
        main(["simulate", "--config", str(path), "--out", str(tmp_path / "t3"), "--threads", "3"])
        assert ((tmp_path / "t1" / "summary.tsv").read_bytes()
                == (tmp_path / "t3" / "summary.tsv").read_bytes())

    def test_schema_errors_listed(self, tmp_path, capsys):
        bad = {"m": "lots", "pis": [1.5], "designs": [{"kind": "torus"}], "colour": 1}
        assert self._run(tmp_path, bad, "bad") == 2
        err = capsys.readouterr().err
        for field in ("m:", "pis:", "mus: required", "designs[0]", "colour: unknown field"):
            assert field in err


class TestReproduce:
    def test_table4_desk_passes(self, tmp_path, capsys):
        code = main(["reproduce", "--table", "4", "--scale", "desk", "--sided", "one",
                     "--out", str(tmp_path)])
        out = capsys.readouterr().out
        assert code == 0 and "overall: PASS" in out
        assert (tmp_path / "table4_desk.txt").exists()

    def test_exit_code_tracks_verdict(self, monkeypatch):
        import smrscreen.cli as cli

        monkeypatch.setattr(cli, "reproduce", lambda *a, **k: ([], False))
        assert main(["reproduce", "--table", "2"]) == 1
        monkeypatch.setattr(cli, "reproduce", lambda *a, **k: ([], True))
        assert main(["reproduce", "--table", "2"]) == 0


def test_console_entry_point(tmp_path, toy_file):
    proc = subprocess.run([sys.executable, "-m", "smrscreen", "screen", "--pvals", str(toy_file),
                           "--procedure", "bh", "--q", "0.5", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "bh: k_star" in proc.stdout
