"""End-to-end CLI behaviour: outputs, exit codes, determinism."""

import json

import pytest

from snowrep.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestClassify:
    def test_reports_regime(self, capsys):
        code, out, _ = run(capsys, "classify", "--payoffs", "6,4,3,2", "--m", "8")
        assert code == 0
        doc = json.loads(out)
        assert doc["theorem"] == 1
        assert doc["b1"] == "5/7" and doc["b2"] == "8/7"

    def test_equality_flag_for_m2(self, capsys):
        code, out, _ = run(capsys, "classify", "--payoffs", "6,4,3,2", "--m", "2")
        assert code == 0
        assert json.loads(out)["boundary_equalities"] == ["R=(T+(m-1)P)/m"]

    def test_invalid_payoffs_exit2(self, capsys):
        code, _, err = run(capsys, "classify", "--payoffs", "3,3,1,0", "--m", "4")
        assert code == 2
        assert "T>R" in err


class TestSimulate:
    def test_writes_csv_and_summary(self, capsys, tmp_path):
        out = tmp_path / "traj.csv"
        code, summary_text, _ = run(
            capsys, "simulate", "--payoffs", "6,4,3,2", "--m", "8",
            "--x0", "0.4,0.2,0.1,0.3", "--out", str(out),
        )
        assert code == 0
        summary = json.loads(summary_text)
        assert summary["matched_label"] == "x14"
        assert summary["consistent"] is True
        assert summary["config"]["payoffs"] == "6,4,3,2"
        lines = out.read_text().strip().split("\n")
        assert lines[0].startswith("t,x1,x2,x3,x4,ratio12,ratio43,zone")
        assert len(lines) > 10

    def test_x34_start_matches_continuum(self, capsys, tmp_path):
        code, summary_text, _ = run(
            capsys, "simulate", "--payoffs", "6,4,3,2", "--m", "8",
            "--x0", "0,0,0.25,0.75", "--out", str(tmp_path / "t.csv"),
        )
        assert code == 0
        summary = json.loads(summary_text)
        assert summary["matched_label"] == "X34"
        assert float(summary["matched_param"]) == pytest.approx(0.25)

    def test_tiny_horizon_exits_3_but_writes(self, capsys, tmp_path):
        out = tmp_path / "traj.csv"
        code, summary_text, _ = run(
            capsys, "simulate", "--payoffs", "6,4,3,2", "--m", "8",
            "--x0", "0.4,0.2,0.1,0.3", "--out", str(out), "--t-max", "0.05",
        )
        assert code == 3
        assert json.loads(summary_text)["status"] == "max_time"
        assert out.exists()

    def test_byte_identical_reruns(self, capsys, tmp_path):
        argv = ["simulate", "--payoffs", "6,4,3,2", "--m", "8",
                "--x0", "0.3,0.3,0.2,0.2"]
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        run(capsys, *argv, "--out", str(first))
        run(capsys, *argv, "--out", str(second))
        assert first.read_bytes() == second.read_bytes()


class TestEquilibria:
    def test_exact_rational_catalog(self, capsys):
        code, out, _ = run(capsys, "equilibria", "--payoffs", "6,4,3,2", "--m", "2")
        assert code == 0
        doc = json.loads(out)
        points = {p["label"]: p["coords"] for p in doc["points"]}
        assert points["x14"] == ["1/3", "0", "0", "2/3"]
        assert points["x_int"] == ["7/33", "14/33", "4/33", "8/33"]
        assert doc["interior_line"]["b2"] == "1/2"


class TestBasins:
    def test_counts_over_the_two_attractors(self, capsys):
        code, out, _ = run(
            capsys, "basins", "--payoffs", "6,4,3,2", "--m", "8",
            "--samples", "25", "--seed", "7", "--t-max", "2000",
        )
        assert code == 0
        doc = json.loads(out)
        assert set(doc["counts"]) <= {"x14", "x23"}
        assert sum(doc["counts"].values()) == 25
        assert doc["prediction_violations"] == 0


class TestSeparatrix:
    def test_same_attractor_seeds_rejected(self, capsys):
        code, _, err = run(
            capsys, "separatrix", "--payoffs", "6,4,3,2", "--m", "8",
            "--seed-a", "0.4,0.2,0.1,0.3", "--seed-b", "0.5,0.2,0.05,0.25",
            "--iters", "10", "--t-max", "2000",
        )
        assert code == 2
        assert "x14" in err

    def test_sweep_emits_samples(self, capsys):
        code, out, _ = run(
            capsys, "separatrix", "--payoffs", "6,4,3,2", "--m", "8",
            "--samples", "2", "--iters", "25", "--seed", "3", "--t-max", "2000",
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0].startswith("index,x1,x2,x3,x4,gap")
        assert len(lines) == 3


class TestSweep:
    def test_grid_csv(self, capsys):
        code, out, _ = run(
            capsys, "sweep", "--payoffs", "3,2,1,0", "--m", "6",
            "--r-min", "19/10", "--r-max", "21/10", "--r-step", "1/10",
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "R,label,avg_payoff,coop_level"
        labels_at_19 = {line.split(",")[1] for line in lines[1:] if line.startswith("1.9,")}
        labels_at_21 = {line.split(",")[1] for line in lines[1:] if line.startswith("2.1,")}
        assert "x23" in labels_at_19 and "x23" not in labels_at_21

    def test_missing_grid_is_validation_error(self, capsys):
        code, _, err = run(capsys, "sweep", "--payoffs", "3,2,1,0", "--m", "6")
        assert code == 2


class TestConfigFile:
    def test_flags_override_file(self, capsys, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"payoffs": "6,4,3,2", "m": 2}))
        code, out, _ = run(capsys, "classify", "--config", str(config), "--m", "8")
        assert code == 0
        doc = json.loads(out)
        assert doc["m"] == 8
        assert doc["b1"] == "5/7"
