"""Command-line behavior: exit codes, file outputs, reproducibility."""

import json

import pytest

from padic_rmt import selftest
from padic_rmt.cli import main


def run(argv):
    return main(argv)


class TestExitCodes:
    def test_missing_source_is_config_error(self, tmp_path):
        assert run(["simulate", "--out", str(tmp_path / "x")]) == 1

    def test_unknown_command_is_usage_error(self, capsys):
        assert run(["frobnicate"]) == 1

    def test_bad_signature(self):
        assert run(["corner-dist", "--signature", "0,1", "--p", "2"]) == 1

    def test_unreadable_config(self, tmp_path):
        missing = tmp_path / "nope.json"
        assert run(["lln", "--config", str(missing)]) == 1

    def test_failing_criterion_exits_two(self, tmp_path):
        cfg = {
            "preset": "fixed-10",
            "k_max": 40,
            "trials": 2,
            "master_seed": 1,
            "tolerances": {"lln_abs": 1e-9},
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        assert run(["lln", "--config", str(path)]) == 2


class TestSimulate:
    def test_counterexample_exact_columns(self, tmp_path):
        out = tmp_path / "traj"
        assert (
            run(
                [
                    "simulate",
                    "--preset",
                    "paper-counterexample",
                    "--kmax",
                    "20",
                    "--out",
                    str(out),
                    "--seed",
                    "7",
                ]
            )
            == 0
        )
        lines = (out / "trajectory_0000.csv").read_text().splitlines()
        assert lines[0].startswith("# schema")
        header = lines[1].split(",")
        rows = [dict(zip(header, line.split(","))) for line in lines[2:]]
        assert len(rows) == 20
        for row in rows:
            k = int(row["k"])
            lam1 = sum(2 ** (k - 1 - 2 * i) for i in range(0, (k - 1) // 2 + 1))
            assert int(row["lambda_1"]) == lam1
            assert int(row["v_1"]) == 0
            assert int(row["v_2"]) == 2**k - 1
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["seed"] == 7

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert (
                run(
                    [
                        "simulate",
                        "--preset",
                        "fixed-10",
                        "--kmax",
                        "50",
                        "--trials",
                        "2",
                        "--out",
                        str(out),
                        "--seed",
                        "11",
                    ]
                )
                == 0
            )
        for name in ("trajectory_0000.csv", "trajectory_0001.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()
        ma = json.loads((a / "metadata.json").read_text())
        mb = json.loads((b / "metadata.json").read_text())
        ma.pop("timestamp")
        mb.pop("timestamp")
        assert ma == mb

    def test_gsp_simulate_checks_balance(self, tmp_path):
        out = tmp_path / "gsp"
        assert (
            run(
                [
                    "gsp-simulate",
                    "--preset",
                    "gsp4-fixed-1100",
                    "--kmax",
                    "25",
                    "--out",
                    str(out),
                    "--seed",
                    "3",
                ]
            )
            == 0
        )
        lines = (out / "trajectory_0000.csv").read_text().splitlines()
        header = lines[1].split(",")
        for line in lines[2:]:
            row = dict(zip(header, line.split(",")))
            lam = [int(row[f"lambda_{i}"]) for i in range(1, 5)]
            assert lam[0] + lam[3] == lam[1] + lam[2]


class TestPresets:
    def test_every_preset_simulates(self, tmp_path):
        from padic_rmt.presets import preset_names

        for name in preset_names():
            out = tmp_path / name
            code = run(
                [
                    "simulate",
                    "--preset",
                    name,
                    "--kmax",
                    "8",
                    "--out",
                    str(out),
                    "--seed",
                    "2",
                ]
            )
            assert code == 0, name
            assert (out / "trajectory_0000.csv").exists(), name


class TestCornerDist:
    def test_exact_table(self, capsys):
        assert run(["corner-dist", "--signature", "1,0", "--p", "2"]) == 0
        out = capsys.readouterr().out
        assert "(1,): 1/3" in out
        assert "(0,): 2/3" in out

    def test_point_mass(self, capsys):
        assert run(["corner-dist", "--signature", "3,3", "--p", "5"]) == 0
        assert "(3,): 1" in capsys.readouterr().out

    def test_monte_carlo_column(self, capsys):
        assert (
            run(
                [
                    "corner-dist",
                    "--signature",
                    "1,0",
                    "--p",
                    "2",
                    "--monte-carlo",
                    "2000",
                    "--seed",
                    "5",
                ]
            )
            == 0
        )
        out = capsys.readouterr().out
        assert "TV distance" in out
        tv = float(out.rsplit("TV distance:", 1)[1])
        assert tv <= 0.05


class TestHlEval:
    def test_value(self, capsys):
        assert (
            run(["hl-eval", "--signature", "1,0", "--points", "1,1/2", "--t", "1/2"])
            == 0
        )
        assert capsys.readouterr().out.strip() == "3/2"


class TestExperimentCommands:
    def test_lln_writes_report(self, tmp_path, capsys):
        report = tmp_path / "rep.json"
        code = run(
            [
                "lln",
                "--preset",
                "fixed-10",
                "--kmax",
                "200",
                "--trials",
                "6",
                "--seed",
                "5",
                "--out",
                str(report),
            ]
        )
        assert code == 0
        obj = json.loads(report.read_text())
        assert obj["kind"] == "lln" and obj["passed"]
        assert "PASS" in capsys.readouterr().out

    def test_bounded_diff_counterexample_is_expected_fail(self, capsys):
        code = run(
            [
                "bounded-diff",
                "--preset",
                "paper-counterexample",
                "--kmax",
                "16",
                "--trials",
                "1",
                "--seed",
                "1",
            ]
        )
        assert code == 0
        assert "non-split" in capsys.readouterr().out


class TestSelftest:
    def test_all_pass(self, capsys):
        assert run(["selftest"]) == 0
        out = capsys.readouterr().out
        assert "[FAIL]" not in out

    def test_filter(self, capsys):
        assert run(["selftest", "--filter", "hl/"]) == 0
        out = capsys.readouterr().out
        assert "padic/" not in out and "hl/" in out

    def test_corrupted_golden_fails_by_name(self, monkeypatch, capsys):
        real = selftest._golden

        def corrupted(name):
            obj = real(name)
            if name == "corner_dist_1_0_p2.json":
                obj = {"entries": [{"signature": [1], "prob": "1/2"}]}
            return obj

        monkeypatch.setattr(selftest, "_golden", corrupted)
        assert selftest.run_selftest("golden/") == 2
        out = capsys.readouterr().out
        assert "[FAIL] golden/corner-dist-1-0" in out
