"""Command-line interface: subcommands, config merging, exit codes."""
import csv
import json

import pytest

from ssopt.cli import main


def test_solve_happy_path(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    out = tmp_path / "run.json"
    code = main(["solve", "--problem", "ex1", "--n", "1000", "--method", "ss2",
                 "--tol", "1e-6", "--max-iter", "2000",
                 "--trace", str(trace), "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert "converged k=4" in captured.out
    with open(trace) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["k", "gnorm", "alpha", "t", "beta", "gamma", "seconds"]
    assert len(rows) == 6  # header + 5 iterate rows
    assert rows[1][4] == ""  # beta unused by ss2
    summary = json.loads(out.read_text())
    assert summary["method"] == "ss2" and summary["iterations"] == 4
    assert summary["status"] == "converged"


def test_solve_nonconverged_exit_code(capsys):
    code = main(["solve", "--problem", "ex3", "--n", "100", "--method", "ss1",
                 "--max-iter", "3"])
    assert code == 2
    assert "max_iter_reached" in capsys.readouterr().out


def test_usage_errors_exit_one(capsys):
    assert main(["solve", "--problem", "bogus"]) == 1
    assert main(["solve", "--method", "newton"]) == 1
    assert main(["bench", "--table", "t99"]) == 1
    assert main(["frobnicate"]) == 1
    # cg on a non-quadratic problem is an input error, not a solver failure
    assert main(["solve", "--problem", "ex3", "--method", "cg"]) == 1


def test_bench_to_file(tmp_path, capsys):
    out = tmp_path / "t8.csv"
    code = main(["bench", "--table", "t8", "--format", "csv", "--out", str(out)])
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["table", "method", "n", "iterations", "final_gnorm",
                       "cpu_seconds", "status", "seed"]
    assert [r[1] for r in rows[1:]] == ["ss1", "ss2", "ss3", "bb"]


def test_bench_to_stdout(capsys):
    code = main(["bench", "--table", "t10", "--format", "md"])
    assert code == 0
    assert "| method | k | final_gnorm | acoc |" in capsys.readouterr().out


def test_acoc_subcommand(tmp_path, capsys):
    out = tmp_path / "acoc.json"
    code = main(["acoc", "--problem", "ex1", "--n", "100", "--method", "ss2",
                 "--out", str(out)])
    assert code == 0
    assert "rho_final=3.97" in capsys.readouterr().out
    payload = json.loads(out.read_text())
    assert payload["rho_final"] == pytest.approx(3.971, abs=2e-3)
    assert payload["final_gnorm"] <= 1e-13


def test_gradcheck_subcommand(capsys):
    code = main(["gradcheck", "--problem", "ex3", "--n", "50", "--h", "1e-6"])
    captured = capsys.readouterr()
    assert code == 0
    assert "max relative error" in captured.out
    err = float(captured.out.split()[3])
    assert err <= 1e-5


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# stopping setup\nmethod = ss1\nmax-iter = 2\nproblem = ex3\nn = 64\n")
    # config alone: the cap bites
    assert main(["solve", "--config", str(cfg)]) == 2
    # explicit flag overrides the config cap
    assert main(["solve", "--config", str(cfg), "--max-iter", "2000"]) == 0
    # unknown config keys are a usage error
    bad = tmp_path / "bad.cfg"
    bad.write_text("steps = 4\n")
    assert main(["solve", "--config", str(bad)]) == 1


def test_machine_outputs_are_reproducible(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        main(["solve", "--problem", "ex9", "--n", "64", "--seed", "5",
              "--method", "ss3", "--max-iter", "50", "--out", str(out)])
        payload = json.loads(out.read_text())
        payload.pop("cpu_seconds")
        outs.append(payload)
    assert outs[0] == outs[1]


def test_solve_acoc_flag_tightens_tolerance(tmp_path):
    out = tmp_path / "run.json"
    code = main(["solve", "--problem", "ex1", "--n", "100", "--method", "ss2",
                 "--acoc", "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["final_gnorm"] <= 1e-13


def test_trace_columns_for_scalar_variant(tmp_path):
    trace = tmp_path / "trace.csv"
    code = main(["solve", "--problem", "ex1", "--n", "100", "--method", "ss3s",
                 "--trace", str(trace)])
    assert code == 0
    rows = list(csv.DictReader(trace.open()))
    first, last = rows[0], rows[-1]
    assert first["beta"] != "" and first["gamma"] != "" and first["t"] == ""
    assert last["alpha"] == "" and last["beta"] == ""
