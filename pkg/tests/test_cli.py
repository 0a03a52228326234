import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from tubal_krylov import cli, tns3
from tubal_krylov import tcore as tc
from tubal_krylov.errors import SymmetryError
from tubal_krylov.problems import gen_example1

EX1 = ["--problem", "example1", "--n", "100", "--s", "5", "--n3", "4", "--seed", "42"]


def read_report(d):
    with open(d / "report.json") as fh:
        return json.load(fh)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_gen_writes_problem(tmp_path):
    out = tmp_path / "p"
    assert cli.main(["gen", "--problem", "example1", "--n", "12", "--s", "2", "--n3", "3",
                     "--seed", "9", "--out", str(out)]) == 0
    a, b, xs = gen_example1(12, 2, 3, seed=9)
    np.testing.assert_array_equal(tns3.read(out / "a.tns3"), a)
    np.testing.assert_array_equal(tns3.read(out / "b.tns3"), b)
    np.testing.assert_array_equal(tns3.read(out / "x_star.tns3"), xs)
    spec = json.loads((out / "problem.json").read_text())
    assert spec == {"kind": "example1", "n": 12, "s": 2, "n3": 3, "seed": 9}


def test_gen_poisson_default_n3(tmp_path):
    assert cli.main(["gen", "--problem", "poisson3d", "--n", "5", "--out", str(tmp_path)]) == 0
    assert tns3.read(tmp_path / "a.tns3").shape == (5, 5, 5)


def test_solve_example1_then_verify(tmp_path):
    out = tmp_path / "s"
    code = cli.main(["solve", "--method", "ttg-gmres", *EX1, "--m", "10", "--tol", "1e-6",
                     "--format", "csv", "--out", str(out)])
    assert code == 0
    rep = read_report(out)
    assert rep["report"]["final_relres"] <= 1e-6
    assert rep["config"]["problem"]["seed"] == 42
    row = read_csv(out / "report.csv")[0]
    assert list(row) == cli.CSV_HEADER
    assert float(row["relres"]) == rep["report"]["final_relres"]
    assert int(row["restarts"]) == rep["report"]["restarts"]
    assert int(row["inner_steps"]) == len(rep["report"]["history"])

    gen = tmp_path / "p"
    cli.main(["gen", *EX1, "--out", str(gen)])
    code = cli.main(["verify", "--a", str(gen / "a.tns3"), "--b", str(gen / "b.tns3"),
                     "--x", str(out / "x.tns3"), "--report", str(out / "report.json")])
    assert code == 0


def test_verify_detects_mismatch(tmp_path, capsys):
    gen = tmp_path / "p"
    cli.main(["gen", "--problem", "example1", "--n", "10", "--n3", "2", "--out", str(gen)])
    out = tmp_path / "s"
    cli.main(["solve", "--a", str(gen / "a.tns3"), "--b", str(gen / "b.tns3"), "--out", str(out)])
    rep = read_report(out)
    rep["report"]["final_relres"] += 1e-3
    (out / "report.json").write_text(json.dumps(rep))
    files = ["--a", str(gen / "a.tns3"), "--b", str(gen / "b.tns3"), "--x", str(out / "x.tns3")]
    assert cli.main(["verify", *files, "--report", str(out / "report.json")]) == 4
    capsys.readouterr()
    assert cli.main(["verify", *files, "--oracle"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["oracle_rel_error"] < 1e-4


def test_solve_identity_converges_at_first_step(tmp_path):
    rng = np.random.default_rng(0)
    tns3.write(tmp_path / "a.tns3", tc.identity_t(4, 3))
    tns3.write(tmp_path / "b.tns3", rng.standard_normal((4, 2, 3)))
    assert cli.main(["solve", "--a", str(tmp_path / "a.tns3"), "--b", str(tmp_path / "b.tns3"),
                     "--out", str(tmp_path / "o")]) == 0
    hist = read_report(tmp_path / "o")["report"]["history"]
    assert len(hist) == 1 and hist[0][1] == 1


@pytest.mark.parametrize("method", ["ttgk", "oracle"])
def test_solve_other_methods(tmp_path, method):
    assert cli.main(["solve", "--method", method, "--problem", "poisson3d", "--n", "8", "--s", "2",
                     "--out", str(tmp_path), "--format", "csv"]) == 0
    assert read_csv(tmp_path / "report.csv")[0]["method"] == method


def test_ttgk_least_squares_files(tmp_path):
    rng = np.random.default_rng(3)
    tns3.write(tmp_path / "a.tns3", rng.standard_normal((10, 6, 1)))
    tns3.write(tmp_path / "b.tns3", rng.standard_normal((10, 1, 1)))
    code = cli.main(["solve", "--method", "ttgk", "--a", str(tmp_path / "a.tns3"),
                     "--b", str(tmp_path / "b.tns3"), "--out", str(tmp_path / "o")])
    assert code == 0
    assert read_report(tmp_path / "o")["report"]["termination"] == "least-squares"


def test_nonconvergence_exit_code_keeps_reports(tmp_path):
    out = tmp_path / "o"
    code = cli.main(["solve", "--problem", "example1", "--n", "30", "--n3", "3", "--m", "1",
                     "--max-restarts", "1", "--format", "csv", "--out", str(out)])
    assert code == 2
    assert (out / "report.json").exists() and (out / "report.csv").exists()
    assert (out / "x.tns3").exists()


@pytest.mark.parametrize("argv", [
    ["solve", "--method", "bogus", "--out", "x"],
    ["solve", "--problem", "example1", "--n", "5", "--out", "x"],  # missing n3
    ["solve", "--problem", "example1", "--n", "5", "--n3", "2", "--tol", "0", "--out", "x"],
    ["solve", "--problem", "example1", "--n", "5", "--n3", "2", "--m", "0", "--out", "x"],
    ["solve", "--out", "x"],
    ["frobnicate"],
    ["bench", "--problem", "example1", "--n", "5", "--n3", "2", "--method", "nope"],
])
def test_invalid_config_exit_3(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert cli.main(argv) == 3


def test_mutually_exclusive_sources(tmp_path):
    tns3.write(tmp_path / "a.tns3", np.eye(3)[:, :, None])
    code = cli.main(["solve", "--problem", "example1", "--n", "3", "--n3", "1",
                     "--a", str(tmp_path / "a.tns3"), "--b", str(tmp_path / "a.tns3"),
                     "--out", str(tmp_path / "o")])
    assert code == 3


def test_malformed_tensor_file_exit_3(tmp_path):
    (tmp_path / "a.tns3").write_bytes(b"TNS3 2 2 2\n" + bytes(3))
    code = cli.main(["solve", "--a", str(tmp_path / "a.tns3"), "--b", str(tmp_path / "a.tns3"),
                     "--out", str(tmp_path / "o")])
    assert code == 3


def test_shape_mismatch_exit_3(tmp_path):
    tns3.write(tmp_path / "a.tns3", np.ones((3, 3, 2)))
    tns3.write(tmp_path / "b.tns3", np.ones((4, 1, 2)))
    code = cli.main(["solve", "--a", str(tmp_path / "a.tns3"), "--b", str(tmp_path / "b.tns3"),
                     "--out", str(tmp_path / "o")])
    assert code == 3


def test_symmetry_failure_exit_4(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise SymmetryError("imaginary residue")

    monkeypatch.setattr(cli, "run_method", boom)
    assert cli.main(["solve", "--problem", "example1", "--n", "4", "--n3", "2",
                     "--out", str(tmp_path)]) == 4


def test_bench_table(tmp_path):
    out = tmp_path / "t.csv"
    code = cli.main(["bench", "--method", "ttg-gmres,ttgk", "--problem", "example1",
                     "--n", "10,20", "--s", "2", "--n3", "3", "--out", str(out)])
    assert code == 0
    rows = read_csv(out)
    assert [(r["method"], r["n"]) for r in rows] == [
        ("ttg-gmres", "10"), ("ttgk", "10"), ("ttg-gmres", "20"), ("ttgk", "20")]
    jout = tmp_path / "t.json"
    cli.main(["bench", "--problem", "poisson3d", "--n", "5,6", "--format", "json", "--out", str(jout)])
    rows = json.loads(jout.read_text())
    assert [r["n3"] for r in rows] == [5, 6]


def test_threads_do_not_change_results(tmp_path):
    outs = []
    for t in ("1", "2", "4"):
        d = tmp_path / t
        assert cli.main(["solve", *EX1, "--threads", t, "--format", "csv", "--out", str(d)]) == 0
        outs.append((read_report(d)["report"]["history"], (d / "x.tns3").read_bytes(),
                     read_csv(d / "report.csv")[0]["relres"]))
    assert outs[0] == outs[1] == outs[2]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "tubal_krylov", "gen", "--problem", "poisson3d",
                           "--n", "4", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "tubal_krylov", "solve", "--tol", "-1",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 3
