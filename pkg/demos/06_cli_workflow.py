"""End-to-end command-line workflow: generate, solve, verify, benchmark.

Run: python demos/06_cli_workflow.py
"""
import subprocess
import sys
import tempfile
from pathlib import Path


def run(*args):
    cmd = [sys.executable, "-m", "tubal_krylov", *args]
    print("$ tubal-krylov", " ".join(args))
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print(proc.stdout + proc.stderr, end="")
    print(f"(exit {proc.returncode})\n")
    return proc.returncode


with tempfile.TemporaryDirectory() as tmp:
    d = Path(tmp)
    run("gen", "--problem", "example1", "--n", "100", "--s", "5", "--n3", "4", "--seed", "42",
        "--out", str(d / "prob"))
    run("solve", "--method", "ttg-gmres", "--a", str(d / "prob/a.tns3"), "--b", str(d / "prob/b.tns3"),
        "--m", "10", "--tol", "1e-6", "--format", "csv", "--out", str(d / "sol"))
    print((d / "sol/report.csv").read_text())
    run("verify", "--a", str(d / "prob/a.tns3"), "--b", str(d / "prob/b.tns3"),
        "--x", str(d / "sol/x.tns3"), "--report", str(d / "sol/report.json"), "--oracle")
    run("bench", "--method", "ttg-gmres,ttgk", "--problem", "poisson3d", "--n", "16,25,36", "--s", "3")
    # a restart length of 1 with one cycle does not converge: exit 2
    run("solve", "--problem", "example1", "--n", "50", "--n3", "3", "--m", "1", "--max-restarts", "1",
        "--out", str(d / "fail"))
