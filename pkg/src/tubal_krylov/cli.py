"""Command-line front end.

    tubal-krylov gen    --problem example1 --n 100 --s 5 --n3 4 --seed 42 --out DIR
    tubal-krylov solve  --method ttg-gmres --problem example1 --n 100 ... --out DIR
    tubal-krylov solve  --method ttgk --a A.tns3 --b B.tns3 --out DIR
    tubal-krylov verify --a A.tns3 --b B.tns3 --x DIR/x.tns3 --report DIR/report.json
    tubal-krylov bench  --method ttg-gmres,ttgk --problem example1 --n 50,100 --out table.csv

Exit codes: 0 success, 2 no convergence (reports are still written),
3 invalid input or configuration, 4 internal consistency failure.
"""

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from contextlib import nullcontext

import numpy as np

from . import tns3
from .errors import FormatError, ShapeError, SingularSystemError, SizeGuardError, SymmetryError, TubalError
from .problems import ProblemSpec, dense_reference_solve, make_problem
from .tcore import frob_norm, tprod
from .tkrylov import SolveReport, ttg_gmres, ttgk_solve

log = logging.getLogger(__name__)

EXIT_OK, EXIT_NOCONV, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3, 4
METHODS = ("ttg-gmres", "ttgk", "oracle")
SUCCESS = ("converged", "least-squares")
CSV_HEADER = ["method", "n", "s", "n3", "m", "restarts", "inner_steps", "relres", "seconds"]


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def _int_list(text):
    return [_positive_int(t) for t in text.split(",") if t]


def _problem_args(p, n_type=_positive_int):
    p.add_argument("--problem", choices=("example1", "poisson3d"))
    p.add_argument("--n", type=n_type, help="slice size (m0^2 for poisson3d)")
    p.add_argument("--s", type=_positive_int, default=1)
    p.add_argument("--n3", type=_positive_int)
    p.add_argument("--seed", type=int, default=0)


def _solver_args(p):
    p.add_argument("--m", type=_positive_int, default=10, help="restart length")
    p.add_argument("--tol", type=_positive_float, default=1e-6)
    p.add_argument("--max-restarts", type=_positive_int, default=50)
    p.add_argument("--kmax", type=_positive_int, default=200)
    p.add_argument("--threads", type=_positive_int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="json")


def build_parser():
    parser = _Parser(prog="tubal-krylov", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a benchmark problem as TNS3 files")
    _problem_args(g)
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="solve a problem and write x.tns3 plus a report")
    s.add_argument("--method", choices=METHODS, default="ttg-gmres")
    _problem_args(s)
    s.add_argument("--a", help="TNS3 operator (instead of --problem)")
    s.add_argument("--b", help="TNS3 right-hand side")
    s.add_argument("--x0", help="TNS3 initial guess (ttg-gmres only)")
    _solver_args(s)
    s.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="check a solution against its report or the dense oracle")
    v.add_argument("--a", required=True)
    v.add_argument("--b", required=True)
    v.add_argument("--x", required=True)
    v.add_argument("--report", help="JSON report written by solve")
    v.add_argument("--oracle", action="store_true", help="also compare with the dense solve")
    v.add_argument("--atol", type=_positive_float, default=1e-8,
                   help="allowed gap between recomputed and reported relres")
    v.add_argument("--oracle-rtol", type=_positive_float, default=1e-4)

    b = sub.add_parser("bench", help="sweep sizes and emit a results table")
    b.add_argument("--method", default="ttg-gmres", help="comma-separated methods")
    _problem_args(b, n_type=_int_list)
    _solver_args(b)
    b.set_defaults(format="csv")
    b.add_argument("--out", help="table file (default: stdout)")
    return parser


# --------------------------------------------------------------------------


def _threads(n):
    if n is None:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def _load_problem(args):
    if args.problem and (getattr(args, "a", None) or getattr(args, "b", None)):
        raise ConfigError("--problem and --a/--b are mutually exclusive")
    if args.problem:
        if args.n is None:
            raise ConfigError("--n is required with --problem")
        n3 = args.n3
        if n3 is None:
            if args.problem != "poisson3d":
                raise ConfigError("--n3 is required for example1")
            n3 = args.n
        spec = ProblemSpec(args.problem, args.n, args.s, n3, args.seed)
        a, b, _ = make_problem(spec)
        return a, b, spec.to_dict()
    if not (args.a and args.b):
        raise ConfigError("give either --problem or both --a and --b")
    return tns3.read(args.a), tns3.read(args.b), {"kind": "file", "a": args.a, "b": args.b}


def run_method(method, a, b, *, m=10, tol=1e-6, max_restarts=50, kmax=200, x0=None):
    if method == "ttg-gmres":
        return ttg_gmres(a, b, x0=x0, m=m, max_restarts=max_restarts, tol=tol)
    if method == "ttgk":
        return ttgk_solve(a, b, kmax=kmax, tol=tol)
    report = SolveReport(method="oracle", restarts=0)
    t0 = time.perf_counter()
    x = dense_reference_solve(a, b)
    report.elapsed = time.perf_counter() - t0
    report.r0_norm = report.ref_norm = frob_norm(b)
    report.final_relres = frob_norm(b - tprod(a, x)) / report.ref_norm if report.ref_norm else 0.0
    if report.final_relres < tol:
        report.termination = "converged"
    else:
        report.termination = "least-squares" if a.shape[0] != a.shape[1] else "max-iterations"
    return x, report


def _row(method, shape, s, m, report):
    n, _, n3 = shape
    return {
        "method": method,
        "n": n,
        "s": s,
        "n3": n3,
        "m": m,
        "restarts": report.restarts,
        "inner_steps": report.iterations,
        "relres": repr(float(report.final_relres)),
        "seconds": f"{report.elapsed:.6f}",
    }


def _write_csv(rows, fh):
    w = csv.DictWriter(fh, fieldnames=CSV_HEADER, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)


def cmd_gen(args):
    a, b, problem = _load_problem(args)
    os.makedirs(args.out, exist_ok=True)
    _, _, x_star = make_problem(ProblemSpec(**problem))
    tns3.write(os.path.join(args.out, "a.tns3"), a)
    tns3.write(os.path.join(args.out, "b.tns3"), b)
    tns3.write(os.path.join(args.out, "x_star.tns3"), x_star)
    with open(os.path.join(args.out, "problem.json"), "w") as fh:
        json.dump(problem, fh, indent=2)
    print(f"wrote problem {problem} to {args.out}")
    return EXIT_OK


def cmd_solve(args):
    a, b, problem = _load_problem(args)
    x0 = tns3.read(args.x0) if args.x0 else None
    if x0 is not None and args.method != "ttg-gmres":
        raise ConfigError("--x0 is only supported by ttg-gmres")
    os.makedirs(args.out, exist_ok=True)
    code = EXIT_OK
    with _threads(args.threads):
        try:
            x, report = run_method(args.method, a, b, m=args.m, tol=args.tol,
                                   max_restarts=args.max_restarts, kmax=args.kmax, x0=x0)
        except SingularSystemError as err:
            log.error("singular system: %s", err)
            x, report = np.zeros((a.shape[1], b.shape[1], a.shape[2])), SolveReport(method=args.method)
            report.termination = "singular"
    if report.termination not in SUCCESS:
        code = EXIT_NOCONV
    m_col = args.kmax if args.method == "ttgk" else args.m
    config = {
        "command": "solve",
        "method": args.method,
        "problem": problem,
        "m": args.m,
        "kmax": args.kmax,
        "tol": args.tol,
        "max_restarts": args.max_restarts,
        "threads": args.threads,
    }
    tns3.write(os.path.join(args.out, "x.tns3"), x)
    with open(os.path.join(args.out, "report.json"), "w") as fh:
        json.dump({"config": config, "report": report.to_dict()}, fh, indent=2)
    if args.format == "csv":
        with open(os.path.join(args.out, "report.csv"), "w", newline="") as fh:
            _write_csv([_row(args.method, a.shape, b.shape[1], m_col, report)], fh)
    print(f"{args.method}: {report.termination} after {report.restarts} cycle(s), "
          f"{report.iterations} inner step(s), relres {report.final_relres:.3e}, "
          f"{report.elapsed:.3f} s")
    return code


def cmd_verify(args):
    a, b, x = tns3.read(args.a), tns3.read(args.b), tns3.read(args.x)
    r0 = frob_norm(b)
    reported = None
    if args.report:
        with open(args.report) as fh:
            rep = json.load(fh)["report"]
        reported = rep["final_relres"]
        r0 = rep.get("ref_norm") or r0
    relres = frob_norm(b - tprod(a, x)) / r0 if r0 else 0.0
    out = {"relres": relres, "reported": reported, "ok": True}
    if reported is not None:
        out["gap"] = abs(relres - reported)
        out["ok"] = out["gap"] <= args.atol
    if args.oracle:
        xo = dense_reference_solve(a, b)
        err = frob_norm(x - xo) / max(frob_norm(xo), np.finfo(float).tiny)
        out["oracle_rel_error"] = err
        out["ok"] = out["ok"] and err <= args.oracle_rtol
    print(json.dumps(out))
    return EXIT_OK if out["ok"] else EXIT_INTERNAL


def cmd_bench(args):
    if not args.problem or not args.n:
        raise ConfigError("bench needs --problem and --n")
    methods = [t for t in args.method.split(",") if t]
    for meth in methods:
        if meth not in METHODS:
            raise ConfigError(f"unknown method {meth!r}")
    rows = []
    code = EXIT_OK
    with _threads(args.threads):
        for n in args.n:
            n3 = args.n3 or (n if args.problem == "poisson3d" else None)
            if n3 is None:
                raise ConfigError("--n3 is required for example1")
            a, b, _ = make_problem(ProblemSpec(args.problem, n, args.s, n3, args.seed))
            for meth in methods:
                _, report = run_method(meth, a, b, m=args.m, tol=args.tol,
                                       max_restarts=args.max_restarts, kmax=args.kmax)
                if report.termination not in SUCCESS:
                    code = EXIT_NOCONV
                rows.append(_row(meth, a.shape, args.s, args.kmax if meth == "ttgk" else args.m,
                                 report))
    if args.format == "csv":
        buf = io.StringIO()
        _write_csv(rows, buf)
        text = buf.getvalue()
    else:
        text = json.dumps(rows, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "verify": cmd_verify, "bench": cmd_bench}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except SymmetryError as err:
        print(f"internal consistency failure: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ConfigError, ShapeError, FormatError, SizeGuardError, ValueError, OSError,
            TubalError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
