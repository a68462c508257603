"""Command-line front end; every command writes CSV.

    shrinklimit [--seed S] [--out-dir DIR] [--config FILE] COMMAND ...

Commands: rn, lt, gn, fit, simulate, limit, converge.  Output goes to
stdout, or to ``DIR/<command>.csv`` when ``--out-dir`` is given.  Exit
status is 0 on success, 1 for usage or validation errors and 2 for
numerical failures.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .diag import ReportConfig, full_report
from .dists import Exponential, HalfNormal, Tabulated
from .errors import DomainError, FitError, QuadratureError, SolverError
from .gmeasure import compute_gn, default_grid, h_report, h_report_csv
from .limitlaw import CompoundPoissonExp, Degenerate
from .mc import SimulationConfig, default_t_grid, samples_csv, simulate_sn, summary_csv, summary_stats
from .norming import ExponentialRule, Explicit, HalfNormalRule, rn_gaps
from .shrink import ShrunkenLaw, laplace_sum

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
RESIDUAL_TOL = 1e-8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    x = float(x)
    if math.isfinite(x) and x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _table(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def _ints(text: str) -> list[int]:
    return [int(float(v)) for v in text.replace(",", " ").split()]


def _grid(spec: str | None, default):
    """``None`` -> default; ``"log:lo:hi:k"`` / ``"lin:lo:hi:k"``; else explicit values."""
    if spec is None:
        return default
    if spec.startswith(("log:", "lin:")):
        kind, lo, hi, k = spec.split(":")
        f = np.geomspace if kind == "log" else np.linspace
        return f(float(lo), float(hi), int(k))
    return np.array(_floats(spec))


def _distribution(kind, rate=1.0, table=None):
    if kind in ("exp", "exponential"):
        return Exponential(float(rate))
    if kind in ("halfnormal", "half-normal"):
        return HalfNormal()
    if kind == "tabulated":
        if not table or not Path(table).exists():
            raise UsageError(f"tabulated distribution needs an existing table, got {table!r}")
        return Tabulated.from_csv(table)
    raise UsageError(f"unknown distribution {kind!r}")


def _rule(kind, a=None, lam=1.0, c=None, table=None):
    if kind in ("exp", "exponential"):
        if a is None:
            raise UsageError("rule exp needs --a")
        return ExponentialRule(float(a), float(lam))
    if kind in ("halfnormal", "half-normal"):
        if c is None:
            raise UsageError("rule halfnormal needs --c")
        return HalfNormalRule(float(c))
    if kind == "explicit":
        if not table or not Path(table).exists():
            raise UsageError(f"explicit rule needs an existing table, got {table!r}")
        return Explicit.from_csv(table)
    raise UsageError(f"unknown rule {kind!r}")


def _law(kind, a=None, lam=1.0, c=None):
    if kind in ("cpe", "compound-poisson"):
        if a is None:
            raise UsageError("compound Poisson limit needs a")
        return CompoundPoissonExp(float(a), float(lam))
    if kind == "degenerate":
        if c is None:
            raise UsageError("degenerate limit needs c")
        return Degenerate(float(c))
    raise UsageError(f"unknown limit {kind!r}")


@dataclass
class RunConfig:
    """Contents of a ``converge`` configuration file (INI format).

    Sections ``[distribution]``, ``[norming]``, ``[limit]`` and ``[run]``;
    see ``configs/example1.ini`` for a complete example.
    """

    distribution: object
    sequence: object
    law: object
    n_list: list[int]
    m: int | None
    seed: int = 0
    t_grid: np.ndarray = field(default_factory=default_t_grid)
    x_grid: np.ndarray | None = None
    method: str = "direct"
    workers: int = 1
    output: str = "converge.csv"

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise UsageError(f"config file {path} does not exist")
        cp = configparser.ConfigParser()
        cp.read(path)
        for sec in ("distribution", "norming", "limit", "run"):
            if not cp.has_section(sec):
                raise UsageError(f"{path}: missing section [{sec}]")
        here = path.parent

        def rel(value):
            return str(here / value) if value else None

        ds, ns, ls, rs = cp["distribution"], cp["norming"], cp["limit"], cp["run"]
        dist = _distribution(ds.get("kind"), ds.get("rate", "1"), rel(ds.get("table")))
        seq = _rule(ns.get("rule"), ns.get("a"), ns.get("lambda", "1"), ns.get("c"), rel(ns.get("table")))
        law = _law(ls.get("kind"), ls.get("a"), ls.get("lambda", "1"), ls.get("c"))
        n_list = _ints(rs.get("n", ""))
        if not n_list:
            raise UsageError("[run] n must list at least one index")
        m_text = rs.get("m", "10000").strip()
        m = None if m_text.lower() == "none" else int(float(m_text))
        if m is not None and m < 1:
            raise UsageError(f"[run] m must be >= 1, got {m}")
        x_grid = _grid(rs.get("x_grid"), None)
        return cls(
            dist, seq, law, n_list, m,
            seed=rs.getint("seed", 0),
            t_grid=_grid(rs.get("t_grid"), default_t_grid()),
            x_grid=x_grid,
            method=rs.get("method", "direct"),
            workers=rs.getint("workers", 1),
            output=rs.get("output", "converge.csv"),
        )


def _add_model_args(p, n_required=True):
    p.add_argument("--dist", default="exp", help="exp | halfnormal | tabulated (default exp)")
    p.add_argument("--rate", type=float, default=1.0, help="rate of the exponential law")
    p.add_argument("--table", help="CSV with header x,F for a tabulated law")
    p.add_argument("--rule", default="exp", help="exp | halfnormal | explicit (default exp)")
    p.add_argument("--a", type=float, help="parameter a of the exponential rule")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="rate lambda of the exponential rule")
    p.add_argument("--c", type=float, help="parameter c of the half-normal rule")
    p.add_argument("--rn-table", help="CSV with header n,r for an explicit rule")
    p.add_argument("--n", required=n_required, help="index n, or a comma-separated list")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shrinklimit", description=__doc__.split("\n\n")[0])
    parser.add_argument("--seed", type=int, help="seed for Monte Carlo commands (overrides config)")
    parser.add_argument("--out-dir", help="write <command>.csv files here instead of stdout")
    parser.add_argument("--config", help="INI configuration file (used by converge)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rn", help="normalizing levels r_n and gaps w_n = r_{n+1} - r_n")
    _add_model_args(p)

    p = sub.add_parser("lt", help="exact Laplace transform of S_n on a t grid")
    _add_model_args(p)
    p.add_argument("--t", help="t values (comma list) or log:lo:hi:k; default 40 log points on [0.05, 20]")

    p = sub.add_parser("gn", help="tabulate G_n on a grid")
    _add_model_args(p)
    p.add_argument("--grid", help="grid values or log:/lin: spec; default 64 log points on [0.05, 8] plus 1")

    p = sub.add_parser("fit", help="fit H_n per n and report functional-equation residuals")
    _add_model_args(p)
    p.add_argument("--shift", type=float, default=0.3, help="shift in (0, 1) for the scaled equation")

    p = sub.add_parser("simulate", help="Monte Carlo realizations of S_n")
    _add_model_args(p)
    p.add_argument("--m", type=int, required=True, help="number of replications")
    p.add_argument("--method", default="direct", choices=["direct", "exceedance"],
                   help="draw all n summands, or only the exceedances of r_n (same law)")
    p.add_argument("--workers", type=int, default=1, help="worker threads; output does not depend on it")

    p = sub.add_parser("limit", help="Laplace transform and CDF tables of a limit law")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--cpe", action="store_true", help="compound Poisson with exponential jumps")
    g.add_argument("--degenerate", action="store_true", help="point mass at c")
    p.add_argument("--a", type=float, help="Poisson intensity a")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="jump rate lambda")
    p.add_argument("--c", type=float, help="location of the point mass")
    p.add_argument("--t", help="t values (comma list) or log:/lin: spec")
    p.add_argument("--x", help="x values for a CDF table (comma list) or log:/lin: spec")

    p = sub.add_parser("converge", help="convergence report from a configuration file")
    p.add_argument("config_path", nargs="?", help="INI file (or use the global --config)")
    p.add_argument("--workers", type=int, help="override [run] workers")
    return parser


def _emit(out_dir, name, text, stdout):
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / name).write_text(text)
    else:
        stdout.write(text)


def _model(args):
    dist = _distribution(args.dist, args.rate, args.table)
    seq = _rule(args.rule, args.a, args.lam, args.c, args.rn_table)
    return dist, seq


def _cmd_rn(args, out):
    seq = _rule(args.rule, args.a, args.lam, args.c, args.rn_table)
    rows = []
    for n in _ints(args.n):
        r = seq.r(n)
        if seq.residual(n) > RESIDUAL_TOL:
            raise SolverError(f"defining equation residual {seq.residual(n):.3g} at n={n}")
        try:
            w = rn_gaps(seq, n)
        except DomainError:
            w = math.nan
        rows.append([n, repr(r), repr(w)])
    _emit(args.out_dir, "rn.csv", _table(["n", "r", "w"], rows), out)


def _cmd_lt(args, out):
    dist, seq = _model(args)
    ts = _grid(args.t, default_t_grid())
    ns = _ints(args.n)
    rows = []
    for n in ns:
        law = ShrunkenLaw(dist, seq.r(n))
        for t in ts:
            rows.append([n, _fmt(t), repr(laplace_sum(law, n, float(t)))])
    _emit(args.out_dir, "lt.csv", _table(["n", "t", "lt"], rows), out)


def _cmd_gn(args, out):
    dist, seq = _model(args)
    (n,) = _ints(args.n)[:1]
    gn = compute_gn(dist, seq, n, _grid(args.grid, default_grid()))
    _emit(args.out_dir, "gn.csv", f"# n={n}\n" + gn.to_csv(), out)


def _cmd_fit(args, out):
    dist, seq = _model(args)
    rows = h_report(dist, seq, _ints(args.n), shift=args.shift)
    _emit(args.out_dir, "fit.csv", h_report_csv(rows), out)


def _cmd_simulate(args, out):
    dist, seq = _model(args)
    (n,) = _ints(args.n)[:1]
    cfg = SimulationConfig(dist, seq, n, args.m, seed=args.seed or 0)
    samples = simulate_sn(cfg, method=args.method, workers=args.workers)
    summary = summary_csv(summary_stats(samples))
    if args.out_dir:
        _emit(args.out_dir, "simulate_samples.csv", samples_csv(samples), out)
        _emit(args.out_dir, "simulate_summary.csv", summary, out)
    else:
        out.write(summary)


def _cmd_limit(args, out):
    law = _law("cpe" if args.cpe else "degenerate", args.a, args.lam, args.c)
    ts = _grid(args.t, np.array([0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e6]))
    lt = _table(["t", "lt"], [[_fmt(t), repr(float(law.laplace(float(t))))] for t in ts])
    _emit(args.out_dir, "limit_lt.csv", lt, out)
    if args.x:
        xs = _grid(args.x, None)
        table = _table(["x", "cdf"], [[_fmt(x), repr(float(law.cdf(float(x))))] for x in xs])
        if args.out_dir:
            _emit(args.out_dir, "limit_cdf.csv", table, out)
        else:
            out.write("\n" + table)


def _cmd_converge(args, out):
    path = args.config_path or args.config
    if not path:
        raise UsageError("converge needs a configuration file")
    rc = RunConfig.from_file(path)
    seed = rc.seed if args.seed is None else args.seed
    workers = rc.workers if args.workers is None else args.workers
    report = full_report(rc.distribution, rc.sequence, rc.law, rc.n_list,
                         ReportConfig(m=rc.m, seed=seed, t_grid=rc.t_grid, x_grid=rc.x_grid,
                                      method=rc.method, workers=workers))
    _emit(args.out_dir, Path(rc.output).name, report.to_csv(), out)
    return EXIT_NUMERIC if report.failed else EXIT_OK


COMMANDS = {
    "rn": _cmd_rn, "lt": _cmd_lt, "gn": _cmd_gn, "fit": _cmd_fit,
    "simulate": _cmd_simulate, "limit": _cmd_limit, "converge": _cmd_converge,
}


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported by argparse
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        status = COMMANDS[args.command](args, stdout)
    except (UsageError, DomainError, ValueError) as exc:
        print(f"shrinklimit {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, QuadratureError, FitError) as exc:
        print(f"shrinklimit {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK if status is None else status


if __name__ == "__main__":
    sys.exit(main())
