"""Command-line front end: verdict reports, grid scans, tomography runs.

Exit codes for ``report``: 0 computed (not entangled), 2 entangled by the
radius-vs-purity criterion, 3 inconclusive (optimizer did not converge),
1 on parse or validation failure.  ``scan`` consumes a JSON job file (see
the presets/ directory) and emits deterministic RFC-4180 CSV, with floats
printed as shortest round-trip decimals.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bloch, families, gme, prodrad, qstate

__all__ = ["ScanJob", "OrderingJob", "GridAxis", "main", "entry"]

_FAMILY_KINDS = ("gwerner", "owerner", "boundent", "ghz")


# ---------------------------------------------------------------------------
# scan job model


@dataclass(frozen=True)
class GridAxis:
    lo: float
    hi: float
    steps: int

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError("steps must be >= 1")

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class ScanJob:
    """Family template with one or two swept parameters plus outputs."""

    family_template: str
    grid: dict[str, GridAxis]
    columns: tuple[str, ...]
    derived: dict[str, str] = field(default_factory=dict)
    m: int = 2
    seed: int = 0
    restarts: int | None = None
    tol: float = 1e-12
    max_sweeps: int = 500

    def __post_init__(self) -> None:
        if not 1 <= len(self.grid) <= 2:
            raise ValueError("scan jobs sweep one or two parameters")
        reachable = set(self.derived)
        for name in self.grid:
            if ("{%s}" % name) not in self.family_template and not any(
                name in expr for expr in self.derived.values()
            ):
                raise ValueError(f"swept parameter {name!r} not used by the template")
        for name in reachable:
            if ("{%s}" % name) not in self.family_template:
                raise ValueError(f"derived parameter {name!r} not used by the template")


@dataclass(frozen=True)
class OrderingJob:
    """Entanglement-ordering grid against an isotropic reference state."""

    d: int
    p_ref: float
    pprime: GridAxis
    Lambda: GridAxis
    literal_supplement: bool = False


def _eval_expr(expr: str, names: dict[str, float]) -> float:
    """Tiny arithmetic evaluator for derived scan parameters."""
    node = ast.parse(expr, mode="eval").body

    def ev(n) -> float:
        if isinstance(n, ast.Constant) and isinstance(n.value, (int, float)):
            return float(n.value)
        if isinstance(n, ast.Name) and n.id in names:
            return float(names[n.id])
        if isinstance(n, ast.UnaryOp) and isinstance(n.op, (ast.UAdd, ast.USub)):
            v = ev(n.operand)
            return v if isinstance(n.op, ast.UAdd) else -v
        if isinstance(n, ast.BinOp) and isinstance(
            n.op, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
        ):
            a, b = ev(n.left), ev(n.right)
            op = type(n.op)
            if op is ast.Add:
                return a + b
            if op is ast.Sub:
                return a - b
            if op is ast.Mult:
                return a * b
            if op is ast.Div:
                return a / b
            return a**b
        raise ValueError(f"unsupported expression {expr!r}")

    return ev(node)


def parse_job(data: dict) -> "ScanJob | OrderingJob":
    mode = data.get("mode", "family")
    if mode == "ordering":
        grid = data["grid"]
        return OrderingJob(
            d=int(data["d"]),
            p_ref=float(data["p_ref"]),
            pprime=_axis(grid["pprime"]),
            Lambda=_axis(grid["Lambda"]),
            literal_supplement=bool(data.get("literal_supplement", False)),
        )
    if mode != "family":
        raise ValueError(f"unknown scan mode {mode!r}")
    return ScanJob(
        family_template=data["family"],
        grid={name: _axis(ax) for name, ax in data["grid"].items()},
        columns=tuple(data["columns"]),
        derived=dict(data.get("derived", {})),
        m=int(data.get("m", 2)),
        seed=int(data.get("seed", 0)),
        restarts=(None if data.get("restarts") is None else int(data["restarts"])),
        tol=float(data.get("tol", 1e-12)),
        max_sweeps=int(data.get("max_sweeps", 500)),
    )


def _axis(d: dict) -> GridAxis:
    return GridAxis(float(d["min"]), float(d["max"]), int(d["steps"]))


# ---------------------------------------------------------------------------
# per-row column evaluation


class _RowContext:
    """Lazily computes state-derived quantities shared between columns."""

    def __init__(self, spec, job: ScanJob, row_seed: int):
        self.spec = spec
        self.job = job
        self.row_seed = row_seed
        self._rho = None
        self._report = None
        self._bform = None
        self._tomo = None
        self._refs = None

    @property
    def rho(self):
        if self._rho is None:
            self._rho = families.build(self.spec)
        return self._rho

    @property
    def report(self) -> gme.BoundReport:
        if self._report is None:
            cfg = prodrad.SeeSawConfig(
                restarts=self.job.restarts,
                tol=self.job.tol,
                seed=self.row_seed,
                max_sweeps=self.job.max_sweeps,
            )
            self._report = gme.bound_report(self.rho, self.job.m, cfg)
        return self._report

    @property
    def bform(self):
        if self._bform is None:
            if self.rho.n_parties != 2:
                raise ValueError("Bloch columns need a bipartite state")
            M, N = self.rho.dims[0], self.rho.dims[1]
            self._bform = bloch.bloch_decompose(self.rho, M, N)
        return self._bform

    @property
    def tomo(self):
        if self._tomo is None:
            self._tomo = bloch.tomo_simulate(self.rho)
        return self._tomo

    @property
    def refs(self) -> families.ReferenceValues:
        if self._refs is None:
            self._refs = families.reference_values(self.spec)
        return self._refs


def _col_ppt(ctx: _RowContext):
    if ctx.rho.n_parties != 2:
        return None
    lo = np.linalg.eigvalsh(qstate.partial_transpose(ctx.rho, 1))[0]
    return bool(lo >= -qstate.TOL_PSD)


def _col_purity_test(ctx: _RowContext):
    pur = qstate.purity(ctx.rho)
    return any(
        qstate.purity(qstate.partial_trace(ctx.rho, {i})) < pur - 1e-12
        for i in range(ctx.rho.n_parties)
    )


def _col_threshold(name: str):
    def col(ctx: _RowContext):
        return ctx.refs.thresholds.get(name)

    return col


def _col_polar_r(ctx: _RowContext):
    if isinstance(ctx.spec, families.GeneralizedWerner):
        return 1.0 - ctx.spec.p
    return None


def _col_polar_theta(ctx: _RowContext):
    if isinstance(ctx.spec, families.GeneralizedWerner) and ctx.spec.d == 2:
        return 2.0 * math.acos(math.sqrt(ctx.spec.lam[0]))
    return None


_COLUMNS = {
    "L": lambda ctx: ctx.report.L,
    "purity": lambda ctx: qstate.purity(ctx.rho),
    "R": lambda ctx: ctx.report.R,
    "lower": lambda ctx: ctx.report.lower,
    "upper": lambda ctx: ctx.report.upper,
    "criterion": lambda ctx: (
        "inconclusive" if ctx.report.criterion_13 is None else ctx.report.criterion_13
    ),
    "converged": lambda ctx: ctx.report.converged,
    "purity_test": _col_purity_test,
    "ppt": _col_ppt,
    "bloch_lhs": lambda ctx: bloch.criterion_bloch(ctx.bform).lhs,
    "bloch_criterion": lambda ctx: bloch.criterion_bloch(ctx.bform).entangled,
    "g": lambda ctx: bloch.restricted_g(
        max(ctx.tomo.reconstructed.C11, 0.0),
        ctx.tomo.reconstructed.C12,
        max(ctx.tomo.reconstructed.C22, 0.0),
    ),
    "g_lhs": lambda ctx: bloch.tomo_verdict(ctx.tomo).lhs,
    "g_criterion": lambda ctx: bloch.tomo_verdict(ctx.tomo).entangled,
    "ref_L": lambda ctx: ctx.refs.L,
    "ref_purity": lambda ctx: ctx.refs.purity,
    "ref_E": lambda ctx: ctx.refs.E_exact,
    "ppt_threshold": _col_threshold("ppt_sep"),
    "criterion_threshold": _col_threshold("criterion"),
    "r": _col_polar_r,
    "theta": _col_polar_theta,
}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _row_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed % 2**63, index]).generate_state(1, np.uint64)[0])


def _scan_rows(job: ScanJob) -> tuple[list[str], list[list[str]]]:
    unknown = [c for c in job.columns if c not in _COLUMNS]
    if unknown:
        raise ValueError(f"unknown scan columns {unknown}")
    names = list(job.grid)
    axes = [job.grid[n].values() for n in names]
    points = [(i,) for i in range(len(axes[0]))]
    if len(axes) == 2:
        points = [(i, j) for i in range(len(axes[0])) for j in range(len(axes[1]))]

    def compute(args) -> list[str]:
        index, idx = args
        params = {n: float(axes[k][idx[k]]) for k, n in enumerate(names)}
        for dname, expr in job.derived.items():
            params[dname] = _eval_expr(expr, params)
        text = job.family_template.format(**{k: repr(v) for k, v in params.items()})
        spec = families.parse_family(text)
        ctx = _RowContext(spec, job, _row_seed(job.seed, index))
        row = [_fmt(params[n]) for n in names]
        row.extend(_fmt(_COLUMNS[c](ctx)) for c in job.columns)
        return row

    tasks = list(enumerate(points))
    workers = _worker_count()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(compute, tasks))
    else:
        rows = [compute(t) for t in tasks]
    return names + list(job.columns), rows


def _ordering_rows(job: OrderingJob) -> tuple[list[str], list[list[str]]]:
    points = gme.ordering_region(
        job.d,
        job.p_ref,
        job.pprime.values(),
        job.Lambda.values(),
        literal_supplement=job.literal_supplement,
    )
    header = ["pprime", "Lambda", "R", "lower", "E_ref", "dominates"]
    rows = [
        [_fmt(p.pprime), _fmt(p.Lambda), _fmt(p.R), _fmt(p.lower), _fmt(p.E_ref), _fmt(p.dominates)]
        for p in points
    ]
    return header, rows


def _worker_count() -> int:
    cap = os.environ.get("GMEBOUND_THREADS", "")
    workers = os.cpu_count() or 1
    if cap.strip():
        workers = min(workers, max(1, int(cap)))
    return workers


def _write_csv(header: list[str], rows: list[list[str]], out_path: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


# ---------------------------------------------------------------------------
# subcommands


def _load_input_state(text: str) -> qstate.DensityMatrix:
    kind = text.partition(":")[0]
    if kind in _FAMILY_KINDS:
        return families.build(families.parse_family(text))
    return qstate.load_state(text)


def cmd_report(args: argparse.Namespace) -> int:
    rho = _load_input_state(args.state)
    cfg = prodrad.SeeSawConfig(restarts=args.restarts, tol=args.tol, seed=args.seed)
    report = gme.bound_report(rho, args.m, cfg)
    payload = report.to_json_dict()
    out = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    if report.criterion_13 is None:
        return 3
    return 2 if report.criterion_13 else 0


def cmd_scan(args: argparse.Namespace) -> int:
    with open(args.job, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if args.seed is not None:
        data["seed"] = args.seed
    if args.restarts is not None:
        data["restarts"] = args.restarts
    if args.columns:
        data["columns"] = [c.strip() for c in args.columns.split(",") if c.strip()]
    job = parse_job(data)
    if isinstance(job, OrderingJob):
        header, rows = _ordering_rows(job)
    else:
        header, rows = _scan_rows(job)
    _write_csv(header, rows, args.out)
    return 0


def cmd_tomo(args: argparse.Namespace) -> int:
    rho = _load_input_state(args.state)
    params = bloch.tomo_simulate(rho)
    verdict = bloch.tomo_verdict(params)
    payload = params.to_json_dict()
    payload["lhs"] = verdict.lhs
    payload["entangled"] = verdict.entangled
    out = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmebound",
        description="Entanglement bounds from the product numerical radius.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rep = sub.add_parser("report", help="bound report for one state")
    rep.add_argument("state", help="family string (e.g. ghz:K=3,p=0.2) or state-file path")
    rep.add_argument("-m", "--m", type=int, default=2, help="separability level (default 2)")
    rep.add_argument("--restarts", type=int, default=None)
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("--tol", type=float, default=1e-12)
    rep.add_argument("--out", default=None)
    rep.set_defaults(func=cmd_report)

    scan = sub.add_parser("scan", help="grid scan from a JSON job file")
    scan.add_argument("job", help="job file (see presets/)")
    scan.add_argument("--out", default=None)
    scan.add_argument("--seed", type=int, default=None)
    scan.add_argument("--restarts", type=int, default=None)
    scan.add_argument("--columns", default=None, help="comma-separated column override")
    scan.set_defaults(func=cmd_scan)

    tomo = sub.add_parser("tomo", help="ten-parameter scheme on a two-qubit state")
    tomo.add_argument("state", help="family string or state-file path")
    tomo.add_argument("--out", default=None)
    tomo.set_defaults(func=cmd_tomo)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"gmebound: error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())
