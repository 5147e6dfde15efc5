"""Command-line front end.

Subcommands
-----------
eval      evaluate ``1/|x - x0|`` by one or all methods
verify    run identity and oracle checks (specfun, parabolic, elliptic, appendix)
converge  residual tables for a swept truncation parameter

Exit codes: 0 success, 1 verification failure, 2 domain error,
3 non-convergence, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import DomainError, NonConvergence, SlowDecay
from .estimator import evaluate
from .laplace3d import CylinderPoint, direct

SCHEMA = "cylharm/1"
EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_NONCONV, EXIT_USAGE = 0, 1, 2, 3, 64

METHODS = ("direct", "parabolic-k0", "parabolic-j0", "elliptic-j0", "elliptic-k0")
COORDS = ("cartesian", "parabolic", "elliptic")
SUITES = ("specfun", "parabolic", "elliptic", "appendix")

EVAL_FIELDS = (
    "method",
    "status",
    "value",
    "direct",
    "residual",
    "tail_estimate",
    "truncation_used",
    "evals",
    "reason",
)
VERIFY_FIELDS = ("suite", "name", "anchor", "deviation", "threshold", "passed")
CONVERGE_FIELDS = ("sweep", "method", "parameter", "value", "reference", "residual", "tail_estimate")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Validated settings shared by ``eval`` and ``converge``."""

    method: str
    point: tuple[float, float, float]
    source: tuple[float, float, float]
    coords: str = "cartesian"
    c_focal: float | None = None
    rel_tol: float = 1e-7
    output: str = "json"
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS + ("all",):
            raise UsageError(f"unknown method {self.method!r}")
        if self.coords not in COORDS:
            raise UsageError(f"unknown coordinate tag {self.coords!r}")
        if self.output not in ("json", "csv"):
            raise UsageError(f"unknown output format {self.output!r}")
        if not 0.0 < self.rel_tol < 1.0:
            raise UsageError("rel-tol must lie in (0, 1)")

    @property
    def methods(self) -> tuple[str, ...]:
        return METHODS if self.method == "all" else (self.method,)

    @property
    def needs_focal(self) -> bool:
        return self.coords == "elliptic" or any(m.startswith("elliptic") for m in self.methods)

    def points(self) -> tuple[CylinderPoint, CylinderPoint]:
        return self._point(self.point), self._point(self.source)

    def _point(self, t) -> CylinderPoint:
        if self.coords == "cartesian":
            return CylinderPoint(*t)
        if self.coords == "parabolic":
            return CylinderPoint.from_parabolic(*t)
        return CylinderPoint.from_elliptic(*t, c_focal=self.c_focal)

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "point": list(self.point),
            "source": list(self.source),
            "coords": self.coords,
            "c_focal": self.c_focal,
            "rel_tol": self.rel_tol,
            "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    """Round-trip-safe text for a float (17 significant digits)."""
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return "null" if x is None or math.isnan(x) else ("Infinity" if x > 0 else "-Infinity")
    return format(float(x), ".17g")


def _json(obj) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return _fmt(v) if math.isfinite(v) else "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return _fmt(float(v))
    if isinstance(v, (list, tuple)):
        return " ".join(str(int(t)) for t in v)
    return str(v)


def _render(doc: dict, records: list[dict], fields: tuple[str, ...], fmt: str) -> str:
    if fmt == "json":
        return _json({**doc, "records": records}) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in records:
        w.writerow([_csv_cell(r.get(f)) for f in fields])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threads() -> int:
    raw = os.environ.get("CYLHARM_THREADS", "")
    try:
        n = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        raise UsageError(f"CYLHARM_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def _pmap(fn, items):
    """Ordered map, parallel up to ``CYLHARM_THREADS`` workers."""
    items = list(items)
    n = min(_threads(), len(items))
    if n <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# eval


def _eval_one(method: str, cfg: RunConfig, x, x0, exact: float, timing: bool) -> dict:
    rec = {f: None for f in EVAL_FIELDS}
    rec.update(method=method, direct=exact)
    t0 = time.perf_counter()
    try:
        rep = evaluate(method, x, x0, cfg.rel_tol, cfg.c_focal)
    except (DomainError, SlowDecay) as exc:
        rec.update(status="domain-error", reason=str(exc), error=type(exc).__name__)
    except NonConvergence as exc:
        rec.update(status="non-convergence", reason=str(exc), error=type(exc).__name__)
    else:
        residual = abs(rep.value / exact - 1.0)
        rec.update(
            value=rep.value,
            residual=residual,
            tail_estimate=rep.tail_estimate,
            truncation_used=list(rep.truncation_used),
            evals=rep.evals,
            status="ok" if residual <= cfg.rel_tol else "residual-exceeds-tolerance",
        )
    if timing:
        rec["wall_time"] = time.perf_counter() - t0
    return rec


def cmd_eval(cfg: RunConfig, timing: bool = False) -> tuple[int, dict, list[dict]]:
    """One record per method.  With ``method="all"`` a method whose domain
    excludes the pair is reported as ``not-applicable`` instead of failing
    the run."""
    doc = {"schema": SCHEMA, "command": "eval", "version": __version__, "config": cfg.as_dict()}
    if cfg.needs_focal and cfg.c_focal is None:
        return EXIT_DOMAIN, {**doc, "status": "domain-error", "reason": "missing focal parameter"}, []
    if cfg.c_focal is not None and not cfg.c_focal > 0:
        return EXIT_DOMAIN, {**doc, "status": "domain-error", "reason": "c_focal must be positive"}, []
    try:
        x, x0 = cfg.points()
        exact = direct(x, x0)
    except DomainError as exc:
        return EXIT_DOMAIN, {**doc, "status": "domain-error", "reason": str(exc)}, []
    records = _pmap(lambda m: _eval_one(m, cfg, x, x0, exact, timing), cfg.methods)
    if cfg.method == "all":
        for r in records:
            if r["status"] == "domain-error":
                r["status"] = "not-applicable"
    statuses = {r["status"] for r in records}
    if "non-convergence" in statuses:
        code = EXIT_NONCONV
    elif "domain-error" in statuses:
        code = EXIT_DOMAIN
    elif "residual-exceeds-tolerance" in statuses:
        code = EXIT_FAIL
    else:
        code = EXIT_OK
    return code, {**doc, "status": "ok" if code == EXIT_OK else "failed"}, records


# ---------------------------------------------------------------------------
# verify


def cmd_verify(suite: str) -> tuple[int, dict, list[dict]]:
    """Run one suite (or ``all``); exit 1 if any check fails."""
    from .checks import SUITE_CHECKS

    if suite not in SUITES + ("all",):
        raise UsageError(f"unknown suite {suite!r}")
    names = SUITES if suite == "all" else (suite,)
    jobs = [(s, chk) for s in names for chk in SUITE_CHECKS[s]]
    records = _pmap(lambda job: job[1].run(job[0]), jobs)
    ok = all(r["passed"] for r in records)
    doc = {"schema": SCHEMA, "command": "verify", "version": __version__, "suite": suite}
    return (EXIT_OK if ok else EXIT_FAIL), {**doc, "status": "ok" if ok else "failed"}, records


# ---------------------------------------------------------------------------
# converge


def _envelope_ok(residuals: list[float], floor: float = 1e-13) -> bool:
    """No residual exceeds twice its predecessor, ignoring the rounding floor."""
    return all(b <= max(2.0 * a, floor) for a, b in zip(residuals, residuals[1:]))


def cmd_converge(cfg: RunConfig, sweep: str, values: list[float] | None = None, k: float = 1.0):
    """Residual against the exact value as the swept parameter grows.

    ``terms`` sweeps the Hermite series length of the plane K0 expansion,
    ``lambda_cutoff`` the spectral cut of the plane J0 integral (both at
    wavenumber ``k``), and ``tolerance`` the outer ``rel_tol`` of a 3-D
    method.
    """
    from .sweeps import SWEEPS

    if sweep not in SWEEPS:
        raise UsageError(f"unknown sweep {sweep!r}")
    doc = {"schema": SCHEMA, "command": "converge", "version": __version__, "sweep": sweep, "config": cfg.as_dict()}
    if sweep == "tolerance" and cfg.needs_focal and cfg.c_focal is None:
        return EXIT_DOMAIN, {**doc, "status": "domain-error", "reason": "missing focal parameter"}, []
    try:
        records = SWEEPS[sweep](cfg, values, k)
    except (DomainError, SlowDecay) as exc:
        return EXIT_DOMAIN, {**doc, "status": "domain-error", "reason": str(exc)}, []
    except NonConvergence as exc:
        return EXIT_NONCONV, {**doc, "status": "non-convergence", "reason": str(exc)}, []
    ok = _envelope_ok([r["residual"] for r in records])
    doc.update(status="ok" if ok else "failed", envelope_monotone=ok)
    return (EXIT_OK if ok else EXIT_FAIL), doc, records


# ---------------------------------------------------------------------------
# argument parsing


def _triple(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    if len(parts) != 3 or not all(math.isfinite(p) for p in parts):
        raise argparse.ArgumentTypeError(f"expected three finite comma-separated numbers, got {text!r}")
    return parts


def _values(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write to FILE instead of stdout")


def _config_args(p: argparse.ArgumentParser, method_default: str) -> None:
    p.add_argument("--method", choices=METHODS + ("all",), default=method_default)
    p.add_argument("--point", type=_triple, required=True, help="field point a,b,c")
    p.add_argument("--source", type=_triple, required=True, help="source point a,b,c")
    p.add_argument("--coords", choices=COORDS, default="cartesian", help="coordinate system of the triples")
    p.add_argument("--c-focal", type=float, default=None, help="focal parameter of the elliptic system")
    p.add_argument("--rel-tol", type=float, default=1e-7)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cylharm", description="Cylinder-coordinate expansions of 1/|x - x0|.")
    parser.add_argument("--version", action="version", version=f"cylharm {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    pe = sub.add_parser("eval", help="evaluate the reciprocal distance")
    _config_args(pe, "direct")
    _common(pe)
    pe.add_argument("--timing", action="store_true", help="add wall_time (makes output non-reproducible)")

    pv = sub.add_parser("verify", help="run verification suites")
    pv.add_argument("suite", choices=SUITES + ("all",))
    _common(pv)

    pc = sub.add_parser("converge", help="convergence tables")
    pc.add_argument("--sweep", choices=("terms", "tolerance", "lambda_cutoff"), required=True)
    _config_args(pc, "parabolic-k0")
    pc.add_argument("--values", type=_values, default=None, help="comma-separated sweep values")
    pc.add_argument("--k", type=float, default=1.0, help="wavenumber for the plane sweeps")
    _common(pc)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required (eval, verify, converge)")
        if args.command == "verify":
            code, doc, records = cmd_verify(args.suite)
            fields = VERIFY_FIELDS
        else:
            cfg = RunConfig(
                method=args.method,
                point=args.point,
                source=args.source,
                coords=args.coords,
                c_focal=args.c_focal,
                rel_tol=args.rel_tol,
                output=args.format,
                seed=args.seed,
            )
            if args.command == "eval":
                code, doc, records = cmd_eval(cfg, timing=args.timing)
                fields = EVAL_FIELDS + (("wall_time",) if args.timing else ())
            else:
                code, doc, records = cmd_converge(cfg, args.sweep, args.values, args.k)
                fields = CONVERGE_FIELDS
    except UsageError as exc:
        print(f"cylharm: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    doc["exit_code"] = code
    text = _render(doc, records, fields, args.format)
    if args.format == "csv" and not records and "reason" in doc:
        print(f"cylharm: {doc['reason']}", file=sys.stderr)
    _emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
