"""Command-line front end: ``python3 -m fredgap <subcommand> [flags]``.

Every subcommand writes one table, either as CSV (header row, floats with 17
significant digits) or as a JSON document described by
``docs/output_schema.json``. Tables always carry a ``status`` column with one
of ``pass``, ``fail``, ``info`` or ``error``.

Columns per subcommand:

=================  ==============================================================
tw-table           s, det_nystrom, det_painleve, abs_diff, status
contour-vs-line    route, det, residual_imag, status
pde-check          name, coarse, fine, ratio, status
pde-check --synthetic
                   name, exact, err_coarse, err_fine, status
factorization      lam, tau, a_minus, a_plus, logdet_pearcey, logdet_airy_rho,
                   logdet_airy_sigma, delta, status
decay              tau, abs_log_det, bound_ratio, underflow, status
kernel-eval        family, route, x, y, tau, value, status
=================  ==============================================================

Exit codes: 0 when the subcommand's pass criterion holds, 1 when it does not,
2 for usage or configuration errors, 3 when a numerical routine raised.

Flag meanings: ``--order`` is the Gauss-Legendre order of the real-line route,
``--panels`` and ``--truncation`` set panels per contour segment and the ray
length of the contour route, ``--tol`` is the pass tolerance of the
subcommand, ``--route`` picks the kernel evaluation route and ``--threads``
parallelizes the PDE grid fill.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, replace

import numpy as np

from .config import FORMATS, ROUTES, RunConfig, resolve_config
from .errors import ConfigurationError, FredgapError
from .experiments import (DECAY_NYSTROM, FACTOR_NYSTROM, GridConfig, factorization_table,
                          large_tau_decay, pde_richardson, stencil_self_check)
from .fredholm import (AIRY_NYSTROM, PEARCEY_NYSTROM, ContourDetConfig, NystromConfig,
                       airy_gap_probability, contour_det_airy_complex,
                       contour_det_pearcey_complex, pearcey_gap_probability)
from .kernels import ContourKernelConfig, KernelHandle, PearceyKernelConfig
from .painleve import hastings_mcleod_solve, tw_log_gap
from .quadrature import IntervalUnion

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3
RICHARDSON_WINDOW = (3.0, 5.0)
DECAY_SPREAD = 3.0


class Table:
    def __init__(self, command: str, columns):
        self.command = command
        self.columns = list(columns)
        self.rows = []

    def add(self, **row):
        missing = set(self.columns) - set(row)
        if missing:
            raise KeyError(f"row missing columns {sorted(missing)}")
        self.rows.append([row[c] for c in self.columns])


# ---------------------------------------------------------------- formatting


def format_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def _json_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else format(v, "g")
    return v


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def _echo_config(cfg: RunConfig) -> dict:
    # output must not depend on where or how parallel it was written
    d = asdict(cfg)
    for key in ("threads", "out", "format"):
        d.pop(key)
    return {k: _json_cell(v) for k, v in d.items()}


def render_json(table: Table, cfg: RunConfig, code: int) -> str:
    doc = {
        "command": table.command,
        "config": _echo_config(cfg),
        "columns": table.columns,
        "rows": [{c: _json_cell(v) for c, v in zip(table.columns, row)} for row in table.rows],
        "passed": code == EXIT_PASS,
        "exit_code": code,
    }
    return json.dumps(doc, indent=2) + "\n"


def emit(table: Table, cfg: RunConfig, code: int, stream=None) -> None:
    text = render_csv(table) if cfg.format == "csv" else render_json(table, cfg, code)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)


# ---------------------------------------------------------------- config mapping


def nystrom_config(cfg: RunConfig, base: NystromConfig) -> NystromConfig:
    return base if cfg.order is None else replace(base, order=cfg.order)


def contour_config(cfg: RunConfig) -> ContourKernelConfig:
    out = ContourKernelConfig()
    if cfg.panels is not None:
        out = replace(out, panels=cfg.panels)
    if cfg.truncation is not None:
        out = replace(out, truncation=cfg.truncation)
    return out


def pearcey_config(cfg: RunConfig) -> PearceyKernelConfig:
    route = cfg.route if cfg.route in ("t_integral", "double_contour") else "t_integral"
    return PearceyKernelConfig(route=route, contour=contour_config(cfg))


def parse_interval(text: str):
    try:
        a, b = (float(p) for p in text.split(","))
    except ValueError as exc:
        raise ConfigurationError(f"interval must be 'a,b', got {text!r}") from exc
    return a, b


def interval_union(pairs) -> IntervalUnion:
    if not pairs:
        raise ConfigurationError("at least one --interval is required")
    return IntervalUnion.from_intervals(pairs)


def parse_floats(text: str, count: int | None = None):
    try:
        vals = [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"expected comma-separated numbers, got {text!r}") from exc
    if count is not None and len(vals) != count:
        raise ConfigurationError(f"expected {count} numbers, got {len(vals)}")
    return vals


# ---------------------------------------------------------------- commands


def cmd_tw_table(s_values, cfg: RunConfig):
    """Real-line Airy determinant on [s, inf) against the Painleve formula."""
    table = Table("tw-table", ["s", "det_nystrom", "det_painleve", "abs_diff", "status"])
    tol = cfg.tolerance(1e-6)
    code = EXIT_PASS
    hm = None
    for s in s_values:
        s = float(s)
        try:
            hm = hm or hastings_mcleod_solve(-8.0, 8.0)
            dn = airy_gap_probability(IntervalUnion.half_line(s), nystrom_config(cfg, AIRY_NYSTROM))
            dp = math.exp(tw_log_gap(s, hm))
        except FredgapError as exc:
            table.add(s=s, det_nystrom=math.nan, det_painleve=math.nan, abs_diff=math.nan,
                      status=f"error: {exc}")
            code = EXIT_ERROR
            break
        diff = abs(dn - dp)
        ok = diff <= tol
        table.add(s=s, det_nystrom=dn, det_painleve=dp, abs_diff=diff, status="pass" if ok else "fail")
        if not ok:
            code = max(code, EXIT_FAIL)
    return table, code


def cmd_contour_vs_line(family: str, intervals, tau, cfg: RunConfig):
    """Contour-operator determinant against the real-line determinant."""
    table = Table("contour-vs-line", ["route", "det", "residual_imag", "status"])
    tol = cfg.tolerance(1e-5)
    try:
        I = interval_union(intervals)
        ccfg = ContourDetConfig(contour_config(cfg))
        if family == "airy":
            line = airy_gap_probability(I, nystrom_config(cfg, AIRY_NYSTROM))
            cont = contour_det_airy_complex(I, ccfg)
        elif family == "pearcey":
            if tau is None:
                raise ConfigurationError("--tau is required for the Pearcey family")
            line = pearcey_gap_probability(I, tau, nystrom_config(cfg, PEARCEY_NYSTROM), pearcey_config(cfg))
            cont = contour_det_pearcey_complex(I, tau, ccfg)
        else:
            raise ConfigurationError(f"unknown family {family!r}")
    except ConfigurationError:
        raise
    except FredgapError as exc:
        table.add(route="error", det=math.nan, residual_imag=math.nan, status=f"error: {exc}")
        return table, EXIT_ERROR
    ok = abs(cont.real - line) <= tol
    status = "pass" if ok else "fail"
    table.add(route="nystrom", det=float(line), residual_imag=0.0, status=status)
    table.add(route="contour", det=float(cont.real), residual_imag=abs(float(cont.imag)), status=status)
    return table, EXIT_PASS if ok else EXIT_FAIL


def cmd_pde_check(center, h: float, cfg: RunConfig, synthetic: bool = False):
    """Richardson check of the PDE residuals (r1, r2 gate the exit code)."""
    if synthetic:
        table = Table("pde-check", ["name", "exact", "err_coarse", "err_fine", "status"])
        rows = stencil_self_check(tuple(center), h)
        for r in rows:
            table.add(name=r.name, exact=r.exact, err_coarse=r.err_coarse, err_fine=r.err_fine,
                      status="pass" if r.passed else "fail")
        return table, EXIT_PASS if all(r.passed for r in rows) else EXIT_FAIL
    table = Table("pde-check", ["name", "coarse", "fine", "ratio", "status"])
    gcfg = GridConfig(nystrom_config(cfg, PEARCEY_NYSTROM), pearcey_config(cfg), cfg.threads)
    try:
        rc = pde_richardson(tuple(center), h, cfg=gcfg)
    except FredgapError as exc:
        table.add(name="error", coarse=math.nan, fine=math.nan, ratio=math.nan, status=f"error: {exc}")
        return table, EXIT_ERROR
    ratios = rc.ratios()
    code = EXIT_PASS
    for name in ("r1", "r2", "r3", "r4"):
        gated = name in ("r1", "r2")
        ok = rc.passed(name, RICHARDSON_WINDOW)
        status = ("pass" if ok else "fail") if gated else "info"
        if gated and not ok:
            code = EXIT_FAIL
        table.add(name=name, coarse=getattr(rc.coarse, name), fine=getattr(rc.fine, name),
                  ratio=ratios[name], status=status)
    return table, code


def cmd_factorization(lambdas, rho: float, sigma: float, cfg: RunConfig):
    """Delta(Lambda) table; passes if no row failed and Delta strictly decreases."""
    cols = ["lam", "tau", "a_minus", "a_plus", "logdet_pearcey", "logdet_airy_rho",
            "logdet_airy_sigma", "delta", "status"]
    table = Table("factorization", cols)
    try:
        rows = factorization_table(lambdas, rho, sigma, nystrom_config(cfg, FACTOR_NYSTROM), pearcey_config(cfg))
    except FredgapError as exc:
        table.add(**{c: math.nan for c in cols[:-1]}, status=f"error: {exc}")
        return table, EXIT_ERROR
    deltas = [r.delta for r in rows]
    decreasing = all(b < a for a, b in zip(deltas, deltas[1:]))
    for r in rows:
        status = f"error: {r.note}" if r.flagged else ("pass" if decreasing else "fail")
        table.add(lam=r.lam, tau=r.tau, a_minus=r.a_minus, a_plus=r.a_plus,
                  logdet_pearcey=r.logdet_pearcey, logdet_airy_rho=r.logdet_airy_rho,
                  logdet_airy_sigma=r.logdet_airy_sigma, delta=r.delta, status=status)
    if any(r.flagged for r in rows):
        return table, EXIT_ERROR
    return table, EXIT_PASS if decreasing else EXIT_FAIL


def cmd_decay(interval, taus, cfg: RunConfig):
    """|log det| must decrease and bound_ratio must stay within a factor 3."""
    table = Table("decay", ["tau", "abs_log_det", "bound_ratio", "underflow", "status"])
    try:
        rows = large_tau_decay(tuple(interval), taus, nystrom_config(cfg, DECAY_NYSTROM), pearcey_config(cfg))
    except FredgapError as exc:
        table.add(tau=math.nan, abs_log_det=math.nan, bound_ratio=math.nan, underflow=False,
                  status=f"error: {exc}")
        return table, EXIT_ERROR
    finite = [r for r in rows if not r.underflow]
    ld = [r.abs_log_det for r in rows]
    decreasing = all(b < a for a, b in zip(ld, ld[1:]))
    ratios = [r.bound_ratio for r in finite]
    bounded = not ratios or max(ratios) < DECAY_SPREAD * min(ratios)
    ok = decreasing and bounded
    for r in rows:
        table.add(tau=r.tau, abs_log_det=r.abs_log_det, bound_ratio=r.bound_ratio, underflow=r.underflow,
                  status="pass" if ok else "fail")
    return table, EXIT_PASS if ok else EXIT_FAIL


def cmd_kernel_eval(family: str, x: float, y: float, tau: float, cfg: RunConfig):
    """Point evaluation of a kernel (debugging aid)."""
    table = Table("kernel-eval", ["family", "route", "x", "y", "tau", "value", "status"])
    if family == "airy":
        route = cfg.route or "closed_form"
        handle = KernelHandle.airy(route, contour=contour_config(cfg))
    elif family == "pearcey":
        route = cfg.route or "t_integral"
        handle = KernelHandle.pearcey_kernel(tau, route, pearcey=pearcey_config(cfg), contour=contour_config(cfg))
    else:
        raise ConfigurationError(f"unknown family {family!r}")
    try:
        value = handle(x, y)
    except ConfigurationError:
        raise
    except FredgapError as exc:
        table.add(family=family, route=route, x=x, y=y, tau=tau, value=math.nan, status=f"error: {exc}")
        return table, EXIT_ERROR
    table.add(family=family, route=route, x=float(x), y=float(y), tau=float(tau), value=value, status="info")
    return table, EXIT_PASS


# ---------------------------------------------------------------- parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--order", type=int)
    p.add_argument("--panels", type=int)
    p.add_argument("--truncation", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--route", choices=ROUTES)
    p.add_argument("--threads", type=int)
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--out")
    p.add_argument("--config", help="key = value file; flags override it")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="fredgap", description="Airy and Pearcey gap probabilities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tw-table", parents=[common], help="Nystrom vs Painleve on [s, inf)")
    p.add_argument("s", nargs="*", type=float)

    p = sub.add_parser("contour-vs-line", parents=[common], help="contour vs real-line determinant")
    p.add_argument("--family", choices=("airy", "pearcey"), required=True)
    p.add_argument("--interval", action="append", default=[], type=parse_interval,
                   help="'a,b' (repeatable; use --interval=-1,1 for negative a; b may be inf)")
    p.add_argument("--tau", type=float)

    p = sub.add_parser("pde-check", parents=[common], help="Richardson check of the PDE residuals")
    p.add_argument("--center", default="-1,1,1", help="a,b,tau")
    p.add_argument("--h", type=float, default=0.04)
    p.add_argument("--synthetic", action="store_true", help="run the stencils on a known polynomial")

    p = sub.add_parser("factorization", parents=[common], help="Pearcey vs product of Airy gaps")
    p.add_argument("--lambdas", default="1.0,1.1,1.2,1.3")
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=0.0)

    p = sub.add_parser("decay", parents=[common], help="large-tau decay on a fixed interval")
    p.add_argument("--interval", default="-1,1", type=parse_interval)
    p.add_argument("--taus", default="4,5,6")

    p = sub.add_parser("kernel-eval", parents=[common], help="evaluate a kernel at one point")
    p.add_argument("--family", choices=("airy", "pearcey"), required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--tau", type=float, default=0.0)
    return parser


def run(args: argparse.Namespace, stream=None) -> int:
    flags = {k: getattr(args, k) for k in ("order", "panels", "truncation", "tol", "route",
                                           "threads", "format", "out")}
    cfg = resolve_config(flags, args.config)
    if args.command == "tw-table":
        table, code = cmd_tw_table(args.s, cfg)
    elif args.command == "contour-vs-line":
        table, code = cmd_contour_vs_line(args.family, args.interval, args.tau, cfg)
    elif args.command == "pde-check":
        table, code = cmd_pde_check(parse_floats(args.center, 3), args.h, cfg, args.synthetic)
    elif args.command == "factorization":
        table, code = cmd_factorization(parse_floats(args.lambdas), args.rho, args.sigma, cfg)
    elif args.command == "decay":
        table, code = cmd_decay(args.interval, parse_floats(args.taus), cfg)
    else:
        table, code = cmd_kernel_eval(args.family, args.x, args.y, args.tau, cfg)
    emit(table, cfg, code, stream)
    return code


def main(argv=None, stream=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args, stream)
    except ConfigurationError as exc:
        print(f"fredgap: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
