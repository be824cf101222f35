"""Command-line front end: reproducible experiments with CSV or JSON output.

Every JSON document starts with the fully resolved configuration, so a run
can be repeated from its own output::

    radialquant epsilon --metric simanca --n 2 --m 3 --t-grid 0.1:10:20
    radialquant balanced --metric simanca --n 2 --m-range 1:10
    radialquant curvature --metric simanca --n 3 --r 1
    radialquant asymptotic --n 4 --m 2

Exit codes: 0 success, 2 configuration error, 3 precision failure,
4 domain error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import __version__
from .diastasis import berezin_condition_check
from .errors import (ConfigError, DomainError, NoClosedFormError, PrecisionError,
                     RadialQuantError)
from .geometry import curvature_fd_oracle, curvature_invariants_at, reports_agree
from .potentials import from_name
from .quantization import (QuantizationSetup, asymptotic_ratio_fit, balanced_check,
                           epsilon, monomial_norm_closed, monomial_norm_quadrature,
                           tyz_fit)

WORKERS_ENV = "RADIALQUANT_WORKERS"
COMMANDS = ("epsilon", "balanced", "curvature", "tyz", "norms", "berezin", "asymptotic")
DEFAULT_T_GRID = "0.01:25:40"


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _parse_grid(spec, log):
    try:
        start, stop, count = spec.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise ConfigError(f"grid must be start:stop:count, got {spec!r}") from None
    if count < 1 or not start > 0 or stop < start:
        raise ConfigError(f"grid {spec!r} needs 0 < start <= stop and count >= 1")
    if count == 1:
        return [start]
    pts = np.geomspace(start, stop, count) if log else np.linspace(start, stop, count)
    return [float(v) for v in pts]


def _parse_range(spec):
    try:
        lo, hi = (int(v) for v in spec.split(":"))
    except ValueError:
        raise ConfigError(f"range must be a:b with integers, got {spec!r}") from None
    if hi < lo:
        raise ConfigError(f"empty range {spec!r}")
    return list(range(lo, hi + 1))


@dataclass
class RunConfig:
    """Resolved parameters of one CLI run.

    The field order is the key order of the JSON header.
    """

    command: str
    metric: str = "simanca"
    n: int = 2
    m: List[int] = field(default_factory=lambda: [1])
    t_grid: str = DEFAULT_T_GRID
    log_grid: bool = False
    t: float = 1.0
    r: List[float] = field(default_factory=lambda: [1.0])
    K: int = 2
    k_range: str = "100:2000"
    extra_degree: int = 4
    pairs: int = 200
    seed: int = 0
    oracle: bool = False
    tail_tol: float = 1e-15
    quad_tol: float = 1e-12
    threshold: float = 1e-9
    format: str = "json"
    out: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        try:
            from_name(self.metric)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if not self.m or min(self.m) < 1:
            raise ConfigError("quantum levels must be >= 1")
        for name in ("tail_tol", "quad_tol", "threshold", "t"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if any(not r > 0 for r in self.r):
            raise ConfigError("radii must be positive")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.workers < 1 or self.K < 0 or self.pairs < 1 or self.extra_degree < 0:
            raise ConfigError("workers, K, pairs and extra_degree must be nonnegative counts")
        _parse_grid(self.t_grid, self.log_grid)
        _parse_range(self.k_range)

    def grid(self):
        return _parse_grid(self.t_grid, self.log_grid)

    def to_dict(self):
        return dataclasses.asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)


# -- workers (top level so they pickle) ----------------------------------------

def _setup(cfg, m):
    return QuantizationSetup(cfg["n"], m, from_name(cfg["metric"]),
                             tail_tol=cfg["tail_tol"], quad_epsrel=cfg["quad_tol"])


def _epsilon_task(args):
    cfg, m, t = args
    try:
        res = epsilon(_setup(cfg, m), t)
        ok = True
    except PrecisionError as exc:
        res, ok = exc.partial, False
    return {"m": m, "t": t, "epsilon": res.value, "tail_bound": res.tail_bound,
            "terms_used": res.terms_used, "converged": ok}


def _balanced_task(args):
    cfg, m, grid = args
    rep = balanced_check(_setup(cfg, m), grid)
    return {"m": m, "max_rel_deviation": rep.max_rel_deviation, "mean": rep.mean,
            "pass": rep.passed(cfg["threshold"])}


def _curvature_task(args):
    cfg, r = args
    p = from_name(cfg["metric"])
    rep = curvature_invariants_at(p, cfg["n"], r)
    row = rep.as_dict()
    if cfg["oracle"]:
        orc = curvature_fd_oracle(p, cfg["n"], r)
        ok, key, err = reports_agree(rep, orc)
        row.update({f"oracle_{k}": v for k, v in orc.as_dict().items() if k != "r"})
        row.update({"oracle_agree": ok, "worst_field": key, "worst_error": err})
    return row


def _norms_task(args):
    cfg, m, exps = args
    setup = _setup(cfg, m)
    try:
        closed = monomial_norm_closed(setup, exps)
    except NoClosedFormError:
        closed = None
    quad = monomial_norm_quadrature(setup, exps)
    rel = abs(closed - quad) / closed if closed is not None else None
    return {"m": m, "exponents": " ".join(map(str, exps)), "total": sum(exps),
            "closed": closed, "quadrature": quad, "rel_diff": rel}


def _asymptotic_task(args):
    cfg, m = args
    n = cfg["n"]
    c = asymptotic_ratio_fit(QuantizationSetup(n, m, from_name("simanca")),
                             _parse_range(cfg["k_range"]))
    expected = m * (n - 1) * (n - 2) / 2
    rel = abs(c - expected) / expected if expected else None
    return {"n": n, "m": m, "c": c, "expected": expected, "rel_error": rel}


def _map(fn, tasks, workers):
    # results come back in task order regardless of the worker count
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


# -- commands -------------------------------------------------------------------

def cmd_epsilon(config: RunConfig):
    cfg = config.to_dict()
    tasks = [(cfg, m, t) for m in config.m for t in config.grid()]
    rows = _map(_epsilon_task, tasks, config.workers)
    converged = all(r["converged"] for r in rows)
    return rows, {"status": "ok" if converged else "precision-failure"}


def cmd_balanced(config: RunConfig):
    cfg = config.to_dict()
    grid = config.grid()
    rows = _map(_balanced_task, [(cfg, m, grid) for m in config.m], config.workers)
    worst = max(r["max_rel_deviation"] for r in rows)
    return rows, {"status": "ok", "verdict": "PASS" if worst <= config.threshold else "FAIL",
                  "max_rel_deviation": worst, "threshold": config.threshold}


def cmd_curvature(config: RunConfig):
    cfg = config.to_dict()
    rows = _map(_curvature_task, [(cfg, r) for r in config.r], config.workers)
    summary = {"status": "ok"}
    if config.oracle:
        summary["oracle_agree"] = all(r["oracle_agree"] for r in rows)
    return rows, summary


def cmd_tyz(config: RunConfig):
    setup = _setup(config.to_dict(), config.m[0])
    fit = tyz_fit(setup, config.t, config.m, config.K)
    rows = [{"j": j, "a_j": a} for j, a in enumerate(fit.coefficients)]
    return rows, {"status": "ok", "residual": fit.residual,
                  "condition_number": fit.condition_number,
                  "ill_conditioned": fit.ill_conditioned, "note": fit.note}


def cmd_norms(config: RunConfig):
    cfg = config.to_dict()
    pot = from_name(config.metric)
    tasks = []
    for m in config.m:
        low = round(m * pot.log_coefficient)
        for total in range(low, low + config.extra_degree + 1):
            for head in itertools.combinations_with_replacement(range(config.n), total):
                exps = tuple(head.count(i) for i in range(config.n))
                tasks.append((cfg, m, exps))
    rows = _map(_norms_task, tasks, config.workers)
    diffs = [r["rel_diff"] for r in rows if r["rel_diff"] is not None]
    return rows, {"status": "ok", "max_rel_diff": max(diffs) if diffs else None}


def _sample_pairs(n, count, seed, r_min=0.1, r_max=5.0):
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        pts = []
        for _ in range(2):
            v = rng.normal(size=n) + 1j * rng.normal(size=n)
            pts.append(rng.uniform(r_min, r_max) * v / np.linalg.norm(v))
        pairs.append(tuple(pts))
    return pairs


def cmd_berezin(config: RunConfig):
    setup = _setup(config.to_dict(), config.m[0])
    pairs = _sample_pairs(config.n, config.pairs, config.seed)
    rep = berezin_condition_check(setup, pairs, config.grid(), config.m)
    row = {"cond1_deviation": rep.cond1_deviation, "cond1_pass": rep.cond1_pass,
           "cond2_max_exp": rep.cond2_max_exp, "cond2_violations": rep.cond2_violations,
           "cond2_pass": rep.cond2_pass, "pairs": rep.pairs}
    return [row], {"status": "ok", "verdict": "PASS" if rep.passed else "FAIL"}


def cmd_asymptotic(config: RunConfig):
    cfg = config.to_dict()
    rows = _map(_asymptotic_task, [(cfg, m) for m in config.m], config.workers)
    return rows, {"status": "ok"}


_HANDLERS = {
    "epsilon": cmd_epsilon,
    "balanced": cmd_balanced,
    "curvature": cmd_curvature,
    "tyz": cmd_tyz,
    "norms": cmd_norms,
    "berezin": cmd_berezin,
    "asymptotic": cmd_asymptotic,
}


# -- output -----------------------------------------------------------------

def render(config: RunConfig, rows, summary) -> str:
    if config.format == "json":
        doc = {"config": config.to_dict(), "version": __version__,
               "summary": summary, "rows": rows}
        return json.dumps(doc, indent=2, allow_nan=True) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radialquant",
        description="Quantization experiments for radial Kähler metrics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--metric", default=None,
                        help="flat, simanca or eguchi-hanson (default simanca)")
    common.add_argument("--n", type=int, default=None, help="complex dimension")
    levels = common.add_mutually_exclusive_group()
    levels.add_argument("--m", type=int, default=None, help="quantum level")
    levels.add_argument("--m-range", default=None, metavar="A:B",
                        help="inclusive range of quantum levels")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--workers", type=int, default=None,
                        help=f"worker processes (default ${WORKERS_ENV} or CPU count)")
    common.add_argument("--config", default=None,
                        help="JSON file whose keys override the flags")
    common.add_argument("--tail-tol", type=float, default=None)
    common.add_argument("--quad-tol", type=float, default=None)

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--t-grid", default=None, metavar="START:STOP:COUNT")
    grid.add_argument("--log-grid", action="store_true", default=None,
                      help="log-spaced grid points")

    p = sub.add_parser("epsilon", parents=[common, grid], help="tabulate epsilon(t)")
    p = sub.add_parser("balanced", parents=[common, grid], help="test constancy of epsilon")
    p.add_argument("--threshold", type=float, default=None)
    p = sub.add_parser("curvature", parents=[common], help="curvature invariants")
    p.add_argument("--r", type=float, nargs="+", default=None)
    p.add_argument("--oracle", action="store_true", default=None,
                   help="also run the finite-difference oracle")
    p = sub.add_parser("tyz", parents=[common], help="fit the expansion in powers of m")
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--K", type=int, default=None, help="highest fitted coefficient")
    p = sub.add_parser("norms", parents=[common], help="closed form vs quadrature norms")
    p.add_argument("--extra-degree", type=int, default=None,
                   help="degrees above the minimal vanishing order")
    p = sub.add_parser("berezin", parents=[common, grid], help="Berezin conditions")
    p.add_argument("--pairs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p = sub.add_parser("asymptotic", parents=[common], help="large-k ratio fit")
    p.add_argument("--k-range", default=None, metavar="A:B")
    return parser


_DEFAULT_LOG = {"balanced": True, "berezin": True}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {"command": args.command}
    for name in ("metric", "n", "t_grid", "log_grid", "t", "r", "K", "k_range",
                 "extra_degree", "pairs", "seed", "oracle", "tail_tol", "quad_tol",
                 "threshold", "format", "out", "workers"):
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    if args.m is not None:
        values["m"] = [args.m]
    elif args.m_range is not None:
        values["m"] = _parse_range(args.m_range)
    if "log_grid" not in values and "t_grid" not in values:
        values["log_grid"] = _DEFAULT_LOG.get(args.command, False)
    if args.command == "asymptotic":
        values.setdefault("n", 3)
        values["metric"] = "simanca"
    values.setdefault("workers", default_workers())
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                override = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(override, dict):
            raise ConfigError("config must be a JSON object")
        override.pop("command", None)
        values.update(override)
    return RunConfig.from_dict(values)


def run(config: RunConfig):
    """Execute ``config``; returns ``(text, exit_code)``."""
    rows, summary = _HANDLERS[config.command](config)
    code = 3 if summary.get("status") == "precision-failure" else 0
    return render(config, rows, summary), code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = resolve_config(args)
        text, code = run(config)
    except RadialQuantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == 3:
        print("error: precision target not met; partial rows are flagged", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
