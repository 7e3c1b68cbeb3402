"""Command-line front end.

    anharmonic coeffs --order 4 --format csv
    anharmonic alpha --order 60 --index 12 --precision 40
    anharmonic converge --nmin 8 --nmax 80 --format json

Exit status: 0 success, 1 usage error, 2 numerical non-convergence or a bad cache.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

import mpmath

from . import __version__
from ._numeric import MIN_PRECISION, decimal_string, to_mpq
from .convergence import FitError, fit_model, fit_sigma_law, predict_delta
from .exactseries import (
    CacheError,
    bender_wu,
    load_or_compute,
    verify_cache,
    write_cache,
)
from .optimize import omega_from_sigma, select_sigma
from .oracle import BasisConfig, NotConverged, ground_energy
from .reexpand import CouplingSpec, PrecisionError, epsilon_polys, w_n_eval
from .strongcoupling import alpha, delta_series

CACHE_ENV = "ANHARMONIC_CACHE"
COMMANDS = ("coeffs", "epsilon", "sigma", "alpha", "energy", "converge", "fit", "oracle", "cache")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    order: int = None
    index: int = None
    precision: int = 30
    g: str = None
    omega: str = "1"
    nmin: int = None
    nmax: int = None
    format: str = "csv"
    cache_path: str = None
    basis_size: int = 200
    tolerance: float = None
    output: str = None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="anharmonic", description="Variational strong-coupling expansion of the quartic oscillator.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--order", type=int, help="perturbative order N (or K for coeffs)")
    p.add_argument("--index", type=int, help="largest strong-coupling index n for alpha")
    p.add_argument("--g", help="coupling g (decimal, read exactly)")
    p.add_argument("--omega", default="1", help="frequency omega (default 1)")
    p.add_argument("--precision", type=int, default=30, help="output digits (>= 16)")
    p.add_argument("--nmin", type=int, help="first order of a sweep")
    p.add_argument("--nmax", type=int, help="last order of a sweep")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--cache", dest="cache_path", default=os.environ.get(CACHE_ENV),
                   help=f"coefficient cache file (default ${CACHE_ENV})")
    p.add_argument("--basis-size", type=int, default=200, help="even-parity basis size for oracle")
    p.add_argument("--tolerance", type=float, help="largest accepted oracle basis gap")
    p.add_argument("--output", "-o", help="write to a file instead of stdout")
    return p


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(ns).items()})
    if cfg.precision < MIN_PRECISION:
        raise UsageError(f"--precision must be at least {MIN_PRECISION}")
    if cfg.order is not None and cfg.order < 0:
        raise UsageError("--order must be non-negative")
    sweep_flags = cfg.nmin is not None or cfg.nmax is not None
    if cfg.order is not None and sweep_flags and cfg.command in ("sigma", "converge", "fit"):
        raise UsageError("--order conflicts with --nmin/--nmax")
    if cfg.basis_size < 4:
        raise UsageError("--basis-size must be at least 4")
    return cfg


# -- output -------------------------------------------------------------------

def _emit(cfg: RunConfig, columns, rows, metadata=None, extra=None) -> str:
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
        return buf.getvalue()
    meta = {"command": cfg.command, "precision": cfg.precision, "version": __version__}
    meta.update(metadata or {})
    doc = {"metadata": meta, "rows": [dict(zip(columns, r)) for r in rows]}
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _frac(q) -> str:
    q = to_mpq(q)
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


def _dec(x, cfg) -> str:
    return decimal_string(x, cfg.precision)


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required for this command")
    return value


def _sweep(cfg, default_min=1):
    if cfg.order is not None:
        lo, hi = default_min, cfg.order
    else:
        lo, hi = cfg.nmin if cfg.nmin is not None else default_min, _need(cfg.nmax, "--nmax or --order")
    if lo < 1 or hi < lo:
        raise UsageError(f"invalid order range [{lo}, {hi}]")
    return lo, hi


def _weak(cfg, K):
    return load_or_compute(K, cfg.cache_path) if cfg.cache_path else bender_wu(K)


# -- commands -----------------------------------------------------------------

def cmd_coeffs(cfg):
    K = _need(cfg.order, "--order")
    weak = _weak(cfg, K)
    return _emit(cfg, ["k", "E_k"], [[k, _frac(c)] for k, c in enumerate(weak.coeffs)])


def cmd_epsilon(cfg):
    N = _need(cfg.order, "--order")
    series = epsilon_polys(_weak(cfg, N), N)
    rows = [[k, i, _frac(c)] for k, p in enumerate(series.polys) for i, c in enumerate(p.coeffs)]
    return _emit(cfg, ["k", "power", "coefficient"], rows)


def cmd_sigma(cfg):
    if cfg.order is not None:
        if cfg.order < 1:
            raise UsageError("--order must be at least 1 for sigma")
        lo = hi = cfg.order
    else:
        lo, hi = _sweep(cfg)
    optima = [select_sigma(N, cfg.precision) for N in range(lo, hi + 1)]
    rows = [[o.order, _dec(o.sigma, cfg), o.kind, repr(round(o.fit_reference, 12))] for o in optima]
    return _emit(cfg, ["N", "sigma", "kind", "fit_reference"], rows, {"selection": "nearest"})


def cmd_alpha(cfg):
    N = _need(cfg.order, "--order")
    if N < 1:
        raise UsageError("--order must be at least 1 for alpha")
    n_max = cfg.index or 0
    if n_max > N:
        raise UsageError("--index cannot exceed --order")
    opt = select_sigma(N, cfg.precision)
    weak = _weak(cfg, N)
    rows = [[n, _dec(alpha(weak, N, n, opt, cfg.precision), cfg), N, _dec(opt.sigma, cfg)] for n in range(n_max + 1)]
    return _emit(cfg, ["n", "alpha", "N", "sigma"], rows, {"selection_kind": opt.kind})


def cmd_energy(cfg):
    N = _need(cfg.order, "--order")
    if N < 1:
        raise UsageError("--order must be at least 1 for energy")
    spec = CouplingSpec(_need(cfg.g, "--g"), cfg.omega)
    opt = select_sigma(N, cfg.precision)
    Om = omega_from_sigma(opt.sigma, spec, cfg.precision + 10).Omega
    series = epsilon_polys(_weak(cfg, N), N)
    W = w_n_eval(series, spec, Om, cfg.precision)
    row = [N, cfg.g, cfg.omega, _dec(opt.sigma, cfg), _dec(Om, cfg), _dec(W, cfg)]
    return _emit(cfg, ["N", "g", "omega", "sigma", "Omega", "energy"], [row], {"selection_kind": opt.kind})


def cmd_converge(cfg):
    lo, hi = _sweep(cfg)
    record = delta_series(hi, cfg.precision, N_min=lo)
    rows = [[e.N, decimal_string(e.delta, 12), "floor" if e.at_floor else "", e.kind] for e in record.entries]
    extra = None
    try:
        fit = fit_model(record, (max(lo, 8), hi))
        overlay = {str(e.N): repr(predict_delta(fit.model, e.N)) for e in record.entries}
        extra = {"fit": json.loads(fit.to_json()), "overlay": overlay}
    except FitError as exc:
        extra = {"fit": {"error": str(exc)}}
    if cfg.format == "csv":
        if "overlay" in (extra or {}):
            rows = [r + [extra["overlay"][str(r[0])]] for r in rows]
        else:
            rows = [r + [""] for r in rows]
        return _emit(cfg, ["N", "delta", "flag", "kind", "fit"], rows)
    return _emit(cfg, ["N", "delta", "flag", "kind"], rows, {"working_precision": record.precision}, extra)


def cmd_fit(cfg):
    lo, hi = _sweep(cfg, default_min=10)
    optima = [select_sigma(N, cfg.precision) for N in range(lo, hi + 1)]
    law = fit_sigma_law(optima, (lo, hi))
    rows = [["c", repr(law.c)], ["b", repr(law.b)], ["residual_norm", repr(law.residual_norm)]]
    return _emit(cfg, ["parameter", "value"], rows, {"N_range": [lo, hi]})


def cmd_oracle(cfg):
    spec = CouplingSpec(_need(cfg.g, "--g"), cfg.omega)
    res = ground_energy(spec, BasisConfig(cfg.basis_size), cfg.precision, cfg.tolerance)
    row = [cfg.g, cfg.omega, res.basis_size, _dec(res.energy, cfg), mpmath.nstr(res.convergence_gap, 6)]
    return _emit(cfg, ["g", "omega", "basis_size", "energy", "convergence_gap"], [row])


def cmd_cache(cfg):
    path = _need(cfg.cache_path, "--cache")
    if cfg.order is not None and not os.path.exists(path):
        write_cache(path, bender_wu(cfg.order))
    K = verify_cache(path)
    return _emit(cfg, ["path", "max_order", "status"], [[path, K, "ok"]])


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def run(cfg: RunConfig, sink=None) -> int:
    sink = sink or sys.stdout
    try:
        text = HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotConverged, PrecisionError, CacheError, FitError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.output:
        try:
            with open(cfg.output, "w", encoding="ascii", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"usage error: cannot write {cfg.output}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sink.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
