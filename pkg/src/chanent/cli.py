"""Command-line interface.

Channels are given as a JSON file path or a builder string; see
:mod:`chanent.channel_io` for the grammar.  Reports go to stdout (or
``--out``) as JSON.  Errors go to stderr as ``{code, message, defect_norms}``
with exit code 2 for validation failures and 3 for solver failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np

from . import causality as ca
from . import channel_io
from . import channels as ch
from . import entropies as en
from . import suite
from .errors import ChanentError, ConvergenceError, SolverError, ValidationError

EXIT_VALIDATION = 2
EXIT_SOLVER = 3
SIG_DIGITS = 12
FIGURE_ELLS = (0, 2, 4)

ENTROPY_CHOICES = ("cond-vn", "cond-min", "cond-geo", "cond-max", "ns", "mi", "cmi", "mi-max")
FIGURES = ("vn-swap-cnot", "sdp-swap", "sdp-cnot")


class CliError(Exception):
    def __init__(self, code: int, message: str, defect_norms: dict | None = None):
        super().__init__(message)
        self.code = code
        self.defect_norms = defect_norms or {}


# ------------------------------------------------------------ serialization


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items() if not _is_big_array(v)}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, ch.SystemDims):
        return x.to_json()
    return x


def _is_big_array(v) -> bool:
    return isinstance(v, np.ndarray) and v.ndim >= 2


def report_to_dict(rep) -> dict:
    if isinstance(rep, en.EntropyReport):
        return _jsonable({"functional": rep.functional, "value": rep.value, "method": rep.method,
                          "bound_kind": rep.bound_kind, "dims": rep.dims, "diagnostics": rep.diagnostics})
    return _jsonable(dict(vars(rep)))


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    return f"{float(x):.{SIG_DIGITS}g}"


def rows_to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------- parsing


def parse_grid(spec: str) -> np.ndarray:
    """``a:b:n`` to ``n`` evenly spaced points from ``a`` to ``b``."""
    try:
        a, b, n = spec.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, f"--p-grid expects a:b:n, got {spec!r}") from exc
    if n < 1:
        raise CliError(EXIT_VALIDATION, "--p-grid needs at least one step")
    if not (0.0 <= min(a, b) and max(a, b) <= 1.0):
        raise CliError(EXIT_VALIDATION, "--p-grid must lie in [0, 1]")
    return np.linspace(a, b, n) if n > 1 else np.array([a])


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--channel", help="JSON file or builder string, e.g. swap:d=2, mix:u=cnot:p=0.5")
    common.add_argument("--alpha-ell", type=int, default=2, help="geometric order alpha = 1 + 2^-ell")
    common.add_argument("--p-grid", default="0:1:101", help="figure grid a:b:n")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=float, default=None, help="SDP solver tolerance")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)

    p = argparse.ArgumentParser(prog="chanent", description=__doc__,
                                epilog=channel_io.__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("entropy", parents=[common], help="evaluate one channel functional")
    e.add_argument("functional", choices=ENTROPY_CHOICES)

    c = sub.add_parser("causality", help="semicausality test")
    csub = c.add_subparsers(dest="action", required=True)
    cc = csub.add_parser("check", parents=[common])
    cc.add_argument("--from", dest="from_in", default="A")
    cc.add_argument("--to", dest="to_out", default="B")

    f = sub.add_parser("figure", parents=[common], help="regenerate figure data")
    f.add_argument("figure", choices=FIGURES)

    s = sub.add_parser("suite", help="acceptance suite")
    ssub = s.add_subparsers(dest="action", required=True)
    sr = ssub.add_parser("run", parents=[common])
    sr.add_argument("--tier", choices=("fast", "full"), default="fast")
    return p


def _channel(args) -> ch.Channel:
    if not args.channel:
        raise CliError(EXIT_VALIDATION, "--channel is required")
    return channel_io.load_channel(args.channel)


def _set_tol(tol: float | None) -> None:
    if tol is not None:
        if not tol > 0:
            raise CliError(EXIT_VALIDATION, "--tol must be positive")
        en.SDP_TOL = tol


# ---------------------------------------------------------------- commands


def cmd_entropy(args) -> dict:
    c = _channel(args)
    f = args.functional
    if f == "cond-vn":
        rep = en.cond_vn_telecov(c)
    elif f == "cond-min":
        rep = en.cond_min_sdp(c)
    elif f == "cond-geo":
        rep = en.cond_geo_sdp(c, en.AlphaSchedule(args.alpha_ell))
    elif f == "cond-max":
        rep = en.cond_max(c, seed=args.seed)
    elif f == "ns":
        rep = en.ns_cond_entropy(c, seed=args.seed)
    elif f == "mi":
        rep = en.mi_telecov(c)
    elif f == "cmi":
        rep = en.cmi_telecov(c)
    else:
        rep = en.mi_max_alternating(c)
    out = report_to_dict(rep)
    out["channel"] = c.name
    return out


def cmd_causality(args) -> dict:
    c = _channel(args)
    rep = ca.semicausal_check(c, args.from_in, args.to_out)
    out = report_to_dict(rep)
    out["channel"] = c.name
    out["verdict"] = "semicausal" if rep.semicausal else "signaling"
    return out


def _workers() -> int:
    env = os.environ.get("CHANENT_THREADS")
    if env is None:
        return os.cpu_count() or 1
    try:
        n = int(env)
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, f"CHANENT_THREADS must be an integer, got {env!r}") from exc
    return max(1, n)


def _gate(name: str) -> ch.Channel:
    return ch.swap(2) if name == "swap" else ch.cnot()


def figure_point(figure: str, p: float, tol: float | None = None) -> list[tuple]:
    """Rows of one grid point; pure in its arguments."""
    if tol is not None:
        en.SDP_TOL = tol
    if figure == "vn-swap-cnot":
        return [(p, g, en.cond_vn_telecov(ch.white_noise_mixture(_gate(g), p)).value) for g in ("swap", "cnot")]
    c = ch.identity_mixture(_gate(figure.split("-")[1]), p)
    rows = [(p, "cond_min", math.inf, en.cond_min_sdp(c).value)]
    for ell in FIGURE_ELLS:
        s = en.AlphaSchedule(ell)
        rows.append((p, "cond_geo", s.alpha, en.cond_geo_sdp(c, s).value))
    return rows


def figure_rows(figure: str, grid: Sequence[float], tol: float | None = None) -> list[tuple]:
    """All rows in grid order; points run in a process pool unless CHANENT_THREADS=1."""
    n = min(_workers(), len(grid))
    if n <= 1:
        chunks = [figure_point(figure, float(p), tol) for p in grid]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            chunks = list(pool.map(figure_point, [figure] * len(grid), [float(p) for p in grid],
                                   [tol] * len(grid)))
    rows = [r for chunk in chunks for r in chunk]
    if figure == "vn-swap-cnot":
        ref = en.cond_vn_telecov(ch.identity(2, 2)).value
        rows += [(float(p), "identity", ref) for p in grid]
    return rows


def figure_header(figure: str) -> list[str]:
    return ["p", "channel", "value"] if figure == "vn-swap-cnot" else ["p", "functional", "alpha", "value"]


def cmd_figure(args) -> str:
    grid = parse_grid(args.p_grid)
    rows = figure_rows(args.figure, grid, args.tol)
    header = figure_header(args.figure)
    if args.format == "json":
        return json.dumps([_jsonable(dict(zip(header, r))) for r in rows], indent=2) + "\n"
    return rows_to_csv(header, rows)


def cmd_suite(args) -> tuple[dict, bool]:
    results = suite.run(args.tier)
    ok = all(r.passed for r in results)
    return {"tier": args.tier, "passed": ok,
            "criteria": [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail}
                         for r in results]}, ok


# -------------------------------------------------------------------- main


def _error(code: int, message: str, defect_norms: dict | None = None) -> int:
    obj = {"code": code, "message": message, "defect_norms": _jsonable(defect_norms or {})}
    sys.stderr.write(json.dumps(obj) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _set_tol(args.tol)
        status = 0
        if args.command == "figure":
            _emit(cmd_figure(args), args.out)
            return 0
        if args.command == "entropy":
            out = cmd_entropy(args)
        elif args.command == "causality":
            out = cmd_causality(args)
        else:
            out, ok = cmd_suite(args)
            status = 0 if ok else 1
        if args.format == "csv":
            text = rows_to_csv(["key", "value"], [(k, json.dumps(v) if not isinstance(v, (int, float)) else v)
                                                 for k, v in out.items()])
        else:
            text = json.dumps(out, indent=2) + "\n"
        _emit(text, args.out)
        return status
    except CliError as exc:
        return _error(exc.code, str(exc), exc.defect_norms)
    except ValidationError as exc:
        return _error(EXIT_VALIDATION, str(exc), exc.defect_norms)
    except (SolverError, ConvergenceError) as exc:
        return _error(EXIT_SOLVER, str(exc))
    except (ChanentError, ValueError) as exc:
        return _error(EXIT_VALIDATION, str(exc))


if __name__ == "__main__":
    raise SystemExit(main())
