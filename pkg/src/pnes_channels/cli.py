"""Command-line front end.

Tables go to ``--output`` (or stdout when omitted); a one-line summary is
printed to stdout when writing to a file. Exit codes: 0 success, 1 usage error,
2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .info import correlation_index, mandel_q, marginals, moments
from .joint import DEFAULT_TAIL_TOL
from .loss import ChannelParams, lossy_joint
from .protocol import (
    CurvatureWarning,
    asymmetry_sweep,
    capacity_sweep,
    capacity_point,
    coincidence_curvature,
)
from .states import (
    StateKind,
    TthSpec,
    entanglement_entropy,
    mandel_q_ideal,
    state_parameter,
    tmc_coefficients,
    twb_coefficients,
)
from .verification import GRIDS, run_suites

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(v):
    """12 significant digits for floats; everything else untouched."""
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.12g}")
    return v


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _total(mean: float, convention: str) -> float:
    if mean < 0:
        raise UsageError(f"mean photon number must be nonnegative, got {mean}")
    return mean if convention == "total" else 2.0 * mean


def _channel(eta1, eta2) -> ChannelParams:
    try:
        return ChannelParams(eta1, eta2)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _sweep_fields(M: int) -> list[str]:
    return ["N", "eta", "eta1", "eta2", "capacity_bits"] + [f"T{k + 1}" for k in range(M - 1)]


def _sweep_record(row, M: int, extras: bool) -> dict:
    rec = {
        "N": row.N,
        "eta": row.eta,
        "eta1": row.eta1,
        "eta2": row.eta2,
        "capacity_bits": row.capacity_bits,
    }
    rec.update({f"T{k + 1}": t for k, t in enumerate(row.thresholds)})
    if extras:
        rec["cutoff"] = row.cutoff
        rec["tail_mass"] = row.tail_mass
        if M == 2:
            rec["naive_T1"] = row.naive_threshold
            rec["naive_capacity_bits"] = row.naive_bits
    return rec


def _emit(args, fields, rows, metadata, summary):
    if args.format == "json":
        payload = {
            "metadata": {k: fmt(v) for k, v in metadata.items()},
            "rows": [{k: fmt(v) for k, v in r.items()} for r in rows],
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for r in rows:
            writer.writerow(["" if r.get(f) is None else fmt(r.get(f)) for f in fields])
        text = buf.getvalue()
    if args.output:
        Path(args.output).write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)


def _config_echo(args) -> dict:
    skip = {"func", "output", "format"}
    return {
        k: (",".join(str(x) for x in v) if isinstance(v, list) else v)
        for k, v in sorted(vars(args).items())
        if k not in skip and v is not None
    }


def cmd_state_info(args):
    N = _total(args.mean, args.convention)
    kind = StateKind(args.kind)
    param = state_parameter(kind, N)
    row = {"kind": kind.value, "N_total": N, "N_per_mode": N / 2.0, "parameter": param}
    if kind is StateKind.TTH:
        spec = TthSpec(N)
        row["cutoff"] = None
        row["entropy_bits"] = None
        row["mandel_q"] = mandel_q_ideal(spec) if N > 0 else None
        row["correlation"] = N / (N + 2.0) if N > 0 else None
    else:
        prof = (tmc_coefficients if kind is StateKind.TMC else twb_coefficients)(param, tail_tol=args.tail_tol)
        row["cutoff"] = prof.cutoff
        row["entropy_bits"] = entanglement_entropy(prof)
        row["mandel_q"] = mandel_q_ideal(prof) if N > 0 else None
        row["correlation"] = 1.0 if N > 0 else None
    fields = list(row)
    _emit(args, fields, [row], {"command": "state-info", **_config_echo(args)}, f"{kind.value}: N={N:g}")


def cmd_joint_dist(args):
    N = _total(args.mean, args.convention)
    ch = _channel(args.eta1, args.eta2)
    J = lossy_joint(args.kind, N, ch, tail_tol=args.tail_tol)
    rows = [
        {"p": p, "q": q, "prob": float(J.probs[p, q])}
        for p in range(J.cutoff + 1)
        for q in range(J.cutoff + 1)
    ]
    meta = {"command": "joint-dist", **_config_echo(args), "N_total": N, "cutoff": J.cutoff, "tail_mass": J.tail_mass}
    if J.cutoff >= 0 and N > 0:
        m = moments(J)
        meta["mean1"], meta["mean2"] = m.mean1, m.mean2
        if m.var1 > 0 and m.var2 > 0:
            meta["correlation"] = correlation_index(m)
            m1, m2 = marginals(J)
            meta["mandel_q1"], meta["mandel_q2"] = mandel_q(m1), mandel_q(m2)
    _emit(args, ["p", "q", "prob"], rows, meta, f"joint distribution, cutoff {J.cutoff}, tail mass {J.tail_mass:.3e}")


def cmd_capacity(args):
    N = _total(args.mean, args.convention)
    ch = _channel(args.eta1, args.eta2)
    row = capacity_point(args.kind, N, ch, args.alphabet, args.tail_tol)
    meta = {"command": "capacity", **_config_echo(args), "N_total": N, "cutoff": row.cutoff, "tail_mass": row.tail_mass}
    rec = _sweep_record(row, args.alphabet, extras=args.format == "json")
    _emit(args, _sweep_fields(args.alphabet), [rec], meta,
          f"C{args.alphabet} = {row.capacity_bits:.6f} bits at T = {row.thresholds}")


def cmd_sweep(args):
    Ns = [_total(v, args.convention) for v in args.mean_grid]
    for e in args.eta_grid:
        _channel(e, e)
    rows = capacity_sweep(args.kind, Ns, args.eta_grid, args.alphabet, args.tail_tol)
    recs = [_sweep_record(r, args.alphabet, extras=args.format == "json") for r in rows]
    meta = {"command": "sweep", **_config_echo(args), "max_cutoff": max(r.cutoff for r in rows),
            "max_tail_mass": max(r.tail_mass for r in rows)}
    _emit(args, _sweep_fields(args.alphabet), recs, meta, f"{len(rows)} grid points")


def cmd_asym_sweep(args):
    N = _total(args.mean, args.convention)
    eta = args.eta
    if not 0 < eta <= 1:
        raise UsageError(f"overall eta must lie in (0, 1], got {eta}")
    grid = args.eta1_grid or list(np.linspace(eta * eta, 1.0, args.points))
    try:
        rows = asymmetry_sweep(args.kind, N, eta, grid, args.alphabet, args.tail_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    recs = [_sweep_record(r, args.alphabet, extras=args.format == "json") for r in rows]
    meta = {"command": "asym-sweep", **_config_echo(args), "N_total": N}
    _emit(args, _sweep_fields(args.alphabet), recs, meta, f"{len(rows)} asymmetry points")


def cmd_curvature(args):
    N = _total(args.mean, args.convention)
    rows = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", CurvatureWarning)
        for n in range(args.n_max + 1):
            before = len(caught)
            value = coincidence_curvature(args.kind, N, args.eta, n, args.delta)
            rows.append({"n": n, "curvature": value, "stable": len(caught) == before})
    meta = {"command": "curvature", **_config_echo(args), "N_total": N}
    _emit(args, ["n", "curvature", "stable"], rows, meta, f"curvature for n = 0..{args.n_max}")


def cmd_verify(args):
    results = run_suites(args.grid, args.tail_tol)
    rows = [
        {"suite": r.name, "max_deviation": r.max_deviation, "tolerance": r.tolerance,
         "cases": r.n_cases, "passed": r.passed}
        for r in results
    ]
    ok = all(r.passed for r in results)
    meta = {"command": "verify", **_config_echo(args), "passed": ok}
    if args.output:
        _emit(args, list(rows[0]), rows, meta, "")
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<20s} max deviation {r.max_deviation:.3e}"
              f"  (tol {r.tolerance:.0e}, {r.n_cases} cases)")
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pnes-channels", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--output", "-o", help="write the table here instead of stdout")

    state = _Parser(add_help=False)
    state.add_argument("--kind", choices=[k.value for k in StateKind], required=True)
    state.add_argument("--convention", choices=["total", "per-mode"], default="total",
                       help="whether --mean/--mean-grid give the two-mode total or the per-mode mean")

    def add(name, func, parents, help_):
        p = sub.add_parser(name, parents=parents, help=help_)
        p.set_defaults(func=func)
        return p

    p = add("state-info", cmd_state_info, [common, state], "lossless statistics of one state")
    p.add_argument("--mean", type=float, required=True)

    p = add("joint-dist", cmd_joint_dist, [common, state], "lossy joint photon-number distribution")
    p.add_argument("--mean", type=float, required=True)
    p.add_argument("--eta1", type=float, default=1.0)
    p.add_argument("--eta2", type=float, default=1.0)

    p = add("capacity", cmd_capacity, [common, state], "optimized capacity at one point")
    p.add_argument("--mean", type=float, required=True)
    p.add_argument("--eta1", type=float, default=1.0)
    p.add_argument("--eta2", type=float, default=1.0)
    p.add_argument("--alphabet", type=int, default=2)

    p = add("sweep", cmd_sweep, [common, state], "capacity over energies and symmetric losses")
    p.add_argument("--mean-grid", type=_float_list, required=True)
    p.add_argument("--eta-grid", type=_float_list, default=[0.6, 0.7, 0.8, 0.9, 0.95, 1.0])
    p.add_argument("--alphabet", type=int, default=2)

    p = add("asym-sweep", cmd_asym_sweep, [common, state], "capacity versus asymmetry at fixed overall loss")
    p.add_argument("--mean", type=float, required=True)
    p.add_argument("--eta", type=float, required=True, help="overall loss sqrt(eta1 eta2)")
    p.add_argument("--eta1-grid", type=_float_list)
    p.add_argument("--points", type=int, default=9, help="grid size when --eta1-grid is omitted")
    p.add_argument("--alphabet", type=int, default=2)

    p = add("curvature", cmd_curvature, [common, state], "second-order asymmetry coefficient of P(n,n)")
    p.add_argument("--mean", type=float, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--delta", type=float, default=1e-3)

    p = add("verify", cmd_verify, [common], "run the numerical self-check suites")
    p.add_argument("--grid", choices=sorted(GRIDS), default="default")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "alphabet", 2) < 2:
        parser.error("--alphabet must be at least 2")
    if not args.tail_tol > 0:
        parser.error("--tail-tol must be positive")
    try:
        status = args.func(args)
    except (UsageError, ValueError) as exc:
        # library ValueErrors here always trace back to out-of-range arguments
        parser.error(str(exc))
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        sys.stderr.close()
        return EXIT_OK
    return EXIT_OK if status is None else status


if __name__ == "__main__":
    sys.exit(main())
