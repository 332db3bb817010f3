"""Command-line entry point.

Exit codes: 0 success, 1 invalid input (diagnostic JSON on stderr), 2 an
internal invariant failed, e.g. no Dirichlet witness past the threshold.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bounds import full_report, select_exponents
from .config import (
    ProblemInstance,
    dump_config,
    dumps_report,
    load_config,
    make_report,
    parse_rational_list,
)
from .core import derivative_bounds, validate_weights
from .dirichlet import (
    enumerate_witnesses,
    find_witness,
    inequality_slacks,
    minkowski_matrix_det,
    minkowski_product,
    q0_bound,
    taylor_remainder_check,
)
from .exact import approx, format_fraction, to_fraction
from .exceptions import InvariantViolation, ValidationError, WitnessNotFound
from .limsup import (
    DEFAULT_CELL_BUDGET,
    box_count,
    build_witness_set,
    choose_c_prime,
    coverage_fraction,
    dimension_estimate,
    dirichlet_family,
    target_family,
)
from .mtp import ExponentPair, mtp_lower_bound

logger = logging.getLogger("weightdim")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _workers(args) -> int:
    if getattr(args, "workers", None):
        return args.workers
    return int(os.environ.get("WEIGHTDIM_WORKERS", "1"))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _instance(args, need_manifold: bool = False) -> tuple[ProblemInstance, dict]:
    if getattr(args, "config", None):
        inst = load_config(args.config)
    elif getattr(args, "tau", None):
        if args.d is None or args.m is None:
            raise ValidationError("--tau needs --d and --m")
        inst = ProblemInstance(validate_weights(parse_rational_list(args.tau), args.d, args.m))
    else:
        raise ValidationError("give --config or --tau/--d/--m")
    if need_manifold and inst.spec is None:
        raise ValidationError("this command needs a manifold (domain and components) in the config")
    return inst, dump_config(inst)


def _exponents(inst: ProblemInstance, override: str | None):
    if override:
        return tuple(parse_rational_list(override))
    if inst.a is not None:
        return inst.a
    sel = select_exponents(inst.weights)
    if sel.trivial:
        raise ValidationError("weights sum to at most 1: no exponents with min a_i > 1; pass --a")
    return sel.a


def _point(inst: ProblemInstance, override: str | None):
    if override:
        return tuple(parse_rational_list(override))
    if inst.point is None:
        raise ValidationError("no query point: add 'point' to the config or pass --x")
    return inst.point


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_bound(args) -> int:
    inst, cfg = _instance(args)
    r = full_report(inst.weights)
    results = {
        "per_index_values": list(r.per_index_values),
        "theorem_min": r.theorem_min,
        "effective_bound": r.effective_bound,
        "mtp_min": r.mtp_min,
        "mtp_level": r.mtp_level,
        "proof_range_min": r.active_min,
        "minima_differ": r.minima_differ,
        "case": r.selection.case,
        "blw_condition_holds": r.blw_condition_holds,
        "improvement_flag": r.improvement_flag,
        "trivial_regime": r.trivial_regime,
    }
    provenance = [
        "all values exact rationals",
        "mtp_min recomputed by exhaustive evaluation over candidate levels and matched to the closed form",
    ]
    _emit(dumps_report(make_report("bound", cfg, results, provenance)), args.out)
    return 0


def cmd_exponents(args) -> int:
    inst, cfg = _instance(args)
    sel = select_exponents(inst.weights)
    results = {"case": sel.case, "K": sel.K, "a": list(sel.a), "t": list(sel.t), "quotient": sel.quotient}
    provenance = ["sum(a_i - 1) + tail = 1, a_i + t_i = 1 + tau_i, t_i >= 0, min a_i > 1 verified exactly"]
    _emit(dumps_report(make_report("exponents", cfg, results, provenance)), args.out)
    return 0


def cmd_mtp(args) -> int:
    ep = ExponentPair.of(parse_rational_list(args.a), parse_rational_list(args.t))
    value, level = mtp_lower_bound(ep)
    cfg = {"a": [format_fraction(v) for v in ep.a], "t": [format_fraction(v) for v in ep.t]}
    results = {"lower_bound": value, "level": level}
    _emit(dumps_report(make_report("mtp", cfg, results, ["minimum over all candidate levels, exact"])), args.out)
    return 0


def cmd_dirichlet(args) -> int:
    inst, cfg = _instance(args, need_manifold=True)
    spec, w = inst.spec, inst.weights
    x = _point(inst, args.x)
    a = _exponents(inst, args.a)
    cfg = dict(cfg, point=[format_fraction(v) for v in x], a=[format_fraction(v) for v in a])
    if args.action == "q0":
        cert = q0_bound(spec, x, a)
        results = {"Q0": cert.Q0, "r": cert.r, "threshold_squared": cert.threshold_sq, "C": cert.C}
        _emit(dumps_report(make_report("dirichlet q0", cfg, results, ["threshold compared after squaring"])), args.out)
        return 0
    if args.action == "find":
        if args.q_max:
            found = enumerate_witnesses(spec, x, w, a, args.q_max)
            Q = None
        else:
            if not args.Q:
                raise ValidationError("find needs --Q or --q-max")
            Q = args.Q
            try:
                found = [find_witness(spec, x, w, a, Q)]
            except WitnessNotFound:
                Q0 = q0_bound(spec, x, a).Q0
                if Q >= Q0:
                    raise InvariantViolation(f"no witness for Q={Q} although Q >= Q0={Q0}")
                logger.warning("no witness for Q=%d (below Q0=%d)", Q, Q0)
                found = []
        header = ["q"] + [f"p{k + 1}" for k in range(w.n)]
        rows = []
        for wt in found:
            slacks = inequality_slacks(spec, x, w, a, wt, Q)
            if not header[-1].endswith("_pow"):
                for name, *_ in slacks:
                    header += [f"{name}_gap", f"{name}_ratio_pow", f"{name}_pow"]
            row = [wt.q] + list(wt.p)
            for _, lhs, ratio, N in slacks:
                row += [format_fraction(lhs), format_fraction(ratio), N]
            rows.append(row)
        _emit(_csv(header, rows), args.out)
        return 0
    # certify
    Q = args.Q
    cert = q0_bound(spec, x, a)
    Q = Q or cert.Q0
    product = minkowski_product(w, a, Q)
    det = minkowski_matrix_det(spec, x)
    bounds = derivative_bounds(spec)
    rng = random.Random(args.seed)
    taylor_ok = True
    for _ in range(args.samples):
        x2 = tuple(
            lo + (hi - lo) * Fraction(rng.randint(0, 10**6), 10**6) for lo, hi in spec.domain.intervals()
        )
        taylor_ok &= taylor_remainder_check(spec, x, x2, bounds.C)
    try:
        wt = find_witness(spec, x, w, a, Q)
    except WitnessNotFound:
        if Q >= cert.Q0:
            raise InvariantViolation(f"no witness for Q={Q} although Q >= Q0={cert.Q0}")
        wt = None
    results = {
        "Q": Q,
        "Q0": cert.Q0,
        "C": bounds.C,
        "D": bounds.D,
        "minkowski_product": product,
        "minkowski_product_is_one": product == 1,
        "det": det,
        "taylor_samples": args.samples,
        "taylor_ok": taylor_ok,
        "witness": None if wt is None else {"q": wt.q, "p": list(wt.p)},
    }
    provenance = [
        "determinant by exact Gaussian elimination",
        "product of right-hand sides kept symbolic; powers of 4 cancel identically",
        "witness inequalities decided by exact power comparison",
    ]
    cfg["seed"] = args.seed
    _emit(dumps_report(make_report("dirichlet certify", cfg, results, provenance)), args.out)
    return 0


def cmd_witnesses(args) -> int:
    inst, _ = _instance(args, need_manifold=True)
    ws = build_witness_set(inst.spec, inst.weights, args.Q, workers=_workers(args))
    d = inst.spec.d
    header = ["q"] + [f"p{i + 1}" for i in range(d)] + [f"dist{j + 1}" for j in range(inst.spec.m)]
    rows = []
    for entry in ws.entries:
        *p, q = entry
        pt = tuple(Fraction(v, q) for v in p)
        dists = []
        for f in inst.spec.components:
            y = q * f(pt)
            r = y - (y.numerator // y.denominator)
            dists.append(format_fraction(min(r, 1 - r)))
        rows.append([q] + p + dists)
    _emit(_csv(header, rows), args.out)
    return 0


def _family(inst, args, ws):
    if args.family == "dirichlet":
        return dirichlet_family(ws, _exponents(inst, getattr(args, "a", None)))
    cert = choose_c_prime(derivative_bounds(inst.spec), inst.spec.d, inst.weights.tau(inst.spec.d))
    return target_family(ws, cert.c_prime)


def cmd_coverage(args) -> int:
    inst, _ = _instance(args, need_manifold=True)
    horizons = sorted(int(v) for v in args.Q.split(","))
    deltas = parse_rational_list(args.delta)
    ws = build_witness_set(inst.spec, inst.weights, max(horizons), workers=_workers(args))
    family = _family(inst, args, ws)
    rows = []
    for Q in horizons:
        sub = family.restrict(1, Q)
        for delta in deltas:
            rep = coverage_fraction(sub, delta, budget=args.budget, Q=Q)
            rows.append([Q, format_fraction(delta), rep.covered, rep.cells, format_fraction(rep.fraction), approx(rep.fraction)])
    _emit(_csv(["Q", "delta", "N", "cells", "fraction", "fraction_approx"], rows), args.out)
    return 0


def cmd_boxdim(args) -> int:
    inst, cfg = _instance(args, need_manifold=True)
    q_hi = args.q_hi or 2 * args.q_lo
    ws = build_witness_set(inst.spec, inst.weights, q_hi, workers=_workers(args))
    family = _family(inst, args, ws).restrict(args.q_lo, q_hi)
    lo_k, hi_k = (int(v) for v in args.ladder.split(":"))
    rows, counts = [], []
    for k in range(lo_k, hi_k + 1):
        delta = Fraction(1, 2**k)
        N = box_count(family, delta, budget=args.budget)
        cells = 1
        for side in inst.spec.domain.sides:
            cells *= int(side / delta)
        rows.append([format_fraction(delta), N, format_fraction(Fraction(N, cells))])
        counts.append((delta, N))
    _emit(_csv(["delta", "N", "fraction"], rows), args.out)
    if args.report:
        est = dimension_estimate(counts)
        bound = full_report(inst.weights)
        results = {
            "slope": format(est.slope, ".12g"),
            "residual": format(est.residual, ".12g"),
            "note": est.note,
            "effective_bound": bound.effective_bound,
            "q_range": [args.q_lo, q_hi],
            "family": args.family,
        }
        Path(args.report).write_text(dumps_report(make_report("boxdim", cfg, results, ["box counts exact; slope is a float fit"])))
    return 0


def _sweep_rows(raw: dict):
    d, m = raw["d"], raw["m"]
    base = [to_fraction(v) for v in raw["base"]]
    axes = []
    for ax in raw.get("vary", []):
        start, stop, step = (to_fraction(ax[k]) for k in ("start", "stop", "step"))
        if step <= 0:
            raise ValidationError("sweep step must be positive")
        values, v = [], start
        while v <= stop:
            values.append(v)
            v += step
        axes.append((int(ax["index"]), values))
    if not axes:
        return d, m, []
    grids = [[]]
    for index, values in axes:
        grids = [g + [(index, v)] for g in grids for v in values]
    out = []
    for combo in grids:
        tau = list(base)
        for index, v in combo:
            tau[index - 1] = v
        out.append(tau)
    return d, m, out


def cmd_sweep(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text())
        d, m, grid = _sweep_rows(raw["sweep"] if "sweep" in raw else raw)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad sweep config: {exc}") from exc
    rows = []
    for tau in grid:
        label = " ".join(format_fraction(t) for t in tau)
        try:
            r = full_report(validate_weights(tau, d, m))
        except ValidationError as exc:
            rows.append([label, "", "", "", "", f"invalid: {type(exc).__name__}"])
            continue
        rows.append(
            [
                label,
                format_fraction(r.theorem_min),
                format_fraction(r.effective_bound),
                str(r.blw_condition_holds).lower(),
                str(r.improvement_flag).lower(),
                "valid",
            ]
        )
    header = ["tau", "theorem_min", "effective_bound", "blw_condition_holds", "improvement_flag", "status"]
    _emit(_csv(header, rows), args.out)
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _weights_args(p):
    p.add_argument("--config", help="problem config (JSON)")
    p.add_argument("--tau", help="comma-separated weights, e.g. 6/5,1/5,1/5")
    p.add_argument("--d", type=int)
    p.add_argument("--m", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weightdim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"weightdim {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", help="dimension lower bound report")
    _weights_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("exponents", help="exponent selection (a, t)")
    _weights_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("mtp", help="rectangles mass transference bound")
    p.add_argument("--a", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mtp)

    p = sub.add_parser("dirichlet", help="Dirichlet-type witnesses and certificates")
    p.add_argument("action", choices=["find", "q0", "certify"])
    p.add_argument("--config", required=True)
    p.add_argument("--x", help="query point (overrides config)")
    p.add_argument("--a", help="exponents (default: selected from the weights)")
    p.add_argument("--Q", type=int, help="horizon")
    p.add_argument("--q-max", type=int, help="list all horizon-free witnesses up to this denominator")
    p.add_argument("--samples", type=int, default=100, help="Taylor remainder samples for certify")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dirichlet)

    p = sub.add_parser("witnesses", help="list the witness set up to a horizon (CSV)")
    p.add_argument("--config", required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_witnesses)

    p = sub.add_parser("coverage", help="grid coverage of a rectangle family (CSV)")
    p.add_argument("--config", required=True)
    p.add_argument("--Q", required=True, help="comma-separated horizons")
    p.add_argument("--delta", default="1/100", help="comma-separated grid steps")
    p.add_argument("--family", choices=["dirichlet", "target"], default="dirichlet")
    p.add_argument("--a")
    p.add_argument("--budget", type=int, default=DEFAULT_CELL_BUDGET)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("boxdim", help="box-counting ladder over q in [q_lo, q_hi] (CSV)")
    p.add_argument("--config", required=True)
    p.add_argument("--q-lo", type=int, required=True)
    p.add_argument("--q-hi", type=int)
    p.add_argument("--ladder", default="4:10", help="exponent range k for delta = 2^-k")
    p.add_argument("--family", choices=["dirichlet", "target"], default="target")
    p.add_argument("--a")
    p.add_argument("--budget", type=int, default=DEFAULT_CELL_BUDGET)
    p.add_argument("--workers", type=int)
    p.add_argument("--report", help="write the slope fit as JSON here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_boxdim)

    p = sub.add_parser("sweep", help="bound table over a grid of weight vectors (CSV)")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def _diagnostic(kind: str, exc: Exception) -> None:
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}) + "\n")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _diagnostic("usage", exc)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InvariantViolation, WitnessNotFound) as exc:
        _diagnostic("invariant", exc)
        return 2
    except (ValidationError, ValueError) as exc:
        _diagnostic("validation", exc)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
