"""Command-line front end.

    lpchar check holder --phi power:1,2 --psi power:1,2 --mu 0.5,0.5 --f 1,2 --g 1,3
    lpchar scan-concavity --p-values 1.5,2,3 --q-values 1.5,2,3
    lpchar search holder --phi power:1,3 --psi power:1,1.2 --mu 0.5,0.5 --seed 7
    lpchar fit --gen expm1 --grid 0.1,10,50
    lpchar demo-optimality --mode forward --phi power:1,3 --psi power:1,3 --mu 0.5,0.5 --f 1,2

Exit codes: 0 everything held, 1 a violation was found (or the probed
property failed), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, inequalities as ineq, search
from .errors import LpcharError, ValidationError
from .generators import Generator, GeneratorPair, parse_generator, power_pair
from .measure import DEFAULT_TOLERANCE, MeasureSpace, StepFunction, product_space, random_space, uniform_space

CHECKS = ("holder", "reversed-holder", "minkowski", "gmi", "genmink", "mulholland", "quasimean")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument parsing helpers

def _floats(text: str, field: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise UsageError(f"{field}: expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise UsageError(f"{field}: empty list")
    return vals


def _load_json(path: str, field: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"{field}: cannot read JSON file {path!r}: {exc}") from None


def parse_space(text: str | None, field: str) -> MeasureSpace | None:
    if text is None:
        return None
    try:
        if text.startswith("uniform:"):
            return uniform_space(int(text.split(":", 1)[1]))
        if text.startswith("random:"):
            n, seed = text.split(":", 1)[1].split(",")
            return random_space(int(n), np.random.default_rng(int(seed)))
        if text.endswith(".json") or Path(text).is_file():
            return MeasureSpace.from_dict(_load_json(text, field))
        return MeasureSpace(_floats(text, field))
    except (ValueError, LpcharError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"{field}: {exc}") from None


def parse_values(text: str | None, field: str) -> list[float] | None:
    if text is None:
        return None
    if text.endswith(".json") or Path(text).is_file():
        d = _load_json(text, field)
        if not isinstance(d, dict) or "values" not in d:
            raise UsageError(f"{field}: JSON needs a 'values' field")
        return [float(x) for x in d["values"]]
    return _floats(text, field)


def parse_matrix(text: str, field: str) -> list[list[float]]:
    if text.endswith(".json") or Path(text).is_file():
        d = _load_json(text, field)
        vals = d["values"] if isinstance(d, dict) else d
        return vals
    return [_floats(row, field) for row in text.split(";")]


def parse_gen(text: str | None, field: str) -> Generator:
    if text is None:
        raise UsageError(f"{field}: required")
    try:
        return parse_generator(text)
    except LpcharError as exc:
        raise UsageError(f"{field}: {exc}") from None


def parse_range(text: str, field: str, n_default: int | None = None, with_n: bool = True):
    """``lo,hi,n`` (or ``lo,hi`` when ``n_default`` is given or ``with_n`` is off)."""
    vals = _floats(text, field)
    if not with_n:
        if len(vals) != 2:
            raise UsageError(f"{field}: expected lo,hi")
        vals.append(1)
    elif len(vals) == 2 and n_default is not None:
        vals.append(n_default)
    if len(vals) != 3:
        raise UsageError(f"{field}: expected lo,hi,n")
    lo, hi, n = vals[0], vals[1], int(vals[2])
    if not lo < hi or n < 1:
        raise UsageError(f"{field}: empty range")
    return lo, hi, n


# ---------------------------------------------------------------------------
# output

def _scalar(v):
    if isinstance(v, (dict, list)):
        return json.dumps(v, separators=(",", ":"))
    return v


def emit(records: list[dict], fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        doc = records[0] if len(records) == 1 else records
        out.write(json.dumps(doc, indent=2) + "\n")
    elif fmt == "jsonl":
        for r in records:
            out.write(json.dumps(r, separators=(",", ":")) + "\n")
    elif fmt == "csv":
        keys: list[str] = []
        for r in records:
            keys.extend(k for k in r if k not in keys)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in records:
            w.writerow({k: _scalar(r.get(k)) for k in keys})
        out.write(buf.getvalue())
    else:
        for r in records:
            out.write("  ".join(f"{k}={_scalar(v)}" for k, v in r.items() if k != "witness") + "\n")


# ---------------------------------------------------------------------------
# commands

def _pair(args) -> GeneratorPair:
    return GeneratorPair(parse_gen(args.phi, "--phi"), parse_gen(args.psi, "--psi"))


def _single_gen(args) -> Generator:
    return parse_gen(args.gen or args.phi, "--gen")


def _witness_args(args) -> None:
    """Fill missing CLI fields from a witness/report/search JSON file."""
    d = _load_json(args.witness, "--witness")
    if isinstance(d, dict) and "report" in d and isinstance(d["report"], dict):
        d = d["report"]
    if isinstance(d, dict) and "witness" in d:
        d = d["witness"]
    if not isinstance(d, dict):
        raise UsageError("--witness: not a witness object")

    def fill(attr, value):
        if getattr(args, attr, None) is None and value is not None:
            setattr(args, attr, value)

    for key in ("phi", "psi", "gen", "direction"):
        fill(key, d.get(key))
    if "p" in d:
        fill("p", float(d["p"]))
    for key in ("mu", "nu"):
        if key in d:
            fill(key + "_obj", MeasureSpace.from_dict(d[key]))
    for key in ("f", "g"):
        if key in d:
            v = d[key]
            fill(key + "_vals", v["values"] if isinstance(v, dict) else v)
    if "F" in d:
        fill("F_vals", d["F"]["values"] if isinstance(d["F"], dict) else d["F"])
    if "quad" in d and not args.quad:
        args.quad = [",".join(repr(float(x)) for x in d["quad"])]
    for key in ("a", "b", "q"):
        if key in d:
            fill(key + "_vals", d[key])


def _space(args, key: str, required: bool = True) -> MeasureSpace | None:
    obj = getattr(args, key + "_obj", None)
    if obj is not None:
        return obj
    sp = parse_space(getattr(args, key), f"--{key}")
    if sp is None and required:
        raise UsageError(f"--{key}: required")
    return sp


def _vals(args, key: str, flag: str):
    v = getattr(args, key + "_vals", None)
    if v is not None:
        return v
    v = parse_values(getattr(args, key), flag)
    if v is None:
        raise UsageError(f"{flag}: required")
    return v


def _fn(space: MeasureSpace, vals, flag: str) -> StepFunction:
    try:
        return StepFunction(space, vals)
    except LpcharError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def cmd_check(args) -> int:
    if args.witness:
        _witness_args(args)
    tol = args.tolerance
    name = args.name
    if name in ("holder", "reversed-holder", "minkowski"):
        mu = _space(args, "mu")
        f = _fn(mu, _vals(args, "f", "--f"), "--f")
        g = _fn(mu, _vals(args, "g", "--g"), "--g")
        if name == "holder":
            reports = [ineq.holder_report(_pair(args), f, g, mu, tol)]
        elif name == "reversed-holder":
            reports = [ineq.reversed_holder_report(_pair(args), f, g, mu, tol)]
        else:
            reports = [ineq.minkowski_triangle_report(_single_gen(args), f, g, mu, tol)]
    elif name in ("gmi", "genmink"):
        mu = _space(args, "mu")
        nu = _space(args, "nu")
        fvals = getattr(args, "F_vals", None)
        if fvals is None:
            if args.F is None:
                raise UsageError("--F: required")
            fvals = parse_matrix(args.F, "--F")
        F = _fn(product_space(mu, nu), np.asarray(fvals, dtype=float).reshape(-1), "--F")
        if name == "gmi":
            if args.p is None:
                raise UsageError("--p: required for gmi")
            reports = [ineq.gmi_report(args.p, F, mu, nu, tol)]
        else:
            reports = [ineq.generalized_minkowski_report(_pair(args), F, mu, nu, args.direction or "forward", tol)]
    elif name == "mulholland":
        if not args.quad:
            raise UsageError("--quad: at least one t,u,v,w quadruple required")
        quads = []
        for text in args.quad:
            q = _floats(text, "--quad")
            if len(q) != 4:
                raise UsageError(f"--quad: expected 4 numbers, got {text!r}")
            quads.append(q)
        reports = ineq.mulholland_subadditivity_check(_single_gen(args), quads, args.direction or "forward", tol)
    else:
        a = _vals(args, "a", "--a")
        b = _vals(args, "b", "--b")
        q = _vals(args, "q", "--q")
        reports = [ineq.quasi_mean_midpoint_report(_single_gen(args), a, b, q, tol)]
    emit([r.to_dict() for r in reports], args.output)
    return 0 if all(r.holds for r in reports) else 1


def _value_list(args, values_attr: str, range_attr: str, field: str):
    vals = getattr(args, values_attr)
    rng = getattr(args, range_attr)
    if vals:
        return _floats(vals, field)
    if rng:
        lo, hi, n = parse_range(rng, field.replace("values", "range"))
        return np.linspace(lo, hi, n).tolist()
    raise UsageError(f"{field}: required (or the matching range)")


def cmd_scan_concavity(args) -> int:
    s_lo, s_hi, _ = parse_range(args.s_range, "--s-range", with_n=False)
    t_lo, t_hi, _ = parse_range(args.t_range, "--t-range", with_n=False)
    if args.phi or args.psi:
        verdict = analysis.concavity_scan(_pair(args), (s_lo, s_hi), (t_lo, t_hi), args.steps, args.tolerance)
        if args.output == "csv":
            sys.stdout.write("s,t,midpoint_defect\n")
            for s, t, d in verdict.csv_rows():
                sys.stdout.write(f"{s!r},{t!r},{d!r}\n")
        else:
            emit([verdict.to_dict()], args.output)
        return 0 if verdict.concave_on_grid else 1
    ps = _value_list(args, "p_values", "p_range", "--p-values")
    qs = _value_list(args, "q_values", "q_range", "--q-values")
    if any(x <= 0 for x in ps + qs):
        raise UsageError("--p-values/--q-values: exponents must be positive")
    records = []
    pred = np.zeros((len(ps), len(qs)), dtype=bool)
    conc = np.zeros_like(pred)
    for i, p in enumerate(ps):
        for j, q in enumerate(qs):
            v = analysis.concavity_scan(power_pair(p, q), (s_lo, s_hi), (t_lo, t_hi), args.steps, args.tolerance)
            pred[i, j] = 1.0 / p + 1.0 / q <= 1.0
            conc[i, j] = v.concave_on_grid
            records.append({
                "p": p, "q": q, "concave": v.concave_on_grid, "conjugacy_predicate": bool(pred[i, j]),
                "det": analysis.power_hessian_det(p, q), "worst_violation": v.worst_violation,
            })
    emit(records, args.output)
    bad = 0
    for i in range(len(ps)):
        for j in range(len(qs)):
            if conc[i, j] == pred[i, j]:
                continue
            neighbours = [pred[x, y] for x, y in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1))
                          if 0 <= x < len(ps) and 0 <= y < len(qs)]
            if all(nb == pred[i, j] for nb in neighbours):
                bad += 1
    return 0 if bad == 0 else 1


def cmd_search(args) -> int:
    if args.seed is None:
        raise UsageError("--seed: required for search")
    pair = _pair(args) if args.target not in ("minkowski", "mulholland") or args.psi else None
    if pair is None:
        g = _single_gen(args)
        pair = GeneratorPair(g, g.inverted())
    mu = _space(args, "mu", required=False)
    nu = _space(args, "nu", required=False)
    result = search.counterexample_search(
        pair, mu, atoms=args.atoms, budget=args.budget, seed=args.seed, target=args.target, nu=nu,
        two_block=args.two_block, direction=args.direction or "forward", tol=args.tolerance, jobs=args.jobs,
    )
    if not result.found:
        sys.stdout.write("none\n")
        return 0
    emit([result.to_dict()], args.output)
    return 1


def cmd_fit(args) -> int:
    gen = _single_gen(args)
    lo, hi, n = parse_range(args.grid, "--grid", 50)
    if n < 3:
        raise UsageError("--grid: need at least 3 points")
    fit = analysis.power_fit(gen, np.linspace(lo, hi, n))
    emit([fit.to_dict()], args.output)
    return 0


def cmd_demo_optimality(args) -> int:
    mu = _space(args, "mu")
    if args.mode == "strict-gap":
        if args.p is None or args.p_prime is None:
            raise UsageError("--p and --p-prime: required for strict-gap")
        f = _fn(mu, _vals(args, "f", "--f"), "--f")
        try:
            low, high = analysis.strict_gap_demo(args.p, args.p_prime, f, mu, args.tolerance)
        except RuntimeError as exc:
            emit([{"mode": "strict-gap", "error": str(exc)}], args.output)
            return 1
        emit([{"mode": "strict-gap", "p": args.p, "p_prime": args.p_prime, "P_p_prime": low, "P_p": high,
               "margin": high - low}], args.output)
        return 0
    pair = _pair(args)
    lo, hi, _ = parse_range(args.r_range, "--r-range", with_n=False) if args.r_range else (None, None, None)
    if args.mode == "forward":
        f = _fn(mu, _vals(args, "f", "--f"), "--f")
        res = analysis.optimality_search(pair, f, mu, (lo, hi) if lo is not None else (0.1, 10.0),
                                         args.steps, args.tolerance)
    else:
        g = _fn(mu, _vals(args, "g", "--g"), "--g")
        res = analysis.reversed_optimality_search(pair, g, mu, (lo, hi) if lo is not None else (-10.0, -0.1),
                                                  args.steps, args.tolerance)
    emit([{"mode": args.mode, **res.to_dict()}], args.output)
    return 0 if res.achieved_equality else 1


# ---------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--output", choices=("json", "jsonl", "csv", "pretty"), default="json")
    p.add_argument("--jobs", type=int, default=1)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="lpchar", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def gens(p):
        p.add_argument("--phi")
        p.add_argument("--psi")
        p.add_argument("--gen", help="single generator for minkowski/mulholland/quasimean/fit")

    c = sub.add_parser("check", parents=[common], help="evaluate one inequality")
    c.add_argument("name", choices=CHECKS)
    gens(c)
    c.add_argument("--mu")
    c.add_argument("--nu")
    c.add_argument("--f")
    c.add_argument("--g")
    c.add_argument("--F", help="matrix rows over X, e.g. '1,2;3,4', or JSON file")
    c.add_argument("--p", type=float)
    c.add_argument("--direction", choices=("forward", "reversed"))
    c.add_argument("--quad", action="append", default=[])
    c.add_argument("--a")
    c.add_argument("--b")
    c.add_argument("--q")
    c.add_argument("--witness", help="JSON witness/report/search output to re-check")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("scan-concavity", parents=[common], help="concavity of phi^-1(s) psi^-1(t)")
    gens(s)
    s.add_argument("--p-values")
    s.add_argument("--q-values")
    s.add_argument("--p-range", help="lo,hi,n")
    s.add_argument("--q-range", help="lo,hi,n")
    s.add_argument("--s-range", default="0.1,10")
    s.add_argument("--t-range", default="0.1,10")
    s.add_argument("--steps", type=int, default=9)
    s.set_defaults(func=cmd_scan_concavity)

    r = sub.add_parser("search", parents=[common], help="seeded counterexample search")
    r.add_argument("target", choices=search.TARGETS)
    gens(r)
    r.add_argument("--mu")
    r.add_argument("--nu")
    r.add_argument("--atoms", type=int, default=2)
    r.add_argument("--two-block", action="store_true")
    r.add_argument("--direction", choices=("forward", "reversed"))
    r.set_defaults(func=cmd_search)

    f = sub.add_parser("fit", parents=[common], help="fit c*t^p to a generator")
    gens(f)
    f.add_argument("--grid", default="0.1,10,50", help="lo,hi[,n]")
    f.set_defaults(func=cmd_fit)

    d = sub.add_parser("demo-optimality", parents=[common], help="optimality searches and the strict power-mean gap")
    gens(d)
    d.add_argument("--mode", choices=("forward", "reversed", "strict-gap"), default="forward")
    d.add_argument("--mu")
    d.add_argument("--f")
    d.add_argument("--g")
    d.add_argument("--r-range")
    d.add_argument("--steps", type=int, default=200)
    d.add_argument("--p", type=float)
    d.add_argument("--p-prime", type=float)
    d.set_defaults(func=cmd_demo_optimality)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tolerance <= 0 or not math.isfinite(args.tolerance):
        parser.error("--tolerance: must be positive")
    if args.budget < 1:
        parser.error("--budget: must be at least 1")
    if args.jobs < 1:
        parser.error("--jobs: must be at least 1")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (LpcharError, ValidationError) as exc:
        sys.stderr.write(f"lpchar: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
