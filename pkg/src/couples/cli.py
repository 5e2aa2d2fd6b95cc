"""Command-line front end.

    couples compute {majorant,level,rearrange,kprofile,norm,star2} -f f.json [...]
    couples verify {kfnls,s_bounds,projections,transfer,degenerate,kdiv,all} [...]
    couples extremal {exm,exn,custom} [...]

Exit codes: 0 success, 1 verification failure, 2 malformed input,
3 domain error, 4 solver failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .constructions import least_decreasing_majorant, level_function, star_star
from .core import DomainError, StepFunction, fmt, parse, rearrange
from .extremal import LOWER_BOUND, is_nonincreasing, meets_lower_bound, run_instance
from .kcalc import (L1_LINF, L1_LINF_LEVEL, L1TILDE_LINF, CoupleTag, k_profile, profile_csv,
                    space_norm)
from .measure import BorelMeasure
from .simplex import SolverError
from . import verify

EXIT_FAIL, EXIT_MALFORMED, EXIT_DOMAIN, EXIT_SOLVER = 1, 2, 3, 4

COUPLES = {"l1-linf": L1_LINF, "l1tilde-linf": L1TILDE_LINF, "l1-linf-level": L1_LINF_LEVEL}
SPACES = {"l1": "L1", "linf": "Linf", "l1tilde": "L1tilde", "linf-level": "LinfLevel"}
# upper bounds from the explicit constructions (norm 4 for exm, 2 for exn)
UPPER = {"exm": 4, "exn": 2}


class Malformed(Exception):
    pass


def _load_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise Malformed(f"cannot read {path}: {exc}") from exc


def _load_function(path) -> StepFunction:
    try:
        return StepFunction.from_json(_load_json(path))
    except (ValueError, AttributeError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise Malformed(str(exc)) from exc


def _load_measure(path) -> BorelMeasure | None:
    if not path:
        return None
    try:
        return BorelMeasure.from_json(_load_json(path))
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise Malformed(f"malformed measure: {exc}") from exc


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _default_seed() -> int:
    raw = os.environ.get("COUPLES_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise Malformed(f"COUPLES_SEED must be an integer, got {raw!r}")


# ---------------------------------------------------------------------------
# compute


def cmd_compute(args) -> int:
    f = _load_function(args.file)
    mu = _load_measure(args.measure)
    what = args.what
    if what == "majorant":
        out = json.dumps(least_decreasing_majorant(f, mu).to_json())
    elif what == "level":
        out = json.dumps(level_function(f, mu).to_json())
    elif what == "rearrange":
        out = json.dumps(rearrange(f, mu).to_json())
    elif what == "kprofile":
        K = k_profile(f, CoupleTag(COUPLES[args.couple], mu))
        if args.csv:
            out = profile_csv(K, args.samples, args.decimal).rstrip("\n")
        else:
            out = json.dumps(K.to_json())
    elif what == "norm":
        out = json.dumps(fmt(space_norm(f, SPACES[args.space], mu)))
    else:  # star2
        if args.x is None:
            raise Malformed("star2 needs --x")
        out = json.dumps(fmt(star_star(f, mu, parse(args.x))))
    _emit(out, args.out)
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    name, jobs = args.suite, args.jobs
    if name == "degenerate":
        rep = verify.suite_degenerate(args.kmax, seed, args.trials or 200, jobs)
    elif name == "transfer":
        mu = _load_measure(args.measure)
        rep = verify.suite_transfer(seed, args.trials or 200, [mu] if mu else None, jobs)
    elif name == "all":
        rep = verify.run_all(seed, args.trials, jobs, args.kmax)
    else:
        fn = verify.SUITES[name]
        rep = fn(seed, args.trials, jobs=jobs) if args.trials else fn(seed, jobs=jobs)
    _emit(rep.dumps(), args.out)
    return 0 if rep.ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# extremal


def cmd_extremal(args) -> int:
    if args.instance == "custom":
        if not args.g:
            raise Malformed("custom instance needs --g FILE")
        g, kind = _load_function(args.g), args.lp
    else:
        g, kind = None, args.instance
    certs = run_instance(kind, g, args.refine, args.mode)
    ok = True
    lines = []
    for level, c in enumerate(certs):
        opt = fmt(c.optimum) if c.mode == "rational" else f"{c.optimum:.12g}"
        lines.append(f"level {level}: {kind} optimum {opt} ({c.mode}, {c.grids[0].n} cells)")
        if g is None:
            lo = meets_lower_bound(c)
            hi = float(c.optimum) <= UPPER[kind] + 1e-9
            ok &= lo and hi
            lines.append(f"  bounds: {fmt(LOWER_BOUND)} <= C <= {UPPER[kind]}: "
                         f"{'ok' if lo and hi else 'FAIL'}")
            for line in c.chain:
                ok &= line.holds
                lines.append(f"  {line}")
    if g is None and len(certs) > 1:
        mono = is_nonincreasing(certs)
        ok &= mono
        lines.append(f"nonincreasing under refinement: {'ok' if mono else 'FAIL'}")
    print("\n".join(lines))
    doc = {"instance": args.instance, "certificates": [c.to_json() for c in certs]}
    if args.out:
        _emit(json.dumps(doc, indent=2), args.out)
    if args.json:
        print(json.dumps(doc))
    return 0 if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="couples", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="constructions, norms and K-profiles of a step function")
    c.add_argument("what", choices=["majorant", "level", "rearrange", "kprofile", "norm", "star2"])
    c.add_argument("-f", "--file", required=True, help="step function JSON ('-' for stdin)")
    c.add_argument("--measure", help="Borel measure JSON (default: Lebesgue on (0, oo))")
    c.add_argument("--couple", choices=sorted(COUPLES), default="l1-linf")
    c.add_argument("--space", choices=sorted(SPACES), default="l1")
    c.add_argument("--csv", action="store_true", help="emit the profile as t,K rows")
    c.add_argument("--samples", type=int, default=0, help="extra log-spaced sample points")
    c.add_argument("--decimal", type=int, nargs="?", const=15, default=None,
                   help="print decimals with this many significant digits (default 15)")
    c.add_argument("--x", help="evaluation point for star2")
    c.add_argument("-o", "--out")
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("suite", choices=sorted(verify.SUITES) + ["degenerate", "all"])
    v.add_argument("--seed", type=int, help="default: $COUPLES_SEED or 0")
    v.add_argument("--trials", type=int)
    v.add_argument("--measure", help="fixed measure JSON for the transfer suite")
    v.add_argument("--kmax", type=int, default=20)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("-o", "--out")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("extremal", help="LP search for the minimal operator norm")
    e.add_argument("instance", choices=["exm", "exn", "custom"])
    e.add_argument("--g", help="step function JSON for the custom instance")
    e.add_argument("--lp", choices=["exm", "exn"], default="exm", help="LP family for custom")
    e.add_argument("--refine", type=int, default=0)
    e.add_argument("--mode", choices=["auto", "rational", "float"], default="auto")
    e.add_argument("--json", action="store_true", help="also print the certificates as JSON")
    e.add_argument("-o", "--out", help="write the certificates to this file")
    e.set_defaults(func=cmd_extremal)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Malformed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
