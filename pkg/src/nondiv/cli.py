"""Command line front end.

Subcommands:
  delta     restricted minimal covolume with an exact witness
  drive     iterate push-out steps until the covolume floor is reached
  oracle    cross-check delta against a brute-force enumeration (small dims)
  shortvec  enumerate lattice vectors below a squared-length bound

Exit codes: 0 success (oracle: agreement), 1 oracle disagreement, 2 invalid
input, 3 enumeration budget exhausted (partial output still emitted),
4 drive stopped at the step cap, 5 drive could not certify a search complete.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys

from . import serialize as se
from .enumeration import delta_m, oracle_delta_m, short_vectors
from .errors import BudgetExceeded, NondivError, ValidationError
from .lattice import trivial_scenario
from .pushout import PushoutConfig, Terminated, drive

ENV_BUDGET = "NONDIV_VECTOR_BUDGET"

EXIT_OK = 0
EXIT_DISAGREE = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_MAX_STEPS = 4
EXIT_INCOMPLETE = 5

ORACLE_MAX_DIM = 5


def _load_inputs(args):
    lat = se.load_lattice(args.lattice)
    if args.scenario is not None:
        sc, cfg = se.load_scenario(args.scenario)
        if sc.n != lat.n:
            raise ValidationError(
                "dimension", f"scenario is {sc.n}-dimensional, lattice is {lat.n}")
        for w in sc.isomorphy_warnings():
            print(f"warning: {w}", file=sys.stderr)
    else:
        # fallback: trivial group, unit blocks; its isomorphy warnings are
        # vacuous (no generators to compare), so they are not surfaced
        sc, cfg = trivial_scenario(lat.n), PushoutConfig()
    return lat, sc, cfg


def _resolve_budget(args, cfg: PushoutConfig) -> int:
    # precedence: flag, then environment, then scenario config, then default
    if args.vector_budget is not None:
        if args.vector_budget <= 0:
            raise ValidationError("--vector-budget", "must be positive")
        return args.vector_budget
    env = os.environ.get(ENV_BUDGET)
    if env is not None:
        try:
            val = int(env)
        except ValueError:
            raise ValidationError(ENV_BUDGET, f"expected an integer, got {env!r}")
        if val <= 0:
            raise ValidationError(ENV_BUDGET, "must be positive")
        return val
    return cfg.vector_budget


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require_json(args) -> None:
    if args.format != "json":
        raise ValidationError("--format",
                              "csv output is only defined for drive trajectories")


def _with_seed(doc: dict, args) -> dict:
    if args.seed is not None:
        doc["seed"] = args.seed
    return doc


def cmd_delta(args) -> int:
    _require_json(args)
    lat, sc, cfg = _load_inputs(args)
    d = delta_m(lat, sc, budget=_resolve_budget(args, cfg))
    _emit(se.dumps_json(_with_seed(se.delta_to_dict(d), args)), args.output)
    return EXIT_OK if d.complete else EXIT_BUDGET


def cmd_drive(args) -> int:
    lat, sc, cfg = _load_inputs(args)
    updates = {"vector_budget": _resolve_budget(args, cfg)}
    if args.max_steps is not None:
        updates["max_steps"] = args.max_steps
    if args.eta0 is not None:
        updates["eta0_override"] = se.parse_rat(args.eta0, "--eta0")
    cfg = dataclasses.replace(cfg, **updates)
    cert = drive(lat, sc, cfg)
    if args.format == "csv":
        _emit(se.certificate_to_csv(cert), args.output)
    else:
        _emit(se.dumps_json(_with_seed(se.certificate_to_dict(cert), args)),
              args.output)
    return {Terminated.REACHED_ETA0: EXIT_OK,
            Terminated.MAX_STEPS: EXIT_MAX_STEPS,
            Terminated.INCOMPLETE: EXIT_INCOMPLETE}[cert.terminated]


def cmd_oracle(args) -> int:
    _require_json(args)
    lat, sc, cfg = _load_inputs(args)
    if lat.n > ORACLE_MAX_DIM:
        raise ValidationError(
            "dimension",
            f"brute-force oracle supports dimension <= {ORACLE_MAX_DIM}, got {lat.n}")
    if args.hnf_bound < 1:
        raise ValidationError("--hnf-bound", "must be at least 1")
    d = delta_m(lat, sc, budget=_resolve_budget(args, cfg))
    o = oracle_delta_m(lat, sc, args.hnf_bound)
    agree = d.complete and d.delta_sq_pow == o.delta_sq_pow
    verdict = "AGREE" if agree else "DISAGREE"
    doc = _with_seed({
        "verdict": verdict,
        "hnf_entry_bound": args.hnf_bound,
        "search": se.delta_to_dict(d),
        "oracle": se.delta_to_dict(o),
    }, args)
    _emit(se.dumps_json(doc), args.output)
    if args.output:
        print(verdict)
    return EXIT_OK if agree else EXIT_DISAGREE


def cmd_shortvec(args) -> int:
    _require_json(args)
    lat, sc, cfg = _load_inputs(args)
    bound_sq = se.parse_rat(args.bound_sq, "--bound-sq")
    try:
        vecs = short_vectors(lat, bound_sq, budget=_resolve_budget(args, cfg))
    except BudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    doc = _with_seed({
        "bound_sq": se.rat_str(bound_sq),
        "count": len(vecs),
        "vectors": [{"coords": list(v),
                     "norm_sq": se.rat_str(lat.vector_norm_sq(v)),
                     "norm_float": math.sqrt(lat.vector_norm_sq(v))}
                    for v in vecs],
    }, args)
    _emit(se.dumps_json(doc), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nondiv",
        description="Restricted minimal covolume certificates and push-out drives "
                    "on unimodular lattices, in exact rational arithmetic.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", metavar="FILE",
                       help="scenario JSON (blocks, group generators, config); "
                            "defaults to the trivial group with unit blocks")
        p.add_argument("--lattice", metavar="FILE", required=True,
                       help="lattice JSON with a column-major basis")
        p.add_argument("--output", metavar="FILE",
                       help="write the result here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int,
                       help="echoed into the output; commands are deterministic")
        p.add_argument("--vector-budget", type=int, dest="vector_budget",
                       metavar="N", help="enumeration node cap (overrides "
                       f"{ENV_BUDGET} and the scenario config)")

    p = sub.add_parser("delta", help="exact restricted minimal covolume")
    common(p)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("drive", help="push out until the covolume floor holds")
    common(p)
    p.add_argument("--max-steps", type=int, dest="max_steps", metavar="K")
    p.add_argument("--eta0", metavar="P/Q",
                   help="covolume floor in (0, 1); overrides the scenario config")
    p.set_defaults(func=cmd_drive)

    p = sub.add_parser("oracle", help="cross-check delta against brute force")
    common(p)
    p.add_argument("--hnf-bound", type=int, dest="hnf_bound", default=2,
                   metavar="B", help="entry bound for the brute-force basis sweep")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("shortvec", help="lattice vectors below a length bound")
    common(p)
    p.add_argument("--bound-sq", dest="bound_sq", default="1", metavar="P/Q",
                   help="squared length bound (default 1)")
    p.set_defaults(func=cmd_shortvec)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e.field}: {e.message}", file=sys.stderr)
        return EXIT_INVALID
    except NondivError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
