"""Command line front end.

Subcommands: ``gen`` writes random instances, ``check`` validates
instance files, ``solve`` runs one of the three solvers, ``oracle``
runs the exact small-instance search, ``simulate`` replays a saved
policy against Monte Carlo draws.  All output is JSON with floats
rounded to 12 significant digits.

Exit codes: 0 on success, 2 for unusable input (bad files, failed
validation, out-of-range parameters, a solver asked to run on an
instance outside its contract), 3 when a solver gives up at run time
(search budget exceeded, no positive gain to calibrate against, rate
bracket missing).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import policy_from_dict
from .additive import CandidateBudgetExceeded, additive_approx
from .core import (
    InstanceValidationError,
    ProbingError,
    evaluate_policy,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    round_floats,
    validate_instance,
)
from .generate import COST_REGIMES, PROB_SHAPES, GenSpec, generate
from .lagrange import (
    BracketNotFound,
    DegenerateBound,
    MixedPolicy,
    solve_unsaturated,
)
from .multi_state import best_reserve_backup
from .oracle import OracleOptions, TooLarge, exact_dp, tree_to_dot
from .simulator import (
    BernoulliArrivals,
    MarkovArrivals,
    SaturatedArrivals,
    SimConfig,
    simulate_saturated,
    simulate_unsaturated,
)

INPUT_ERROR = 2
SOLVER_ERROR = 3

_GIVE_UP = (TooLarge, CandidateBudgetExceeded, DegenerateBound, BracketNotFound)


class _CliError(Exception):
    def __init__(self, message: str, code: int = INPUT_ERROR):
        super().__init__(message)
        self.code = code


def _emit(obj, path: str | None) -> None:
    text = json.dumps(round_floats(obj), indent=2)
    if path and path != "-":
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _load(path: str):
    try:
        return load_instance(path)
    except FileNotFoundError:
        raise _CliError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise _CliError(f"{path}: not valid JSON ({exc})")
    except InstanceValidationError as exc:
        raise _CliError(f"{path}: {exc}")


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise _CliError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise _CliError(f"{path}: not valid JSON ({exc})")


# -- subcommands --------------------------------------------------------


def _cmd_gen(args) -> int:
    spec = GenSpec(
        n=args.channels,
        state_count=args.states,
        prob_shape=args.prob_shape,
        cost_regime=args.cost_regime,
        cost_range=(args.cost_lo, args.cost_hi),
        top_reward_one=args.top_reward_one,
    )
    import numpy as np

    rng = np.random.default_rng(args.seed)
    dicts = [instance_to_dict(generate(spec, rng)) for _ in range(args.count)]
    _emit(dicts[0] if args.count == 1 else dicts, args.output)
    return 0


def _cmd_check(args) -> int:
    results = []
    bad = False
    for path in args.instances:
        try:
            raw = _read_json(path)
        except _CliError as exc:
            results.append({"file": path, "ok": False, "error": str(exc)})
            bad = True
            continue
        try:
            inst = instance_from_dict(raw, validate=False)
            validate_instance(inst)
        except InstanceValidationError as exc:
            results.append(
                {
                    "file": path,
                    "ok": False,
                    "violations": [asdict(v) for v in exc.violations],
                }
            )
            bad = True
            continue
        except ProbingError as exc:
            results.append({"file": path, "ok": False, "error": str(exc)})
            bad = True
            continue
        results.append({"file": path, "ok": True})
    _emit(results, args.output)
    return INPUT_ERROR if bad else 0


def _cmd_solve(args) -> int:
    inst = _load(args.instance)
    names = inst.names
    if args.mode == "saturated":
        policy = best_reserve_backup(inst, args.threshold)
        report = evaluate_policy(inst, policy, altered_threshold=args.threshold)
        out = {
            "mode": "saturated",
            "policy": policy.to_dict(names),
            "report": report.as_dict(),
        }
    elif args.mode == "additive":
        result = additive_approx(
            inst, args.epsilon, max_candidates=args.max_candidates
        )
        out = {
            "mode": "additive",
            "policy": result.policy.to_dict(names),
            "report": result.report.as_dict(),
            "certificate": asdict(result.certificate),
        }
    else:
        if args.rate is None:
            raise _CliError("--rate is required for --mode unsaturated")
        mixed = solve_unsaturated(inst, args.rate, args.slack)
        out = {
            "mode": "unsaturated",
            "policy": mixed.to_dict(names),
            "report": {
                "busy_slot_gain": mixed.busy_slot_gain,
                "steady_state_gain": mixed.steady_state_gain,
                "busy_fraction": mixed.busy_fraction,
                "transmit_prob": mixed.transmit_prob,
            },
        }
    _emit(out, args.output)
    return 0


def _cmd_oracle(args) -> int:
    inst = _load(args.instance)
    options = OracleOptions(
        altered_threshold=args.threshold,
        allow_no_transmit=not args.forbid_silence,
        tie_preference=args.tie_preference,
        max_channels=args.max_channels,
    )
    result = exact_dp(inst, options)
    tree = result.tree
    out = {
        "value": result.value,
        "tree": tree.to_dict(),
        "probes_worst_case": tree.depth(),
    }
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(tree_to_dot(tree))
        out["dot"] = args.dot
    _emit(out, args.output)
    return 0


def _parse_arrivals(text: str):
    kind, _, rest = text.partition(":")
    try:
        if kind == "saturated":
            return SaturatedArrivals()
        if kind == "bernoulli":
            return BernoulliArrivals(float(rest))
        if kind == "markov":
            q01, q10 = (float(x) for x in rest.split(","))
            return MarkovArrivals(q01, q10)
    except (ValueError, ProbingError) as exc:
        raise _CliError(f"bad --arrivals value {text!r}: {exc}")
    raise _CliError(f"unknown arrival process {kind!r}")


def _cmd_simulate(args) -> int:
    inst = _load(args.instance)
    data = _read_json(args.policy)
    if "kind" not in data and "policy" in data:
        data = data["policy"]
    try:
        policy = policy_from_dict(data, inst)
    except (ProbingError, KeyError, ValueError) as exc:
        raise _CliError(f"{args.policy}: not a usable policy ({exc})")
    config = SimConfig(
        slots=args.slots,
        replications=args.replications,
        seed=args.seed,
        arrivals=_parse_arrivals(args.arrivals) if args.arrivals else None,
        threads=args.threads if args.threads else SimConfig().threads,
    )
    if args.queue:
        if not isinstance(policy, MixedPolicy):
            raise _CliError("--queue needs a mixed (unsaturated) policy")
        report = simulate_unsaturated(inst, policy, config)
    else:
        report = simulate_saturated(inst, policy, config)
    _emit(report.to_dict(), args.output)
    return 0


# -- wiring -------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="probeopt",
        description="probing/selection policies for multichannel transmission",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate random instances")
    p.add_argument("-n", "--channels", type=int, required=True)
    p.add_argument("-K", "--states", type=int, default=2)
    p.add_argument("--prob-shape", choices=PROB_SHAPES, default="uniform")
    p.add_argument("--cost-regime", choices=COST_REGIMES, default="heterogeneous")
    p.add_argument("--cost-lo", type=float, default=0.0)
    p.add_argument("--cost-hi", type=float, default=0.3)
    p.add_argument(
        "--top-reward-one",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="pin the best state's reward to 1",
    )
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("check", help="validate instance files")
    p.add_argument("instances", nargs="+")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("solve", help="build a policy for an instance")
    p.add_argument("instance")
    p.add_argument(
        "--mode",
        choices=("saturated", "additive", "unsaturated"),
        default="saturated",
    )
    p.add_argument(
        "--threshold",
        type=float,
        default=None,
        help="saturated mode: charge per transmission",
    )
    p.add_argument("--epsilon", type=float, default=0.1, help="additive mode")
    p.add_argument("--max-candidates", type=int, default=10**8)
    p.add_argument("--rate", type=float, default=None, help="unsaturated mode")
    p.add_argument("--slack", type=float, default=0.05)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("oracle", help="exact optimum by exhaustive search")
    p.add_argument("instance")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--forbid-silence", action="store_true")
    p.add_argument(
        "--tie-preference",
        choices=("default", "prefer-backup", "prefer-silent", "prefer-transmit"),
        default="default",
    )
    p.add_argument("--max-channels", type=int, default=14)
    p.add_argument("--dot", default=None, help="also write a graphviz file")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("simulate", help="Monte Carlo replay of a saved policy")
    p.add_argument("instance")
    p.add_argument("--policy", required=True, help="policy JSON (or solve output)")
    p.add_argument("--slots", type=int, default=100_000)
    p.add_argument("--replications", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument(
        "--queue",
        action="store_true",
        help="feed a queue and idle on empty slots (mixed policies only)",
    )
    p.add_argument(
        "--arrivals",
        default=None,
        help="queue arrivals: saturated, bernoulli:RATE, or markov:Q01,Q10",
    )
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except _GIVE_UP as exc:
        print(f"error: {exc}", file=sys.stderr)
        return SOLVER_ERROR
    except ProbingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
