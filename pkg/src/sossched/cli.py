"""Command line interface.

Exit codes: 0 ok, 2 infeasible, 3 invalid input, 4 internal-invariant breach.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .bench import bench
from .errors import InvalidInput, SosschedError, TooLarge
from .gen import GenConfig, generate
from .model import (
    MaxSubInstance,
    MinCkpInstance,
    dumps,
    format_rational,
    load_instance,
    serialize_instance,
    to_rational,
)
from .oracle import BRUTE_MAX_N, GRID_MAX_N, brute_maxsub, brute_minckp, grid_continuous
from .runner import (
    DEFAULT_DELTA,
    run_maxsub,
    run_maxsub_relaxation,
    run_minckp,
    run_minckp_relaxation,
)
from .verify import verify

EXIT_OK, EXIT_INFEASIBLE, EXIT_INVALID, EXIT_BREACH = 0, 2, 3, 4


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(path, kind=None):
    try:
        inst = load_instance(path)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None
    if kind == "minckp" and not isinstance(inst, MinCkpInstance):
        raise InvalidInput(f"{path} is not a minckp instance")
    if kind == "maxsub" and not isinstance(inst, MaxSubInstance):
        raise InvalidInput(f"{path} is not a maxsub instance")
    return inst


def cmd_gen(args) -> int:
    cfg = GenConfig(kind=args.kind, seed=args.seed, n=args.n, max_value=args.max_value,
                    max_weight=args.max_weight,
                    capacity_policy="absolute" if args.capacity else "tight",
                    theta=args.theta, capacity=args.capacity, K=args.K,
                    density=args.density, max_off=args.max_off)
    if args.count == 1:
        _emit(serialize_instance(generate(cfg)), args.output)
        return EXIT_OK
    if not args.output:
        raise InvalidInput("--count > 1 needs --output DIR")
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for k in range(args.count):
        sub = dataclasses.replace(cfg, seed=args.seed + k)
        name = f"{args.kind}-n{args.n}-s{args.seed + k}"
        (out / f"{name}.json").write_text(serialize_instance(generate(sub, name)), encoding="utf-8")
    return EXIT_OK


def cmd_solve_minckp(args) -> int:
    inst = _load(args.input, "minckp")
    if args.relaxation_only:
        sol = run_minckp_relaxation(inst, args.delta)
    else:
        sol = run_minckp(inst, args.epsilon, force=args.force)
    _emit(dumps(sol), args.output)
    return EXIT_OK


def cmd_solve_maxsub(args) -> int:
    inst = _load(args.input, "maxsub")
    if args.relaxation_only:
        sol = run_maxsub_relaxation(inst, args.epsilon, args.fw_steps)
    else:
        sol = run_maxsub(inst, args.epsilon, fw_steps=args.fw_steps, oracle=args.oracle,
                         grid_resolution=args.grid_resolution)
    _emit(dumps(sol), args.output)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args.input)
    out: dict = {"kind": "minckp" if isinstance(inst, MinCkpInstance) else "maxsub"}
    if inst.n <= BRUTE_MAX_N:
        x, value = (brute_minckp if out["kind"] == "minckp" else brute_maxsub)(inst)
        out["brute"] = {"x": list(x.x), "value": format_rational(value)}
    elif args.grid_resolution is None:
        raise TooLarge(f"brute force limited to n <= {BRUTE_MAX_N}")
    if args.grid_resolution is not None:
        if inst.n > GRID_MAX_N:
            raise TooLarge(f"grid search limited to n <= {GRID_MAX_N}")
        problem = "nlp" if out["kind"] == "minckp" else "f1"
        value, radius, x = grid_continuous(problem, inst, args.grid_resolution)
        out["grid"] = {"problem": problem, "m": args.grid_resolution,
                       "value": format_rational(value), "radius": format_rational(radius),
                       "x": [format_rational(v) for v in x]}
    _emit(dumps(out), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load(args.input)
    try:
        sol = json.loads(Path(args.solution).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read solution {args.solution}: {exc}") from None
    verdict = verify(inst, sol)
    _emit(dumps(verdict.to_dict()), args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    directory = Path(args.input)
    if not directory.is_dir():
        raise InvalidInput(f"{directory} is not a directory")
    report = bench(directory, args.epsilon or ["1/2"], use_oracle=not args.no_oracle,
                   fw_steps=args.fw_steps, force=args.force)
    _emit(report.to_csv(), args.output)
    if args.report:
        Path(args.report).write_text(report.to_json(), encoding="utf-8")
    return EXIT_OK


def _rational_arg(text):
    try:
        return to_rational(text)
    except InvalidInput as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sossched", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a seeded random instance")
    g.add_argument("--kind", choices=("minckp", "maxsub"), default="minckp")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--max-value", type=int, default=64)
    g.add_argument("--max-weight", type=int, default=64)
    g.add_argument("--theta", type=_rational_arg, default="1/2",
                   help="tight capacity fraction in (0, 1]")
    g.add_argument("--capacity", type=_rational_arg, default=None,
                   help="absolute capacity (overrides --theta)")
    g.add_argument("--K", type=int, default=2, help="number of square vectors (maxsub)")
    g.add_argument("--density", type=_rational_arg, default="1/2")
    g.add_argument("--max-off", type=int, default=8)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve an instance")
    ssub = s.add_subparsers(dest="problem", required=True)
    m = ssub.add_parser("minckp")
    m.add_argument("--input", required=True)
    m.add_argument("--epsilon", type=_rational_arg, default="1/2")
    m.add_argument("--force", action="store_true", help="skip the candidate-count guard")
    m.add_argument("--relaxation-only", action="store_true")
    m.add_argument("--delta", type=_rational_arg, default=DEFAULT_DELTA)
    m.add_argument("--output")
    m.set_defaults(func=cmd_solve_minckp)
    x = ssub.add_parser("maxsub")
    x.add_argument("--input", required=True)
    x.add_argument("--epsilon", type=_rational_arg, default="1/4")
    x.add_argument("--fw-steps", type=int, default=None)
    x.add_argument("--oracle", choices=("fw", "grid"), default="fw")
    x.add_argument("--grid-resolution", type=int, default=None)
    x.add_argument("--relaxation-only", action="store_true")
    x.add_argument("--output")
    x.set_defaults(func=cmd_solve_maxsub)

    o = sub.add_parser("oracle", help="brute-force or grid reference value")
    o.add_argument("--input", required=True)
    o.add_argument("--grid-resolution", type=int, default=None)
    o.add_argument("--output")
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="check a solution file against its instance")
    v.add_argument("--input", required=True)
    v.add_argument("--solution", required=True)
    v.add_argument("--output")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="benchmark a directory of instances")
    b.add_argument("--input", required=True)
    b.add_argument("--epsilon", type=_rational_arg, action="append")
    b.add_argument("--no-oracle", action="store_true")
    b.add_argument("--fw-steps", type=int, default=None)
    b.add_argument("--force", action="store_true")
    b.add_argument("--output", help="CSV path (default stdout)")
    b.add_argument("--report", help="JSON report path")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors, which is reserved for infeasibility here
        return EXIT_INVALID if exc.code == 2 else (exc.code or EXIT_OK)
    try:
        return args.func(args)
    except SosschedError as exc:
        print(f"sossched: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except AssertionError as exc:
        print(f"sossched: invariant breach: {exc}", file=sys.stderr)
        return EXIT_BREACH


if __name__ == "__main__":
    sys.exit(main())
