"""Solve an instance and package the result as a sealed solution dict.

Shared by the command line and the benchmark runner.  Solution dicts hold
only deterministic content so that repeated runs produce identical bytes.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InvalidInput, TooLarge
from .fw import default_steps, frank_wolfe
from .maxsub import fw_relaxation, solve_maxsub
from .model import (
    FractionalVector,
    MaxSubInstance,
    MinCkpInstance,
    eval_f,
    eval_minckp_cost,
    format_rational,
    preprocess_maxsub,
    preprocess_minckp,
    solution_to_dict,
    to_rational,
)
from .oracle import grid_continuous
from .ptas import PtasParams, solve_ptas
from .relax import nlp_solve
from .verify import seal

GUARD_LIMIT = 10 ** 7
DEFAULT_DELTA = Fraction(1, 2 ** 20)
DEFAULT_GRID = 64


def projected_candidates(n: int, eps) -> int:
    return n ** PtasParams(eps=eps, bit_length=0).h


def run_minckp(inst: MinCkpInstance, eps, force: bool = False) -> dict:
    eps = to_rational(eps)
    count = projected_candidates(inst.n, eps)
    if count > GUARD_LIMIT and not force:
        raise TooLarge(f"n^h = {count} candidate sets exceeds {GUARD_LIMIT}; pass --force to run")
    x, rep = solve_ptas(inst, eps)
    params = {"epsilon": format_rational(eps), "h": rep.h, "delta": format_rational(rep.delta)}
    extra = {"report": {
        "candidates": rep.candidates, "evaluated": rep.evaluated,
        "pruned_reach": rep.pruned_reach, "pruned_bound": rep.pruned_bound,
        "shortcut": rep.shortcut, "discarded": rep.discarded, "relax_calls": rep.relax_calls,
        "best_guess": list(rep.best_S1), "forced_ones": list(rep.forced_ones),
        "relaxation_value": format_rational(rep.relaxation_value),
    }}
    sol = solution_to_dict("minckp", x.x, rep.cost, "ptas", params, extra)
    return seal(sol, inst)


def run_minckp_relaxation(inst: MinCkpInstance, delta=DEFAULT_DELTA) -> dict:
    delta = to_rational(delta)
    reduced, pre = preprocess_minckp(inst)
    res = nlp_solve(reduced, delta=delta, report=True)
    x = pre.lift(res.x.x)
    xs = [Fraction(v) for v in x]
    sol = solution_to_dict("minckp", xs, eval_minckp_cost(inst, xs),
                           "nlp_solve", {"delta": format_rational(delta)},
                           {"relaxation": True, "delta": format_rational(delta),
                            "report": {"route": res.route, "iterations": res.iterations,
                                       "feasibility_calls": res.calls}})
    return seal(sol, inst)


def grid_relaxation(m: int = DEFAULT_GRID):
    """Relaxation oracle for n <= 3: the best point of the feasible grid."""
    def run(inst: MaxSubInstance):
        _, _, x = grid_continuous("f1", inst, m)
        return FractionalVector(x, algorithm="grid", info={"m": m}), None
    run.name = f"grid/{m}"
    return run


def _relaxation(oracle: str, eps, fw_steps, grid_resolution):
    if oracle == "fw":
        return fw_relaxation(eps, fw_steps)
    if oracle == "grid":
        return grid_relaxation(grid_resolution or DEFAULT_GRID)
    raise InvalidInput(f"unknown relaxation oracle {oracle!r}")


def run_maxsub(inst: MaxSubInstance, eps, fw_steps: int | None = None, oracle: str = "fw",
               grid_resolution: int | None = None) -> dict:
    eps = to_rational(eps)
    if fw_steps is not None and fw_steps < 1:
        raise InvalidInput("--fw-steps must be positive")
    relax = _relaxation(oracle, eps, fw_steps, grid_resolution)
    x, rep = solve_maxsub(inst, eps, relaxation=relax)
    params = {"epsilon": format_rational(eps), "relaxation": rep.relaxation, "K": rep.K,
              "phi": format_rational(rep.phi)}
    extra = {"report": {"chain": rep.chain(), "winner": rep.winner,
                        "singleton": rep.singleton, "pipage_iterations": rep.pipage_iterations,
                        "forced_zeros": list(rep.forced_zeros)}}
    sol = solution_to_dict("maxsub", x.x, rep.value, "pipage", params, extra)
    return seal(sol, inst)


def run_maxsub_relaxation(inst: MaxSubInstance, eps, fw_steps: int | None = None) -> dict:
    eps = to_rational(eps)
    reduced, pre = preprocess_maxsub(inst)
    K = fw_steps if fw_steps is not None else default_steps(max(reduced.n, 1), eps)
    if K < 1:
        raise InvalidInput("--fw-steps must be positive")
    if reduced.n:
        xk, trace = frank_wolfe(reduced, K, keep_iterates=False)
        xs, inner = xk.x, trace.inner
    else:
        xs, inner = (), []
    x = [Fraction(v) for v in pre.lift(xs)]
    summary = {"K": K, "steps": len(inner),
               "min_inner": format_rational(min(inner)) if inner else "0",
               "f_final": format_rational(eval_f(inst, x))}
    sol = solution_to_dict("maxsub", x, eval_f(inst, x),
                           "frank_wolfe", {"epsilon": format_rational(eps), "K": K},
                           {"relaxation": True, "trace": summary})
    return seal(sol, inst)


def run(inst, eps, **kw) -> dict:
    if isinstance(inst, MinCkpInstance):
        return run_minckp(inst, eps, force=kw.get("force", False))
    return run_maxsub(inst, eps, fw_steps=kw.get("fw_steps"), oracle=kw.get("oracle", "fw"),
                      grid_resolution=kw.get("grid_resolution"))
