"""Independent checking of solution files against their instance.

A solution file records x, the claimed objective value and a SHA-256 digest
over the instance bytes and the canonical solution payload.  Verification
recomputes feasibility and the objective in exact arithmetic; any mismatch
with the claimed data is an error.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import DigestMismatch, DimensionMismatch, InfeasibleSolution, InvalidInput, ValueMismatch
from .model import (
    MaxSubInstance,
    MinCkpInstance,
    eval_f,
    eval_minckp_constraint,
    eval_minckp_cost,
    eval_qform,
    format_rational,
    in_f1,
    serialize_instance,
    to_rational,
)

DIGEST_FIELDS = ("kind", "x", "value", "algorithm", "params", "relaxation", "delta")


def instance_digest(inst) -> str:
    return hashlib.sha256(serialize_instance(inst).encode("utf-8")).hexdigest()


def solution_digest(sol: dict) -> str:
    payload = {k: sol[k] for k in DIGEST_FIELDS if k in sol}
    payload["instance_sha256"] = sol.get("instance_sha256")
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def seal(sol: dict, inst) -> dict:
    """Attach the instance hash and the payload digest to a solution dict."""
    out = dict(sol)
    out["instance_sha256"] = instance_digest(inst)
    out["digest"] = solution_digest(out)
    return out


@dataclass(frozen=True)
class Verdict:
    kind: str
    value: Fraction
    slack: Fraction
    relaxation: bool

    def to_dict(self) -> dict:
        return {"status": "OK", "kind": self.kind, "value": format_rational(self.value),
                "slack": format_rational(self.slack), "relaxation": self.relaxation}


def _strict_rational(token, what):
    if not isinstance(token, str) and not (isinstance(token, int) and not isinstance(token, bool)):
        raise InvalidInput(f"{what} must be an integer or a 'num/den' string")
    return to_rational(token)


def _binary_entries(xs):
    out = []
    for v in xs:
        if isinstance(v, bool) or not isinstance(v, int) or v not in (0, 1):
            raise InvalidInput(f"binary solution entries must be 0 or 1, got {v!r}")
        out.append(v)
    return tuple(out)


def verify(inst, sol: dict) -> Verdict:
    """Exact feasibility and objective check; raises on any discrepancy."""
    if not isinstance(sol, dict):
        raise InvalidInput("solution must be a JSON object")
    kind = "minckp" if isinstance(inst, MinCkpInstance) else "maxsub"
    if sol.get("kind") != kind:
        raise InvalidInput(f"solution kind {sol.get('kind')!r} does not match instance kind {kind!r}")
    if "digest" in sol:
        if sol.get("instance_sha256") != instance_digest(inst):
            raise DigestMismatch("solution was produced for a different instance")
        if sol["digest"] != solution_digest(sol):
            raise DigestMismatch("solution digest does not match its content")
    xs = sol.get("x")
    if not isinstance(xs, list):
        raise InvalidInput("solution field 'x' must be a list")
    if len(xs) != inst.n:
        raise DimensionMismatch(f"solution has {len(xs)} entries, instance has {inst.n}")
    relaxation = bool(sol.get("relaxation", False))
    if relaxation:
        x = tuple(_strict_rational(v, "x entry") for v in xs)
        if any(v < 0 or v > 1 for v in x):
            raise InfeasibleSolution("relaxed solution leaves the unit box")
    else:
        x = _binary_entries(xs)
    claimed = _strict_rational(sol.get("value"), "value")

    if isinstance(inst, MinCkpInstance):
        delta = _strict_rational(sol.get("delta", 0), "delta") if relaxation else Fraction(0)
        slack = eval_minckp_constraint(inst, x) - inst.capacity
        if slack + delta < 0:
            raise InfeasibleSolution(f"demand missed by {-slack}", slack=slack)
        value = eval_minckp_cost(inst, x)
    elif isinstance(inst, MaxSubInstance):
        slack = inst.capacity - eval_qform(inst, x)
        if relaxation:
            if not in_f1(inst, x):
                raise InfeasibleSolution("relaxed solution is outside F1", slack=slack)
        elif slack < 0:
            raise InfeasibleSolution(f"capacity exceeded by {-slack}", slack=slack)
        value = eval_f(inst, x)
    else:
        raise TypeError(f"not an instance: {inst!r}")
    if value != claimed:
        raise ValueMismatch(f"claimed value {claimed} but recomputed {value}")
    return Verdict(kind=kind, value=value, slack=slack, relaxation=relaxation)
