"""Benchmark runner: solve every instance of a directory and compare with the oracle.

Rows are sorted by (instance id, algorithm, epsilon) regardless of the order in
which worker threads finish.  Solver errors are recorded in the row.
"""

from __future__ import annotations

import csv
import io
import json
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import SosschedError
from .model import MinCkpInstance, format_rational, load_instance, to_rational
from .oracle import BRUTE_MAX_N, brute_maxsub, brute_minckp
from .runner import run_maxsub, run_minckp

COLUMNS = ("instance", "kind", "algorithm", "epsilon", "n", "status", "value", "oracle_value",
           "ratio", "bound", "within_bound", "f_frac", "f_dropped", "f_singleton",
           "wall_time", "error")
ORACLE_CAP = 20


def thread_count() -> int:
    raw = os.environ.get("SOSSCHED_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)

    def aggregates(self) -> list:
        groups: dict = {}
        for r in self.rows:
            groups.setdefault((r["algorithm"], r["epsilon"]), []).append(r)
        out = []
        for (alg, eps), rows in sorted(groups.items()):
            ratios = [float(Fraction(r["ratio"])) for r in rows if r["ratio"] != ""]
            times = [r["wall_time"] for r in rows if r["status"] == "ok"]
            agg = {"algorithm": alg, "epsilon": eps, "rows": len(rows),
                   "errors": sum(1 for r in rows if r["status"] != "ok")}
            if ratios:
                agg.update(ratio_min=min(ratios), ratio_median=statistics.median(ratios),
                           ratio_max=max(ratios))
            if times:
                agg.update(time_total=sum(times), time_median=statistics.median(times))
            out.append(agg)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: (f"{r[k]:.6f}" if k == "wall_time" else r[k]) for k in COLUMNS})
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"rows": self.rows, "aggregates": self.aggregates()}, indent=2) + "\n"


def _instance_id(inst, path: Path) -> str:
    if inst.meta and isinstance(inst.meta, dict) and inst.meta.get("id"):
        return str(inst.meta["id"])
    return path.stem


def _row(path: Path, inst, algorithm: str, eps: Fraction, use_oracle: bool, kw: dict) -> dict:
    kind = "minckp" if isinstance(inst, MinCkpInstance) else "maxsub"
    row = {k: "" for k in COLUMNS}
    row.update(instance=_instance_id(inst, path), kind=kind, algorithm=algorithm,
               epsilon=format_rational(eps), n=inst.n, wall_time=0.0)
    try:
        start = time.perf_counter()
        if kind == "minckp":
            sol = run_minckp(inst, eps, force=kw.get("force", False))
        else:
            sol = run_maxsub(inst, eps, fw_steps=kw.get("fw_steps"))
        row["wall_time"] = time.perf_counter() - start
        value = to_rational(sol["value"])
        row.update(status="ok", value=format_rational(value))
        if kind == "minckp":
            row["bound"] = format_rational(1 + 2 * eps)
        else:
            chain = sol["report"]["chain"]
            row.update(f_frac=chain["f_frac"], f_dropped=chain["f_dropped"],
                       f_singleton=chain["f_singleton"])
        if use_oracle and inst.n <= min(ORACLE_CAP, BRUTE_MAX_N):
            if kind == "minckp":
                _, opt = brute_minckp(inst)
                ratio = value / opt if opt else Fraction(1)
                row["within_bound"] = ratio <= 1 + 2 * eps
            else:
                _, opt = brute_maxsub(inst)
                ratio = value / opt if opt else Fraction(1)
            row.update(oracle_value=format_rational(opt), ratio=format_rational(ratio))
    except SosschedError as exc:
        row.update(status=type(exc).__name__, error=str(exc))
    return row


def bench(directory, epsilons, use_oracle: bool = True, **kw) -> BenchReport:
    """Run the matching algorithm on every ``*.json`` instance for every epsilon."""
    paths = sorted(Path(directory).glob("*.json"))
    eps_list = [to_rational(e) for e in epsilons]
    jobs = []
    report = BenchReport()
    for path in paths:
        try:
            inst = load_instance(path)
        except SosschedError as exc:
            row = {k: "" for k in COLUMNS}
            row.update(instance=path.stem, status=type(exc).__name__, error=str(exc), wall_time=0.0)
            report.rows.append(row)
            continue
        algorithm = "ptas" if isinstance(inst, MinCkpInstance) else "maxsub"
        for eps in eps_list:
            jobs.append((path, inst, algorithm, eps))
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        futures = [pool.submit(_row, p, i, a, e, use_oracle, kw) for p, i, a, e in jobs]
        report.rows.extend(f.result() for f in futures)
    report.rows.sort(key=lambda r: (r["instance"], r["algorithm"], Fraction(r["epsilon"] or 0)))
    return report
