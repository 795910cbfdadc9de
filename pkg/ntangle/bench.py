"""
Fast degree-2 n-tangle against the brute-force quartic oracles.

Each (n, method) pair is timed over `trials` runs after `warmup` untimed
runs; every method's tau is compared with the reference method (the fast
path when it ran, the first method otherwise).
"""
import logging
import statistics
import time

from typing import Callable

from pydantic import BaseModel, Field

from . import invariants
from .errors import QubitCountError
from .qstate import QState, random_pure


logger = logging.getLogger(__name__)

METHODS: tuple[str, ...] = ("fast", "constrained", "raw")
AGREEMENT_TOL = 1e-10
DEFAULT_WARMUP = 2


class BenchRecord(BaseModel):
    n: int
    method: str
    trials: int
    mean_seconds: float
    min_seconds: float
    median_seconds: float
    mult_count: int = Field(description="complex multiplications in the sum")
    final_ops: int = Field(default=0, description="modulus and scale operations after the sum (fast path)")
    tau: float
    agreement_gap: float = Field(description="|tau - tau_reference|")
    speedup_vs_fast: float | None = Field(default=None, description="median time / fast median time")


class BenchReport(BaseModel):
    seed: int
    records: list[BenchRecord]
    agreement_ok: bool


def _runner(method: str) -> Callable[[QState], tuple[float, int, int]]:
    if method == "fast":
        def run(state: QState):
            result = invariants.n_tangle_fast(state)
            return result.tau, result.mult_count, result.final_ops
    elif method in ("constrained", "raw"):
        def run(state: QState):
            result = invariants.n_tangle_oracle(state, method)
            return result.tau, result.mult_count, 0
    else:
        raise ValueError(f"unknown bench method '{method}' (expected one of {', '.join(METHODS)})")
    return run


def check_budget(n: int, methods: list[str]):
    for method in methods:
        _runner(method)
        if method == "fast":
            if n < 2 or n % 2:
                raise QubitCountError(f"the fast n-tangle needs even n >= 2, got n={n}")
        else:
            invariants.check_oracle_budget(n, method)


def time_method(method: str, state: QState, trials: int, warmup: int = DEFAULT_WARMUP) -> tuple[list[float], float, int, int]:
    run = _runner(method)
    for _ in range(warmup):
        run(state)
    timings = []
    for _ in range(trials):
        start = time.perf_counter()
        tau, mult_count, final_ops = run(state)
        timings.append(time.perf_counter() - start)
    return timings, tau, mult_count, final_ops


def run_bench(
        qubits: list[int], methods: list[str], trials: int = 20, seed: int = 7, warmup: int = DEFAULT_WARMUP
    ) -> BenchReport:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    for n in qubits:
        check_budget(n, methods)

    records = []
    for n in qubits:
        state = random_pure(n, seed)
        measured = {}
        for method in methods:
            timings, tau, mult_count, final_ops = time_method(method, state, trials, warmup)
            measured[method] = (timings, tau, mult_count, final_ops)
            logger.info("[bench n=%d %s] median %.3e s over %d trials", n, method, statistics.median(timings), trials)

        reference = "fast" if "fast" in measured else methods[0]
        reference_tau = measured[reference][1]
        fast_median = statistics.median(measured["fast"][0]) if "fast" in measured else None
        for method in methods:
            timings, tau, mult_count, final_ops = measured[method]
            median = statistics.median(timings)
            records.append(BenchRecord(
                n=n,
                method=method,
                trials=trials,
                mean_seconds=statistics.fmean(timings),
                min_seconds=min(timings),
                median_seconds=median,
                mult_count=mult_count,
                final_ops=final_ops,
                tau=tau,
                agreement_gap=abs(tau - reference_tau),
                speedup_vs_fast=median / fast_median if fast_median else None,
            ))

    agreement_ok = all(record.agreement_gap <= AGREEMENT_TOL for record in records)
    if not agreement_ok:
        logger.warning("[bench] methods disagree on tau beyond %.0e", AGREEMENT_TOL)
    return BenchReport(seed=seed, records=records, agreement_ok=agreement_ok)


def render_table(records: list[BenchRecord]) -> str:
    header = ["n", "method", "trials", "median s", "min s", "mean s", "mults", "tau", "gap", "x fast"]
    rows = [
        [
            str(r.n), r.method, str(r.trials),
            f"{r.median_seconds:.3e}", f"{r.min_seconds:.3e}", f"{r.mean_seconds:.3e}",
            str(r.mult_count), f"{r.tau:.12f}", f"{r.agreement_gap:.1e}",
            "-" if r.speedup_vs_fast is None else f"{r.speedup_vs_fast:.1f}",
        ]
        for r in records
    ]
    widths = [max(len(row[i]) for row in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(width) for cell, width in zip(row, widths)) for row in [header] + rows]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines)
