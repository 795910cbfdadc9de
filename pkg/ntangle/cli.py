"""
ntangle command line.

    ntangle measure --named dicke:2,4
    ntangle verify --n 4,6 --trials 100 --seed 7
    ntangle bench --n 8 --methods fast,constrained
    ntangle factor --file state.json

stdout carries JSON (and the bench table); logs go to stderr.
Exit codes: 0 all checks passed, 1 a check or a computation failed, 2 usage error.
"""
import argparse
import logging
import re
import sys
import time

from pathlib import Path
from typing import Callable, TypeVar

from pydantic import BaseModel, Field

from . import bench, concurrence, invariants, qstate, suites
from .concurrence import ConcurrenceReport
from .config import load_settings
from .errors import InvalidDensityMatrixError, NonConvergenceError, StateSpecError
from .invariants import OddTangleExperiment, ScalarInvariants
from .qstate import QState


logger = logging.getLogger(__name__)

T = TypeVar("T")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

NAMED_PATTERN = re.compile(r"^(?:(ghz|w):(\d+)|dicke:(\d+),(\d+))$")


class UsageError(Exception):
    """Bad input that should exit with code 2."""


# --- Output schemas ---


class MeasureOutput(BaseModel):
    source: str = Field(description="named state, or sha256 of the state file")
    n: int
    invariants: ScalarInvariants | None = Field(description="null for odd n")
    concurrence: ConcurrenceReport | None = Field(description="null for n < 2")
    mult_counts: dict[str, int] = Field(description="complex multiplications of the fast n-tangle")
    timings: dict[str, float] | None = Field(description="seconds per quantity; null with --no-timing")
    notes: list[str] = Field(default=[])
    odd_tangle_experiment: OddTangleExperiment | None = None


class FactorOutput(BaseModel):
    product: bool
    case: int | None = None
    fidelity: float | None = None
    qubit: qstate.StateSpec | None = None
    rest: qstate.StateSpec | None = None
    c_value: float | None = None
    reason: str | None = None
    written: list[str] = Field(default=[])


# --- Argument helpers ---


def parse_named(text: str) -> QState:
    match = NAMED_PATTERN.match(text.strip())
    if not match:
        raise UsageError(f"named state '{text}' does not match ghz:N | w:N | dicke:L,N")
    kind, size, excitations, dicke_size = match.groups()
    try:
        if kind == "ghz":
            return qstate.ghz(int(size))
        if kind == "w":
            return qstate.w(int(size))
        return qstate.dicke(int(excitations), int(dicke_size))
    except StateSpecError as e:
        raise UsageError(str(e)) from e


def read_state_file(path: str) -> tuple[QState, str]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"State file {path} does not exist.")
    text = path.read_text()
    return qstate.from_spec(qstate.StateSpec.model_validate_json(text)), f"sha256:{qstate.spec_digest(text)}"


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got '{text}'")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _name_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _timed(timings: dict[str, float], name: str, function: Callable[[], T]) -> T:
    start = time.perf_counter()
    value = function()
    timings[name] = time.perf_counter() - start
    return value


# --- Commands ---


def cmd_measure(args: argparse.Namespace) -> int:
    if args.named:
        state, source = parse_named(args.named), args.named
    else:
        state, source = read_state_file(args.file)

    timings: dict[str, float] = {}
    notes = []
    scalars = None
    mult_counts = {}
    if state.n % 2 == 0:
        scalars = _timed(timings, "invariants", lambda: invariants.scalar_invariants(state))
        fast = _timed(timings, "n_tangle_fast", lambda: invariants.n_tangle_fast(state))
        mult_counts = {"fast_sum": fast.mult_count, "final_ops": fast.final_ops}
    else:
        if args.require_tangle:
            raise UsageError(f"the n-tangle is defined for even n only; got n={state.n}")
        notes.append(f"n={state.n} is odd: no degree-2 invariant exists, tangle fields are null")

    report = None
    if state.n >= 2:
        report = _timed(timings, "concurrence", lambda: concurrence.residual_tangle(state))
    else:
        notes.append("a single qubit has no concurrence")

    experiment = None
    if args.odd_tangle_experiment:
        if state.n != 3:
            raise UsageError(f"--odd-tangle-experiment needs a 3-qubit state, got n={state.n}")
        experiment = invariants.odd_tangle_experiment(state)

    output = MeasureOutput(
        source=source,
        n=state.n,
        invariants=scalars,
        concurrence=report,
        mult_counts=mult_counts,
        timings=None if args.no_timing else timings,
        notes=notes,
        odd_tangle_experiment=experiment,
    )
    print(output.model_dump_json(indent=2))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    options = suites.VerifyOptions(
        qubits=args.n,
        trials=args.trials,
        seed=args.seed,
        workers=args.workers,
        state_files=args.file or [],
    )
    registry = suites.default_registry()
    unknown = [name for name in args.suite or [] if name not in registry.names()]
    if unknown:
        raise UsageError(f"unknown suites: {', '.join(unknown)} (available: {', '.join(registry.names())})")

    summary = registry.run_all(options, args.suite)
    print(summary.model_dump_json(indent=2))
    for result in summary.suites:
        if not result.passed:
            logger.warning("[suite %s] FAILED: %s", result.name, result.error or "; ".join(result.failures))
    return EXIT_OK if summary.passed else EXIT_FAILED


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        report = bench.run_bench(args.n, args.methods, trials=args.trials, seed=args.seed)
    except ValueError as e:
        raise UsageError(str(e)) from e
    print(report.model_dump_json(indent=2))
    if not args.json:
        print()
        print(bench.render_table(report.records))
    return EXIT_OK if report.agreement_ok else EXIT_FAILED


def cmd_factor(args: argparse.Namespace) -> int:
    state, _ = read_state_file(args.file)
    result = concurrence.factor_one_rest(state, tol=args.tol)
    if isinstance(result, concurrence.NotAProduct):
        output = FactorOutput(product=False, c_value=result.c_value, reason=result.reason)
    else:
        written = []
        if args.out_dir:
            written = [
                str(qstate.save_state(result.qubit, Path(args.out_dir, "qubit.json"))),
                str(qstate.save_state(result.rest, Path(args.out_dir, "rest.json"))),
            ]
        output = FactorOutput(
            product=True,
            case=result.case,
            fidelity=result.fidelity,
            qubit=qstate.to_spec(result.qubit),
            rest=qstate.to_spec(result.rest),
            written=written,
        )
    print(output.model_dump_json(indent=2, exclude_none=True))
    return EXIT_OK


# --- Parser ---


def build_parser() -> argparse.ArgumentParser:
    settings = load_settings()
    parser = argparse.ArgumentParser(prog="ntangle", description="Multiqubit entanglement invariants.")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    measure = commands.add_parser("measure", help="invariants and concurrences of one state")
    source = measure.add_mutually_exclusive_group(required=True)
    source.add_argument("--named", help="ghz:N | w:N | dicke:L,N")
    source.add_argument("--file", help="StateSpec JSON file")
    measure.add_argument("--no-timing", action="store_true", help="omit timings so output is byte-reproducible")
    measure.add_argument("--require-tangle", action="store_true", help="fail with a usage error for odd n")
    measure.add_argument("--odd-tangle-experiment", action="store_true",
                         help="n = 3 only: compare the quartic 3-tangle with |2 S0|^2")
    measure.set_defaults(handler=cmd_measure)

    verify = commands.add_parser("verify", help="run the verification suites")
    verify.add_argument("--n", type=_int_list, default=[4], help="comma-separated qubit counts (default 4)")
    verify.add_argument("--trials", type=int, default=100, help="random trials per qubit count")
    verify.add_argument("--seed", type=int, default=settings.default_seed, help="base seed (env NTANGLE_SEED)")
    verify.add_argument("--workers", type=int, default=settings.workers, help="threads (env NTANGLE_WORKERS)")
    verify.add_argument("--file", action="append", help="extra StateSpec file for the result1_forms suite; repeatable")
    verify.add_argument("--suite", action="append", help="run only this suite; repeatable")
    verify.set_defaults(handler=cmd_verify)

    bench_parser = commands.add_parser("bench", help="time the fast n-tangle against the oracles")
    bench_parser.add_argument("--n", type=_int_list, default=[8], help="comma-separated qubit counts (default 8)")
    bench_parser.add_argument("--methods", type=_name_list, default=["fast", "constrained"],
                              help=f"comma-separated subset of {','.join(bench.METHODS)}")
    bench_parser.add_argument("--trials", type=int, default=20)
    bench_parser.add_argument("--seed", type=int, default=settings.default_seed)
    bench_parser.add_argument("--json", action="store_true", help="JSON only, no text table")
    bench_parser.set_defaults(handler=cmd_bench)

    factor = commands.add_parser("factor", help="split qubit 1 off a product state")
    factor.add_argument("--file", required=True, help="StateSpec JSON file")
    factor.add_argument("--tol", type=float, default=1e-8, help="concurrence below which the state counts as a product")
    factor.add_argument("--out-dir", help="also write qubit.json and rest.json here")
    factor.set_defaults(handler=cmd_factor)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser()
    except ValueError as e:
        print(f"ntangle: bad environment settings: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except (InvalidDensityMatrixError, NonConvergenceError) as e:
        print(f"ntangle {args.command}: computation failed: {e}", file=sys.stderr)
        return EXIT_FAILED
    except (UsageError, OSError, ValueError) as e:
        print(f"ntangle {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
