"""
Verification suites: every identity, inequality and worked example checked numerically.

A suite is a plain function `suite(options, tracker)` registered by name.
It records each measured gap on the tracker against its tolerance; the
registry turns the tracker into a SuiteResult. A suite that raises is
reported as failed with the error message, so one broken suite never
hides the others.
"""
import logging
import math
import zlib

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Callable, TypeVar

import numpy as np

from pydantic import BaseModel, Field

from . import concurrence, invariants, linalg, qstate, slocc
from .qstate import QState


logger = logging.getLogger(__name__)

T = TypeVar("T")

PERMUTATIONS_PER_STATE = 20
MULTIPLICATIVITY_MAX_QUBITS = 8
PARTIAL_MEASURE_MAX_QUBITS = 8
RECOVERY_MAX_CONDITION = 100.0
MAX_RECORDED_FAILURES = 5


# --- Options and results ---


class VerifyOptions(BaseModel):
    qubits: list[int] = Field(default=[4], description="qubit counts to sweep")
    trials: int = Field(default=100, ge=1, description="random trials per qubit count")
    seed: int = Field(default=7, description="base seed; every trial derives its own")
    workers: int | None = Field(default=None, ge=1, description="threads for trial fan-out")
    state_files: list[str] = Field(default=[], description="StateSpec files added to the result1_forms suite")

    def even_qubits(self, limit: int | None = None) -> list[int]:
        return [n for n in self.qubits if n >= 2 and n % 2 == 0 and (limit is None or n <= limit)]


class SuiteResult(BaseModel):
    name: str
    passed: bool
    checks: int = Field(description="number of individual comparisons made")
    gaps: dict[str, float] = Field(description="worst gap (or smallest slack) per quantity")
    failures: list[str] = Field(default=[], description="first few comparisons that missed their tolerance")
    notes: list[str] = Field(default=[])
    error: str | None = Field(default=None, description="exception message if the suite itself failed")


class VerifySummary(BaseModel):
    passed: bool
    qubits: list[int]
    trials: int
    seed: int
    suites: list[SuiteResult]


@dataclass
class GapTracker:
    checks: int = 0
    gaps: dict[str, float] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    failure_count: int = 0
    notes: list[str] = field(default_factory=list)

    def _fail(self, message: str):
        self.failure_count += 1
        if len(self.failures) < MAX_RECORDED_FAILURES:
            self.failures.append(message)

    def upper(self, name: str, value: float, tol: float, where: str = ""):
        """value must stay at or below tol; keeps the largest value seen."""
        value = float(value)
        self.checks += 1
        self.gaps[name] = max(self.gaps.get(name, -math.inf), value)
        if not value <= tol:
            self._fail(f"{name} = {value:.3e} > {tol:.1e} {where}".rstrip())

    def lower(self, name: str, value: float, floor: float, where: str = ""):
        """value must stay at or above floor; keeps the smallest value seen."""
        value = float(value)
        self.checks += 1
        self.gaps[name] = min(self.gaps.get(name, math.inf), value)
        if not value >= floor:
            self._fail(f"{name} = {value:.3e} < {floor:.1e} {where}".rstrip())

    def require(self, name: str, ok: bool, where: str = ""):
        self.checks += 1
        if not ok:
            self._fail(f"{name} failed {where}".rstrip())

    def note(self, message: str):
        self.notes.append(message)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0


# --- Suite plumbing ---


@dataclass
class Suite:
    name: str
    description: str
    function: Callable[[VerifyOptions, GapTracker], None]

    @classmethod
    def from_function(cls, function: Callable[[VerifyOptions, GapTracker], None]) -> "Suite":
        return cls(
            name=function.__name__,
            description=" ".join(str(function.__doc__).split()),
            function=function,
        )

    def execute(self, options: VerifyOptions) -> SuiteResult:
        tracker = GapTracker()
        error = None
        try:
            self.function(options, tracker)
        except Exception as e:
            error = f"Suite failed: {type(e).__name__}: {e}"
            logger.warning("[suite %s] %s", self.name, error)

        result = SuiteResult(
            name=self.name,
            passed=tracker.passed and error is None,
            checks=tracker.checks,
            gaps=tracker.gaps,
            failures=tracker.failures,
            notes=tracker.notes,
            error=error,
        )
        logger.info("[suite %s] %d checks, passed=%s", self.name, result.checks, result.passed)
        return result


class SuiteRegistry:
    def __init__(self):
        self._suites: dict[str, Suite] = {}

    def register(self, suite: Suite):
        self._suites[suite.name] = suite

    def names(self) -> list[str]:
        return list(self._suites)

    def run(self, name: str, options: VerifyOptions) -> SuiteResult:
        if name not in self._suites:
            return SuiteResult(name=name, passed=False, checks=0, gaps={}, error=f"Suite '{name}' not registered")
        return self._suites[name].execute(options)

    def run_all(self, options: VerifyOptions, only: list[str] | None = None) -> VerifySummary:
        names = self.names() if not only else only
        results = [self.run(name, options) for name in names]
        return VerifySummary(
            passed=all(result.passed for result in results),
            qubits=options.qubits,
            trials=options.trials,
            seed=options.seed,
            suites=results,
        )


def trial_seed(base: int, suite: str, n: int, index: int) -> int:
    """Independent, reproducible seed per (suite, n, trial)."""
    sequence = np.random.SeedSequence([base, zlib.crc32(suite.encode()), n, index])
    return int(sequence.generate_state(1)[0])


def run_trials(count: int, trial: Callable[[int], T], workers: int | None = None) -> list[T]:
    """Run trial(0..count-1) on a thread pool; results come back in index order."""
    results: dict[int, T] = {}
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(trial, index): index for index in range(count)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return [results[index] for index in range(count)]


def _relative_gap(found: np.ndarray, expected: np.ndarray) -> float:
    return float(np.linalg.norm(found - expected) / max(np.linalg.norm(expected), np.finfo(float).tiny))


# --- Fixture suites ---


def state_fixtures(options: VerifyOptions, tracker: GapTracker):
    """GHZ, W, single-excitation and Dicke values plus the four-qubit 4|alpha gamma|^2 family."""
    for n in (4, 6, 8):
        state = qstate.ghz(n)
        report = concurrence.residual_tangle(state)
        tracker.upper("ghz_tau", abs(invariants.n_tangle(state) - 1), 1e-10, f"(n={n})")
        tracker.upper("ghz_tau_prime", abs(invariants.tau_prime(state) - 1), 1e-10, f"(n={n})")
        tracker.upper("ghz_residual", abs(report.residual - 1), 1e-10, f"(n={n})")
        tracker.upper("ghz_pair_concurrence", max(report.c_pairs), 1e-10, f"(n={n})")
        tracker.upper("ghz_c_squared", abs(report.c_one_rest_squared - 1), 1e-10, f"(n={n})")

    for n in (4, 5, 6):
        for label, state in (("w", qstate.w(n)), ("single_excitation", qstate.single_excitation(n, options.seed))):
            tracker.upper(f"{label}_residual", abs(concurrence.residual_tangle(state).residual), 1e-10, f"(n={n})")
            if n % 2 == 0:
                tracker.upper(f"{label}_tau", invariants.n_tangle(state), 1e-10, f"(n={n})")

    for n in (4, 6, 8, 10):
        state = qstate.dicke(n // 2, n)
        report = concurrence.residual_tangle(state)
        tau = invariants.n_tangle(state)
        tracker.upper("dicke_tau", abs(tau - 1), 1e-9, f"(n={n})")
        tracker.upper("dicke_pair_c_squared", abs(report.c_pairs[0] ** 2 - 1 / (n - 1) ** 2), 1e-9, f"(n={n})")
        tracker.upper("dicke_c_squared", abs(report.c_one_rest_squared - 1), 1e-9, f"(n={n})")
        tracker.upper("dicke_residual", abs(report.residual - (n - 2) / (n - 1)), 1e-9, f"(n={n})")
        tracker.upper("dicke_tau_minus_residual", abs(tau - report.residual - 1 / (n - 1)), 1e-9, f"(n={n})")

    rho = concurrence.partial_trace(qstate.dicke(2, 4), [1, 2])
    spectrum = linalg.eigenvalues(rho.matrix @ concurrence.spin_flip(rho).matrix)
    tracker.upper("dicke4_spin_flip_spectrum", linalg.match_multisets(spectrum.eigenvalues, [4 / 9, 1 / 36, 1 / 36, 0]), 1e-9)

    def family_trial(index: int) -> tuple[float, float, float]:
        rng = np.random.default_rng(trial_seed(options.seed, "state_fixtures", 4, index))
        alpha, beta, gamma = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        state = qstate.superposition({"0011": alpha, "0110": beta, "1100": gamma})
        a = state.amplitudes
        expected = 4 * abs(a[3] * a[12]) ** 2
        return invariants.n_tangle(state), concurrence.residual_tangle(state).residual, expected

    for tau, residual, expected in run_trials(options.trials, family_trial, options.workers):
        tracker.upper("family_tau", abs(tau - expected), 1e-10)
        tracker.upper("family_residual", abs(residual - expected), 1e-9)


# --- Tangle-side suites ---


def _random_states(options: VerifyOptions, suite: str, n: int) -> Callable[[int], QState]:
    return lambda index: qstate.random_pure(n, trial_seed(options.seed, suite, n, index))


def reduction_identities(options: VerifyOptions, tracker: GapTracker):
    """S = 2 S0^2, S1 = -S0, the vanishing Case-1 partial sum and S0 = I* on random even-n states."""
    qubits = options.even_qubits(invariants.CONSTRAINED_MAX_QUBITS)
    if not qubits:
        tracker.note("no even n within the constrained-oracle budget requested")
    for n in qubits:
        draw = _random_states(options, "reduction_identities", n)
        for report in run_trials(options.trials, lambda i: invariants.verify_reduction(draw(i)), options.workers):
            tracker.upper("reduction_gap", report.reduction_gap, 1e-10, f"(n={n})")
            tracker.upper("s1_gap", report.s1_gap, 1e-12, f"(n={n})")
            tracker.upper("case1_gap", report.case1_gap, 1e-12, f"(n={n})")
            tracker.upper("istar_gap", report.istar_gap, 1e-12, f"(n={n})")


def istar_forms(options: VerifyOptions, tracker: GapTracker):
    """S0 and the grouped, pairform and folded sums of I* agree pairwise."""
    for n in options.even_qubits():
        draw = _random_states(options, "istar_forms", n)

        def trial(index: int) -> float:
            state = draw(index)
            values = [invariants.s0(state)] + [invariants.i_star(state, form) for form in ("grouped", "pairform", "folded")]
            return max(abs(x - y) for x in values for y in values)

        for gap in run_trials(options.trials, trial, options.workers):
            tracker.upper("form_gap", gap, 1e-12, f"(n={n})")


def oracle_agreement(options: VerifyOptions, tracker: GapTracker):
    """Raw and constrained oracles give the same S; the constrained tau equals the fast tau."""
    for n in options.even_qubits(invariants.CONSTRAINED_MAX_QUBITS):
        draw = _random_states(options, "oracle_agreement", n)

        def trial(index: int) -> tuple[float | None, float]:
            state = draw(index)
            constrained = invariants.n_tangle_oracle(state, "constrained")
            raw_gap = None
            if n <= invariants.RAW_MAX_QUBITS:
                raw_gap = abs(invariants.n_tangle_oracle(state, "raw").s - constrained.s)
            return raw_gap, abs(constrained.tau - invariants.n_tangle(state))

        for raw_gap, fast_gap in run_trials(options.trials, trial, options.workers):
            if raw_gap is not None:
                tracker.upper("raw_vs_constrained_s", raw_gap, 1e-12, f"(n={n})")
            tracker.upper("constrained_vs_fast_tau", fast_gap, 1e-10, f"(n={n})")


def permutation_invariance(options: VerifyOptions, tracker: GapTracker):
    """tau and |I*| do not change when the qubits are relabelled."""
    for n in options.even_qubits():
        def trial(index: int) -> tuple[float, float]:
            seed = trial_seed(options.seed, "permutation_invariance", n, index)
            state = qstate.random_pure(n, seed)
            rng = np.random.default_rng(seed + 1)
            tau, modulus = invariants.n_tangle(state), abs(invariants.i_star(state))
            tau_gap = modulus_gap = 0.0
            for _ in range(PERMUTATIONS_PER_STATE):
                moved = qstate.permute_qubits(state, list(rng.permutation(n) + 1))
                tau_gap = max(tau_gap, abs(invariants.n_tangle(moved) - tau))
                modulus_gap = max(modulus_gap, abs(abs(invariants.i_star(moved)) - modulus))
            return tau_gap, modulus_gap

        for tau_gap, modulus_gap in run_trials(options.trials, trial, options.workers):
            tracker.upper("tau_gap", tau_gap, 1e-12, f"(n={n})")
            tracker.upper("istar_modulus_gap", modulus_gap, 1e-12, f"(n={n})")


def tangle_scaling(options: VerifyOptions, tracker: GapTracker):
    """tau(c psi) = |c|^4 tau(psi)."""
    for n in options.even_qubits():
        def trial(index: int) -> float:
            seed = trial_seed(options.seed, "tangle_scaling", n, index)
            state = qstate.random_pure(n, seed)
            rng = np.random.default_rng(seed + 1)
            factor = rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.uniform())
            return abs(invariants.n_tangle(state.scaled(factor)) - abs(factor) ** 4 * invariants.n_tangle(state))

        for gap in run_trials(options.trials, trial, options.workers):
            tracker.upper("scaling_gap", gap, 1e-12, f"(n={n})")


def tangle_range(options: VerifyOptions, tracker: GapTracker):
    """0 <= tau <= 1 on normalized states."""
    for n in options.even_qubits():
        draw = _random_states(options, "tangle_range", n)
        for tau in run_trials(options.trials, lambda i: invariants.n_tangle(draw(i)), options.workers):
            tracker.lower("tau_min", tau, 0.0, f"(n={n})")
            tracker.upper("tau_max", tau, 1 + 1e-12, f"(n={n})")


# --- Concurrence-side suites ---


def _one_rest_form_gaps(state: QState) -> tuple[float, float]:
    det_form = concurrence.c_one_rest(state, "det").c_squared
    return (
        abs(det_form - concurrence.c_one_rest(state, "sum").c_squared),
        abs(det_form - concurrence.c_one_rest(state, "purity").c_squared),
    )


def result1_forms(options: VerifyOptions, tracker: GapTracker):
    """4 det rho_1, the sum of squared pair moduli and 2(1 - tr rho_1^2) agree."""
    for n in (n for n in options.qubits if n >= 2):
        draw = _random_states(options, "result1_forms", n)
        for sum_gap, purity_gap in run_trials(options.trials, lambda i: _one_rest_form_gaps(draw(i)), options.workers):
            tracker.upper("det_vs_sum", sum_gap, 1e-11, f"(n={n})")
            tracker.upper("det_vs_purity", purity_gap, 1e-11, f"(n={n})")
    for path in options.state_files:
        sum_gap, purity_gap = _one_rest_form_gaps(qstate.load_state(path))
        tracker.upper("det_vs_sum", sum_gap, 1e-11, f"({path})")
        tracker.upper("det_vs_purity", purity_gap, 1e-11, f"({path})")


def monogamy(options: VerifyOptions, tracker: GapTracker):
    """C_1(2...n)^2 >= sum_k C_1k^2 and every reduced matrix is a valid density matrix."""
    for n in (n for n in options.qubits if n >= 3):
        draw = _random_states(options, "monogamy", n)

        def trial(index: int) -> tuple[float, float, float]:
            state = draw(index)
            report = concurrence.residual_tangle(state)
            reduced = [concurrence.partial_trace(state, [1])]
            reduced += [concurrence.partial_trace(state, [1, k]) for k in range(2, n + 1)]
            validity = max(max(rho.hermiticity_gap(), rho.trace_gap()) for rho in reduced)
            return report.residual, report.c_one_rest, validity

        for residual, c_value, validity in run_trials(options.trials, trial, options.workers):
            tracker.lower("residual_min", residual, -1e-9, f"(n={n})")
            tracker.upper("c_one_rest_max", c_value, 1 + 1e-12, f"(n={n})")
            tracker.upper("density_matrix_gap", validity, 1e-12, f"(n={n})")


def result2_factorization(options: VerifyOptions, tracker: GapTracker):
    """Factoring qubit 1 succeeds exactly on products and reconstructs them."""
    for n in (n for n in options.qubits if n >= 2):
        def product_trial(index: int) -> tuple[bool, float, float]:
            seed = trial_seed(options.seed, "result2_factorization", n, index)
            qubit = qstate.basis("1") if index % 4 == 0 else qstate.random_pure(1, seed + 1)
            rest = qstate.random_pure(n - 1, seed)
            result = concurrence.factor_one_rest(qstate.tensor(qubit, rest))
            if not isinstance(result, concurrence.Factorization):
                return False, 0.0, 0.0
            overlap = abs(np.vdot(qubit.amplitudes, result.qubit.amplitudes))
            return True, result.fidelity, float(overlap)

        def entangled_trial(index: int) -> bool:
            state = qstate.random_pure(n, trial_seed(options.seed, "result2_entangled", n, index))
            return isinstance(concurrence.factor_one_rest(state), concurrence.NotAProduct)

        for factored, fidelity, overlap in run_trials(options.trials, product_trial, options.workers):
            tracker.require("product_factored", factored, f"(n={n})")
            if factored:
                tracker.lower("reconstruction_fidelity", fidelity, 1 - 1e-9, f"(n={n})")
                tracker.lower("qubit_overlap", overlap, 1 - 1e-9, f"(n={n})")
        for rejected in run_trials(options.trials, entangled_trial, options.workers):
            tracker.require("entangled_rejected", rejected, f"(n={n})")


def result3_certificate(options: VerifyOptions, tracker: GapTracker):
    """C^2 >= tau through the three-block decomposition and the per-pair inequality."""
    qubits = options.even_qubits(concurrence.LEDGER_MAX_QUBITS)
    if not qubits:
        tracker.note("no even n within the pair-ledger budget requested")
    for n in qubits:
        draw = _random_states(options, "result3_certificate", n)
        for report in run_trials(options.trials, lambda i: concurrence.result3_certificate(draw(i)), options.workers):
            tracker.upper("decomposition_gap", report.decomposition_gap, 1e-11, f"(n={n})")
            tracker.lower("z_bound_slack", report.z_bound_slack, -1e-12, f"(n={n})")
            tracker.lower("pair_bound_slack", report.pair_bound_slack, -1e-12, f"(n={n})")
            tracker.lower("min_pair_slack", report.min_pair_slack, -1e-12, f"(n={n})")
            tracker.lower("headline_slack", report.headline_slack, -1e-11, f"(n={n})")
            c_value = math.sqrt(max(report.c_squared, 0.0))
            tracker.require("tangle_implies_concurrence", not (report.tau > 1e-6 and c_value <= 1e-6), f"(n={n})")
            tracker.require("no_concurrence_no_tangle", not (c_value < 1e-12 and report.tau >= 1e-10), f"(n={n})")


def partial_measure(options: VerifyOptions, tracker: GapTracker):
    """Appending a factor leaves C_1(2...n), the inner C_1k and the residual unchanged."""
    fixtures = [
        ("ghz3_x_ghz3", qstate.ghz(3), qstate.ghz(3), 1.0),
        ("ghz3_x4", qstate.ghz(3), qstate.tensor_all([qstate.ghz(3)] * 3), 1.0),
        ("w3_x_random", qstate.w(3), qstate.random_pure(2, options.seed), 0.0),
        ("dicke24_x_zero", qstate.dicke(2, 4), qstate.basis("0"), 2 / 3),
    ]
    for label, left, right, expected in fixtures:
        report = concurrence.partial_measure_check(left, right)
        tracker.require("fixture_check", report.passed, f"({label})")
        tracker.upper("fixture_residual", abs(report.residual_product - expected), 1e-9, f"({label})")

    for n in (n for n in options.qubits if 2 <= n <= PARTIAL_MEASURE_MAX_QUBITS):
        def trial(index: int) -> concurrence.PartialMeasureReport:
            seed = trial_seed(options.seed, "partial_measure", n, index)
            return concurrence.partial_measure_check(qstate.random_pure(n, seed), qstate.random_pure(2, seed + 1))

        for report in run_trials(options.trials, trial, options.workers):
            tracker.upper("c_one_rest_gap", report.c_one_rest_gap, 1e-10, f"(n={n})")
            tracker.upper("inner_pair_gap", report.inner_pair_gap, 1e-10, f"(n={n})")
            tracker.upper("outer_pair_max", report.outer_pair_max, 1e-10, f"(n={n})")
            tracker.upper("residual_gap", report.residual_gap, 1e-9, f"(n={n})")
            tracker.upper(
                "spin_flip_structure", max(s.residual_norm for s in report.spin_flip_structure), 1e-10, f"(n={n})"
            )


def three_qubit_ckw(options: VerifyOptions, tracker: GapTracker):
    """At n = 3 the residual entanglement is the quartic 3-tangle."""
    def gap(state: QState) -> float:
        return abs(concurrence.residual_tangle(state).residual - invariants.n_tangle_oracle(state, "raw").tau)

    tracker.upper("ghz3_gap", gap(qstate.ghz(3)), 1e-9)
    tracker.upper("w3_gap", gap(qstate.w(3)), 1e-9)
    draw = _random_states(options, "three_qubit_ckw", 3)
    for value in run_trials(options.trials, lambda i: gap(draw(i)), options.workers):
        tracker.upper("random_gap", value, 1e-9)


# --- SLOCC and product laws ---


def slocc_covariance(options: VerifyOptions, tracker: GapTracker):
    """I*(A_1 x ... x A_n psi) = I*(psi) prod det A_i, and tau scales by |prod det A_i|^2."""
    for n in options.even_qubits():
        state = qstate.random_pure(n, options.seed)
        for label, ops in (
            ("identity", slocc.LocalOperatorSet.identity(n)),
            ("sign_flip", slocc.LocalOperatorSet.uniform(linalg.SIGMA_Z, n)),
        ):
            report = slocc.covariance_check(state, ops)
            tracker.upper("fixture_relative_error", report.relative_error, 1e-8, f"({label}, n={n})")
            tracker.upper("fixture_istar_change", abs(report.i_star_after - report.i_star_before), 1e-12, f"({label}, n={n})")

        def trial(index: int) -> slocc.CovarianceReport:
            seed = trial_seed(options.seed, "slocc_covariance", n, index)
            return slocc.covariance_check(qstate.random_pure(n, seed), slocc.random_invertible_set(n, seed + 1))

        for report in run_trials(options.trials, trial, options.workers):
            tracker.upper("relative_error", report.relative_error, 1e-8, f"(n={n})")
            tracker.upper("tau_relative_error", report.tau_relative_error, 1e-7, f"(n={n})")


def slocc_roundtrip(options: VerifyOptions, tracker: GapTracker):
    """Undoing a local operator set restores the state; composed sets act as sequential ones."""
    for n in (n for n in options.qubits if n >= 1):
        def trial(index: int) -> tuple[float, float]:
            seed = trial_seed(options.seed, "slocc_roundtrip", n, index)
            state = qstate.random_pure(n, seed)
            first = slocc.random_invertible_set(n, seed + 1)
            second = slocc.random_invertible_set(n, seed + 2)
            back = slocc.apply_local(slocc.apply_local(state, first), first.inverse())
            sequential = slocc.apply_local(slocc.apply_local(state, first), second)
            composed = slocc.apply_local(state, first.compose(second))
            return (
                _relative_gap(back.amplitudes, state.amplitudes),
                _relative_gap(composed.amplitudes, sequential.amplitudes),
            )

        for roundtrip_gap, compose_gap in run_trials(options.trials, trial, options.workers):
            tracker.upper("roundtrip_gap", roundtrip_gap, 1e-9, f"(n={n})")
            tracker.upper("compose_gap", compose_gap, 1e-10, f"(n={n})")


def multiplicativity(options: VerifyOptions, tracker: GapTracker):
    """tau(a x b) = tau(a) tau(b) for even-n factors."""
    for label, left, right in (
        ("ghz4_x_ghz4", qstate.ghz(4), qstate.ghz(4)),
        ("w4_x_ghz4", qstate.w(4), qstate.ghz(4)),
    ):
        report = invariants.multiplicativity_check(left, right)
        tracker.upper("fixture_gap", report.gap, 1e-10, f"({label})")

    for n in options.even_qubits(MULTIPLICATIVITY_MAX_QUBITS):
        def trial(index: int) -> float:
            seed = trial_seed(options.seed, "multiplicativity", n, index)
            return invariants.multiplicativity_check(qstate.random_pure(n, seed), qstate.random_pure(n, seed + 1)).gap

        for gap in run_trials(options.trials, trial, options.workers):
            tracker.upper("product_gap", gap, 1e-10, f"(n={n})")


# --- Eigensolver ---


def _well_conditioned(rng: np.random.Generator) -> np.ndarray:
    """Random complex 4x4 with singular values in [1, RECOVERY_MAX_CONDITION]."""
    def unitary() -> np.ndarray:
        q, r = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        return q * (np.diag(r) / np.abs(np.diag(r)))

    singular = rng.uniform(1.0, RECOVERY_MAX_CONDITION, 4)
    singular[0], singular[1] = 1.0, RECOVERY_MAX_CONDITION
    return unitary() @ np.diag(singular) @ unitary()


def eigensolver_recovery(options: VerifyOptions, tracker: GapTracker):
    """Known spectra come back from P D P^-1; sums and products match trace and determinant."""
    def trial(index: int) -> tuple[float, float, float, float]:
        rng = np.random.default_rng(trial_seed(options.seed, "eigensolver_recovery", 4, index))
        radii = np.sqrt(rng.uniform(size=4))
        diagonal = radii * np.exp(2j * np.pi * rng.uniform(size=4))
        p = _well_conditioned(rng)
        matrix = p @ np.diag(diagonal) @ np.linalg.inv(p)
        spectrum = linalg.eigenvalues(matrix)
        trace_gap, det_gap = spectrum.consistency_gaps(matrix)

        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        expected = linalg.det(a) * linalg.det(b)
        product_gap = abs(linalg.det(linalg.matmul(a, b)) - expected) / abs(expected)
        return linalg.match_multisets(spectrum.eigenvalues, diagonal), trace_gap, det_gap, product_gap

    for recovery, trace_gap, det_gap, product_gap in run_trials(options.trials, trial, options.workers):
        tracker.upper("recovery_gap", recovery, 1e-8)
        tracker.upper("trace_consistency", trace_gap, 1.0)
        tracker.upper("det_consistency", det_gap, 1.0)
        tracker.upper("det_product_relative", product_gap, 1e-10)


SUITES = [
    state_fixtures,
    reduction_identities,
    istar_forms,
    oracle_agreement,
    permutation_invariance,
    tangle_scaling,
    tangle_range,
    result1_forms,
    monogamy,
    result2_factorization,
    result3_certificate,
    slocc_covariance,
    slocc_roundtrip,
    multiplicativity,
    partial_measure,
    three_qubit_ckw,
    eigensolver_recovery,
]


def default_registry() -> SuiteRegistry:
    registry = SuiteRegistry()
    for function in SUITES:
        registry.register(Suite.from_function(function))
    return registry


def run_verify(options: VerifyOptions, only: list[str] | None = None) -> VerifySummary:
    return default_registry().run_all(options, only)
