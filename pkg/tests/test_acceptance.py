"""
End-to-end checks at full trial counts. Each test runs one or more verification
suites with the ensemble sizes and tolerances they were designed for.
"""
import time

import pytest

from ntangle import bench, concurrence, invariants, qstate, suites
from ntangle.suites import VerifyOptions


def run_suites(only: list[str], **options) -> list[suites.SuiteResult]:
    summary = suites.run_verify(VerifyOptions(**options), only)
    for result in summary.suites:
        assert result.passed, (result.name, result.error, result.failures)
    return summary.suites


def test_ghz_fixtures_are_fast():
    start = time.perf_counter()
    for n in (4, 6, 8):
        state = qstate.ghz(n)
        report = concurrence.residual_tangle(state)
        assert abs(invariants.n_tangle(state) - 1) <= 1e-10
        assert abs(invariants.tau_prime(state) - 1) <= 1e-10
        assert abs(report.residual - 1) <= 1e-10
        assert max(report.c_pairs) <= 1e-10
        assert abs(report.c_one_rest_squared - 1) <= 1e-10
    assert time.perf_counter() - start < 1.0


def test_named_state_fixtures():
    start = time.perf_counter()
    (result,) = run_suites(["state_fixtures"], trials=100)
    assert time.perf_counter() - start < 10.0
    assert result.gaps["dicke_residual"] <= 1e-9
    assert result.gaps["dicke4_spin_flip_spectrum"] <= 1e-9
    assert result.gaps["family_tau"] <= 1e-10


def test_reduction_identities():
    run_suites(["reduction_identities", "oracle_agreement"], qubits=[4, 6], trials=100)


def test_istar_forms_on_a_thousand_states():
    (result,) = run_suites(["istar_forms"], qubits=[4, 6], trials=1000)
    assert result.checks >= 2 * 1000


def test_one_rest_forms_on_a_thousand_states():
    (result,) = run_suites(["result1_forms"], qubits=[3, 4, 5, 6, 7, 8], trials=167)
    assert result.checks >= 2 * 1000


def test_factorization_biconditional():
    (result,) = run_suites(["result2_factorization"], qubits=[5], trials=200)
    assert result.gaps["reconstruction_fidelity"] >= 1 - 1e-9


def test_concurrence_bounds_tangle():
    (result,) = run_suites(["result3_certificate"], qubits=[4, 6], trials=1000)
    assert result.gaps["headline_slack"] >= -1e-11
    assert result.gaps["pair_bound_slack"] >= -1e-12


def test_slocc_covariance():
    run_suites(["slocc_covariance", "slocc_roundtrip"], qubits=[4, 6], trials=100)


def test_product_state_laws():
    (multiplicativity, partial) = run_suites(["multiplicativity", "partial_measure"], qubits=[4], trials=100)
    assert multiplicativity.gaps["product_gap"] <= 1e-10
    assert partial.gaps["fixture_residual"] <= 1e-9


def test_permutation_invariance():
    run_suites(["permutation_invariance"], qubits=[4, 6], trials=100)


def test_monogamy_and_three_qubits():
    run_suites(["monogamy", "three_qubit_ckw", "tangle_range", "tangle_scaling"], qubits=[3, 4, 5, 6], trials=100)


def test_fast_path_beats_constrained_oracle():
    report = bench.run_bench([8], ["fast", "constrained"], trials=20)
    fast, constrained = report.records
    assert report.agreement_ok
    assert fast.mult_count == 2**7
    assert constrained.speedup_vs_fast >= 100


def test_eigensolver_recovery():
    (result,) = run_suites(["eigensolver_recovery"], trials=500)
    assert result.gaps["recovery_gap"] <= 1e-8


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_full_verify_is_green_for_other_seeds(seed):
    assert suites.run_verify(VerifyOptions(qubits=[4, 6], trials=10, seed=seed)).passed
