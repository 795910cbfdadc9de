import numpy as np
import pytest

from ntangle import invariants, qstate
from ntangle.errors import BudgetExceededError, QubitCountError


@pytest.mark.parametrize("l, width, sign", [(0, 3, 1), (1, 3, -1), (3, 3, 1), (7, 3, -1)])
def test_popcount_sign(l, width, sign):
    assert invariants.popcount_sign(l, width) == sign
    assert invariants.popcount_signs(width)[l] == sign


def test_popcount_sign_range():
    with pytest.raises(ValueError):
        invariants.popcount_sign(8, 3)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_ghz_values(n):
    state = qstate.ghz(n)
    assert invariants.s0(state) == pytest.approx(0.5)
    assert invariants.n_tangle(state) == pytest.approx(1, abs=1e-12)
    assert invariants.tau_prime(state) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("n", [4, 6])
def test_w_and_basis_states_have_no_tangle(n):
    assert invariants.n_tangle(qstate.w(n)) == 0
    assert invariants.n_tangle(qstate.basis("0" * n)) == 0


def test_product_of_bell_pairs():
    bell = qstate.ghz(2)
    assert invariants.n_tangle(qstate.tensor(bell, bell)) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("n", [4, 6])
def test_istar_forms_agree(n, seed):
    for trial in range(50):
        state = qstate.random_pure(n, seed + trial)
        reference = invariants.s0(state)
        for form in ("grouped", "pairform", "folded"):
            assert abs(invariants.i_star(state, form) - reference) <= 1e-12


def test_s1_is_minus_s0(seed):
    state = qstate.random_pure(6, seed)
    assert abs(invariants.s1(state) + invariants.s0(state)) <= 1e-12


def test_unknown_form():
    with pytest.raises(ValueError):
        invariants.i_star(qstate.ghz(4), "diagonal")


@pytest.mark.parametrize("n", [1, 3, 5])
def test_odd_n_is_rejected(n):
    state = qstate.random_pure(n, 1)
    with pytest.raises(QubitCountError):
        invariants.n_tangle(state)
    with pytest.raises(QubitCountError):
        invariants.i_star(state)


@pytest.mark.parametrize("n, mults", [(2, 2), (8, 128), (12, 2048)])
def test_fast_path_counts(n, mults):
    result = invariants.n_tangle_fast(qstate.random_pure(n, 3))
    assert result.mult_count == mults
    assert result.final_ops == 2


def test_fast_path_matches_closed_form(seed):
    state = qstate.random_pure(4, seed)
    a = state.amplitudes
    signs = [1, -1, -1, 1, -1, 1, 1, -1]
    pair_sum = sum(signs[l] * a[2 * l] * a[15 - 2 * l] for l in range(8))
    assert invariants.n_tangle(state) == pytest.approx(4 * abs(pair_sum) ** 2, abs=1e-14)


def test_raw_oracle_counts_and_ghz():
    result = invariants.n_tangle_oracle(qstate.ghz(2), "raw")
    assert result.quadruple_count == 2**8
    assert result.term_count == 2**4
    assert result.mult_count == 3 * 2**8
    assert result.tau == pytest.approx(1, abs=1e-12)


def test_oracles_agree_on_ghz4():
    raw = invariants.n_tangle_oracle(qstate.ghz(4), "raw")
    constrained = invariants.n_tangle_oracle(qstate.ghz(4), "constrained")
    assert abs(raw.s - constrained.s) <= 1e-12
    assert constrained.s == pytest.approx(0.5)
    assert constrained.term_count == 2**8
    assert constrained.mult_count == 3 * 2**8


def test_three_qubit_oracle_on_ghz():
    raw = invariants.n_tangle_oracle(qstate.ghz(3), "raw")
    constrained = invariants.n_tangle_oracle(qstate.ghz(3), "constrained")
    assert raw.tau == pytest.approx(1, abs=1e-12)
    assert abs(raw.s - constrained.s) <= 1e-12


@pytest.mark.parametrize("n, mode", [(5, "raw"), (1, "raw"), (5, "constrained"), (14, "constrained")])
def test_oracle_budget(n, mode):
    with pytest.raises(BudgetExceededError):
        invariants.n_tangle_oracle(qstate.random_pure(n, 1), mode)


@pytest.mark.parametrize("n", [4, 6])
def test_verify_reduction_passes(n, seed):
    report = invariants.verify_reduction(qstate.random_pure(n, seed))
    assert report.passed
    assert report.reduction_gap <= 1e-10
    assert report.case1_gap <= 1e-12


def test_scaling_is_degree_four(seed):
    state = qstate.random_pure(4, seed)
    factor = 1.3 * np.exp(0.4j)
    assert abs(invariants.n_tangle(state.scaled(factor)) - abs(factor) ** 4 * invariants.n_tangle(state)) <= 1e-12


def test_permutation_invariance(seed):
    state = qstate.random_pure(6, seed)
    tau = invariants.n_tangle(state)
    for perm in ([2, 1, 3, 4, 5, 6], [6, 5, 4, 3, 2, 1], [3, 5, 1, 6, 2, 4]):
        assert abs(invariants.n_tangle(qstate.permute_qubits(state, perm)) - tau) <= 1e-12


def test_multiplicativity():
    ghz4, w4 = qstate.ghz(4), qstate.w(4)
    assert invariants.multiplicativity_check(ghz4, ghz4).tau_product == pytest.approx(1)
    assert invariants.multiplicativity_check(w4, ghz4).tau_product == pytest.approx(0, abs=1e-15)
    random_report = invariants.multiplicativity_check(qstate.random_pure(4, 1), qstate.random_pure(4, 2))
    assert random_report.passed


def test_scalar_invariants_serialize_complex_pairs():
    dumped = invariants.scalar_invariants(qstate.ghz(4)).model_dump()
    assert dumped["s0"] == pytest.approx([0.5, 0.0])
    assert dumped["n_tangle"] == pytest.approx(1)


@pytest.mark.parametrize("make", [lambda: qstate.ghz(3), lambda: qstate.w(3)])
def test_odd_tangle_experiment_on_fixtures(make):
    experiment = invariants.odd_tangle_experiment(make())
    assert experiment.gap <= 1e-12


def test_odd_tangle_experiment_needs_three_qubits():
    with pytest.raises(QubitCountError):
        invariants.odd_tangle_experiment(qstate.ghz(4))
