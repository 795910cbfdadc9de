import numpy as np
import pytest

from ntangle import linalg, qstate, slocc
from ntangle.errors import QubitCountError
from ntangle.slocc import LocalOperatorSet


def test_identity_leaves_state_alone(seed):
    state = qstate.random_pure(4, seed)
    result = slocc.apply_local(state, LocalOperatorSet.identity(4))
    np.testing.assert_allclose(result.amplitudes, state.amplitudes, atol=1e-15)


def test_operator_acts_on_its_own_qubit():
    ops = LocalOperatorSet.from_ops([linalg.SIGMA_X, linalg.IDENTITY_2, linalg.IDENTITY_2])
    assert slocc.apply_local(qstate.basis("000"), ops).allclose(qstate.basis("100"))
    ops = LocalOperatorSet.from_ops([linalg.IDENTITY_2, linalg.IDENTITY_2, linalg.SIGMA_X])
    assert slocc.apply_local(qstate.basis("000"), ops).allclose(qstate.basis("001"))


def test_uniform_scalar_scales_by_power(seed):
    state = qstate.random_pure(4, seed)
    c = 0.8 + 0.3j
    result = slocc.apply_local(state, LocalOperatorSet.uniform(c * np.eye(2), 4))
    np.testing.assert_allclose(result.amplitudes, c**4 * state.amplitudes, atol=1e-14)


def test_random_set_is_deterministic_and_guarded(seed):
    first, second = slocc.random_invertible_set(4, seed), slocc.random_invertible_set(4, seed)
    assert len(first) == 4
    np.testing.assert_array_equal(first.ops, second.ops)
    assert np.all(np.abs(first.dets) >= slocc.DET_GUARD)
    with pytest.raises(ValueError):
        slocc.random_invertible_set(0, seed)


def test_operator_set_shape_is_checked():
    with pytest.raises(ValueError):
        LocalOperatorSet(np.eye(2))
    with pytest.raises(ValueError):
        slocc.apply_local(qstate.ghz(3), LocalOperatorSet.identity(4))


def test_inverse_and_compose(seed):
    state = qstate.random_pure(3, seed)
    first = slocc.random_invertible_set(3, seed + 1)
    second = slocc.random_invertible_set(3, seed + 2)
    back = slocc.apply_local(slocc.apply_local(state, first), first.inverse())
    np.testing.assert_allclose(back.amplitudes, state.amplitudes, atol=1e-12)
    sequential = slocc.apply_local(slocc.apply_local(state, first), second)
    composed = slocc.apply_local(state, first.compose(second))
    np.testing.assert_allclose(composed.amplitudes, sequential.amplitudes, atol=1e-12)
    assert first.compose(second).det_product == pytest.approx(first.det_product * second.det_product)
    with pytest.raises(ValueError):
        first.compose(LocalOperatorSet.identity(2))


@pytest.mark.parametrize("ops", [
    LocalOperatorSet.identity(4),
    LocalOperatorSet.uniform(linalg.SIGMA_Z, 4),
])
def test_covariance_fixtures(ops, seed):
    report = slocc.covariance_check(qstate.random_pure(4, seed), ops)
    assert report.passed
    assert abs(report.i_star_after - report.i_star_before) <= 1e-12


@pytest.mark.parametrize("n", [2, 4, 6])
def test_covariance_on_random_operators(n, seed):
    for trial in range(20):
        report = slocc.covariance_check(qstate.random_pure(n, seed + trial), slocc.random_invertible_set(n, seed + 100 + trial))
        assert report.passed, report


def test_covariance_needs_even_n(seed):
    with pytest.raises(QubitCountError):
        slocc.covariance_check(qstate.random_pure(3, seed), slocc.random_invertible_set(3, seed))
