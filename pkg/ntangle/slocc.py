"""
Invertible local operators A_1 x ... x A_n and the covariance law of I*:

    I*(A_1 x ... x A_n |psi>) = I*(|psi>) det(A_1) ... det(A_n)
"""
import logging

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from pydantic import BaseModel, Field

from . import linalg
from .fields import ComplexValue
from .invariants import i_star, n_tangle, require_even
from .qstate import QState


logger = logging.getLogger(__name__)

DET_GUARD = 0.1
MAX_REDRAWS = 1000


@dataclass(frozen=True, eq=False)
class LocalOperatorSet:
    """One 2x2 matrix per qubit; ops[i] acts on qubit i+1."""
    ops: np.ndarray

    def __post_init__(self):
        ops = np.array(self.ops, dtype=np.complex128)
        if ops.ndim != 3 or ops.shape[1:] != (2, 2) or ops.shape[0] < 1:
            raise ValueError(f"expected an (n, 2, 2) stack of operators, got shape {ops.shape}")
        ops.setflags(write=False)
        object.__setattr__(self, "ops", ops)

    def __len__(self) -> int:
        return self.ops.shape[0]

    @property
    def n(self) -> int:
        return self.ops.shape[0]

    @property
    def dets(self) -> np.ndarray:
        return np.array([linalg.det(op) for op in self.ops])

    @property
    def det_product(self) -> complex:
        return complex(np.prod(self.dets))

    def inverse(self) -> "LocalOperatorSet":
        return LocalOperatorSet(np.linalg.inv(self.ops))

    def compose(self, other: "LocalOperatorSet") -> "LocalOperatorSet":
        """Apply self first, then other."""
        if other.n != self.n:
            raise ValueError(f"cannot compose sets of {self.n} and {other.n} operators")
        return LocalOperatorSet(other.ops @ self.ops)

    @classmethod
    def identity(cls, n: int) -> "LocalOperatorSet":
        return cls(np.broadcast_to(linalg.IDENTITY_2, (n, 2, 2)))

    @classmethod
    def uniform(cls, op, n: int) -> "LocalOperatorSet":
        return cls(np.broadcast_to(np.asarray(op, dtype=np.complex128), (n, 2, 2)))

    @classmethod
    def from_ops(cls, ops: Sequence) -> "LocalOperatorSet":
        return cls(np.stack([np.asarray(op, dtype=np.complex128) for op in ops]))


def apply_local(state: QState, ops: LocalOperatorSet) -> QState:
    """A_1 x ... x A_n |psi>, one 2x2 sweep per qubit; the result is not renormalized."""
    if len(ops) != state.n:
        raise ValueError(f"{len(ops)} operators for a {state.n}-qubit state")
    psi = state.tensor_view()
    for axis, op in enumerate(ops.ops):
        psi = np.moveaxis(np.tensordot(op, psi, axes=([1], [axis])), 0, axis)
    return QState(state.n, psi.reshape(-1))


def random_invertible_set(n: int, seed: int) -> LocalOperatorSet:
    """Complex Gaussian 2x2 matrices, redrawn while |det| < DET_GUARD."""
    if n < 1:
        raise ValueError(f"need at least one operator, got n={n}")
    rng = np.random.default_rng(seed)
    ops = []
    for _ in range(n):
        for _ in range(MAX_REDRAWS):
            op = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            if abs(linalg.det(op)) >= DET_GUARD:
                break
        else:
            raise RuntimeError(f"no operator with |det| >= {DET_GUARD} after {MAX_REDRAWS} draws")
        ops.append(op)
    return LocalOperatorSet.from_ops(ops)


class CovarianceReport(BaseModel):
    i_star_before: ComplexValue = Field(description="I*(a, n)")
    i_star_after: ComplexValue = Field(description="I*(b, n), b = A_1 x ... x A_n a")
    det_product: ComplexValue = Field(description="det(A_1) ... det(A_n)")
    relative_error: float = Field(description="|I*(b) - I*(a) det_product| / (1 + |I*(a) det_product|)")
    tau_before: float
    tau_after: float
    tau_relative_error: float = Field(description="|tau(b) - tau(a) |det_product|^2| / (1 + tau(a) |det_product|^2)")
    passed: bool


def covariance_check(
        state: QState, ops: LocalOperatorSet, tol: float = 1e-8, tau_tol: float = 1e-7
    ) -> CovarianceReport:
    require_even(state, "the covariance law")
    transformed = apply_local(state, ops)
    det_product = ops.det_product
    before, after = i_star(state), i_star(transformed)
    expected = before * det_product
    relative_error = abs(after - expected) / (1 + abs(expected))

    tau_before, tau_after = n_tangle(state), n_tangle(transformed)
    tau_expected = tau_before * abs(det_product) ** 2
    tau_relative_error = abs(tau_after - tau_expected) / (1 + tau_expected)
    if relative_error > tol:
        logger.debug("covariance gap %.3e at n=%d (det product %s)", relative_error, state.n, det_product)

    return CovarianceReport(
        i_star_before=before,
        i_star_after=after,
        det_product=det_product,
        relative_error=relative_error,
        tau_before=tau_before,
        tau_after=tau_after,
        tau_relative_error=tau_relative_error,
        passed=bool(relative_error <= tol and tau_relative_error <= tau_tol),
    )
