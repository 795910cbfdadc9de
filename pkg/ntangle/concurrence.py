"""
Concurrence-side quantities of pure n-qubit states.

Qubit 1 against the rest:

    C_1(2...n)^2 = 4 det(rho_1)
                 = 4 sum_{i<j} |a_i a_{j+h} - a_{i+h} a_j|^2     (h = 2**(n-1))
                 = 2 (1 - tr rho_1^2)

Pairwise concurrences C_1k come from the Wootters formula on the reduced
two-qubit matrices, and the residual entanglement is the CKW monogamy
slack C_1(2...n)^2 - sum_k C_1k^2.
"""
import logging
import math

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from pydantic import BaseModel, Field

from . import linalg
from .errors import BudgetExceededError, InvalidDensityMatrixError, QubitCountError
from .invariants import n_tangle
from .qstate import QState, tensor


logger = logging.getLogger(__name__)

SPIN_FLIP = np.kron(linalg.SIGMA_Y, linalg.SIGMA_Y)
SPECTRUM_TOL = 1e-6
CLAMP_FLOOR = -1e-10
LEDGER_MAX_QUBITS = 10
FULL_DENSITY_MAX_QUBITS = 10
PAIR_CHUNK_ROWS = 256

OneRestForm = Literal["det", "sum", "purity"]


# --- Density matrices ---


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        matrix = linalg.as_cmatrix(self.matrix).copy()
        if matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"density matrix must be square, got {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_gap(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def trace_gap(self) -> float:
        return abs(self.trace - 1.0)

    def eigenvalue_floor(self) -> float:
        return float(np.min(linalg.eigenvalues(self.matrix).eigenvalues.real))

    def clamped_eigenvalues(self) -> np.ndarray:
        values = linalg.eigenvalues(self.matrix).sorted_real.real
        return np.where(values < 0, 0.0, values)


def density_from_pure(state: QState) -> DensityMatrix:
    """Full 2**n x 2**n projector; only for cross-checking the direct partial trace."""
    if state.n > FULL_DENSITY_MAX_QUBITS:
        raise BudgetExceededError(f"full density matrix limited to n <= {FULL_DENSITY_MAX_QUBITS}, got n={state.n}")
    a = state.amplitudes
    return DensityMatrix(np.outer(a, a.conj()))


def _check_keep(n: int, keep: Sequence[int]) -> list[int]:
    keep = list(keep)
    if len(keep) not in (1, 2) or len(set(keep)) != len(keep) or not all(1 <= q <= n for q in keep):
        raise ValueError(f"keep must be 1 or 2 distinct qubits from 1..{n}, got {keep}")
    return keep


def partial_trace(state: QState, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix of the kept qubits, in the order given, straight from the amplitudes."""
    keep = _check_keep(state.n, keep)
    rest = [q for q in range(1, state.n + 1) if q not in keep]
    axes = [q - 1 for q in keep] + [q - 1 for q in rest]
    block = np.transpose(state.tensor_view(), axes).reshape(2 ** len(keep), -1)
    return DensityMatrix(block @ block.conj().T)


def trace_out(rho: DensityMatrix, n: int, keep: Sequence[int]) -> DensityMatrix:
    """Partial trace of a full n-qubit density matrix."""
    keep = _check_keep(n, keep)
    rest = [q for q in range(1, n + 1) if q not in keep]
    tensor_form = rho.matrix.reshape((2,) * (2 * n))
    row_axes = [q - 1 for q in keep] + [q - 1 for q in rest]
    col_axes = [n + q - 1 for q in keep] + [n + q - 1 for q in rest]
    kept, traced = 2 ** len(keep), 2 ** len(rest)
    block = np.transpose(tensor_form, row_axes + col_axes).reshape(kept, traced, kept, traced)
    return DensityMatrix(np.einsum("itjt->ij", block))


def spin_flip(rho: DensityMatrix) -> DensityMatrix:
    """(sigma_y x sigma_y) rho* (sigma_y x sigma_y)."""
    if rho.dim != 4:
        raise ValueError(f"spin flip needs a two-qubit (4x4) matrix, got {rho.dim}x{rho.dim}")
    return DensityMatrix(linalg.matmul(linalg.matmul(SPIN_FLIP, rho.matrix.conj()), SPIN_FLIP))


def wootters_c(rho: DensityMatrix) -> float:
    """C = max(0, l1 - l2 - l3 - l4), l_i**2 the eigenvalues of rho rho~ in decreasing order."""
    flipped = spin_flip(rho).matrix
    product = linalg.matmul(rho.matrix, flipped)
    # rho rho~ cancels to ~eps entries when rho has a pure one-qubit factor
    noise = float(np.linalg.norm(rho.matrix) * np.linalg.norm(flipped))
    mu = linalg.eigenvalues(product, noise_scale=noise).eigenvalues
    if np.max(np.abs(mu.imag)) > SPECTRUM_TOL or np.min(mu.real) < -SPECTRUM_TOL:
        raise InvalidDensityMatrixError(f"rho rho~ spectrum {mu} is not real non-negative within {SPECTRUM_TOL}")
    real = mu.real
    if np.min(real) < CLAMP_FLOOR:
        logger.debug("clamping rho rho~ eigenvalue %.3e to zero", np.min(real))
    lambdas = np.sort(np.sqrt(np.clip(real, 0.0, None)))[::-1]
    return max(0.0, float(lambdas[0] - lambdas[1:].sum()))


def pair_concurrence(state: QState, k: int) -> float:
    return wootters_c(partial_trace(state, [1, k]))


# --- Qubit 1 against the rest ---


@dataclass(frozen=True)
class BipartiteConcurrence:
    form: str
    c_squared: float

    @property
    def c(self) -> float:
        return math.sqrt(max(self.c_squared, 0.0))


def _halves(state: QState) -> tuple[np.ndarray, np.ndarray]:
    half = 2 ** (state.n - 1)
    return state.amplitudes[:half], state.amplitudes[half:]


def _pair_square_sum(state: QState) -> float:
    """sum_{i<j} |P(i, j)|^2, streamed in row blocks of the antisymmetric P."""
    top, bottom = _halves(state)
    total = 0.0
    for start in range(0, top.size, PAIR_CHUNK_ROWS):
        rows = slice(start, start + PAIR_CHUNK_ROWS)
        block = np.outer(top[rows], bottom) - np.outer(bottom[rows], top)
        total += float(np.sum(np.abs(block) ** 2))
    # diagonal is zero, off-diagonal pairs counted twice
    return total / 2


def c_one_rest(state: QState, form: OneRestForm = "det") -> BipartiteConcurrence:
    if state.n < 2:
        raise QubitCountError(f"C_1(2...n) needs n >= 2, got n={state.n}")
    if form == "det":
        value = 4 * linalg.det(partial_trace(state, [1]).matrix).real
    elif form == "sum":
        value = 4 * _pair_square_sum(state)
    elif form == "purity":
        rho = partial_trace(state, [1]).matrix
        value = 2 * (np.trace(rho).real ** 2 - np.trace(rho @ rho).real)
    else:
        raise ValueError(f"unknown C_1(2...n) form '{form}'")
    return BipartiteConcurrence(form=form, c_squared=float(value))


class ConcurrenceReport(BaseModel):
    n: int
    c_one_rest: float = Field(description="C_1(2...n)")
    c_one_rest_squared: float = Field(description="C_1(2...n)^2 = 4 det rho_1")
    c_pairs: list[float] = Field(description="C_1k for k = 2..n")
    residual: float = Field(description="C_1(2...n)^2 - sum_k C_1k^2, unclamped")
    monogamy_slack: float = Field(description="same quantity, named for the CKW inequality")


def residual_tangle(state: QState) -> ConcurrenceReport:
    if state.n < 2:
        raise QubitCountError(f"residual entanglement needs n >= 2, got n={state.n}")
    one_rest = c_one_rest(state, "det")
    pairs = [pair_concurrence(state, k) for k in range(2, state.n + 1)]
    residual = one_rest.c_squared - sum(c * c for c in pairs)
    return ConcurrenceReport(
        n=state.n,
        c_one_rest=one_rest.c,
        c_one_rest_squared=one_rest.c_squared,
        c_pairs=pairs,
        residual=residual,
        monogamy_slack=residual,
    )


# --- Factorization of qubit 1 ---


@dataclass(frozen=True)
class Factorization:
    qubit: QState
    rest: QState
    case: int
    fidelity: float


@dataclass(frozen=True)
class NotAProduct:
    c_value: float
    reason: str


def factor_one_rest(state: QState, tol: float = 1e-8) -> Factorization | NotAProduct:
    """
    Split |psi> into |phi>_1 x |phi>_2...n when C_1(2...n) vanishes.

    Case 1: the qubit-1 = 0 half is empty, so qubit 1 is |1>.
    Case 2: pivot on the largest amplitude of that half; alpha = a_{i0+h} / a_{i0}
    and qubit 1 is |0> + alpha|1>.
    """
    if state.n < 2:
        raise QubitCountError(f"factoring qubit 1 needs n >= 2, got n={state.n}")
    c_value = c_one_rest(state, "sum").c
    if c_value >= tol:
        return NotAProduct(c_value=c_value, reason=f"C_1(2...n) = {c_value:.3e} >= tol {tol:.1e}")

    top, bottom = _halves(state)
    if float(np.vdot(top, top).real) < tol**2:
        case = 1
        qubit = QState(1, [0.0, 1.0])
        rest = QState(state.n - 1, bottom).normalized()
    else:
        case = 2
        pivot = int(np.argmax(np.abs(top)))
        alpha = bottom[pivot] / top[pivot]
        qubit = QState(1, [1.0, alpha]).normalized()
        rest = QState(state.n - 1, top).normalized()

    overlap = np.vdot(state.amplitudes, tensor(qubit, rest).amplitudes)
    fidelity = float(abs(overlap) / math.sqrt(state.norm_squared))
    if fidelity < 1 - 10 * tol:
        return NotAProduct(c_value=c_value, reason=f"reconstruction fidelity {fidelity:.12f} below {1 - 10 * tol}")
    return Factorization(qubit=qubit, rest=rest, case=case, fidelity=fidelity)


# --- C^2 >= tau certificate ---


@dataclass(frozen=True, eq=False)
class PairTermLedger:
    """
    P(i, j) = a_i a_{j+h} - a_{i+h} a_j for all i, j < h, and
    Z_k = |P(k, h-1-k)| for k < h/2.
    """
    n: int
    p: np.ndarray
    z: np.ndarray

    @property
    def half(self) -> int:
        return 2 ** (self.n - 1)

    def pair(self, i: int, j: int) -> complex:
        return complex(self.p[i, j])

    def blocks(self) -> tuple[float, float, float]:
        """Squared-modulus sums over the three disjoint index blocks of C^2 / 4."""
        h = self.half
        quarter = h // 2
        squares = np.abs(np.triu(self.p, 1)) ** 2
        mirror = np.zeros_like(squares, dtype=bool)
        k = np.arange(quarter)
        mirror[k, h - 1 - k] = True
        low = np.zeros_like(mirror)
        low[:quarter, :] = True
        first = float(squares[low & ~mirror].sum())
        second = float(squares[~low].sum())
        third = float(squares[mirror].sum())
        return first, second, third


def pair_term_ledger(state: QState) -> PairTermLedger:
    if state.n > LEDGER_MAX_QUBITS:
        raise BudgetExceededError(f"pair ledger is O(4**n); limited to n <= {LEDGER_MAX_QUBITS}, got n={state.n}")
    if state.n < 2:
        raise QubitCountError(f"pair ledger needs n >= 2, got n={state.n}")
    top, bottom = _halves(state)
    p = np.outer(top, bottom) - np.outer(bottom, top)
    h = top.size
    k = np.arange(h // 2)
    return PairTermLedger(n=state.n, p=p, z=np.abs(p[k, h - 1 - k]))


class CertificateReport(BaseModel):
    c_squared: float = Field(description="C_1(2...n)^2 from the sum form")
    tau: float = Field(description="n-tangle")
    decomposition_gap: float = Field(description="|4 (block1 + block2 + block3) - C^2|")
    z_bound_slack: float = Field(description="4 (sum Z_k)^2 - tau")
    pair_bound_slack: float = Field(description="block1 + block2 - 2 sum_{k<m} Z_k Z_m")
    min_pair_slack: float = Field(description="smallest per-(k, m) slack of the four-term inequality")
    headline_slack: float = Field(description="C^2 - tau")
    passed: bool


def result3_certificate(
        state: QState, decomposition_tol: float = 1e-11, pair_tol: float = 1e-12, headline_tol: float = 1e-11
    ) -> CertificateReport:
    if state.n % 2:
        raise QubitCountError(f"the C^2 >= tau certificate is for even n, got n={state.n}")
    ledger = pair_term_ledger(state)
    h = ledger.half
    quarter = h // 2
    c_squared = c_one_rest(state, "sum").c_squared
    tau = n_tangle(state)

    first, second, third = ledger.blocks()
    decomposition_gap = abs(4 * (first + second + third) - c_squared)
    z_bound_slack = 4 * float(ledger.z.sum()) ** 2 - tau

    k, m = np.triu_indices(quarter, 1)
    moduli = np.abs(ledger.p)
    lhs = moduli[k, h - 1 - m] * moduli[m, h - 1 - k] + moduli[k, m] * moduli[h - 1 - m, h - 1 - k]
    rhs = ledger.z[k] * ledger.z[m]
    min_pair_slack = float(np.min(lhs - rhs)) if k.size else 0.0
    pair_bound_slack = first + second - 2 * float(rhs.sum())
    headline_slack = c_squared - tau

    return CertificateReport(
        c_squared=c_squared,
        tau=tau,
        decomposition_gap=decomposition_gap,
        z_bound_slack=z_bound_slack,
        pair_bound_slack=pair_bound_slack,
        min_pair_slack=min_pair_slack,
        headline_slack=headline_slack,
        passed=bool(
            decomposition_gap <= decomposition_tol
            and z_bound_slack >= -pair_tol
            and pair_bound_slack >= -pair_tol
            and min_pair_slack >= -pair_tol
            and headline_slack >= -headline_tol
        ),
    )


# --- Product states ---


class SpinFlipStructure(BaseModel):
    k: int
    scalar: float = Field(description="best c in rho_1k rho~_1k = c I")
    residual_norm: float = Field(description="Frobenius norm of rho_1k rho~_1k - c I")


def product_spin_flip_structure(state: QState, k: int) -> SpinFlipStructure:
    rho = partial_trace(state, [1, k])
    product = rho.matrix @ spin_flip(rho).matrix
    scalar = complex(np.trace(product)) / 4
    residual = float(np.linalg.norm(product - scalar * np.eye(4)))
    return SpinFlipStructure(k=k, scalar=scalar.real, residual_norm=residual)


class PartialMeasureReport(BaseModel):
    left_qubits: int
    total_qubits: int
    c_one_rest_gap: float = Field(description="|C_1(2...n)(left x right) - C_1(2...l)(left)|")
    inner_pair_gap: float = Field(description="max_{k<=l} |C_1k(product) - C_1k(left)|")
    outer_pair_max: float = Field(description="max_{k>l} C_1k(product)")
    residual_product: float
    residual_left: float
    residual_gap: float
    spin_flip_structure: list[SpinFlipStructure] = Field(description="rho_1k rho~_1k = c I check for k > l")
    passed: bool


def partial_measure_check(
        left: QState, right: QState, tol: float = 1e-10, residual_tol: float = 1e-9
    ) -> PartialMeasureReport:
    if left.n < 2:
        raise QubitCountError(f"left factor needs n >= 2, got n={left.n}")
    product = tensor(left, right)
    l, n = left.n, product.n

    c_one_rest_gap = abs(c_one_rest(product, "sum").c - c_one_rest(left, "sum").c)
    inner_pair_gap = max(abs(pair_concurrence(product, k) - pair_concurrence(left, k)) for k in range(2, l + 1))
    outer_pair_max = max(pair_concurrence(product, k) for k in range(l + 1, n + 1))
    residual_product = residual_tangle(product).residual
    residual_left = residual_tangle(left).residual
    residual_gap = abs(residual_product - residual_left)
    structure = [product_spin_flip_structure(product, k) for k in range(l + 1, n + 1)]

    return PartialMeasureReport(
        left_qubits=l,
        total_qubits=n,
        c_one_rest_gap=c_one_rest_gap,
        inner_pair_gap=inner_pair_gap,
        outer_pair_max=outer_pair_max,
        residual_product=residual_product,
        residual_left=residual_left,
        residual_gap=residual_gap,
        spin_flip_structure=structure,
        passed=bool(
            c_one_rest_gap <= tol and inner_pair_gap <= tol and outer_pair_max <= tol
            and residual_gap <= residual_tol
            and all(s.residual_norm <= tol for s in structure)
        ),
    )
