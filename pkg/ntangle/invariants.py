"""
Tangle-side invariants of even-n qubit states.

The n-tangle is a quartic sum over four index strings weighted by epsilon
tensors. It collapses to the square of a degree-2 SLOCC invariant:

    tau = 2|S|,  S = 2 S0**2,  S0 = I*(a, n)
    tau = 4 |sum_l (-1)**N(l) a_{2l} a_{(2**n - 1) - 2l}|**2

This module evaluates every form of that chain (the brute-force oracles,
S0, the three summation forms of I*, and the fast 2**(n-1)-term sum) so
the identities can be checked against each other numerically.
"""
import logging

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from pydantic import BaseModel, Field

from .errors import BudgetExceededError, QubitCountError
from .fields import ComplexValue
from .qstate import QState, tensor


logger = logging.getLogger(__name__)

# epsilon_{00} = epsilon_{11} = 0, epsilon_{01} = -epsilon_{10} = 1
EPSILON = np.array([[0, 1], [-1, 0]], dtype=np.int8)

RAW_MAX_QUBITS = 4
CONSTRAINED_MAX_QUBITS = 12
FINAL_OPS = 2

IStarForm = Literal["grouped", "pairform", "folded"]
OracleMode = Literal["raw", "constrained"]


# --- Sign helpers ---


def popcount_sign(l: int, width: int) -> int:
    """(-1)**N(l), N(l) being the number of ones in the width-bit form of l."""
    if not 0 <= l < 2**width:
        raise ValueError(f"{l} does not fit in {width} bits")
    return -1 if bin(l).count("1") % 2 else 1


@lru_cache(maxsize=None)
def popcount_signs(width: int) -> np.ndarray:
    """popcount_sign for every l in range(2**width), as an int8 array."""
    values = np.arange(2**width)
    signs = np.ones(2**width, dtype=np.int8)
    for bit in range(width):
        signs *= (1 - 2 * ((values >> bit) & 1)).astype(np.int8)
    signs.setflags(write=False)
    return signs


@lru_cache(maxsize=None)
def _bit_table(n: int) -> np.ndarray:
    """bits[i, k] is the value of qubit k+1 in basis index i."""
    values = np.arange(2**n)[:, None]
    shifts = np.arange(n - 1, -1, -1)[None, :]
    bits = ((values >> shifts) & 1).astype(np.int8)
    bits.setflags(write=False)
    return bits


def require_even(state: QState, operation: str):
    if state.n < 2 or state.n % 2:
        raise QubitCountError(
            f"{operation} is defined for even n >= 2 only (no degree-2 invariant exists for odd n); got n={state.n}"
        )


# --- Degree-2 forms ---


def _s_half(state: QState, last: int) -> complex:
    """S_i of the reduction: sum over alpha of a_{alpha i} a_{alpha-bar i-bar} prod eps."""
    n = state.n
    a = state.amplitudes
    prefixes = _bit_table(n - 1) if n > 1 else np.zeros((1, 0), dtype=np.int8)
    eps_products = EPSILON[prefixes, 1 - prefixes].prod(axis=1)
    alpha = np.arange(2 ** (n - 1))
    complement = (2 ** (n - 1) - 1) - alpha
    return complex(np.sum(a[2 * alpha + last] * a[2 * complement + (1 - last)] * eps_products))


def s0(state: QState) -> complex:
    require_even(state, "S0")
    return _s_half(state, 0)


def s1(state: QState) -> complex:
    require_even(state, "S1")
    return _s_half(state, 1)


def i_star(state: QState, form: IStarForm = "grouped") -> complex:
    """
    The degree-2 SLOCC invariant I*(a, n) in one of its summation forms.

    grouped:  sum over l < 2**(n-2) of (-1)**N(l) (a_{2l} a_{2**n-1-2l} - a_{2l+1} a_{2**n-2-2l})
    pairform: sum over k < 2**(n-1) of (-1)**N(k) a_k a_{2**n-1-k}
    folded:   sum over k < 2**(n-2) of (-1)**N(k) (a_k a_{2**n-1-k} - a_{2**(n-1)-1-k} a_{2**(n-1)+k})
    """
    require_even(state, "I*")
    n = state.n
    a = state.amplitudes
    top = 2**n - 1
    half = 2 ** (n - 1)
    quarter = 2 ** (n - 2)
    if form == "grouped":
        l = np.arange(quarter)
        terms = a[2 * l] * a[top - 2 * l] - a[2 * l + 1] * a[top - 1 - 2 * l]
        return complex(np.sum(popcount_signs(n - 2) * terms))
    if form == "pairform":
        k = np.arange(half)
        return complex(np.sum(popcount_signs(n - 1) * a[k] * a[top - k]))
    if form == "folded":
        k = np.arange(quarter)
        terms = a[k] * a[top - k] - a[half - 1 - k] * a[half + k]
        return complex(np.sum(popcount_signs(n - 2) * terms))
    raise ValueError(f"unknown I* form '{form}'")


def tau_prime(state: QState) -> float:
    return 2 * abs(i_star(state, "grouped"))


@dataclass(frozen=True)
class FastTangle:
    tau: float
    pair_sum: complex
    mult_count: int
    final_ops: int = FINAL_OPS


def n_tangle_fast(state: QState) -> FastTangle:
    """tau = 4 |sum_l (-1)**N(l) a_{2l} a_{(2**n-1)-2l}|**2 with 2**(n-1) complex products."""
    require_even(state, "the n-tangle")
    a = state.amplitudes
    evens = a[0::2]
    # a[::-2] walks (2**n - 1) - 2l for l = 0, 1, ...
    products = evens * a[::-2]
    pair_sum = complex(np.dot(popcount_signs(state.n - 1), products))
    return FastTangle(tau=4 * abs(pair_sum) ** 2, pair_sum=pair_sum, mult_count=products.size)


def n_tangle(state: QState) -> float:
    return n_tangle_fast(state).tau


class ScalarInvariants(BaseModel):
    s0: ComplexValue = Field(description="S0, the degree-2 reduction of the quartic sum")
    i_star: ComplexValue = Field(description="I*(a, n), degree-2 SLOCC invariant")
    tau_prime: float = Field(description="2|I*|")
    n_tangle: float = Field(description="n-tangle from the fast degree-2 sum")


def scalar_invariants(state: QState) -> ScalarInvariants:
    return ScalarInvariants(
        s0=s0(state),
        i_star=i_star(state, "grouped"),
        tau_prime=tau_prime(state),
        n_tangle=n_tangle(state),
    )


# --- Quartic oracles ---


class OracleResult(BaseModel):
    mode: str = Field(description="raw or constrained")
    s: ComplexValue = Field(description="the quartic sum S")
    s1: ComplexValue = Field(description="S1 (last qubit 1 in the first factor)")
    tau: float = Field(description="2|S|")
    quadruple_count: int = Field(description="index quadruples visited")
    term_count: int = Field(description="quadruples with nonzero epsilon product")
    mult_count: int = Field(description="complex multiplications performed")
    case1_sum: ComplexValue | None = Field(default=None, description="partial sum over beta_n = alpha_n (constrained only)")


def check_oracle_budget(n: int, mode: OracleMode):
    if mode == "raw":
        if not 2 <= n <= RAW_MAX_QUBITS:
            raise BudgetExceededError(f"raw oracle supports 2 <= n <= {RAW_MAX_QUBITS}, got n={n}")
    elif mode == "constrained":
        if not (2 <= n <= CONSTRAINED_MAX_QUBITS and (n % 2 == 0 or n == 3)):
            raise BudgetExceededError(
                f"constrained oracle supports even n <= {CONSTRAINED_MAX_QUBITS} or n = 3, got n={n}"
            )
    else:
        raise ValueError(f"unknown oracle mode '{mode}'")


def _raw_sum(state: QState) -> tuple[complex, int]:
    n = state.n
    a = state.amplitudes
    bits = _bit_table(n)
    # pair[x, y] = prod_{i<n} eps_{x_i y_i};  last[x, y] = eps_{x_n y_n}
    pair = EPSILON[bits[:, None, :-1], bits[None, :, :-1]].prod(axis=2)
    last = EPSILON[bits[:, None, -1], bits[None, :, -1]]
    weights = (
        pair[:, :, None, None] * pair[None, None, :, :]
        * last[:, None, :, None] * last[None, :, None, :]
    )
    products = a[:, None, None, None] * a[None, :, None, None] * a[None, None, :, None] * a[None, None, None, :]
    return complex(np.sum(products * weights)), int(np.count_nonzero(weights))


def _constrained_sum(state: QState) -> tuple[complex, complex]:
    """Sum over (alpha, gamma_1..gamma_{n-1}, beta_n); returns (S, Case-1 partial sum)."""
    n = state.n
    a = state.amplitudes
    prefix_mask = 2 ** (n - 1) - 1
    prefix_signs = popcount_signs(n - 1).astype(np.float64)
    gamma = np.arange(2 ** (n - 1))
    beta_last = np.array([0, 1])[:, None]
    beta_last_sign = np.where(beta_last == 0, 1.0, -1.0)

    total = 0j
    case1 = 0j
    for alpha in range(2**n):
        prefix, alpha_last = alpha >> 1, alpha & 1
        flipped = 1 - alpha_last
        beta = ((prefix_mask ^ prefix) << 1) | beta_last
        gamma_index = (gamma << 1) | flipped
        delta = ((prefix_mask ^ gamma) << 1) | (1 - beta_last)
        sign = prefix_signs[prefix] * prefix_signs[gamma] * (1.0 if alpha_last == 0 else -1.0) * beta_last_sign
        terms = a[alpha] * a[beta] * a[gamma_index] * a[delta] * sign
        total += terms.sum()
        case1 += terms[alpha_last].sum()
    return complex(total), complex(case1)


def n_tangle_oracle(state: QState, mode: OracleMode = "constrained") -> OracleResult:
    """
    Brute-force quartic sum.

    raw multiplies every one of the 2**(4n) index quadruples and weights it
    by the epsilon product; constrained visits only the 2**(2n) assignments
    the epsilon tensor leaves alive.
    """
    n = state.n
    check_oracle_budget(n, mode)
    s1_value = _s_half(state, 1)
    if mode == "raw":
        s, nonzero = _raw_sum(state)
        quadruples = 2 ** (4 * n)
        result = OracleResult(
            mode=mode, s=s, s1=s1_value, tau=2 * abs(s),
            quadruple_count=quadruples, term_count=nonzero, mult_count=3 * quadruples,
        )
    else:
        s, case1 = _constrained_sum(state)
        terms = 2 ** (2 * n)
        result = OracleResult(
            mode=mode, s=s, s1=s1_value, tau=2 * abs(s),
            quadruple_count=terms, term_count=terms, mult_count=3 * terms, case1_sum=case1,
        )
    logger.debug("[oracle %s n=%d] S=%s after %d multiplications", mode, n, result.s, result.mult_count)
    return result


# --- Identity checks ---


class ReductionReport(BaseModel):
    s: ComplexValue
    s0: ComplexValue
    s1: ComplexValue
    reduction_gap: float = Field(description="|S - 2 S0^2|")
    s1_gap: float = Field(description="|S1 + S0|")
    case1_gap: float = Field(description="|partial sum over beta_n = alpha_n|")
    istar_gap: float = Field(description="largest |S0 - I*| over the three I* forms")
    passed: bool


def verify_reduction(
        state: QState, reduction_tol: float = 1e-10, s1_tol: float = 1e-12, case1_tol: float = 1e-12,
        istar_tol: float = 1e-12
    ) -> ReductionReport:
    require_even(state, "the reduction S = 2 S0^2")
    oracle = n_tangle_oracle(state, "constrained")
    s0_value = s0(state)
    reduction_gap = abs(oracle.s - 2 * s0_value**2)
    s1_gap = abs(oracle.s1 + s0_value)
    case1_gap = abs(oracle.case1_sum)
    istar_gap = max(abs(s0_value - i_star(state, form)) for form in ("grouped", "pairform", "folded"))
    return ReductionReport(
        s=oracle.s, s0=s0_value, s1=oracle.s1,
        reduction_gap=reduction_gap, s1_gap=s1_gap, case1_gap=case1_gap, istar_gap=istar_gap,
        passed=bool(
            reduction_gap <= reduction_tol and s1_gap <= s1_tol
            and case1_gap <= case1_tol and istar_gap <= istar_tol
        ),
    )


class MultiplicativityReport(BaseModel):
    tau_product: float = Field(description="tau of the tensor product")
    tau_left: float
    tau_right: float
    gap: float = Field(description="|tau(a x b) - tau(a) tau(b)|")
    passed: bool


def multiplicativity_check(left: QState, right: QState, tol: float = 1e-10) -> MultiplicativityReport:
    require_even(left, "multiplicativity (left factor)")
    require_even(right, "multiplicativity (right factor)")
    tau_product = n_tangle(tensor(left, right))
    tau_left, tau_right = n_tangle(left), n_tangle(right)
    gap = abs(tau_product - tau_left * tau_right)
    return MultiplicativityReport(
        tau_product=tau_product, tau_left=tau_left, tau_right=tau_right, gap=gap, passed=gap <= tol
    )


class OddTangleExperiment(BaseModel):
    n: int
    oracle_tau: float = Field(description="2|S| from the quartic oracle")
    reduced_tau: float = Field(description="|2 S0|^2, the even-n reduction applied anyway")
    gap: float


def odd_tangle_experiment(state: QState) -> OddTangleExperiment:
    """Compare the quartic 3-tangle with |2 S0|^2; the reduction is only proven for even n."""
    if state.n != 3:
        raise QubitCountError(f"the odd-n experiment runs on n = 3 only, got n={state.n}")
    oracle_tau = n_tangle_oracle(state, "raw").tau
    reduced_tau = abs(2 * _s_half(state, 0)) ** 2
    return OddTangleExperiment(n=3, oracle_tau=oracle_tau, reduced_tau=reduced_tau, gap=abs(oracle_tau - reduced_tau))
