"""
Pure states of n qubits.

A state is a dense vector of 2**n complex amplitudes. Qubit 1 is the most
significant bit: the amplitude of |i1 i2 ... in> lives at index
i1*2**(n-1) + ... + in*2**0, so the even indices are exactly the
amplitudes whose last qubit is 0.

Everything here returns new values; a QState never changes after
construction.
"""
import hashlib
import itertools
import json
import math

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from pydantic import BaseModel, Field, model_validator

from .errors import StateSpecError


NORM_TOL = 1e-12
LOAD_NORM_TOL = 1e-9


# --- State value ---


@dataclass(frozen=True, eq=False)
class QState:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise StateSpecError(f"qubit count must be >= 1, got {self.n}")
        amplitudes = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amplitudes.size != 2**self.n:
            raise StateSpecError(
                f"expected {2**self.n} amplitudes for {self.n} qubits, got {amplitudes.size}"
            )
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dim(self) -> int:
        return 2**self.n

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_squared - 1.0) <= NORM_TOL

    def normalized(self) -> "QState":
        norm = math.sqrt(self.norm_squared)
        if norm == 0.0:
            raise StateSpecError("zero vector cannot be normalized")
        return QState(self.n, self.amplitudes / norm)

    def scaled(self, factor: complex) -> "QState":
        return QState(self.n, self.amplitudes * factor)

    def tensor_view(self) -> np.ndarray:
        """Amplitudes as an n-axis tensor, axis k-1 being qubit k."""
        return self.amplitudes.reshape((2,) * self.n)

    def label(self, index: int) -> str:
        return format(index, f"0{self.n}b")

    def allclose(self, other: "QState", atol: float = 1e-12) -> bool:
        return self.n == other.n and bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0.0, atol=atol))


# --- StateSpec (JSON form) ---


class Term(BaseModel):
    basis: str = Field(description="n-character bitstring, qubit 1 leftmost")
    re: float = Field(default=0.0, description="real part of the amplitude")
    im: float = Field(default=0.0, description="imaginary part of the amplitude")


class StateSpec(BaseModel):
    """
    A state as stored on disk.

    Either `amplitudes` (dense, 2**n [re, im] pairs) or `terms` (sparse
    basis/amplitude entries) is given, never both.
    """
    n: int = Field(ge=1, description="number of qubits")
    amplitudes: list[tuple[float, float]] | None = Field(default=None, description="dense [re, im] pairs")
    terms: list[Term] | None = Field(default=None, description="sparse basis terms")
    normalize: bool = Field(default=False, description="normalize on load instead of requiring unit norm")

    @model_validator(mode="after")
    def _check_form(self) -> "StateSpec":
        if (self.amplitudes is None) == (self.terms is None):
            raise ValueError("exactly one of 'amplitudes' or 'terms' must be given")
        if self.amplitudes is not None and len(self.amplitudes) != 2**self.n:
            raise ValueError(f"dense form needs {2**self.n} amplitudes for n={self.n}, got {len(self.amplitudes)}")
        if self.terms is not None:
            seen = set()
            for term in self.terms:
                if len(term.basis) != self.n or set(term.basis) - {"0", "1"}:
                    raise ValueError(f"basis '{term.basis}' is not a {self.n}-bit string")
                if term.basis in seen:
                    raise ValueError(f"duplicate basis '{term.basis}'")
                seen.add(term.basis)
        return self


def from_spec(spec: StateSpec) -> QState:
    amplitudes = np.zeros(2**spec.n, dtype=np.complex128)
    if spec.amplitudes is not None:
        amplitudes[:] = [complex(re, im) for re, im in spec.amplitudes]
    else:
        for term in spec.terms:
            amplitudes[int(term.basis, 2)] = complex(term.re, term.im)

    if not np.all(np.isfinite(amplitudes)):
        raise StateSpecError("amplitudes must be finite")
    norm_squared = float(np.vdot(amplitudes, amplitudes).real)
    if norm_squared == 0.0:
        raise StateSpecError("zero vector")

    state = QState(spec.n, amplitudes)
    if spec.normalize:
        return state.normalized()
    if abs(norm_squared - 1.0) > LOAD_NORM_TOL:
        raise StateSpecError(f"state is not normalized (norm^2 = {norm_squared!r}) and normalize is false")
    return state


def to_spec(state: QState) -> StateSpec:
    return StateSpec(
        n=state.n,
        amplitudes=[(float(a.real), float(a.imag)) for a in state.amplitudes],
    )


def spec_digest(text: str | bytes) -> str:
    if isinstance(text, str):
        text = text.encode()
    return hashlib.sha256(text).hexdigest()


def save_state(state: QState, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write(to_spec(state).model_dump_json(exclude_none=True, indent=2))
    return path


def load_state(path: str | Path) -> QState:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"State file {path} does not exist.")
    with open(path) as f:
        return from_spec(StateSpec.model_validate(json.load(f)))


# --- Named states ---


def basis(bits: str) -> QState:
    amplitudes = np.zeros(2 ** len(bits), dtype=np.complex128)
    amplitudes[int(bits, 2)] = 1.0
    return QState(len(bits), amplitudes)


def superposition(terms: Mapping[str, complex], normalize: bool = True) -> QState:
    """Build a state from {bitstring: amplitude}; e.g. {"0011": a, "0110": b}."""
    lengths = {len(bits) for bits in terms}
    if len(lengths) != 1:
        raise StateSpecError(f"all basis strings must share one length, got {sorted(lengths)}")
    n = lengths.pop()
    amplitudes = np.zeros(2**n, dtype=np.complex128)
    for bits, value in terms.items():
        amplitudes[int(bits, 2)] = value
    state = QState(n, amplitudes)
    return state.normalized() if normalize else state


def ghz(n: int) -> QState:
    if n < 2:
        raise StateSpecError(f"GHZ needs n >= 2, got {n}")
    amplitudes = np.zeros(2**n, dtype=np.complex128)
    amplitudes[0] = amplitudes[-1] = 1 / math.sqrt(2)
    return QState(n, amplitudes)


def w(n: int) -> QState:
    if n < 2:
        raise StateSpecError(f"W needs n >= 2, got {n}")
    amplitudes = np.zeros(2**n, dtype=np.complex128)
    amplitudes[[2**k for k in range(n)]] = 1 / math.sqrt(n)
    return QState(n, amplitudes)


def dicke(l: int, n: int) -> QState:
    """Symmetric state with l excitations, normalized by 1/sqrt(C(n, l))."""
    if not 1 <= l <= n - 1:
        raise StateSpecError(f"Dicke excitation count must satisfy 1 <= l <= n-1, got l={l}, n={n}")
    amplitudes = np.zeros(2**n, dtype=np.complex128)
    for ones in itertools.combinations(range(n), l):
        amplitudes[sum(2 ** (n - 1 - q) for q in ones)] = 1.0
    return QState(n, amplitudes / math.sqrt(math.comb(n, l)))


def single_excitation(n: int, seed: int) -> QState:
    """Random normalized superposition of the n weight-one basis states; w(n) is the uniform case."""
    if n < 2:
        raise StateSpecError(f"single-excitation states need n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    amplitudes = np.zeros(2**n, dtype=np.complex128)
    amplitudes[[2**k for k in range(n)]] = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return QState(n, amplitudes).normalized()


def random_pure(n: int, seed: int) -> QState:
    """Haar-random pure state: complex Gaussian entries, then normalized."""
    if n < 1:
        raise StateSpecError(f"qubit count must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    amplitudes = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return QState(n, amplitudes).normalized()


# --- Structure ---


def tensor(left: QState, right: QState) -> QState:
    """left occupies qubits 1..left.n, right the remaining low-order qubits."""
    return QState(left.n + right.n, np.kron(left.amplitudes, right.amplitudes))


def tensor_all(states: Sequence[QState]) -> QState:
    result = states[0]
    for state in states[1:]:
        result = tensor(result, state)
    return result


def permute_qubits(state: QState, perm: Sequence[int]) -> QState:
    """Move qubit k to position perm[k-1] (both 1-based)."""
    perm = list(perm)
    if sorted(perm) != list(range(1, state.n + 1)):
        raise StateSpecError(f"{perm} is not a permutation of 1..{state.n}")
    # axis perm[k]-1 of the output is axis k of the input
    axes = [0] * state.n
    for source, target in enumerate(perm):
        axes[target - 1] = source
    return QState(state.n, np.transpose(state.tensor_view(), axes).reshape(-1))


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    inverse = [0] * len(perm)
    for source, target in enumerate(perm, start=1):
        inverse[target - 1] = source
    return inverse
