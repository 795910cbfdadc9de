"""
Small dense complex matrices: products, determinants and eigenvalues up to 4x4.

Eigenvalues go through the characteristic polynomial (Faddeev-LeVerrier)
and a simultaneous Durand-Kerner root iteration. Three clean-ups make the
result usable for Wootters spectra, which are full of repeated and zero
roots:

1. Trailing coefficients that vanish to working precision are deflated
   to exact zero roots, as numpy.roots strips trailing zeros.
2. A cluster of iterates is replaced by its mean when the mean is itself
   a root to working precision.
3. Each root of a matrix polynomial is polished by shifted inverse
   iteration on the matrix and read back as a Rayleigh quotient. Repeated
   eigenvalues of a diagonalizable matrix are well conditioned even
   though the repeated polynomial roots are not.
"""
import math

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NonConvergenceError


EPS = float(np.finfo(float).eps)
MAX_DIM = 4
MAX_ITERATIONS = 500
STEP_TOL = 1e-13
ZERO_COEFF_TOL = 64 * EPS
ZERO_ROOT_TOL = 64 * EPS
BACKWARD_ERROR_TOL = 1e-8
MERGE_BACKWARD_TOL = 1e-12
CLUSTER_FACTOR = 300.0
REFINE_STEPS = 3
REFINE_SHIFT = 1e-10
REFINE_TRACE_TOL = 1e-12

# Pauli matrices used across the package.
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY_2 = np.eye(2, dtype=np.complex128)


def as_cmatrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def _require_square(m: np.ndarray) -> int:
    rows, cols = m.shape
    if rows != cols:
        raise ValueError(f"matrix must be square, got {rows}x{cols}")
    if rows > MAX_DIM:
        raise ValueError(f"matrix dimension {rows} exceeds supported maximum {MAX_DIM}")
    return rows


# --- Products and determinants ---


def matmul(a, b) -> np.ndarray:
    a, b = as_cmatrix(a), as_cmatrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape[0]}x{a.shape[1]} times {b.shape[0]}x{b.shape[1]}")
    return a @ b


def det(m) -> complex:
    m = as_cmatrix(m)
    dim = _require_square(m)
    if dim == 1:
        return complex(m[0, 0])
    if dim == 2:
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    # LAPACK getrf: LU with partial pivoting
    return complex(np.linalg.det(m))


# --- Characteristic polynomial ---


def char_poly(m) -> np.ndarray:
    """
    Monic characteristic polynomial, highest degree first.

    Faddeev-LeVerrier: M_k = A M_{k-1} + c_{k-1} I, c_k = -tr(A M_k) / k.
    """
    m = as_cmatrix(m)
    dim = _require_square(m)
    coeffs = np.zeros(dim + 1, dtype=np.complex128)
    coeffs[0] = 1.0
    identity = np.eye(dim, dtype=np.complex128)
    previous = np.zeros_like(m)
    for k in range(1, dim + 1):
        current = m @ previous + coeffs[k - 1] * identity
        coeffs[k] = -np.trace(m @ current) / k
        previous = current
    return coeffs


# --- Roots ---


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray

    def __post_init__(self):
        values = np.array(self.eigenvalues, dtype=np.complex128).reshape(-1)
        values.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)

    def __len__(self) -> int:
        return self.eigenvalues.size

    @property
    def sorted_real(self) -> np.ndarray:
        """Eigenvalues ordered by descending real part."""
        return self.eigenvalues[np.argsort(-self.eigenvalues.real, kind="stable")]

    def consistency_gaps(self, m) -> tuple[float, float]:
        """Scaled |sum - trace| and |product - det|; both should be <= 1."""
        m = as_cmatrix(m)
        trace = complex(np.trace(m))
        determinant = det(m)
        trace_gap = abs(complex(self.eigenvalues.sum()) - trace) / (1e-10 * (1 + abs(trace)))
        det_gap = abs(complex(np.prod(self.eigenvalues)) - determinant) / (1e-9 * (1 + abs(determinant)))
        return trace_gap, det_gap


def _root_scale(coeffs: np.ndarray) -> float:
    degree = coeffs.size - 1
    return max((abs(coeffs[k]) ** (1.0 / k) for k in range(1, degree + 1)), default=0.0)


def _deflate_zero_roots(coeffs: np.ndarray, scale: float) -> tuple[np.ndarray, int]:
    zeros = 0
    degree = coeffs.size - 1
    while degree - zeros > 0:
        k = degree - zeros
        if abs(coeffs[k]) > ZERO_COEFF_TOL * scale**k:
            break
        zeros += 1
    return coeffs[: coeffs.size - zeros], zeros


def _durand_kerner(coeffs: np.ndarray) -> np.ndarray:
    degree = coeffs.size - 1
    radius = 1.0 + float(np.max(np.abs(coeffs[1:])))
    omega = np.exp(2j * np.pi * np.arange(degree) / degree)
    z = radius * omega * (0.4 + 0.9j)

    for _ in range(MAX_ITERATIONS):
        diffs = z[:, None] - z[None, :]
        np.fill_diagonal(diffs, 1.0)
        denominators = diffs.prod(axis=1)
        coincident = denominators == 0
        if coincident.any():
            # pull coincident iterates apart along distinct directions, then retry
            z = z + coincident * (math.sqrt(EPS) * radius * omega)
            continue
        step = np.polyval(coeffs, z) / denominators
        z = z - step
        if np.max(np.abs(step)) < STEP_TOL:
            break
    return z


def _backward_errors(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    magnitudes = np.polyval(np.abs(coeffs), np.abs(z))
    return np.abs(np.polyval(coeffs, z)) / np.maximum(magnitudes, np.finfo(float).tiny)


def _cluster_radius(multiplicity: int, scale: float) -> float:
    # a k-fold root splits by about eps**(1/k) under rounding
    return CLUSTER_FACTOR * EPS ** (1.0 / multiplicity) * scale


def _merge_clusters(coeffs: np.ndarray, z: np.ndarray, scale: float) -> np.ndarray:
    real_coeffs = bool(np.all(np.abs(coeffs.imag) <= ZERO_COEFF_TOL * np.abs(coeffs)))
    merged = z.copy()
    remaining = list(range(z.size))
    while remaining:
        seed = remaining[0]
        nearest = sorted(remaining, key=lambda i: abs(z[i] - z[seed]))
        cluster = [seed]
        for size in range(len(nearest), 1, -1):
            candidate = nearest[:size]
            center = complex(z[candidate].mean())
            spread = float(np.max(np.abs(z[candidate] - center)))
            radius = _cluster_radius(size, scale)
            if spread > radius or _backward_errors(coeffs, np.array([center]))[0] > MERGE_BACKWARD_TOL:
                continue
            # a multiple root of a real polynomial is real
            if real_coeffs and abs(center.imag) <= radius:
                center = complex(center.real)
            merged[candidate] = center
            cluster = candidate
            break
        remaining = [i for i in remaining if i not in cluster]
    return merged


def poly_roots(coeffs: Sequence[complex], noise_scale: float = 0.0) -> Spectrum:
    """
    Roots of a monic polynomial of degree 1..4.

    `noise_scale` bounds the magnitude the coefficients were computed from
    (the matrix norm for a characteristic polynomial); trailing coefficients
    below ZERO_COEFF_TOL * max(root scale, noise_scale)**k count as zero.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
    degree = coeffs.size - 1
    if not 1 <= degree <= MAX_DIM:
        raise ValueError(f"polynomial degree must be in 1..{MAX_DIM}, got {degree}")
    if coeffs[0] != 1:
        raise ValueError(f"polynomial must be monic, leading coefficient is {coeffs[0]}")

    scale = max(_root_scale(coeffs), noise_scale)
    reduced, zeros = _deflate_zero_roots(coeffs, scale)
    roots = np.zeros(degree, dtype=np.complex128)
    if reduced.size > 1:
        z = _durand_kerner(reduced)
        errors = _backward_errors(reduced, z)
        if np.max(errors) > BACKWARD_ERROR_TOL:
            raise NonConvergenceError(
                "Durand-Kerner iteration did not converge",
                [float(r) for r in np.abs(np.polyval(reduced, z))],
            )
        roots[: z.size] = _merge_clusters(reduced, z, _root_scale(reduced))
    return Spectrum(roots)


def _start_vector(dim: int) -> np.ndarray:
    k = np.arange(dim)
    return (1.0 + 0.37 * k) * np.exp(0.9j * k)


def _refine(m: np.ndarray, roots: np.ndarray, scale: float) -> np.ndarray | None:
    """Rayleigh quotients after shifted inverse iteration from every root at once."""
    dim = m.shape[0]
    shifts = roots + REFINE_SHIFT * scale * (1 + 1j)
    shifted = m[None, :, :] - shifts[:, None, None] * np.eye(dim)
    x = np.tile(_start_vector(dim), (roots.size, 1))[:, :, None]
    try:
        for _ in range(REFINE_STEPS):
            x = np.linalg.solve(shifted, x)
            x = x / np.linalg.norm(x, axis=1, keepdims=True)
    except np.linalg.LinAlgError:
        return None
    vectors = x[:, :, 0]
    refined = np.einsum("ri,ij,rj->r", vectors.conj(), m, vectors)
    if not np.all(np.isfinite(refined)):
        return None
    return refined


def eigenvalues(m, noise_scale: float = 0.0) -> Spectrum:
    """
    Eigenvalues of a square matrix of dimension <= 4.

    `noise_scale` is the magnitude the entries were computed from when that
    exceeds the matrix norm (a product of matrices that nearly cancels);
    eigenvalues below ZERO_ROOT_TOL times it are reported as exact zeros.
    """
    m = as_cmatrix(m)
    dim = _require_square(m)
    # Faddeev-LeVerrier error in c_k grows like eps * ||m||**k, not like the roots
    scale = max(float(np.linalg.norm(m)), noise_scale)
    spectrum = poly_roots(char_poly(m), noise_scale=scale)
    if scale == 0:
        return spectrum

    roots = spectrum.eigenvalues
    refined = _refine(m, roots, scale)
    if refined is None:
        return spectrum
    refined = np.where(np.abs(refined) <= ZERO_ROOT_TOL * scale, 0, refined)
    # two roots polished onto the same eigenvector lose the other one
    trace = complex(np.trace(m))
    allowed = max(abs(complex(roots.sum()) - trace), REFINE_TRACE_TOL * scale * dim)
    if abs(complex(refined.sum()) - trace) > allowed:
        return spectrum
    return Spectrum(refined)


def match_multisets(found: Sequence[complex], expected: Sequence[complex]) -> float:
    """Greedy nearest matching of two multisets; returns the largest pair distance."""
    pool = list(np.asarray(found, dtype=np.complex128))
    worst = 0.0
    for target in np.asarray(expected, dtype=np.complex128):
        distances = [abs(value - target) for value in pool]
        best = int(np.argmin(distances))
        worst = max(worst, distances[best])
        pool.pop(best)
    return worst
