"""Dense complex linear algebra and special functions for small Hilbert spaces.

Everything here is sized for dimensions up to a couple of hundred: Hermitian
eigendecompositions, unitaries generated by Hermitian matrices, angular
momentum operators, truncated-Fock displacement operators, and the modified
Bessel function I0. All functions are pure and return fresh arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Inputs are constructed analytically, so a tight absolute tolerance is the
# right default: anything looser would mask construction bugs.
HERMITIAN_ATOL = 1e-12

# I0 is summed as a power series below this argument and with the large-z
# asymptotic expansion above it. At z = 20 the series needs ~45 positive
# terms (no cancellation) and the asymptotic tail is ~e^(-2z) ~ 4e-18, so
# both sides of the switchover deliver better than 1e-12 relative error.
_I0_SWITCHOVER = 20.0


@dataclass(frozen=True, eq=False)
class HermitianEig:
    """Eigendecomposition A = V diag(w) V^dagger with eigenvalues ascending.

    ``eigenvalues`` is a real 1-D array sorted ascending; ``eigenvectors``
    holds the matching orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square_complex(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def hermiticity_deviation(a: np.ndarray) -> float:
    """Largest entrywise deviation |A - A^dagger|."""
    return float(np.abs(a - a.conj().T).max())


def hermitian_eig(a: np.ndarray) -> HermitianEig:
    """Eigendecompose a Hermitian matrix.

    Raises ValueError for non-square input or when the largest entry of
    A - A^dagger exceeds ``HERMITIAN_ATOL``.
    """
    a = _as_square_complex(a)
    dev = hermiticity_deviation(a)
    if dev > HERMITIAN_ATOL:
        raise ValueError(
            f"matrix is not Hermitian: max |A - A^dagger| entry is {dev:.3e}"
        )
    eigenvalues, eigenvectors = np.linalg.eigh(a)
    return HermitianEig(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def unitary_evolution(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) for Hermitian H (hbar = 1).

    Computed through the eigendecomposition of H, which keeps the result
    unitary to rounding for any |t|, unlike a truncated series.
    """
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    eig = hermitian_eig(h)
    phases = np.exp(-1j * eig.eigenvalues * t)
    return (eig.eigenvectors * phases) @ eig.eigenvectors.conj().T


def spin_operators(j: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Angular momentum matrices (Jx, Jy, Jz) for spin length j.

    Basis ordering is m = +j, ..., -j top to bottom, so Jz is
    diag(j, j-1, ..., -j) and the lowest-weight state |-j> is the last
    basis vector. Matrix elements follow the ladder convention
    J+|j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>.
    """
    if not math.isfinite(j):
        raise ValueError(f"spin length must be a non-negative half-integer, got {j!r}")
    two_j = round(2 * j)
    if abs(2 * j - two_j) > 1e-12 or two_j < 0:
        raise ValueError(f"spin length must be a non-negative half-integer, got {j!r}")
    dim = two_j + 1
    m = (two_j / 2) - np.arange(dim)
    jz = np.diag(m.astype(complex))
    raising = np.zeros((dim, dim), dtype=complex)
    if dim > 1:
        amp = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
        raising[np.arange(dim - 1), np.arange(1, dim)] = amp
    lowering = raising.conj().T
    jx = (raising + lowering) / 2
    jy = (raising - lowering) / 2j
    return jx, jy, jz


def lowering_operator(n_trunc: int) -> np.ndarray:
    """Bosonic annihilation operator a on the truncated Fock space.

    Basis ordering is |0>, |1>, ..., |n_trunc - 1>.
    """
    if n_trunc < 2:
        raise ValueError(f"Fock cutoff must be at least 2, got {n_trunc}")
    n = np.arange(1, n_trunc)
    a = np.zeros((n_trunc, n_trunc), dtype=complex)
    a[n - 1, n] = np.sqrt(n)
    return a


def displacement_operator(alpha: complex, n_trunc: int) -> np.ndarray:
    """exp(alpha a^dagger - alpha* a) on the truncated Fock space.

    The generator is anti-Hermitian, so the operator is obtained as the
    unitary generated by the Hermitian matrix i(alpha a^dagger - alpha* a).
    Matrix elements near the cutoff are distorted by truncation; the first
    column is accurate once n_trunc comfortably exceeds |alpha|^2.
    """
    a = lowering_operator(n_trunc)
    generator = alpha * a.conj().T - np.conj(alpha) * a
    return unitary_evolution(1j * generator, 1.0)


def coherent_amplitudes(alpha: complex, n_trunc: int) -> np.ndarray:
    """Closed-form Fock amplitudes <n|D(alpha)|0> = alpha^n e^(-|a|^2/2)/sqrt(n!)."""
    if n_trunc < 1:
        raise ValueError(f"need at least one amplitude, got n_trunc={n_trunc}")
    out = np.empty(n_trunc, dtype=complex)
    out[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, n_trunc):
        out[n] = out[n - 1] * alpha / math.sqrt(n)
    return out


def _i0_series(z: float) -> float:
    # sum_k (z^2/4)^k / (k!)^2; every term positive, so no cancellation.
    x = z * z / 4.0
    term = 1.0
    total = 1.0
    k = 1
    while term > total * 1e-17:
        term *= x / (k * k)
        total += term
        k += 1
    return total


def _i0_asymptotic_scaled(z: float) -> float:
    # e^(-z) I0(z) ~ (2 pi z)^(-1/2) sum_k ((2k-1)!!)^2 / (k! (8z)^k),
    # truncated at the smallest term of the divergent tail.
    total = 1.0
    term = 1.0
    k = 1
    while True:
        nxt = term * (2 * k - 1) ** 2 / (8.0 * z * k)
        if nxt >= term:
            break
        term = nxt
        total += term
        if term <= total * 1e-17:
            break
        k += 1
    return total / math.sqrt(2.0 * math.pi * z)


def _check_i0_arg(z: float) -> float:
    z = float(z)
    if not math.isfinite(z) or z < 0.0:
        raise ValueError(f"argument must be finite and non-negative, got {z!r}")
    return z


def bessel_i0(z: float) -> float:
    """Modified Bessel function of the first kind, I0(z), for z >= 0.

    Power series up to z = 20, asymptotic expansion beyond; relative error
    is a few ulp throughout. Overflows to inf for z beyond roughly 713.
    """
    z = _check_i0_arg(z)
    if z <= _I0_SWITCHOVER:
        return _i0_series(z)
    return math.exp(z) * _i0_asymptotic_scaled(z)


def bessel_i0_scaled(z: float) -> float:
    """e^(-z) I0(z), finite for all z >= 0 (no overflow at large z)."""
    z = _check_i0_arg(z)
    if z <= _I0_SWITCHOVER:
        return math.exp(-z) * _i0_series(z)
    return _i0_asymptotic_scaled(z)
