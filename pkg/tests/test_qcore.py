import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwitness import qcore


def _random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (z + z.conj().T) / 2


# ---------------------------------------------------------------------------
# hermitian_eig
# ---------------------------------------------------------------------------


def test_eig_identity():
    eig = qcore.hermitian_eig(np.eye(3))
    assert np.allclose(eig.eigenvalues, [1.0, 1.0, 1.0])


def test_eig_pauli_z():
    eig = qcore.hermitian_eig(np.diag([1.0, -1.0]))
    assert np.allclose(eig.eigenvalues, [-1.0, 1.0])


def _char_poly_roots_3x3(a):
    """Roots of det(A - x) for a 3x3 Hermitian matrix, no eigensolver.

    det(A - x) = -x^3 + tr(A) x^2 - (sum of principal 2x2 minors) x + det(A).
    """
    tr = a[0, 0] + a[1, 1] + a[2, 2]
    minors = (
        a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]
        + a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
        + a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    )
    det = (
        a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
        - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
        + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
    )
    roots = np.roots([-1.0, tr.real, -minors.real, det.real])
    return np.sort(roots.real)


def test_eig_jx_spin1_against_characteristic_polynomial():
    jx, _, _ = qcore.spin_operators(1)
    expected = _char_poly_roots_3x3(jx)
    eig = qcore.hermitian_eig(jx)
    assert np.allclose(expected, [-1.0, 0.0, 1.0], atol=1e-9)
    assert np.allclose(eig.eigenvalues, expected, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_eig_reconstruction_and_orthonormality(seed, n):
    a = _random_hermitian(n, seed)
    eig = qcore.hermitian_eig(a)
    v = eig.eigenvectors
    rebuilt = (v * eig.eigenvalues) @ v.conj().T
    one_norm = np.abs(a).sum(axis=0).max()
    assert np.abs(rebuilt - a).max() <= 1e-12 * max(one_norm, 1.0)
    assert np.abs(v.conj().T @ v - np.eye(n)).max() <= 1e-12
    assert np.all(np.diff(eig.eigenvalues) >= 0)


def test_eig_deterministic():
    a = _random_hermitian(6, 123)
    e1 = qcore.hermitian_eig(a)
    e2 = qcore.hermitian_eig(a)
    assert np.array_equal(e1.eigenvalues, e2.eigenvalues)
    assert np.array_equal(e1.eigenvectors, e2.eigenvectors)


def test_eig_rejects_non_square():
    with pytest.raises(ValueError, match="square"):
        qcore.hermitian_eig(np.zeros((2, 3)))


def test_eig_rejects_non_hermitian_naming_magnitude():
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError, match="1.000e"):
        qcore.hermitian_eig(a)


def test_eig_rejects_non_finite():
    a = np.array([[np.nan, 0.0], [0.0, 0.0]])
    with pytest.raises(ValueError, match="finite"):
        qcore.hermitian_eig(a)


# ---------------------------------------------------------------------------
# unitary_evolution
# ---------------------------------------------------------------------------


def test_evolution_zero_time_is_identity():
    h = _random_hermitian(5, 7)
    assert np.abs(qcore.unitary_evolution(h, 0.0) - np.eye(5)).max() <= 1e-12


def _series_expm(m, terms=60):
    out = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ m / k
        out = out + term
    return out


def test_evolution_matches_series_for_pi_rotation():
    # exp(-i pi Jx) for j=1/2 equals -i sigma_x
    jx, _, _ = qcore.spin_operators(0.5)
    u = qcore.unitary_evolution(jx, math.pi)
    oracle = _series_expm(-1j * math.pi * jx)
    sigma_x = np.array([[0, 1], [1, 0]], dtype=complex)
    assert np.abs(u - oracle).max() <= 1e-13
    assert np.abs(u - (-1j) * sigma_x).max() <= 1e-12


@settings(max_examples=30, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.floats(-5.0, 5.0),
    st.floats(-5.0, 5.0),
)
def test_evolution_group_law(seed, t1, t2):
    h = _random_hermitian(4, seed)
    u1 = qcore.unitary_evolution(h, t1)
    u2 = qcore.unitary_evolution(h, t2)
    u12 = qcore.unitary_evolution(h, t1 + t2)
    assert np.abs(u1 @ u2 - u12).max() <= 1e-12


def test_evolution_unitary_at_large_action():
    h = _random_hermitian(6, 77)
    h = h / np.linalg.norm(h, 2)
    u = qcore.unitary_evolution(h, 1e3)
    assert np.abs(u.conj().T @ u - np.eye(6)).max() <= 1e-12


def test_evolution_rejects_non_finite_time():
    with pytest.raises(ValueError, match="finite"):
        qcore.unitary_evolution(np.eye(2), math.inf)


# ---------------------------------------------------------------------------
# spin_operators
# ---------------------------------------------------------------------------


def test_spin_half_gives_half_paulis():
    jx, jy, jz = qcore.spin_operators(0.5)
    assert np.allclose(jx, np.array([[0, 1], [1, 0]]) / 2)
    assert np.allclose(jy, np.array([[0, -1j], [1j, 0]]) / 2)
    assert np.allclose(jz, np.array([[1, 0], [0, -1]]) / 2)


def test_spin_one_jz_diagonal():
    _, _, jz = qcore.spin_operators(1)
    assert np.allclose(jz, np.diag([1.0, 0.0, -1.0]))


def test_spin_one_ladder_elements():
    # sqrt(j(j+1) - m(m+1))/2 evaluated directly for j=1
    jx, _, _ = qcore.spin_operators(1)
    expected = math.sqrt(1 * 2 - 0 * 1) / 2
    assert expected == pytest.approx(1 / math.sqrt(2))
    assert jx[0, 1] == pytest.approx(expected)
    assert jx[1, 2] == pytest.approx(expected)
    assert jx[1, 0] == pytest.approx(expected)


@pytest.mark.parametrize("j", [0.5, 1.0, 1.5, 2.5, 7.0])
def test_spin_commutators_and_casimir(j):
    jx, jy, jz = qcore.spin_operators(j)
    dim = round(2 * j) + 1
    for a, b, c in ((jx, jy, jz), (jy, jz, jx), (jz, jx, jy)):
        assert np.abs(a @ b - b @ a - 1j * c).max() <= 1e-12
    casimir = jx @ jx + jy @ jy + jz @ jz
    assert np.abs(casimir - j * (j + 1) * np.eye(dim)).max() <= 1e-12


@pytest.mark.parametrize("j", [0.3, -1.0, math.nan])
def test_spin_rejects_bad_lengths(j):
    with pytest.raises(ValueError, match="half-integer"):
        qcore.spin_operators(j)


# ---------------------------------------------------------------------------
# displacement_operator
# ---------------------------------------------------------------------------


def test_displacement_zero_is_identity():
    assert np.abs(qcore.displacement_operator(0.0, 16) - np.eye(16)).max() <= 1e-12


def test_displacement_first_column_closed_form():
    n = 64
    d = qcore.displacement_operator(1.0, n)
    oracle = np.array(
        [math.exp(-0.5) / math.sqrt(math.factorial(k)) for k in range(n)]
    )
    assert np.abs(d[:, 0] - oracle).max() < 1e-10


def test_displacement_inverse_on_lower_half():
    n = 32
    product = qcore.displacement_operator(1.3, n) @ qcore.displacement_operator(-1.3, n)
    half = n // 2
    assert np.abs(product[:half, :half] - np.eye(half)).max() <= 1e-8


def test_displacement_adjoint_is_negated_argument():
    alpha = 0.7 - 0.4j
    d = qcore.displacement_operator(alpha, 24)
    d_neg = qcore.displacement_operator(-alpha, 24)
    assert np.abs(d.conj().T - d_neg).max() <= 1e-12


def test_displacement_rejects_small_cutoff():
    with pytest.raises(ValueError, match="at least 2"):
        qcore.displacement_operator(1.0, 1)


# ---------------------------------------------------------------------------
# bessel_i0
# ---------------------------------------------------------------------------


def _i0_fraction_series(z_num, z_den, terms=60):
    """Exact rational truncation of sum_k (z^2/4)^k / (k!)^2."""
    x = Fraction(z_num, z_den) ** 2 / 4
    total = Fraction(1)
    term = Fraction(1)
    for k in range(1, terms):
        term *= x / (k * k)
        total += term
    return float(total)


def test_i0_at_zero():
    assert qcore.bessel_i0(0.0) == 1.0


def test_i0_matches_exact_series_at_two():
    oracle = _i0_fraction_series(2, 1)
    assert qcore.bessel_i0(2.0) == pytest.approx(oracle, rel=1e-14)


@pytest.mark.parametrize(
    "z", [1e-8, 0.1, 1.0, 5.0, 19.0, 19.999, 20.0, 20.001, 21.0, 50.0, 72.0, 300.0]
)
def test_i0_reference_accuracy(z):
    mpmath.mp.dps = 40
    ref = float(mpmath.besseli(0, z))
    assert qcore.bessel_i0(z) == pytest.approx(ref, rel=1e-12)
    assert qcore.bessel_i0_scaled(z) == pytest.approx(
        float(mpmath.besseli(0, z) * mpmath.exp(-z)), rel=1e-12
    )


def test_i0_asymptotic_form_at_large_argument():
    z = 700.0
    ratio = qcore.bessel_i0(z) * math.sqrt(2 * math.pi * z) * math.exp(-z)
    assert abs(ratio - 1.0) < 1e-3


@pytest.mark.parametrize("z", [-1.0, math.nan, math.inf])
def test_i0_rejects_bad_arguments(z):
    with pytest.raises(ValueError):
        qcore.bessel_i0(z)
