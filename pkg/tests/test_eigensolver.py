import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import isotropic_triangle, random_hermitian
from trimer_machines.eigensolver import diagonalize
from trimer_machines.errors import ConvergenceError, NotHermitianError
from trimer_machines.spin_model import MagneticField, build_hamiltonian


def check_contract(h, spec):
    v, lam = spec.eigenvectors, spec.eigenvalues
    norm = np.linalg.norm(h)
    assert np.all(np.diff(lam) >= 0)
    assert np.linalg.norm(v.conj().T @ v - np.eye(len(lam))) <= 1e-12
    assert np.linalg.norm(h @ v - v * lam) <= 1e-12 * (1 + norm)
    assert np.linalg.norm(v @ np.diag(lam) @ v.conj().T - h) <= 1e-11 * (1 + norm)
    assert abs(lam.sum() - np.trace(h).real) <= 1e-12 * (1 + norm)
    assert abs(np.sum(lam**2) - norm**2) <= 1e-11 * max(norm**2, 1e-300)


def test_zero_matrix():
    spec = diagonalize(np.zeros((8, 8)))
    np.testing.assert_array_equal(spec.eigenvalues, np.zeros(8))
    np.testing.assert_array_equal(spec.eigenvectors, np.eye(8))


def test_diagonal_matrix():
    spec = diagonalize(np.diag(np.arange(1.0, 9.0)))
    np.testing.assert_array_equal(spec.eigenvalues, np.arange(1.0, 9.0))
    np.testing.assert_array_equal(np.abs(spec.eigenvectors), np.eye(8))


def test_unsorted_diagonal_gives_permutation():
    d = np.array([3.0, -1.0, 7.0, 0.0, 2.0, 5.0, -4.0, 1.0])
    spec = diagonalize(np.diag(d))
    np.testing.assert_array_equal(spec.eigenvalues, np.sort(d))
    np.testing.assert_array_equal(spec.eigenvectors, np.eye(8)[:, np.argsort(d)])


def test_isotropic_triangle():
    h = build_hamiltonian(isotropic_triangle(4.0), MagneticField())
    spec = diagonalize(h)
    np.testing.assert_allclose(spec.eigenvalues, [-3.0] * 4 + [3.0] * 4, atol=1e-12)
    check_contract(h, spec)


@pytest.mark.parametrize("warm_start", [True, False])
def test_random_hermitian_contract(rng, warm_start):
    for _ in range(200):
        h = random_hermitian(rng)
        spec = diagonalize(h, warm_start=warm_start)
        check_contract(h, spec)
        np.testing.assert_allclose(
            spec.eigenvalues, np.linalg.eigvalsh(h), atol=1e-12 * (1 + np.linalg.norm(h))
        )


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-20, 20, allow_nan=False), min_size=3, max_size=3),
    st.floats(-10, 10, allow_nan=False),
    st.floats(-10, 10, allow_nan=False),
)
def test_embedded_2x2_block_matches_characteristic_roots(diag, re, im):
    a, d, fill = diag
    h = np.diag([a, d] + [fill] * 6).astype(complex)
    h[0, 1] = re + 1j * im
    h[1, 0] = re - 1j * im
    # lambda^2 - (a+d) lambda + (ad - |b|^2)
    roots = np.roots([1.0, -(a + d), a * d - (re**2 + im**2)]).real
    expected = np.sort(np.concatenate([roots, [fill] * 6]))
    spec = diagonalize(h)
    np.testing.assert_allclose(spec.eigenvalues, expected, atol=1e-10 * (1 + np.abs(h).max()))


def test_embedded_3x3_block_matches_characteristic_roots(rng):
    for _ in range(100):
        block = random_hermitian(rng, n=3, scale=rng.uniform(0.1, 10))
        h = np.zeros((8, 8), dtype=complex)
        h[2:5, 2:5] = block
        coeffs = np.poly(block).real  # characteristic polynomial coefficients
        roots = np.sort(np.roots(coeffs).real)
        expected = np.sort(np.concatenate([roots, np.zeros(5)]))
        np.testing.assert_allclose(diagonalize(h).eigenvalues, expected, atol=1e-10)


def test_pure_jacobi_matches_default(rng, cu3_as):
    h = build_hamiltonian(cu3_as, MagneticField(0, 0, 3.0))
    cold = diagonalize(h, warm_start=False)
    assert cold.sweeps > 1
    check_contract(h, cold)
    np.testing.assert_allclose(cold.eigenvalues, diagonalize(h).eigenvalues, atol=1e-12)


def test_deterministic(rng):
    h = random_hermitian(rng)
    a, b = diagonalize(h), diagonalize(h.copy())
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
    np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)


def test_degenerate_spectrum_deterministic(cu3_as):
    h = build_hamiltonian(cu3_as, MagneticField())
    a, b = diagonalize(h), diagonalize(h)
    np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)
    check_contract(h, a)


def test_non_hermitian_rejected(rng):
    h = random_hermitian(rng)
    h[0, 1] += 1e-3
    with pytest.raises(NotHermitianError):
        diagonalize(h)


def test_tiny_asymmetry_symmetrized(rng):
    h = random_hermitian(rng, scale=1.0)
    h[0, 1] += 1e-15
    spec = diagonalize(h)
    sym = (h + h.conj().T) / 2
    check_contract(sym, spec)


def test_convergence_budget_enforced(rng):
    with pytest.raises(ConvergenceError):
        diagonalize(random_hermitian(rng), max_sweeps=1, warm_start=False)


def test_non_square_rejected():
    with pytest.raises(NotHermitianError):
        diagonalize(np.zeros((3, 4)))
