import numpy as np
import pytest

from pulseseq.linalg import (
    SingularMatrixError,
    check_unitary,
    embedded_rotation,
    gram_schmidt,
    hermitian_eigensystem,
    unitary_distance,
)

from conftest import DIPOLE_EIGENVALUES, random_unitary


class TestEmbeddedRotation:
    def test_identity_at_zero_angle(self):
        assert np.allclose(embedded_rotation(4, 2, 0.0, 1.3), np.eye(4))

    def test_half_pi_block(self):
        # phi = pi/2 puts the generator on the antisymmetric real part.
        u = embedded_rotation(2, 1, np.pi / 2, np.pi / 2)
        assert np.allclose(u, [[0.0, 1.0], [-1.0, 0.0]], atol=1e-15)

    def test_quarter_pi_block_values(self):
        u = embedded_rotation(3, 2, np.pi / 4, 0.0)
        s = np.sqrt(0.5)
        expected = np.array(
            [[1, 0, 0], [0, s, -1j * s], [0, -1j * s, s]], dtype=complex
        )
        assert np.allclose(u, expected, atol=1e-15)

    def test_inverse_property(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = rng.integers(2, 7)
            m = rng.integers(1, n)
            c = rng.uniform(-2 * np.pi, 2 * np.pi)
            phi = rng.uniform(-2 * np.pi, 2 * np.pi)
            prod = embedded_rotation(n, m, c, phi) @ embedded_rotation(n, m, -c, phi)
            assert np.linalg.norm(prod - np.eye(n)) <= 1e-12

    def test_periodic_in_angle_and_phase(self):
        for c, phi in [(0.7, -1.1), (2.0, 3.0)]:
            base = embedded_rotation(5, 3, c, phi)
            assert np.allclose(base, embedded_rotation(5, 3, c + 2 * np.pi, phi), atol=1e-12)
            assert np.allclose(base, embedded_rotation(5, 3, c, phi + 2 * np.pi), atol=1e-12)

    def test_always_unitary(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            u = embedded_rotation(6, int(rng.integers(1, 6)), rng.normal(), rng.normal())
            check_unitary(u)

    def test_transition_out_of_range(self):
        with pytest.raises(ValueError):
            embedded_rotation(4, 0, 1.0, 0.0)
        with pytest.raises(ValueError):
            embedded_rotation(4, 4, 1.0, 0.0)


class TestGramSchmidt:
    def test_orthonormal_columns(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
            q = gram_schmidt(a)
            assert np.linalg.norm(q.conj().T @ q - np.eye(5)) <= 1e-12

    def test_first_column_direction_preserved(self):
        rng = np.random.default_rng(6)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        q = gram_schmidt(a)
        v = a[:, 0] / np.linalg.norm(a[:, 0])
        assert np.allclose(q[:, 0], v, atol=1e-12)

    def test_leading_spans_preserved(self):
        # Positive-diagonal R means span(q[:, :k]) == span(a[:, :k]).
        rng = np.random.default_rng(7)
        a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        q = gram_schmidt(a)
        for k in range(1, 6):
            proj = q[:, :k] @ q[:, :k].conj().T
            assert np.linalg.norm(proj @ a[:, :k] - a[:, :k]) <= 1e-10

    def test_singular_input_names_column(self):
        a = np.eye(4, dtype=complex)
        a[:, 2] = a[:, 0] + a[:, 1]
        a[:, 3] = a[:, 0] - a[:, 1]  # column 4 dependent on 1..3 only after 3 fails
        a[:, 2] = 2.0 * a[:, 0]
        with pytest.raises(SingularMatrixError, match="column 3"):
            gram_schmidt(a)


class TestHermitianEigensystem:
    def test_reconstruction_residual(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            z = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
            a = (z + z.conj().T) / 2.0
            eig = hermitian_eigensystem(a)
            for j in range(6):
                r = a @ eig.vectors[:, j] - eig.values[j] * eig.vectors[:, j]
                assert np.linalg.norm(r) <= 1e-10

    def test_sorted_and_matches_reference(self):
        rng = np.random.default_rng(10)
        z = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
        a = (z + z.conj().T) / 2.0
        eig = hermitian_eigensystem(a)
        assert np.all(np.diff(eig.values) <= 1e-12)
        ref = np.sort(np.linalg.eigvalsh(a))[::-1]
        assert np.allclose(eig.values, ref, atol=1e-10)

    def test_vectors_unitary(self):
        rng = np.random.default_rng(12)
        z = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        eig = hermitian_eigensystem((z + z.conj().T) / 2.0)
        check_unitary(eig.vectors)

    def test_dipole_ladder_spectrum(self):
        # d_m = sqrt(m) tridiagonal coupling on four levels.
        a = np.zeros((4, 4), dtype=complex)
        for m in range(3):
            a[m, m + 1] = a[m + 1, m] = np.sqrt(m + 1.0)
        eig = hermitian_eigensystem(a)
        assert np.allclose(eig.values, DIPOLE_EIGENVALUES, atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            hermitian_eigensystem(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestUnitaryDistance:
    def test_exact_zero_and_symmetry(self):
        rng = np.random.default_rng(14)
        u1, u2 = random_unitary(rng, 4), random_unitary(rng, 4)
        assert unitary_distance(u1, u1, "exact") == 0.0
        assert unitary_distance(u1, u2, "exact") == pytest.approx(
            unitary_distance(u2, u1, "exact"), abs=1e-14
        )

    def test_mod_diagonal_phases_kills_column_phases(self):
        rng = np.random.default_rng(15)
        for _ in range(10):
            u = random_unitary(rng, 5)
            d = np.diag(np.exp(1j * rng.uniform(-np.pi, np.pi, 5)))
            assert unitary_distance(u @ d, u, "mod_diagonal_phases") <= 1e-12

    def test_mod_global_phase(self):
        rng = np.random.default_rng(16)
        u = random_unitary(rng, 4)
        assert unitary_distance(np.exp(0.7j) * u, u, "mod_global_phase") <= 1e-12
        assert unitary_distance(np.exp(0.7j) * u, u, "exact") > 0.1

    def test_triangle_inequality(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            a, b, c = (random_unitary(rng, 4) for _ in range(3))
            ab = unitary_distance(a, b, "exact")
            bc = unitary_distance(b, c, "exact")
            ac = unitary_distance(a, c, "exact")
            assert ac <= ab + bc + 1e-12

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="not unitary"):
            unitary_distance(np.ones((2, 2)), np.eye(2))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            unitary_distance(np.eye(2), np.eye(3))

    def test_unknown_mode(self):
        with pytest.raises(ValueError, match="mode"):
            unitary_distance(np.eye(2), np.eye(2), "nope")
