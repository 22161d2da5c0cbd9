import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddnpca.errors import BasisError, DimensionError, SpectralGapError, SymmetryError
from ddnpca.linalg import (
    check_basis,
    empirical_covariance,
    read_matrix,
    sin_theta_bound,
    spectral_norm,
    subspace_error,
    sym_eig,
    top_eigenvectors,
    write_matrix,
)


def random_orthonormal(n, k, rng):
    Q, _ = np.linalg.qr(rng.standard_normal((n, k)))
    return Q


class TestSymEig:
    def test_identity(self):
        ed = sym_eig(np.eye(3))
        np.testing.assert_allclose(ed.eigenvalues, [1.0, 1.0, 1.0])

    def test_diagonal_sorting_and_permutation(self):
        ed = sym_eig(np.diag([2.0, 5.0, 1.0]))
        np.testing.assert_allclose(ed.eigenvalues, [5.0, 2.0, 1.0])
        # eigenvectors are signed identity columns in eigenvalue order
        expected = np.eye(3)[:, [1, 0, 2]]
        np.testing.assert_allclose(np.abs(ed.eigenvectors), expected, atol=1e-12)

    def test_reconstruction_residual_random(self):
        rng = np.random.default_rng(11)
        lam = np.sort(rng.uniform(-3.0, 7.0, size=8))[::-1]
        V = random_orthonormal(8, 8, rng)
        M = (V * lam) @ V.T
        M = (M + M.T) / 2
        ed = sym_eig(M)
        recon = (ed.eigenvectors * ed.eigenvalues) @ ed.eigenvectors.T
        scale = max(1.0, spectral_norm(M))
        assert spectral_norm(recon - M) <= 1e-9 * scale
        np.testing.assert_allclose(ed.eigenvalues, lam, atol=1e-9 * scale)

    def test_orthonormal_output(self):
        rng = np.random.default_rng(3)
        A = rng.standard_normal((12, 12))
        ed = sym_eig(A + A.T)
        gram = ed.eigenvectors.T @ ed.eigenvectors
        assert np.max(np.abs(gram - np.eye(12))) <= 1e-10

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(4)
        A = rng.standard_normal((6, 6))
        M = A + A.T
        ed = sym_eig(M)
        for j in range(6):
            v = ed.eigenvectors[:, j]
            assert v[np.argmax(np.abs(v))] > 0
        ed2 = sym_eig(M.copy())
        np.testing.assert_array_equal(ed.eigenvectors, ed2.eigenvectors)

    def test_rejects_nonsquare_and_asymmetric(self):
        with pytest.raises(DimensionError):
            sym_eig(np.ones((2, 3)))
        M = np.array([[1.0, 2.0], [0.0, 1.0]])
        with pytest.raises(SymmetryError):
            sym_eig(M)

    def test_weyl_perturbation(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(2, 15))
            A = rng.standard_normal((n, n))
            A = A + A.T
            H = rng.standard_normal((n, n))
            H = 0.1 * (H + H.T)
            wa = sym_eig(A).eigenvalues
            wb = sym_eig(A + H).eigenvalues
            assert np.max(np.abs(wa - wb)) <= spectral_norm(H) + 1e-12


class TestTopEigenvectors:
    def test_diagonal(self):
        B = top_eigenvectors(np.diag([3.0, 2.0, 1.0]), 2)
        assert subspace_error(B, np.eye(3)[:, :2]) <= 1e-12

    def test_degenerate_spectrum_orthonormal_only(self):
        B = top_eigenvectors(np.eye(3), 2)
        check_basis(B)
        # residual of the invariant-subspace equation for the identity
        assert spectral_norm(np.eye(3) @ B - B) <= 1e-12

    def test_top_one_matches_construction(self):
        rng = np.random.default_rng(21)
        V = random_orthonormal(3, 3, rng)
        M = (V * [10.0, 1.0, 0.1]) @ V.T
        B = top_eigenvectors((M + M.T) / 2, 1)
        assert subspace_error(B, V[:, :1]) <= 1e-9

    def test_r_out_of_range(self):
        with pytest.raises(DimensionError):
            top_eigenvectors(np.eye(3), 4)


class TestSubspaceError:
    def test_self_is_zero(self):
        rng = np.random.default_rng(7)
        P = random_orthonormal(9, 4, rng)
        assert subspace_error(P, P) <= 1e-12

    def test_orthogonal_subspaces(self):
        e = np.eye(3)
        assert subspace_error(e[:, :1], e[:, 1:2]) == 1.0

    def test_45_degrees(self):
        q = np.array([[1.0], [1.0], [0.0]]) / np.sqrt(2.0)
        e1 = np.eye(3)[:, :1]
        assert subspace_error(q, e1) == pytest.approx(1 / np.sqrt(2), abs=1e-12)

    def test_row_mismatch(self):
        with pytest.raises(DimensionError):
            subspace_error(np.eye(3)[:, :1], np.eye(4)[:, :1])

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_rotation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 10))
        k1 = int(rng.integers(1, n + 1))
        k2 = int(rng.integers(1, n + 1))
        P1 = random_orthonormal(n, k1, rng)
        P2 = random_orthonormal(n, k2, rng)
        R1 = random_orthonormal(k1, k1, rng)
        R2 = random_orthonormal(k2, k2, rng)
        base = subspace_error(P1, P2)
        assert abs(subspace_error(P1 @ R1, P2 @ R2) - base) <= 1e-10

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_symmetric_for_equal_rank(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 12))
        k = int(rng.integers(1, n + 1))
        P1 = random_orthonormal(n, k, rng)
        P2 = random_orthonormal(n, k, rng)
        assert abs(subspace_error(P1, P2) - subspace_error(P2, P1)) <= 1e-9


class TestSpectralNorm:
    def test_diagonal_with_negative(self):
        assert spectral_norm(np.diag([3.0, -4.0])) == pytest.approx(4.0, rel=1e-12)

    def test_zero(self):
        assert spectral_norm(np.zeros((4, 2))) == 0.0

    def test_rank_one(self):
        rng = np.random.default_rng(13)
        u = rng.standard_normal(6)
        u *= 2.0 / np.linalg.norm(u)
        v = rng.standard_normal(4)
        v *= 3.0 / np.linalg.norm(v)
        assert spectral_norm(np.outer(u, v)) == pytest.approx(6.0, rel=1e-9)


class TestEmpiricalCovariance:
    def test_single_column(self):
        e1 = np.eye(3)[:, :1]
        np.testing.assert_allclose(empirical_covariance(e1), np.outer(e1, e1))

    def test_averaging_opposite_columns(self):
        v = np.array([1.0, -2.0, 0.5])
        Y = np.column_stack([v, -v])
        np.testing.assert_allclose(empirical_covariance(Y), np.outer(v, v))

    def test_law_of_large_numbers(self):
        rng = np.random.default_rng(17)
        lam = np.array([4.0, 2.0, 1.0])
        A = (2.0 * rng.random((3, 10_000)) - 1.0) * np.sqrt(3.0 * lam)[:, None]
        w = sym_eig(empirical_covariance(A)).eigenvalues
        assert np.all(np.abs(w - lam) <= 0.05 * lam)

    def test_empty_rejected(self):
        with pytest.raises(DimensionError):
            empirical_covariance(np.zeros((3, 0)))


class TestSinThetaBound:
    def test_no_perturbation(self):
        assert sin_theta_bound(1.0, 0.0, 0.0) == 0.0

    def test_direct_formula(self):
        assert sin_theta_bound(1.0, 0.2, 0.4) == pytest.approx(1.0, rel=1e-12)

    def test_gap_error(self):
        with pytest.raises(SpectralGapError):
            sin_theta_bound(1.0, 0.5, 0.6)

    def test_oracle_spot_sweep(self):
        # measured rotation of the top eigenspace never exceeds the bound
        rng = np.random.default_rng(23)
        checked = 0
        for _ in range(60):
            n = int(rng.integers(3, 21))
            r = int(rng.integers(1, n))
            Q = random_orthonormal(n, n, rng)
            lam = np.concatenate([
                np.sort(rng.uniform(1.5, 2.5, r))[::-1],
                np.sort(rng.uniform(0.0, 0.5, n - r))[::-1],
            ])
            A = (Q * lam) @ Q.T
            A = (A + A.T) / 2
            B = rng.standard_normal((n, n))
            H = 0.15 * (B + B.T) / (2 * np.sqrt(n))
            try:
                b = sin_theta_bound(lam[r - 1], lam[r], spectral_norm(H))
            except SpectralGapError:
                continue
            checked += 1
            measured = subspace_error(top_eigenvectors(A + H, r), Q[:, :r])
            assert measured <= b + 1e-9
        assert checked >= 30


class TestMatrixIO:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(29)
        M = rng.standard_normal((7, 4))
        M[0, 0] = 1.0 / 3.0
        M[1, 1] = 1e-300
        M[2, 2] = -0.1
        M[3, 3] = 0.0
        path = tmp_path / "m.txt"
        write_matrix(path, M)
        back = read_matrix(path)
        np.testing.assert_array_equal(back, M)
        path2 = tmp_path / "m2.txt"
        write_matrix(path2, back)
        assert path.read_bytes() == path2.read_bytes()

    def test_malformed_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 2\n1.0 2.0\n3.0\n")
        with pytest.raises(DimensionError):
            read_matrix(path)


class TestCheckBasis:
    def test_accepts_orthonormal(self):
        rng = np.random.default_rng(31)
        check_basis(random_orthonormal(8, 3, rng))

    def test_rejects_skewed(self):
        with pytest.raises(BasisError):
            check_basis(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_rejects_wide(self):
        with pytest.raises(BasisError):
            check_basis(np.ones((2, 3)))
