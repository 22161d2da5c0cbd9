"""Dense symmetric eigendecomposition, basis utilities, and the subspace-error metric.

Matrices are plain ``numpy.ndarray`` objects.  A "basis matrix" is a tall
matrix with orthonormal columns; ``check_basis`` enforces the convention.
All functions are pure and never mutate their arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BasisError, DimensionError, SpectralGapError, SymmetryError

BASIS_TOL = 1e-10


def _as_matrix(M, name: str = "matrix") -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={A.ndim}")
    if not np.isfinite(A).all():
        raise DimensionError(f"{name} contains non-finite entries")
    return A


def check_basis(Q, tol: float = BASIS_TOL, name: str = "basis") -> np.ndarray:
    """Validate that Q has orthonormal columns within `tol` (max-norm)."""
    Q = _as_matrix(Q, name)
    n, k = Q.shape
    if k > n:
        raise BasisError(f"{name} is {n}x{k}; cannot have more columns than rows")
    if k > 0:
        gram = Q.T @ Q
        err = np.max(np.abs(gram - np.eye(k)))
        if err > tol:
            raise BasisError(f"{name} columns not orthonormal: max |Q'Q - I| = {err:.3e} > {tol:.1e}")
    return Q


@dataclass(frozen=True)
class EigenDecomposition:
    """Full symmetric eigendecomposition, eigenvalues sorted non-increasing."""

    eigenvalues: np.ndarray   # shape (n,), descending
    eigenvectors: np.ndarray  # shape (n, n), column i pairs with eigenvalues[i]


def _fix_signs(V: np.ndarray) -> np.ndarray:
    # Deterministic sign convention: the largest-magnitude entry of each
    # column is positive; np.argmax resolves ties at the lowest index.
    V = V.copy()
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0.0] = 1.0
    return V * signs


def sym_eig(M) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    The input must be square and symmetric within 1e-10 relative tolerance;
    it is symmetrized before factorization so the reconstruction residual is
    controlled by the solver, not the input's asymmetry.
    """
    M = _as_matrix(M)
    n, m = M.shape
    if n != m:
        raise DimensionError(f"expected a square matrix, got {n}x{m}")
    scale = max(1.0, np.max(np.abs(M))) if M.size else 1.0
    asym = np.max(np.abs(M - M.T)) if M.size else 0.0
    if asym > 1e-10 * scale:
        raise SymmetryError(f"matrix not symmetric: max |M - M'| = {asym:.3e} (scale {scale:.3e})")
    S = (M + M.T) / 2.0
    w, V = np.linalg.eigh(S)
    order = np.arange(n - 1, -1, -1)
    return EigenDecomposition(eigenvalues=w[order], eigenvectors=_fix_signs(V[:, order]))


def top_eigenvectors(M, r: int) -> np.ndarray:
    """Basis matrix for the span of the r largest-eigenvalue eigenvectors."""
    M = _as_matrix(M)
    n = M.shape[0]
    if not 1 <= r <= n:
        raise DimensionError(f"r={r} out of range for a {n}x{n} matrix")
    return sym_eig(M).eigenvectors[:, :r]


def spectral_norm(M) -> float:
    """Largest singular value."""
    M = _as_matrix(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def subspace_error(Phat, P) -> float:
    """sin of the largest principal angle from range(P) into range(Phat).

    Computed as the spectral norm of (I - Phat Phat') P and clamped to [0, 1]
    against roundoff.  Asymmetric when the column counts differ.  Inputs are
    validated at 1e-8 (accumulated bases concatenated block by block are
    allowed that much drift); freshly factorized bases are far tighter.
    """
    Phat = check_basis(Phat, tol=1e-8, name="Phat")
    P = check_basis(P, tol=1e-8, name="P")
    if Phat.shape[0] != P.shape[0]:
        raise DimensionError(f"row dimensions differ: {Phat.shape[0]} vs {P.shape[0]}")
    R = P - Phat @ (Phat.T @ P)
    return min(1.0, max(0.0, spectral_norm(R)))


def empirical_covariance(Y) -> np.ndarray:
    """(1/alpha) * sum_t y_t y_t' over the columns of Y."""
    Y = _as_matrix(Y, "Y")
    n, alpha = Y.shape
    if alpha < 1:
        raise DimensionError("Y must have at least one column")
    C = (Y @ Y.T) / alpha
    return (C + C.T) / 2.0


def sin_theta_bound(lambda_min_a: float, lambda_max_aperp: float, h_norm: float) -> float:
    """Perturbation bound ||H|| / (lmin(A) - lmax(A_perp) - ||H||).

    Raises SpectralGapError when the denominator is not strictly positive,
    i.e. the bound is inapplicable.
    """
    if h_norm < 0:
        raise DimensionError("h_norm must be non-negative")
    denom = lambda_min_a - lambda_max_aperp - h_norm
    if denom <= 0.0:
        raise SpectralGapError(
            f"gap {lambda_min_a} - {lambda_max_aperp} - {h_norm} = {denom} is not positive"
        )
    return h_norm / denom


def write_matrix(path, M) -> None:
    """Write a matrix as text: 'rows cols' header then one row per line.

    Entries use 17 significant digits so that write/read round-trips are
    bit-exact for IEEE doubles.
    """
    M = _as_matrix(M)
    rows, cols = M.shape
    with open(path, "w") as fh:
        fh.write(f"{rows} {cols}\n")
        for i in range(rows):
            fh.write(" ".join(format(x, ".17g") for x in M[i]) + "\n")


def read_matrix(path) -> np.ndarray:
    """Read a matrix written by write_matrix."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise DimensionError(f"{path}: malformed header {header!r}")
        rows, cols = int(header[0]), int(header[1])
        out = np.empty((rows, cols), dtype=float)
        for i in range(rows):
            parts = fh.readline().split()
            if len(parts) != cols:
                raise DimensionError(f"{path}: row {i} has {len(parts)} entries, expected {cols}")
            out[i] = [float(p) for p in parts]
    return out
