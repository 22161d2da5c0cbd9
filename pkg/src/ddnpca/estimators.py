"""Subspace estimators: one-shot thresholded EVD and the deflation-based
cluster-by-cluster variant."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BasisError,
    DimensionError,
    EmptySubspaceError,
    InsufficientDataError,
    NoClusterError,
    NonTerminationError,
    OrderError,
    ParameterError,
)
from .linalg import empirical_covariance, sym_eig

_CONSUME_TOL = 1e-8  # orthonormality slack allowed on accumulated bases


@dataclass(frozen=True)
class EvdConfig:
    thresh: float  # eigenvalue retention threshold, > 0

    def __post_init__(self):
        if self.thresh <= 0:
            raise ParameterError(f"thresh must be positive, got {self.thresh}")


@dataclass(frozen=True)
class ClusterEvdConfig:
    alpha: int      # batch length per cluster
    g_hat: float    # within-cluster eigenvalue ratio cap
    thresh: float   # zero threshold for the stop test

    def __post_init__(self):
        if self.alpha < 1:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if self.g_hat < 1:
            raise ParameterError(f"g_hat must be >= 1, got {self.g_hat}")
        if self.thresh <= 0:
            raise ParameterError(f"thresh must be positive, got {self.thresh}")


@dataclass(frozen=True)
class ClusterEvdResult:
    P_hat: np.ndarray
    cluster_sizes: tuple[int, ...]
    vartheta_hat: int
    per_cluster_eigs: tuple[np.ndarray, ...]  # full spectrum of each deflated block

    def __post_init__(self):
        if sum(self.cluster_sizes) != self.P_hat.shape[1]:
            raise DimensionError("cluster sizes do not add up to the basis width")
        k = self.P_hat.shape[1]
        err = np.max(np.abs(self.P_hat.T @ self.P_hat - np.eye(k)))
        if err > _CONSUME_TOL:
            raise BasisError(f"estimated basis not orthonormal: max |P'P - I| = {err:.3e}")


def simple_evd(Y, cfg: EvdConfig):
    """Eigenvectors of the empirical covariance with eigenvalues strictly
    above cfg.thresh, ordered by descending eigenvalue."""
    C = empirical_covariance(Y)
    ed = sym_eig(C)
    count = int(np.count_nonzero(ed.eigenvalues > cfg.thresh))
    if count == 0:
        raise EmptySubspaceError(
            f"no eigenvalue above thresh={cfg.thresh} (largest is {ed.eigenvalues[0]:.3e})"
        )
    return ed.eigenvectors[:, :count]


def deflate(G_det, n: int | None = None) -> np.ndarray:
    """Projector onto the orthogonal complement of the detected directions:
    Psi = I - G G'.  An empty G (None or zero columns) gives the identity."""
    if G_det is None:
        if n is None:
            raise DimensionError("n is required when G_det is empty")
        return np.eye(n)
    G = np.asarray(G_det, dtype=float)
    if G.ndim != 2:
        raise DimensionError("G_det must be 2-D")
    n_rows, k = G.shape
    if k == 0:
        return np.eye(n_rows)
    err = np.max(np.abs(G.T @ G - np.eye(k)))
    if err > _CONSUME_TOL:
        raise BasisError(f"G_det not orthonormal: max |G'G - I| = {err:.3e}")
    return np.eye(n_rows) - G @ G.T


def detect_cluster(eigs, g_hat: float, thresh: float) -> tuple[int, bool]:
    """Width of the leading eigenvalue cluster of a non-increasing spectrum.

    Extends the cluster while the ratio of the leading eigenvalue to the
    candidate stays <= g_hat; r_hat is the largest such index.  The stop
    flag is set when the first excluded eigenvalue falls below thresh (a
    missing one counts as below).
    """
    lam = np.asarray(eigs, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise ParameterError("eigs must be a non-empty 1-D sequence")
    if not np.isfinite(lam).all():
        raise ParameterError("eigs must be finite")
    if np.any(np.diff(lam) > 0):
        raise OrderError("eigs must be sorted non-increasing")
    if g_hat < 1:
        raise ParameterError(f"g_hat must be >= 1, got {g_hat}")
    if lam[0] < thresh:
        raise NoClusterError(
            f"leading eigenvalue {lam[0]:.6e} is below thresh={thresh}"
        )
    r_hat = 1
    # lam may go negative from roundoff; the product form avoids dividing.
    while r_hat < lam.size and lam[0] <= g_hat * lam[r_hat]:
        r_hat += 1
    stop = r_hat == lam.size or lam[r_hat] < thresh
    return r_hat, stop


def cluster_evd(y_blocks, cfg: ClusterEvdConfig, max_clusters: int | None = None) -> ClusterEvdResult:
    """Cluster-by-cluster subspace estimation over a stream of n x alpha blocks.

    Each iteration deflates the directions found so far, eigendecomposes the
    deflated covariance of the next block, detects the leading cluster's
    width, and keeps that many eigenvectors.  The loop ends when the first
    eigenvalue past the detected cluster drops below cfg.thresh.

    max_clusters is a safety cap (defaults to the ambient dimension); hitting
    it raises NonTerminationError rather than looping on degenerate data.
    """
    if max_clusters is not None and max_clusters < 1:
        raise ParameterError("max_clusters must be positive")
    blocks = iter(y_blocks)
    G: np.ndarray | None = None
    sizes: list[int] = []
    spectra: list[np.ndarray] = []
    n = None
    cap = max_clusters
    k = 0
    while True:
        k += 1
        if cap is not None and k > cap:
            raise NonTerminationError(
                f"stop flag not reached within max_clusters={cap} blocks"
            )
        try:
            Y = np.asarray(next(blocks), dtype=float)
        except StopIteration:
            raise InsufficientDataError(
                f"stream ended before cluster {k}; consumed {k - 1} full blocks"
            ) from None
        if Y.ndim != 2:
            raise DimensionError("blocks must be 2-D arrays")
        if n is None:
            n = Y.shape[0]
            if cap is None:
                cap = n
        if Y.shape[0] != n:
            raise DimensionError(f"block {k} has {Y.shape[0]} rows, expected {n}")
        if Y.shape[1] < cfg.alpha:
            raise InsufficientDataError(
                f"block {k} has {Y.shape[1]} columns, expected a full {cfg.alpha}"
            )
        if Y.shape[1] != cfg.alpha:
            raise DimensionError(f"block {k} has {Y.shape[1]} columns, expected {cfg.alpha}")

        Psi = deflate(G, n)
        Mk = Psi @ empirical_covariance(Y) @ Psi
        ed = sym_eig((Mk + Mk.T) / 2.0)
        r_hat, stop = detect_cluster(ed.eigenvalues, cfg.g_hat, cfg.thresh)
        Gk = ed.eigenvectors[:, :r_hat]
        G = Gk if G is None else np.hstack([G, Gk])
        sizes.append(r_hat)
        spectra.append(ed.eigenvalues.copy())
        if stop:
            break
    return ClusterEvdResult(
        P_hat=G,
        cluster_sizes=tuple(sizes),
        vartheta_hat=len(sizes),
        per_cluster_eigs=tuple(spectra),
    )


def consumed_samples(result: ClusterEvdResult, cfg: ClusterEvdConfig) -> int:
    """Total columns the estimator drew from the stream."""
    return result.vartheta_hat * cfg.alpha
