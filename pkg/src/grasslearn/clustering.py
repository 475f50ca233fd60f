"""Spectral clustering, sparse spectral clustering on G(N, k), Grassmann k-means."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist
from sklearn.cluster import KMeans

from .errors import ClusteringDegeneracyError, DataError
from .manifold import GrassmannPoint, principal_angles, distance_from_angles, Metric
from .numerics import sym_eig
from .optim import OptimConfig, minimize


class LaplacianKind(enum.Enum):
    UNNORMALIZED = "unnormalized"
    NORMALIZED = "normalized"


def affinity(vectors, sigma: float) -> np.ndarray:
    """Gaussian affinity ``exp(-|x_i - x_j|^2 / (2 sigma^2))`` with zero diagonal."""
    X = np.asarray(vectors, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DataError("affinity needs an N x d array with N >= 2")
    if not sigma > 0:
        raise DataError(f"sigma must be positive, got {sigma}")
    W = np.exp(-cdist(X, X, "sqeuclidean") / (2.0 * sigma**2))
    np.fill_diagonal(W, 0.0)
    return W


def laplacian(W, kind=LaplacianKind.UNNORMALIZED) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    kind = LaplacianKind(kind) if not isinstance(kind, LaplacianKind) else kind
    deg = W.sum(axis=1)
    if kind is LaplacianKind.UNNORMALIZED:
        return np.diag(deg) - W
    with np.errstate(divide="ignore"):
        dinv = np.where(deg > 0, 1.0 / np.sqrt(deg), 0.0)
    L = np.eye(len(W)) - dinv[:, None] * W * dinv[None, :]
    return 0.5 * (L + L.T)


def spectral_embed(L, k: int) -> np.ndarray:
    """Eigenvectors of the ``k`` smallest eigenvalues of ``L``, as columns."""
    L = np.asarray(L, dtype=float)
    if not 1 <= k < L.shape[0]:
        raise DataError(f"need 1 <= k < N, got k={k}, N={L.shape[0]}")
    _, V = sym_eig(L)
    return V[:, :k]


@dataclass(frozen=True)
class SscConfig:
    k: int
    beta: float = 0.01
    mu: float = 1e-3
    sigma: float = 1.6
    optim: OptimConfig = field(default_factory=OptimConfig)
    normalize_rows: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise DataError("k must be positive")
        if self.beta < 0 or not self.mu > 0 or not self.sigma > 0:
            raise DataError(f"need beta >= 0, mu > 0, sigma > 0; got {self}")


@dataclass(frozen=True)
class SscObjective:
    """``<U U^T, L> + beta * sum_ij h_mu((U U^T)_ij)`` with ``h_mu(x) = sqrt(x^2 + mu^2) - mu``."""

    L: np.ndarray
    beta: float
    mu: float

    def value(self, X):
        U = X.basis
        P = U @ U.T
        smooth_l1 = np.sum(np.sqrt(P * P + self.mu**2) - self.mu)
        return float(np.sum(self.L * P) + self.beta * smooth_l1)

    def euclidean_grad(self, X):
        U = X.basis
        P = U @ U.T
        H = P / np.sqrt(P * P + self.mu**2)
        return 2.0 * (self.L @ U) + 2.0 * self.beta * (H @ U)


def sparse_spectral(L, cfg: SscConfig) -> GrassmannPoint:
    """Minimize the smoothed sparse spectral objective from the spectral embedding."""
    init = GrassmannPoint(spectral_embed(L, cfg.k))
    return minimize(SscObjective(np.asarray(L, dtype=float), cfg.beta, cfg.mu), init, cfg.optim).minimizer


def cluster_rows(U, k: int, normalize: bool = True, rng: np.random.Generator | None = None) -> np.ndarray:
    """k-means (10 restarts, 100 Lloyd iterations) on the rows of ``U``."""
    U = U.basis if isinstance(U, GrassmannPoint) else np.asarray(U, dtype=float)
    Z = U
    if normalize:
        norms = np.linalg.norm(U, axis=1, keepdims=True)
        Z = np.divide(U, norms, out=np.zeros_like(U), where=norms > 0)
    distinct = np.unique(np.round(Z, 12), axis=0).shape[0]
    if distinct < k:
        raise ClusteringDegeneracyError(f"only {distinct} distinct rows for k={k} clusters")
    seed = None if rng is None else int(rng.integers(2**31 - 1))
    km = KMeans(n_clusters=k, n_init=10, max_iter=100, random_state=seed)
    return km.fit_predict(Z)


def clustering_accuracy(truth, pred) -> float:
    """Fraction correct under the best one-to-one matching of cluster ids."""
    truth = np.asarray(truth)
    pred = np.asarray(pred)
    t_ids, t = np.unique(truth, return_inverse=True)
    p_ids, p = np.unique(pred, return_inverse=True)
    counts = np.zeros((len(p_ids), len(t_ids)), dtype=int)
    np.add.at(counts, (p, t), 1)
    rows, cols = linear_sum_assignment(-counts)
    return counts[rows, cols].sum() / len(truth)


# --- Grassmann k-means ------------------------------------------------------


def _chordal_to_centers(points, centers) -> np.ndarray:
    D = np.empty((len(points), len(centers)))
    for i, X in enumerate(points):
        for j, Cj in enumerate(centers):
            D[i, j] = distance_from_angles(Metric.CHORDAL, principal_angles(X, Cj).angles)
    return D


def chordal_mean(points: Sequence[GrassmannPoint]) -> GrassmannPoint:
    """Span of the top-k eigenvectors of the summed projectors."""
    k = points[0].k
    S = sum(P.basis @ P.basis.T for P in points)
    _, V = sym_eig(S)
    return GrassmannPoint(V[:, ::-1][:, :k].copy())


@dataclass
class KMeansResult:
    centers: list[GrassmannPoint]
    labels: np.ndarray
    objective: list[float]


def grassmann_kmeans(points: Sequence[GrassmannPoint], K: int, iters: int = 100, rng=None) -> KMeansResult:
    """Lloyd iterations with chordal assignment and chordal-mean centers.

    Seeding is k-means++ under the squared chordal distance. A cluster that
    goes empty is re-seeded with the point farthest from its own center.
    ``objective`` records the sum of squared chordal distances after each
    assignment step.
    """
    points = list(points)
    N = len(points)
    if not 1 <= K <= N:
        raise DataError(f"need 1 <= K <= #points, got K={K}, N={N}")
    rng = rng if rng is not None else np.random.default_rng()

    idx = [int(rng.integers(N))]
    d2 = _chordal_to_centers(points, [points[idx[0]]])[:, 0] ** 2
    while len(idx) < K:
        if d2.sum() > 0:
            i = int(rng.choice(N, p=d2 / d2.sum()))
        else:
            i = int(rng.choice(np.setdiff1d(np.arange(N), idx)))
        idx.append(i)
        d2 = np.minimum(d2, _chordal_to_centers(points, [points[i]])[:, 0] ** 2)
    centers = [points[i] for i in idx]

    labels = None
    history = []
    for _ in range(iters):
        D = _chordal_to_centers(points, centers)
        new = np.argmin(D, axis=1)
        for c in range(K):
            if not np.any(new == c):
                far = int(np.argmax(D[np.arange(N), new]))
                new[far] = c
        history.append(float(np.sum(D[np.arange(N), new] ** 2)))
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = [chordal_mean([points[i] for i in np.flatnonzero(labels == c)]) for c in range(K)]
    return KMeansResult(centers, labels, history)
