"""Geodesic-flow domain adaptation (SGF sampling and the GFK kernel)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DataError, DimensionMismatchError, RankDeficiencyError
from .kernels import check_psd
from .manifold import GrassmannPoint, geodesic_point, log_map


@dataclass(frozen=True)
class DomainPair:
    X_s: GrassmannPoint
    X_t: GrassmannPoint
    source_features: np.ndarray
    source_labels: np.ndarray
    target_features: np.ndarray
    target_labels: np.ndarray | None = None

    def __post_init__(self):
        if (self.X_s.n, self.X_s.k) != (self.X_t.n, self.X_t.k):
            raise DimensionMismatchError("source and target subspaces differ in shape")
        n = self.X_s.n
        for name in ("source_features", "target_features"):
            F = np.asarray(getattr(self, name), dtype=float)
            if F.ndim != 2 or F.shape[1] != n:
                raise DimensionMismatchError(f"{name} must have {n} columns, got {F.shape}")
            object.__setattr__(self, name, F)
        object.__setattr__(self, "source_labels", np.asarray(self.source_labels, dtype=int))
        if len(self.source_labels) != len(self.source_features):
            raise DimensionMismatchError("source labels and features differ in length")
        if self.target_labels is not None:
            object.__setattr__(self, "target_labels", np.asarray(self.target_labels, dtype=int))

    @classmethod
    def from_features(cls, source, source_labels, target, d, target_labels=None):
        return cls(pca_subspace(source, d), pca_subspace(target, d), source, source_labels, target, target_labels)


def pca_subspace(features, d: int) -> GrassmannPoint:
    """Top-``d`` principal subspace of row-centered ``features`` (N x n)."""
    F = np.asarray(features, dtype=float)
    N, n = F.shape
    if N < 2:
        raise DataError("need at least two samples for PCA")
    if not 1 <= d <= n:
        raise DataError(f"subspace dimension d={d} must be in [1, {n}]")
    _, S, Vt = np.linalg.svd(F - F.mean(axis=0), full_matrices=True)
    if d > len(S) or S[d - 1] <= 1e-10 * S[0]:
        raise RankDeficiencyError(f"centered data has numerical rank below d={d}")
    return GrassmannPoint(Vt[:d].T.copy())


def sgf_sample(pair: DomainPair, ts: Sequence[float]) -> list[GrassmannPoint]:
    """Subspaces at times ``ts`` on the geodesic from source to target."""
    delta = log_map(pair.X_s, pair.X_t)
    return [geodesic_point(pair.X_s, delta, float(t)) for t in ts]


@dataclass(frozen=True)
class GfkMatrix:
    G: np.ndarray
    quadrature_nodes: int


def gfk_matrix(pair: DomainPair, nodes: int = 20) -> GfkMatrix:
    """Integral of ``Phi(t) Phi(t)^T`` over [0, 1] by Gauss-Legendre quadrature."""
    if nodes < 1:
        raise DataError("need at least one quadrature node")
    x, w = np.polynomial.legendre.leggauss(nodes)
    ts, ws = 0.5 * (x + 1.0), 0.5 * w
    G = np.zeros((pair.X_s.n, pair.X_s.n))
    for t, wt, P in zip(ts, ws, sgf_sample(pair, ts)):
        G += wt * (P.basis @ P.basis.T)
    G = 0.5 * (G + G.T)
    check_psd(G)
    return GfkMatrix(G, nodes)


@dataclass(frozen=True)
class NoAdapt:
    pass


@dataclass(frozen=True)
class Sgf:
    t: float


@dataclass(frozen=True)
class Gfk:
    nodes: int = 20


Method = Union[NoAdapt, Sgf, Gfk]


def nearest_neighbor(train, train_labels, query, metric: np.ndarray | None = None) -> np.ndarray:
    """1-NN labels under ``(x - y)^T M (x - y)`` (Euclidean when ``M`` is None)."""
    train = np.asarray(train, dtype=float)
    query = np.asarray(query, dtype=float)
    if metric is None:
        tq, qq = train, query
        cross = qq @ tq.T
        d2 = (qq * qq).sum(1)[:, None] + (tq * tq).sum(1)[None, :] - 2 * cross
    else:
        Gt, Gq = train @ metric, query @ metric
        d2 = (Gq * query).sum(1)[:, None] + (Gt * train).sum(1)[None, :] - 2 * Gq @ train.T
    return np.asarray(train_labels)[np.argmin(d2, axis=1)]


def adapt_predict(pair: DomainPair, method: Method) -> np.ndarray:
    Xs, Xt = pair.source_features, pair.target_features
    if isinstance(method, NoAdapt):
        return nearest_neighbor(Xs, pair.source_labels, Xt)
    if isinstance(method, Sgf):
        (P,) = sgf_sample(pair, [method.t])
        return nearest_neighbor(Xs @ P.basis, pair.source_labels, Xt @ P.basis)
    if isinstance(method, Gfk):
        G = gfk_matrix(pair, method.nodes).G
        return nearest_neighbor(Xs, pair.source_labels, Xt, metric=G)
    raise DataError(f"unknown adaptation method {method!r}")


def adapt_classify(pair: DomainPair, method: Method, rng=None) -> tuple[np.ndarray, float | None]:
    """Predict target labels; accuracy uses target labels only for scoring.

    ``rng`` is accepted for interface symmetry; every method here is
    deterministic.
    """
    pred = adapt_predict(pair, method)
    if pair.target_labels is None:
        return pred, None
    return pred, float(np.mean(pred == pair.target_labels))


def per_class_accuracy(pred, truth) -> dict[int, float]:
    truth = np.asarray(truth)
    return {int(c): float(np.mean(pred[truth == c] == c)) for c in np.unique(truth)}


def select_sgf_t(pair: DomainPair, grid: Sequence[float], rng: np.random.Generator) -> float:
    """Pick the SGF time by 2-fold cross-validation on the source domain only."""
    n = len(pair.source_labels)
    perm = rng.permutation(n)
    folds = (perm[: n // 2], perm[n // 2 :])
    best_t, best_acc = None, -1.0
    for t in grid:
        (P,) = sgf_sample(pair, [t])
        Z = pair.source_features @ P.basis
        correct = 0
        for a, b in (folds, folds[::-1]):
            pred = nearest_neighbor(Z[a], pair.source_labels[a], Z[b])
            correct += int(np.sum(pred == pair.source_labels[b]))
        acc = correct / n
        if acc > best_acc:
            best_t, best_acc = float(t), acc
    return best_t
