"""Grassmann discriminant analysis: kernel LDA on subspace data."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DataError, DimensionMismatchError, NumericalError
from .kernels import KernelSpec, cross_gram, gram
from .manifold import GrassmannPoint
from .numerics import sym_eig


class RankError(NumericalError):
    """Requested more discriminant directions than the between-class rank allows."""


@dataclass(frozen=True)
class LabeledGrassmannSet:
    points: tuple
    labels: np.ndarray

    def __post_init__(self):
        points = tuple(self.points)
        labels = np.asarray(self.labels, dtype=int)
        if len(points) != labels.shape[0]:
            raise DimensionMismatchError(f"{len(points)} points but {labels.shape[0]} labels")
        if len(points) == 0:
            raise DataError("empty dataset")
        if labels.min() < 0:
            raise DataError("labels must be nonnegative class ids")
        C = int(labels.max()) + 1
        missing = sorted(set(range(C)) - set(labels.tolist()))
        if missing:
            raise DataError(f"classes {missing} have no samples")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def N(self) -> int:
        return len(self.points)

    @property
    def C(self) -> int:
        return int(self.labels.max()) + 1

    @property
    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.C)

    @cached_property
    def class_indices(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.labels == c) for c in range(self.C)]

    def subset(self, idx) -> "LabeledGrassmannSet":
        idx = np.asarray(idx)
        return LabeledGrassmannSet(tuple(self.points[i] for i in idx), self.labels[idx])


@dataclass(frozen=True)
class GdaModel:
    K: np.ndarray
    A: np.ndarray
    epsilon: float
    labels: np.ndarray
    class_means: np.ndarray
    quotients: np.ndarray
    spec: KernelSpec | None = None

    @property
    def n_components(self) -> int:
        return self.A.shape[1]

    def to_json(self) -> str:
        return json.dumps(
            {
                "K": self.K.tolist(),
                "A": self.A.tolist(),
                "epsilon": self.epsilon,
                "labels": self.labels.tolist(),
                "class_means": self.class_means.tolist(),
                "quotients": self.quotients.tolist(),
                "kernel": self.spec.to_dict() if self.spec else None,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "GdaModel":
        d = json.loads(text)
        return cls(
            K=np.array(d["K"], dtype=float),
            A=np.array(d["A"], dtype=float).reshape(len(d["K"]), -1),
            epsilon=float(d["epsilon"]),
            labels=np.array(d["labels"], dtype=int),
            class_means=np.array(d["class_means"], dtype=float).reshape(-1, len(d["quotients"])),
            quotients=np.array(d["quotients"], dtype=float),
            spec=KernelSpec.from_dict(d["kernel"]) if d.get("kernel") else None,
        )


def class_averaging_matrix(labels) -> np.ndarray:
    """``V`` with ``V_ij = 1/N_c`` when i and j are both in class c, else 0.

    Built from index sets, so the rows need not be sorted by class.
    """
    labels = np.asarray(labels)
    same = labels[:, None] == labels[None, :]
    counts = np.bincount(labels)
    return same / counts[labels][:, None]


def scatter_matrices(K: np.ndarray, labels) -> tuple[np.ndarray, np.ndarray]:
    """Kernel within-class ``K (I - V) K`` and between-class ``K (V - 1/N) K``."""
    N = K.shape[0]
    V = class_averaging_matrix(labels)
    S_w = K @ (np.eye(N) - V) @ K
    S_b = K @ (V - 1.0 / N) @ K
    return 0.5 * (S_w + S_w.T), 0.5 * (S_b + S_b.T)


def rayleigh_quotient(S_b, S_w, epsilon, alpha) -> float:
    alpha = np.asarray(alpha, dtype=float)
    den = alpha @ S_w @ alpha + epsilon**2 * (alpha @ alpha)
    return float(alpha @ S_b @ alpha / den)


def default_epsilon(K: np.ndarray) -> float:
    return 1e-4 * np.trace(K) / K.shape[0]


def gda_fit_gram(K, labels, epsilon: float | None = None, m: int | None = None, spec=None) -> GdaModel:
    """Fit from a precomputed training Gram matrix."""
    K = np.asarray(K, dtype=float)
    labels = np.asarray(labels, dtype=int)
    N = K.shape[0]
    if K.shape != (N, N) or labels.shape != (N,):
        raise DimensionMismatchError(f"Gram {K.shape} vs {labels.shape[0]} labels")
    C = int(labels.max()) + 1
    m = C - 1 if m is None else int(m)
    if m < 1 or m > C - 1:
        raise RankError(f"requested {m} discriminant directions; between-class rank is at most C-1={C - 1}")
    epsilon = default_epsilon(K) if epsilon is None else float(epsilon)
    if not epsilon > 0:
        raise DataError(f"epsilon must be positive, got {epsilon}")

    S_w, S_b = scatter_matrices(K, labels)
    # whiten with (S_w + eps^2 I)^{-1/2}, then an ordinary symmetric eigenproblem
    w, Q = sym_eig(S_w + epsilon**2 * np.eye(N))
    w = np.maximum(w, epsilon**2 * 1e-3)
    B_isqrt = (Q / np.sqrt(w)) @ Q.T
    M = B_isqrt @ S_b @ B_isqrt
    # symmetric by construction; round-off grows with 1/eps^2
    lam, Y = sym_eig(0.5 * (M + M.T))
    order = np.argsort(lam)[::-1][:m]
    A = B_isqrt @ Y[:, order]
    Z = K @ A
    means = np.vstack([Z[labels == c].mean(axis=0) for c in range(C)])
    return GdaModel(K, A, epsilon, labels, means, lam[order], spec)


def gda_fit(data: LabeledGrassmannSet, spec: KernelSpec, epsilon: float | None = None, m: int | None = None) -> GdaModel:
    """Fit discriminant directions maximizing the regularized kernel Rayleigh quotient.

    Parameters
    ----------
    data : LabeledGrassmannSet
        Training subspaces and class ids.
    spec : KernelSpec
        Grassmann kernel used to build the Gram matrix.
    epsilon : float, optional
        Regularizer; ``eps^2 I`` is added to the within-class matrix.
        Defaults to ``1e-4 * tr(K) / N``.
    m : int, optional
        Number of directions, at most ``C - 1`` (the default).

    Returns
    -------
    GdaModel
        Columns of ``A`` are normalized so ``a^T (S_w + eps^2 I) a = 1``;
        ``quotients`` are the matching Rayleigh quotients, descending.
    """
    if data.C < 2:
        raise RankError("need at least two classes for discriminant analysis")
    return gda_fit_gram(gram(spec, data.points), data.labels, epsilon, m, spec)


def gda_embed(model: GdaModel, kernel_rows) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(kernel_rows, dtype=float))
    if rows.shape[1] != model.K.shape[0]:
        raise DimensionMismatchError(
            f"kernel rows have {rows.shape[1]} columns, model has {model.K.shape[0]} training points"
        )
    return rows @ model.A


def gda_classify(model: GdaModel, query_rows) -> np.ndarray:
    """Nearest class mean in the embedded space; ties go to the lowest class id."""
    Z = gda_embed(model, query_rows)
    d2 = ((Z[:, None, :] - model.class_means[None, :, :]) ** 2).sum(axis=-1)
    return np.argmin(d2, axis=1)


def query_rows(spec: KernelSpec, queries: Sequence[GrassmannPoint], train: Sequence[GrassmannPoint]) -> np.ndarray:
    return cross_gram(spec, queries, train)
