"""Low-rank matrix completion by searching for the column space on G(n, r).

Two objectives are offered. ``objective_frobenius`` is the classical
least-squares residual after solving for the coefficients ``W``;
``objective_projection`` sums, over columns, one minus the cosine of the
smallest angle between ``span(U)`` and the set of vectors consistent with
the observed entries of that column. The latter has no singularities.
"""

from __future__ import annotations

import enum
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DimensionMismatchError
from .manifold import GrassmannPoint, random_point
from .optim import OptimConfig, OptimResult, Status, minimize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MaskedMatrix:
    X_omega: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X_omega, dtype=float)
        om = np.asarray(self.omega).astype(bool)
        if X.ndim != 2 or X.shape != om.shape:
            raise DimensionMismatchError(f"matrix {X.shape} and mask {om.shape} differ")
        if np.any(X[~om] != 0):
            raise DataError("unobserved entries must be stored as 0")
        object.__setattr__(self, "X_omega", X)
        object.__setattr__(self, "omega", om)

    @property
    def shape(self):
        return self.X_omega.shape


def mask_apply(X, omega) -> MaskedMatrix:
    X = np.asarray(X, dtype=float)
    om = np.asarray(omega).astype(bool)
    if X.shape != om.shape:
        raise DimensionMismatchError(f"matrix {X.shape} and mask {om.shape} differ")
    return MaskedMatrix(np.where(om, X, 0.0), om)


class ObjectiveKind(enum.Enum):
    FROBENIUS = "frobenius"
    PROJECTION_DISTANCE = "projection"


@dataclass
class FrobeniusSolve:
    value: float
    W: np.ndarray
    underdetermined: list[int]
    max_condition: float


def frobenius_inner(U: np.ndarray, M: MaskedMatrix) -> FrobeniusSolve:
    """Per-column least squares for ``W``, batched over columns."""
    n, k = M.shape
    r = U.shape[1]
    om = M.omega.astype(float)
    counts = M.omega.sum(axis=0)
    G = np.einsum("ij,ia,ib->jab", om, U, U)
    b = U.T @ M.X_omega
    W = np.zeros((k, r))
    w, V = np.linalg.eigh(G)
    well = (counts >= r) & (w[:, 0] > 1e-12 * np.maximum(w[:, -1], 1e-300))
    if well.any():
        W[well] = np.linalg.solve(G[well], b[:, well].T[..., None])[..., 0]
    for j in np.flatnonzero(~well & (counts > 0)):
        rows = M.omega[:, j]
        W[j] = np.linalg.lstsq(U[rows], M.X_omega[rows, j], rcond=None)[0]
    R = np.where(M.omega, M.X_omega - U @ W.T, 0.0)
    cond = np.sqrt(w[well, -1] / w[well, 0]).max() if well.all() else np.inf
    flagged = np.flatnonzero(counts < r).tolist()
    return FrobeniusSolve(float(np.sum(R * R)), W, flagged, float(cond))


def objective_frobenius(U: GrassmannPoint, M: MaskedMatrix) -> tuple[float, np.ndarray]:
    """Least-squares residual ``min_W ||X_omega - P_omega(U W^T)||_F^2`` and its ``W``.

    Columns observed in fewer than ``r`` rows get the minimum-norm
    coefficients and are reported through ``frobenius_inner``.
    """
    if U.n != M.shape[0]:
        raise DimensionMismatchError(f"U has {U.n} rows, matrix has {M.shape[0]}")
    sol = frobenius_inner(U.basis, M)
    return sol.value, sol.W


@dataclass(frozen=True)
class FrobeniusObjective:
    M: MaskedMatrix

    def value(self, X):
        return frobenius_inner(X.basis, self.M).value

    def euclidean_grad(self, X):
        # envelope theorem: W is optimal, so only the explicit U-dependence counts
        U = X.basis
        W = frobenius_inner(U, self.M).W
        R = np.where(self.M.omega, self.M.X_omega - U @ W.T, 0.0)
        return -2.0 * R @ W


def column_subspaces(M: MaskedMatrix) -> list[np.ndarray | None]:
    """Orthonormal basis of ``span([x_j, e_missing...])`` per column.

    ``None`` marks a column with no nonzero observed data; such a column
    is consistent with every subspace.
    """
    n, k = M.shape
    bases = []
    for j in range(k):
        x = M.X_omega[:, j]
        nrm = np.linalg.norm(x)
        if nrm == 0.0:
            bases.append(None)
            continue
        missing = np.flatnonzero(~M.omega[:, j])
        B = np.zeros((n, 1 + missing.size))
        B[:, 0] = x / nrm
        B[missing, 1 + np.arange(missing.size)] = 1.0
        bases.append(B)
    return bases


@dataclass(frozen=True)
class ProjectionObjective:
    """Sum over columns of ``1 - sigma_max(B_j^T U)``."""

    M: MaskedMatrix
    bases: tuple = field(default=None)

    def __post_init__(self):
        if self.bases is None:
            object.__setattr__(self, "bases", tuple(column_subspaces(self.M)))

    def _terms(self, U):
        for B in self.bases:
            if B is None:
                continue
            a, s, bt = np.linalg.svd(B.T @ U, full_matrices=False)
            yield B, a[:, 0], s[0], bt[0]

    def value(self, X):
        return float(sum(min(1.0, max(0.0, 1.0 - s)) for _, _, s, _ in self._terms(X.basis)))

    def euclidean_grad(self, X):
        G = np.zeros_like(X.basis)
        for B, a, s, b in self._terms(X.basis):
            if s < 1.0:
                G -= np.outer(B @ a, b)
        return G


def objective_projection(U: GrassmannPoint, M: MaskedMatrix) -> float:
    if U.n != M.shape[0]:
        raise DimensionMismatchError(f"U has {U.n} rows, matrix has {M.shape[0]}")
    obj = ProjectionObjective(M)
    empty = [j for j, B in enumerate(obj.bases) if B is None and M.omega[:, j].any()]
    if empty:
        log.info("columns %s have observed entries that are all zero; they contribute 0", empty)
    return obj.value(U)


def make_objective(kind, M: MaskedMatrix):
    kind = ObjectiveKind(kind) if not isinstance(kind, ObjectiveKind) else kind
    return FrobeniusObjective(M) if kind is ObjectiveKind.FROBENIUS else ProjectionObjective(M)


@dataclass
class CompletionResult:
    U: GrassmannPoint
    W: np.ndarray
    X_hat: np.ndarray
    residual: float
    objective_kind: ObjectiveKind
    status: Status
    runs: list[OptimResult] = field(default_factory=list)


def complete(
    M: MaskedMatrix,
    r: int,
    kind=ObjectiveKind.FROBENIUS,
    cfg: OptimConfig | None = None,
    restarts: int = 5,
    rng: np.random.Generator | None = None,
) -> CompletionResult:
    """Multi-start subspace search; the run with the lowest objective wins."""
    n, k = M.shape
    if not 1 <= r <= min(n, k):
        raise DataError(f"rank r={r} must be in [1, {min(n, k)}]")
    if restarts < 1:
        raise DataError("need at least one restart")
    thin = np.flatnonzero(M.omega.sum(axis=0) < r)
    if thin.size:
        warnings.warn(f"columns {thin.tolist()} have fewer than r={r} observations", stacklevel=2)
    rng = rng if rng is not None else np.random.default_rng()
    kind = ObjectiveKind(kind) if not isinstance(kind, ObjectiveKind) else kind
    obj = make_objective(kind, M)
    runs = [minimize(obj, random_point(n, r, rng), cfg) for _ in range(restarts)]
    best = min(runs, key=lambda res: res.value)
    sol = frobenius_inner(best.minimizer.basis, M)
    X_hat = best.minimizer.basis @ sol.W.T
    return CompletionResult(best.minimizer, sol.W, X_hat, best.value, kind, best.status, runs)


def relative_error(X_hat, X) -> float:
    return float(np.linalg.norm(X_hat - X) / np.linalg.norm(X))
