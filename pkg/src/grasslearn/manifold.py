"""Points, tangent vectors and metrics on the Grassmann manifold G(n, k).

A point is stored as an orthonormal ``n x k`` basis. Two points are equal
when they span the same subspace, whatever bases they carry.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CutLocusError, DataError, DimensionMismatchError, RankDeficiencyError
from .numerics import (
    SvdResult,
    as_matrix,
    orthonormality_error,
    qr_thin,
    read_matrix_csv,
    svd_compact,
)

ORTHO_TOL = 1e-10
TANGENT_TOL = 1e-8
SAME_SUBSPACE_TOL = 1e-8
CUT_LOCUS_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GrassmannPoint:
    basis: np.ndarray
    was_orthonormal: bool = field(default=True, compare=False)

    def __post_init__(self):
        basis = as_matrix(self.basis, "basis")
        n, k = basis.shape
        if k > n:
            raise DataError(f"basis must have k <= n, got {n}x{k}")
        err = orthonormality_error(basis)
        if err > ORTHO_TOL:
            raise DataError(f"basis is not orthonormal (max |B^T B - I| = {err:.3g})")
        basis = basis.copy()
        basis.flags.writeable = False
        object.__setattr__(self, "basis", basis)

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def __eq__(self, other):
        if not isinstance(other, GrassmannPoint):
            return NotImplemented
        if (self.n, self.k) != (other.n, other.k):
            return False
        return distance(Metric.PROJECTION, self, other) <= SAME_SUBSPACE_TOL

    __hash__ = None

    def __repr__(self):
        return f"GrassmannPoint(n={self.n}, k={self.k})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    base: GrassmannPoint
    delta: np.ndarray

    def __post_init__(self):
        delta = as_matrix(self.delta, "delta")
        if delta.shape != self.base.basis.shape:
            raise DimensionMismatchError(
                f"tangent shape {delta.shape} does not match base {self.base.basis.shape}"
            )
        off = np.max(np.abs(self.base.basis.T @ delta))
        if off > TANGENT_TOL * max(1.0, np.max(np.abs(delta))):
            raise DataError(f"delta is not tangent at base (max |X^T delta| = {off:.3g})")
        object.__setattr__(self, "delta", delta)

    @cached_property
    def svd(self) -> SvdResult:
        return svd_compact(self.delta)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.delta))

    def scaled(self, c: float) -> "TangentVector":
        return TangentVector(self.base, c * self.delta)


@dataclass(frozen=True)
class PrincipalAngles:
    """Principal angles in radians, ascending (cosines descending)."""

    angles: np.ndarray

    @property
    def cosines(self) -> np.ndarray:
        return np.cos(self.angles)

    def __len__(self):
        return len(self.angles)


class Metric(enum.Enum):
    ARC_LENGTH = "arc-length"
    FUBINI_STUDY = "fubini-study"
    CHORDAL = "chordal"
    PROJECTION = "projection"
    BINET_CAUCHY = "binet-cauchy"
    PROCRUSTES = "procrustes"

    @classmethod
    def parse(cls, name) -> "Metric":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        for m in cls:
            if key == m.value or key == m.name.lower().replace("_", "-"):
                return m
        raise DataError(f"unknown metric {name!r}; choose from {[m.value for m in cls]}")


def from_matrix(A) -> GrassmannPoint:
    """Orthonormalize a full-column-rank generator into a point."""
    A = as_matrix(A, "generator")
    n, k = A.shape
    if k > n:
        raise DataError(f"generator must have k <= n, got {n}x{k}")
    try:
        Q, _ = qr_thin(A)
    except RankDeficiencyError as exc:
        raise RankDeficiencyError(
            f"generator is rank deficient: column {exc.column} depends on the previous ones",
            column=exc.column,
        ) from None
    return GrassmannPoint(Q, was_orthonormal=orthonormality_error(A) <= ORTHO_TOL)


def load_point(path) -> GrassmannPoint:
    """Read a generator from CSV and orthonormalize it."""
    return from_matrix(read_matrix_csv(path))


def _check_compatible(X: GrassmannPoint, Y: GrassmannPoint):
    if (X.n, X.k) != (Y.n, Y.k):
        raise DimensionMismatchError(f"points live on G({X.n},{X.k}) and G({Y.n},{Y.k})")


def principal_angles(X: GrassmannPoint, Y: GrassmannPoint) -> PrincipalAngles:
    _check_compatible(X, Y)
    XtY = X.basis.T @ Y.basis
    cos = np.clip(np.linalg.svd(XtY, compute_uv=False), 0.0, 1.0)
    # arccos loses half the digits near 0; small angles come from the sines
    # of the residual (I - XX^T) Y instead, which pair with cosines in order
    sin = np.clip(np.sort(np.linalg.svd(Y.basis - X.basis @ XtY, compute_uv=False)), 0.0, 1.0)
    theta = np.where(cos > np.sqrt(0.5), np.arcsin(sin), np.arccos(cos))
    return PrincipalAngles(theta)


def distance_from_angles(metric: Metric, theta: np.ndarray) -> float:
    theta = np.asarray(theta, dtype=float)
    if metric is Metric.ARC_LENGTH:
        return float(np.sqrt(np.sum(theta**2)))
    if metric is Metric.FUBINI_STUDY:
        return float(np.arccos(min(1.0, abs(np.prod(np.cos(theta))))))
    if metric is Metric.CHORDAL:
        return float(2.0 * np.sqrt(np.sum(np.sin(theta / 2) ** 2)))
    if metric is Metric.PROJECTION:
        return float(np.sqrt(np.sum(np.sin(theta) ** 2)))
    if metric is Metric.BINET_CAUCHY:
        return float(np.sqrt(max(0.0, 1.0 - np.prod(np.cos(theta) ** 2))))
    if metric is Metric.PROCRUSTES:
        return float(np.sqrt(2.0 * np.sum(np.sin(theta / 2) ** 2)))
    raise DataError(f"unsupported metric {metric!r}")


def distance(metric, X: GrassmannPoint, Y: GrassmannPoint) -> float:
    """Subspace distance between ``X`` and ``Y``, computed from principal angles.

    The chordal distance ``||XU - YV||_F`` with Procrustes-aligned bases is
    the angle form ``2 (sum sin^2(theta/2))^(1/2)``; the alignment never has
    to be formed explicitly.
    """
    metric = Metric.parse(metric)
    return distance_from_angles(metric, principal_angles(X, Y).angles)


def all_distances(X: GrassmannPoint, Y: GrassmannPoint) -> dict[str, float]:
    theta = principal_angles(X, Y).angles
    return {m.value: distance_from_angles(m, theta) for m in Metric}


def project_to_tangent(X: GrassmannPoint, G) -> TangentVector:
    G = as_matrix(G, "gradient")
    if G.shape != X.basis.shape:
        raise DimensionMismatchError(f"gradient shape {G.shape} != point shape {X.basis.shape}")
    B = X.basis
    return TangentVector(X, G - B @ (B.T @ G))


def _reorthonormalize(basis: np.ndarray) -> np.ndarray:
    # R is within round-off of I here, so Q moves the basis by O(eps) only;
    # skipping it lets drift pile up and pollutes objective values near optima.
    Q, _ = qr_thin(basis)
    return Q


def geodesic_point(X: GrassmannPoint, delta: TangentVector, t: float) -> GrassmannPoint:
    """Point at time ``t`` on the geodesic leaving ``X`` with velocity ``delta``.

    Uses ``Phi(t) = [X V, U] [cos(S t); sin(S t)] V^T`` where ``U S V^T`` is
    the compact SVD of ``delta``.
    """
    if not 0.0 <= t <= 1.0:
        raise DataError(f"geodesic parameter t={t} outside [0, 1]")
    if delta.base is not X and delta.base != X:
        raise DataError("tangent vector is not based at X")
    if t == 0.0 or not np.any(delta.delta):
        return X
    U, S, V = delta.svd
    basis = (X.basis @ V) * np.cos(S * t) + U * np.sin(S * t)
    basis = _reorthonormalize(basis @ V.T)
    return GrassmannPoint(basis)


def exp_map(X: GrassmannPoint, delta: TangentVector) -> GrassmannPoint:
    return geodesic_point(X, delta, 1.0)


def log_map(X: GrassmannPoint, Y: GrassmannPoint) -> TangentVector:
    """Tangent at ``X`` whose geodesic reaches ``Y`` at ``t = 1``.

    Raises ``CutLocusError`` when the largest principal angle is within
    1e-8 of pi/2, where the minimizing geodesic is not unique.
    """
    _check_compatible(X, Y)
    theta_max = principal_angles(X, Y).angles[-1]
    if theta_max > np.pi / 2 - CUT_LOCUS_TOL:
        raise CutLocusError(
            f"largest principal angle {theta_max:.12f} is at the cut locus (pi/2)"
        )
    A = X.basis
    XtY = A.T @ Y.basis
    # (I - XX^T) Y (X^T Y)^{-1} = U tan(S) V^T
    M = np.linalg.solve(XtY.T, (Y.basis - A @ XtY).T).T
    U, S, Vt = np.linalg.svd(M, full_matrices=False)
    delta = (U * np.arctan(S)) @ Vt
    delta = delta - A @ (A.T @ delta)
    return TangentVector(X, delta)


def random_point(n: int, k: int, rng: np.random.Generator) -> GrassmannPoint:
    """Draw from the rotation-invariant distribution on G(n, k).

    Columns are sign-normalized so their largest-magnitude entry is positive;
    this does not change the spanned subspace.
    """
    if not 1 <= k <= n:
        raise DataError(f"need 1 <= k <= n, got n={n}, k={k}")
    Q, _ = qr_thin(rng.standard_normal((n, k)))
    return GrassmannPoint(_canonical_signs(Q))


def random_rotation(k: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of O(k)."""
    Q, _ = qr_thin(rng.standard_normal((k, k)))
    return Q


def random_tangent(X: GrassmannPoint, rng: np.random.Generator, norm: float = 1.0) -> TangentVector:
    T = project_to_tangent(X, rng.standard_normal(X.basis.shape))
    size = T.norm
    if size == 0.0:
        return T
    return T.scaled(norm / size)


def _canonical_signs(Q: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(Q), axis=0)
    signs = np.sign(Q[idx, np.arange(Q.shape[1])])
    signs[signs == 0] = 1.0
    return Q * signs
