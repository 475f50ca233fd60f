"""A small Grassmann network trained by finite differences.

Layer stack: FRMap (``W_k X``), ReOrth (thin QR), ProjMap (``Q Q^T``),
ProjPooling (mean over filters), OrthMap (top-``d`` eigenvectors), ProjMap,
and a fully connected softmax classifier on the vectorized projector.
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError, DimensionMismatchError, RankDeficiencyError, TrainingError
from .manifold import GrassmannPoint
from .numerics import qr_thin

log = logging.getLogger(__name__)

GAP_TOL = 1e-6


@dataclass(frozen=True)
class GrNetDims:
    n: int
    k_in: int
    m: int
    d: int
    C: int

    def __post_init__(self):
        if not (1 <= self.k_in <= self.m <= self.n):
            raise DataError(f"need 1 <= k_in <= m <= n, got {self}")
        if not 1 <= self.d <= self.m:
            raise DataError(f"need 1 <= d <= m, got d={self.d}, m={self.m}")
        if self.C < 2:
            raise DataError("need at least two classes")

    @property
    def features(self) -> int:
        return self.m * (self.m + 1) // 2


@dataclass
class GrNetParams:
    """Filters ``W_k`` (m x n each) and FC weights ``(m(m+1)/2 + 1) x C``; the last row is the bias."""

    filters: list[np.ndarray]
    fc_weights: np.ndarray
    dims: GrNetDims

    def __post_init__(self):
        self.filters = [np.asarray(W, dtype=float) for W in self.filters]
        self.fc_weights = np.asarray(self.fc_weights, dtype=float)
        dm = self.dims
        if not self.filters:
            raise DataError("need at least one filter")
        for i, W in enumerate(self.filters):
            if W.shape != (dm.m, dm.n):
                raise DimensionMismatchError(f"filter {i} has shape {W.shape}, expected {(dm.m, dm.n)}")
            s = np.linalg.svd(W, compute_uv=False)
            if s[0] == 0.0 or s[-1] < 1e-8 * s[0]:
                raise RankDeficiencyError(f"filter {i} is not full rank (singular values {s[0]:.2e} .. {s[-1]:.2e})")
        if self.fc_weights.shape != (dm.features + 1, dm.C):
            raise DimensionMismatchError(
                f"fc_weights has shape {self.fc_weights.shape}, expected {(dm.features + 1, dm.C)}"
            )

    @property
    def F(self) -> int:
        return len(self.filters)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([W.ravel() for W in self.filters] + [self.fc_weights.ravel()])

    def with_vector(self, theta) -> "GrNetParams":
        dm = self.dims
        size = dm.m * dm.n
        filters = [theta[i * size : (i + 1) * size].reshape(dm.m, dm.n) for i in range(self.F)]
        fc = theta[self.F * size :].reshape(self.fc_weights.shape)
        new = object.__new__(GrNetParams)
        new.filters, new.fc_weights, new.dims = [f.copy() for f in filters], fc.copy(), dm
        return new

    def to_json(self) -> str:
        return json.dumps(
            {
                "dims": vars(self.dims),
                "filters": [W.tolist() for W in self.filters],
                "fc_weights": self.fc_weights.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "GrNetParams":
        d = json.loads(text)
        return cls([np.array(W) for W in d["filters"]], np.array(d["fc_weights"]), GrNetDims(**d["dims"]))


def grnet_init(dims: GrNetDims, F: int, rng: np.random.Generator) -> GrNetParams:
    filters = [rng.standard_normal((dims.m, dims.n)) / np.sqrt(dims.n) for _ in range(F)]
    fc = 0.1 * rng.standard_normal((dims.features + 1, dims.C))
    return GrNetParams(filters, fc, dims)


@dataclass
class GrNetActivation:
    frmap: list[np.ndarray]
    reorth: list[np.ndarray]
    projmap: list[np.ndarray]
    pooled: np.ndarray
    orthmap: np.ndarray
    final: np.ndarray
    logits: np.ndarray
    eigengap: float = field(default=np.inf)


def _triu_index(m: int):
    iu = np.triu_indices(m)
    scale = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
    return iu, scale


def vectorize_sym(P: np.ndarray) -> np.ndarray:
    """Upper triangle with off-diagonals scaled by sqrt(2), so inner products are preserved."""
    m = P.shape[-1]
    iu, scale = _triu_index(m)
    return P[..., iu[0], iu[1]] * scale


def _fix_signs(U: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(U), axis=-2)
    picked = np.take_along_axis(U, idx[..., None, :], axis=-2)
    return U * np.where(picked < 0, -1.0, 1.0)


def _check_gap(lam_desc, d: int) -> float:
    if d >= lam_desc.shape[-1]:
        return np.inf
    gap = float(np.min(lam_desc[..., d - 1] - lam_desc[..., d]))
    if gap < GAP_TOL:
        warnings.warn(f"OrthMap eigengap {gap:.2e} < {GAP_TOL}; eigenvector selection is ill-posed", stacklevel=3)
    return gap


def grnet_forward(params: GrNetParams, X: GrassmannPoint) -> tuple[np.ndarray, GrNetActivation]:
    """Run one subspace through the network, keeping every intermediate."""
    dm = params.dims
    if (X.n, X.k) != (dm.n, dm.k_in):
        raise DimensionMismatchError(f"input on G({X.n},{X.k}), network expects G({dm.n},{dm.k_in})")
    frmap, reorth, projmap = [], [], []
    for i, W in enumerate(params.filters):
        A = W @ X.basis
        try:
            Q, _ = qr_thin(A)
        except RankDeficiencyError as exc:
            raise RankDeficiencyError(f"filter {i}: FRMap output is rank deficient ({exc})", column=exc.column) from exc
        frmap.append(A)
        reorth.append(Q)
        projmap.append(Q @ Q.T)
    pooled = sum(projmap) / params.F
    pooled = 0.5 * (pooled + pooled.T)
    lam, V = np.linalg.eigh(pooled)
    lam, V = lam[::-1], V[:, ::-1]
    gap = _check_gap(lam, dm.d)
    U = _fix_signs(V[:, : dm.d].copy())
    final = U @ U.T
    logits = np.append(vectorize_sym(final), 1.0) @ params.fc_weights
    return logits, GrNetActivation(frmap, reorth, projmap, pooled, U, final, logits, gap)


def _batch_logits(params: GrNetParams, bases: np.ndarray) -> np.ndarray:
    """Logits for a stack of bases (B x n x k_in); same math as grnet_forward."""
    dm = params.dims
    pooled = np.zeros((bases.shape[0], dm.m, dm.m))
    for i, W in enumerate(params.filters):
        A = np.einsum("mn,bnk->bmk", W, bases)
        Q, R = np.linalg.qr(A)
        diag = np.abs(np.diagonal(R, axis1=-2, axis2=-1))
        if np.any(diag < 1e-12 * np.linalg.norm(A, axis=(-2, -1))[:, None]):
            raise RankDeficiencyError(f"filter {i}: FRMap output is rank deficient")
        pooled += Q @ np.swapaxes(Q, -1, -2)
    pooled /= params.F
    lam, V = np.linalg.eigh(pooled)
    lam, V = lam[:, ::-1], V[:, :, ::-1]
    _check_gap(lam, dm.d)
    U = V[:, :, : dm.d]
    feats = vectorize_sym(U @ np.swapaxes(U, -1, -2))
    return np.hstack([feats, np.ones((len(feats), 1))]) @ params.fc_weights


def _stack(points: Sequence[GrassmannPoint]) -> np.ndarray:
    return np.stack([p.basis for p in points])


def cross_entropy(logits: np.ndarray, labels) -> float:
    z = logits - logits.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    return float(-np.mean(logp[np.arange(len(labels)), labels]))


def _check_labels(labels, C):
    labels = np.asarray(labels, dtype=int)
    if labels.size and (labels.min() < 0 or labels.max() >= C):
        raise DataError(f"labels must lie in 0..{C - 1}")
    return labels


def grnet_loss(params: GrNetParams, points: Sequence[GrassmannPoint], labels) -> float:
    """Mean softmax cross-entropy over the batch."""
    labels = _check_labels(labels, params.dims.C)
    if len(points) != len(labels):
        raise DimensionMismatchError(f"{len(points)} points but {len(labels)} labels")
    return cross_entropy(_batch_logits(params, _stack(points)), labels)


def grnet_predict(params: GrNetParams, points: Sequence[GrassmannPoint]) -> np.ndarray:
    return np.argmax(_batch_logits(params, _stack(points)), axis=1)


def fd_gradient(params: GrNetParams, bases: np.ndarray, labels, h: float = 1e-5) -> np.ndarray:
    """Central finite-difference gradient of the loss over every parameter entry."""
    theta = params.to_vector()
    g = np.empty_like(theta)
    for i in range(theta.size):
        old = theta[i]
        theta[i] = old + h
        up = cross_entropy(_batch_logits(params.with_vector(theta), bases), labels)
        theta[i] = old - h
        down = cross_entropy(_batch_logits(params.with_vector(theta), bases), labels)
        theta[i] = old
        g[i] = (up - down) / (2 * h)
    return g


@dataclass
class TrainResult:
    params: GrNetParams
    trace: list[float]
    steps: list[float]


def grnet_train(
    params: GrNetParams,
    points: Sequence[GrassmannPoint],
    labels,
    epochs: int = 50,
    step: float = 1.0,
    fd_step: float = 1e-5,
    max_nan: int = 10,
) -> TrainResult:
    """Full-batch gradient descent with finite-difference gradients.

    A step that raises the loss (or makes it NaN) is rejected and the step
    size halved. ``trace`` holds the loss of the kept parameters after each
    epoch, starting with the initial loss, so it never increases. The
    returned parameters are the best seen.
    """
    if len(points) == 0:
        raise DataError("empty training set")
    labels = _check_labels(labels, params.dims.C)
    bases = _stack(points)
    best = params
    best_loss = cross_entropy(_batch_logits(params, bases), labels)
    if not np.isfinite(best_loss):
        raise TrainingError("initial loss is not finite")
    trace, steps = [best_loss], []
    nan_run = 0
    for epoch in range(epochs):
        g = fd_gradient(best, bases, labels, fd_step)
        theta = best.to_vector() - step * g
        try:
            cand = best.with_vector(theta)
            loss = cross_entropy(_batch_logits(cand, bases), labels)
        except RankDeficiencyError:
            loss = np.nan
        if not np.isfinite(loss):
            nan_run += 1
            if nan_run >= max_nan:
                raise TrainingError(f"loss non-finite for {max_nan} consecutive epochs (last step {step:.3g})")
            step *= 0.5
        elif loss > best_loss:
            nan_run = 0
            step *= 0.5
        else:
            nan_run = 0
            best, best_loss = cand, loss
        trace.append(best_loss)
        steps.append(step)
        log.debug("epoch %d loss %.6g step %.3g", epoch, best_loss, step)
    return TrainResult(best, trace, steps)
