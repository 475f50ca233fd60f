"""Seeded synthetic data for every experiment the CLI runs.

Each generator takes an integer ``seed`` and is bit-for-bit deterministic in it.
"""

from __future__ import annotations

import itertools
import logging

import numpy as np

from .adapt import DomainPair, pca_subspace
from .completion import MaskedMatrix, mask_apply
from .errors import DataError, SeparationError
from .gda import LabeledGrassmannSet
from .manifold import GrassmannPoint, Metric, distance, exp_map, random_point, random_tangent
from .numerics import qr_thin

log = logging.getLogger(__name__)


def three_rings(n_total: int = 600, radii=(1.0, 2.0, 3.0), noise_sd: float = 0.05, seed: int = 0):
    """Concentric noisy rings in the plane, one cluster per ring.

    Points are split as evenly as possible across rings; angles are uniform
    and radii get Gaussian noise.
    """
    if n_total < len(radii):
        raise DataError(f"need at least {len(radii)} points, got {n_total}")
    rng = np.random.default_rng(seed)
    counts = np.full(len(radii), n_total // len(radii))
    counts[: n_total % len(radii)] += 1
    labels = np.repeat(np.arange(len(radii)), counts)
    angle = rng.uniform(0.0, 2 * np.pi, n_total)
    radius = np.asarray(radii, dtype=float)[labels] + noise_sd * rng.standard_normal(n_total)
    pts = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
    return pts, labels


def low_rank_masked(n: int, k: int, r: int, obs_frac: float, seed: int = 0, max_draws: int = 100):
    """Rank-``r`` Gaussian product ``A B^T`` with a uniform random mask.

    The mask is redrawn until every column has at least ``r`` observations.
    Returns ``(MaskedMatrix, X)``.
    """
    if not 1 <= r <= min(n, k):
        raise DataError(f"rank r={r} must be in [1, {min(n, k)}]")
    if not 0 < obs_frac <= 1:
        raise DataError(f"obs_frac must be in (0, 1], got {obs_frac}")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, r)) @ rng.standard_normal((k, r)).T
    for _ in range(max_draws):
        omega = rng.random((n, k)) < obs_frac if obs_frac < 1 else np.ones((n, k), bool)
        if omega.sum(axis=0).min() >= r:
            return mask_apply(X, omega), X
    raise DataError(f"obs_frac={obs_frac} too small: no mask with >= {r} entries per column in {max_draws} draws")


def _perturb(X: GrassmannPoint, max_angle: float, rng) -> GrassmannPoint:
    if max_angle == 0:
        return X
    return exp_map(X, random_tangent(X, rng, norm=max_angle * rng.uniform()))


def _min_pairwise(points, metric) -> float:
    return min(
        (distance(metric, a, b) for a, b in itertools.combinations(points, 2)),
        default=np.inf,
    )


def labeled_subspaces(C: int, per_class: int, n: int, k: int, within_angle: float, seed: int = 0) -> LabeledGrassmannSet:
    """Noisy copies of ``C`` prototype subspaces.

    Prototypes are the best of 20 random draws by minimum pairwise projection
    distance; each sample moves its prototype along a random geodesic by an
    angle uniform in ``[0, within_angle]``.
    """
    rng = np.random.default_rng(seed)
    protos = max(
        ([random_point(n, k, rng) for _ in range(C)] for _ in range(20)),
        key=lambda ps: _min_pairwise(ps, Metric.PROJECTION),
    )
    points, labels = [], []
    for c, P in enumerate(protos):
        for _ in range(per_class):
            points.append(_perturb(P, within_angle, rng))
            labels.append(c)
    return LabeledGrassmannSet(tuple(points), np.array(labels))


def constellation(n: int, k: int, K_codewords: int, per: int, noise_angle: float, seed: int = 0, max_draws: int = 100):
    """Noisy observations of a random subspace codebook.

    Returns ``(points, labels, codebook)``. The codebook is redrawn until its
    minimum pairwise chordal distance is at least ``4 * noise_angle``.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_draws):
        book = [random_point(n, k, rng) for _ in range(K_codewords)]
        sep = _min_pairwise(book, Metric.CHORDAL)
        if sep >= 4 * noise_angle and sep > 0:
            break
    else:
        raise SeparationError(
            f"could not draw {K_codewords} codewords on G({n},{k}) with chordal separation "
            f">= {4 * noise_angle:.3g}; try fewer codewords or less noise"
        )
    points, labels = [], []
    for c, P in enumerate(book):
        for _ in range(per):
            points.append(_perturb(P, noise_angle, rng))
            labels.append(c)
    return points, np.array(labels), book


def two_domain_shift(
    n_per_class: int = 40,
    C: int = 3,
    dim: int = 20,
    rotation_deg: float = 60.0,
    seed: int = 0,
    sub_dim: int | None = None,
    spread: float = 2.0,
    class_sd: float = 0.5,
    noise_sd: float = 0.6,
) -> DomainPair:
    """Source/target domains related by a rotation in a random 2-plane.

    Source classes are Gaussian blobs whose means lie in a random
    ``sub_dim``-dimensional subspace of R^dim (default ``sub_dim = C``). The
    target draws fresh samples from the same blobs, rotates them by
    ``rotation_deg`` in a random 2-plane that mixes the class subspace with
    its complement, and adds isotropic noise to both domains.
    """
    if C < 2 or dim < 4:
        raise DataError("need C >= 2 and dim >= 4")
    d = C if sub_dim is None else sub_dim
    if d + 1 > dim:
        raise DataError(f"sub_dim={d} too large for dim={dim}")
    rng = np.random.default_rng(seed)
    S, _ = qr_thin(rng.standard_normal((dim, d)))
    means = spread * rng.standard_normal((C, d)) @ S.T
    labels = np.repeat(np.arange(C), n_per_class)

    def draw():
        within = class_sd * rng.standard_normal((labels.size, d)) @ S.T
        return means[labels] + within

    src = draw() + noise_sd * rng.standard_normal((labels.size, dim))
    # the 2-plane takes one direction from the class subspace and one orthogonal to it
    u = S @ rng.standard_normal(d)
    u /= np.linalg.norm(u)
    v = rng.standard_normal(dim)
    v -= S @ (S.T @ v)
    v /= np.linalg.norm(v)
    a = np.deg2rad(rotation_deg)
    Rot = np.eye(dim) + (np.cos(a) - 1) * (np.outer(u, u) + np.outer(v, v)) + np.sin(a) * (
        np.outer(v, u) - np.outer(u, v)
    )
    tgt = draw() @ Rot.T + noise_sd * rng.standard_normal((labels.size, dim))
    return DomainPair(
        X_s=pca_subspace(src, d),
        X_t=pca_subspace(tgt, d),
        source_features=src,
        source_labels=labels.copy(),
        target_features=tgt,
        target_labels=labels.copy(),
    )
