"""Grassmann kernels, Gram matrices and the kernel-induced distance."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, NumericalKernelError
from .manifold import GrassmannPoint, Metric, distance, _check_compatible

PSD_TOL = 1e-8

# Gaussian of arc length is not positive definite in general.
# both are embedding distances (d^2 = const - kernel), so their Gaussians are PSD;
# chordal, arc-length and Fubini-Study are not, and give indefinite Grams
GAUSSIAN_BASES = (Metric.PROJECTION, Metric.BINET_CAUCHY)


class KernelKind(enum.Enum):
    PROJECTION = "projection"
    BINET_CAUCHY = "binet-cauchy"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class KernelSpec:
    kind: KernelKind
    sigma: float | None = None
    base: Metric | None = None

    def __post_init__(self):
        kind = KernelKind(self.kind) if not isinstance(self.kind, KernelKind) else self.kind
        object.__setattr__(self, "kind", kind)
        if kind is KernelKind.GAUSSIAN:
            if self.sigma is None or not self.sigma > 0:
                raise DataError(f"gaussian kernel needs sigma > 0, got {self.sigma}")
            base = Metric.parse(self.base if self.base is not None else Metric.PROJECTION)
            if base not in GAUSSIAN_BASES:
                raise DataError(
                    f"gaussian kernel over {base.value} distance is not positive definite; "
                    f"use one of {[m.value for m in GAUSSIAN_BASES]}"
                )
            object.__setattr__(self, "base", base)
            object.__setattr__(self, "sigma", float(self.sigma))

    @classmethod
    def projection(cls):
        return cls(KernelKind.PROJECTION)

    @classmethod
    def binet_cauchy(cls):
        return cls(KernelKind.BINET_CAUCHY)

    @classmethod
    def gaussian(cls, sigma, base=Metric.PROJECTION):
        return cls(KernelKind.GAUSSIAN, sigma, base)

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        try:
            kind = KernelKind(str(d["kind"]).lower())
        except (KeyError, ValueError):
            raise DataError(f"bad kernel spec {d!r}") from None
        if kind is KernelKind.GAUSSIAN:
            return cls(kind, d.get("sigma"), d.get("base", "projection"))
        return cls(kind)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind is KernelKind.GAUSSIAN:
            d.update(sigma=self.sigma, base=self.base.value)
        return d


def kernel_eval(spec: KernelSpec, X: GrassmannPoint, Y: GrassmannPoint) -> float:
    _check_compatible(X, Y)
    if spec.kind is KernelKind.PROJECTION:
        return float(np.sum((X.basis.T @ Y.basis) ** 2))
    if spec.kind is KernelKind.BINET_CAUCHY:
        # det(X^T Y)^2 as a product of singular values; the sign drops out
        s = np.linalg.svd(X.basis.T @ Y.basis, compute_uv=False)
        return float(np.prod(s) ** 2)
    d = distance(spec.base, X, Y)
    return float(np.exp(-(d**2) / (2.0 * spec.sigma**2)))


def cross_gram(spec: KernelSpec, rows: Sequence[GrassmannPoint], cols: Sequence[GrassmannPoint]) -> np.ndarray:
    """Matrix of ``k(rows[i], cols[j])``; no symmetry or PSD checks."""
    out = np.empty((len(rows), len(cols)))
    for i, x in enumerate(rows):
        for j, y in enumerate(cols):
            out[i, j] = kernel_eval(spec, x, y)
    return out


def gram(spec: KernelSpec, points: Sequence[GrassmannPoint]) -> np.ndarray:
    """Symmetric Gram matrix over ``points``.

    Raises
    ------
    NumericalKernelError
        If the smallest eigenvalue is below ``-1e-8 * largest``.
    """
    points = list(points)
    if not points:
        raise DataError("gram needs at least one point")
    shape = (points[0].n, points[0].k)
    if any((p.n, p.k) != shape for p in points):
        raise DataError("gram needs points on a single G(n, k)")
    N = len(points)
    K = np.empty((N, N))
    for i in range(N):
        for j in range(i, N):
            K[i, j] = K[j, i] = kernel_eval(spec, points[i], points[j])
    check_psd(K)
    return K


def check_psd(K: np.ndarray, tol: float = PSD_TOL) -> None:
    w = np.linalg.eigvalsh(K)
    if w[0] < -tol * max(abs(w[-1]), np.finfo(float).tiny):
        raise NumericalKernelError(
            f"Gram matrix is not PSD: min eigenvalue {w[0]:.3g}, max {w[-1]:.3g}"
        )


def kernel_distance(spec: KernelSpec, X: GrassmannPoint, Y: GrassmannPoint) -> float:
    d2 = kernel_eval(spec, X, X) + kernel_eval(spec, Y, Y) - 2.0 * kernel_eval(spec, X, Y)
    return float(np.sqrt(max(0.0, d2)))
