"""Dense matrix helpers and the three decompositions used everywhere else.

Matrices are plain 2-D ``float64`` numpy arrays. The heavy lifting is done
by LAPACK through ``numpy.linalg``; the wrappers here pin down conventions
(sign of ``R``, ascending eigenvalues, ``V`` instead of ``V^T``) and turn
LAPACK failures into package exceptions.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DataError, DecompositionError, ParseError, RankDeficiencyError

RANK_TOL = 1e-12
SYMMETRY_TOL = 1e-8


class SvdResult(NamedTuple):
    """Compact SVD ``A = U @ diag(S) @ V.T`` with ``S`` descending."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate ``a`` as a finite 2-D float array and return it as float64."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise DataError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DataError(f"{name} must have at least one row and column, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains NaN or Inf")
    return arr


def svd_compact(A) -> SvdResult:
    A = as_matrix(A)
    try:
        U, S, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD did not converge: {exc}") from exc
    return SvdResult(U, S, Vt.T)


def qr_thin(A) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR with the diagonal of ``R`` made nonnegative.

    Raises
    ------
    RankDeficiencyError
        If some ``|R_ii| < 1e-12 * ||A||_F``; ``column`` names the first one.
    """
    A = as_matrix(A)
    n, k = A.shape
    if k > n:
        raise DataError(f"qr_thin needs k <= n, got {n}x{k}")
    try:
        Q, R = np.linalg.qr(A, mode="reduced")
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"QR failed: {exc}") from exc
    d = np.diag(R)
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    small = np.flatnonzero(np.abs(d) < RANK_TOL * scale)
    if small.size:
        col = int(small[0])
        raise RankDeficiencyError(f"matrix is rank deficient at column {col}", column=col)
    signs = np.where(d < 0, -1.0, 1.0)
    return Q * signs, R * signs[:, None]


def sym_eig(A) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix, eigenvalues ascending."""
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise DataError(f"sym_eig needs a square matrix, got {A.shape}")
    asym = np.max(np.abs(A - A.T))
    if asym > SYMMETRY_TOL * max(1.0, np.max(np.abs(A))):
        raise DataError(f"matrix is not symmetric (max asymmetry {asym:.3g})")
    try:
        w, V = np.linalg.eigh(0.5 * (A + A.T))
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigendecomposition did not converge: {exc}") from exc
    return w, V


def orthonormality_error(Q) -> float:
    Q = np.asarray(Q)
    return float(np.max(np.abs(Q.T @ Q - np.eye(Q.shape[1]))))


# --- CSV codec -------------------------------------------------------------


def parse_matrix_csv(text: str, source: str = "<string>") -> np.ndarray:
    rows = []
    width = None
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            values = [float(cell) for cell in row]
        except ValueError as exc:
            raise ParseError(f"{source}:{lineno}: {exc}") from None
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise ParseError(
                f"{source}:{lineno}: ragged row with {len(values)} columns, expected {width}"
            )
        rows.append(values)
    if not rows:
        raise ParseError(f"{source}: no data rows")
    arr = np.array(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{source}: non-finite entries")
    return arr


def read_matrix_csv(path) -> np.ndarray:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return parse_matrix_csv(text, source=str(path))


def format_matrix_csv(A) -> str:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in A)


def write_matrix_csv(path, A) -> None:
    Path(path).write_text(format_matrix_csv(A))
