"""Symmetric eigendecomposition and principal component selection.

The solver is a cyclic Jacobi iteration: sweeps of Givens rotations zero
out off-diagonal entries until the off-diagonal Frobenius norm falls below
1e-12 times the input norm.  Jacobi is dependency-free, unconditionally
stable on symmetric matrices, and fast enough for the dimensionalities this
library targets (D up to a few dozen).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import PSD_RTOL, SYM_RTOL, _as_vector, _readonly

JACOBI_RTOL = 1e-12
_MAX_SWEEPS = 60


@dataclass(frozen=True)
class EigenPairs:
    """Eigenvalues in descending order with matching eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class PcaModel:
    """A fitted PCA basis: center, top-q component columns, full spectrum."""

    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    q: int


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def eig_sym(k) -> EigenPairs:
    """Eigendecompose a symmetric PSD matrix with cyclic Jacobi rotations.

    Eigenvalues are sorted in descending order; exact ties keep the solver's
    diagonal emission order (stable sort), which is deterministic but
    otherwise arbitrary.  Small negative eigenvalues inside
    (-1e-9 * lambda_max, 0) are round-off and reported as zero; anything
    more negative raises, since it signals a non-PSD input.  Each
    eigenvector is flipped so its largest-magnitude entry is positive
    (magnitude ties resolved by the lowest index).
    """
    a = np.asarray(k, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    scale = float(np.abs(a).max())
    if float(np.abs(a - a.T).max()) > SYM_RTOL * max(1.0, scale):
        raise ValueError("matrix is not symmetric")

    a = (a + a.T) / 2.0
    n = a.shape[0]
    v = np.eye(n)
    tol = JACOBI_RTOL * float(np.linalg.norm(a))

    for _ in range(_MAX_SWEEPS):
        if _off_norm(a) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                sign = 1.0 if theta >= 0.0 else -1.0
                t = sign / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                app, aqq = a[p, p], a[q, q]
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                # Closed-form diagonal update and exact zero are more
                # accurate than the rotated values.
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0

                vcol_p, vcol_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vcol_p - s * vcol_q
                v[:, q] = s * vcol_p + c * vcol_q
    else:  # pragma: no cover - Jacobi converges on every symmetric input
        raise RuntimeError("Jacobi iteration did not converge")

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order].copy()

    lam_max = values[0]
    floor = -PSD_RTOL * max(lam_max, 0.0)
    negative = values < 0.0
    if np.any(values < floor):
        worst = float(values.min())
        raise ValueError(
            f"matrix is not positive semi-definite (eigenvalue {worst:.3e} "
            f"below the -1e-9 * lambda_max floor)"
        )
    values[negative] = 0.0

    for j in range(n):
        i = int(np.argmax(np.abs(vectors[:, j])))
        if vectors[i, j] < 0.0:
            vectors[:, j] = -vectors[:, j]

    return EigenPairs(values=_readonly(values), vectors=_readonly(vectors))


def select_components(pairs: EigenPairs, mean, q: int) -> PcaModel:
    """Take the top q eigenvectors as the projection basis."""
    m = _as_vector(mean, "mean")
    d = pairs.vectors.shape[0]
    if m.size != d:
        raise ValueError(f"mean length {m.size} does not match dimension {d}")
    if not isinstance(q, (int, np.integer)) or not (1 <= q <= d):
        raise ValueError(f"q must be an integer in [1, {d}], got {q!r}")
    return PcaModel(
        mean=_readonly(m.copy()),
        components=_readonly(pairs.vectors[:, :q].copy()),
        eigenvalues=_readonly(pairs.values.copy()),
        q=int(q),
    )


def principal_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Principal angles (radians, ascending) between two column subspaces."""
    qa, _ = np.linalg.qr(np.asarray(a, dtype=float))
    qb, _ = np.linalg.qr(np.asarray(b, dtype=float))
    sv = np.linalg.svd(qa.T @ qb, compute_uv=False)
    return np.arccos(np.clip(sv, -1.0, 1.0))
