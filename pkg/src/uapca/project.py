"""Projection of points and distributions into a fitted PCA basis."""

from __future__ import annotations

import numpy as np

from .eigen import PcaModel, eig_sym
from .model import Distribution, Gaussian, _as_vector, affine_cov


def project_point(model: PcaModel, x) -> np.ndarray:
    """Project a point: A^T (x - mean)."""
    v = _as_vector(x, "point")
    if v.size != model.mean.size:
        raise ValueError(f"point length {v.size} does not match model dimension {model.mean.size}")
    return model.components.T @ (v - model.mean)


def project_distribution(model: PcaModel, d: Distribution) -> Gaussian:
    """Project a distribution's moments into the component basis.

    The image is summarized as the Gaussian with mean A^T (E[d] - mean) and
    covariance A^T Cov[d] A; affine maps commute with taking moments, so
    these are the exact moments of the projected distribution.
    """
    if d.dim != model.mean.size:
        raise ValueError(
            f"distribution dimension {d.dim} does not match model dimension {model.mean.size}"
        )
    a_t = model.components.T
    mean = a_t @ (d.mean() - model.mean)
    cov = affine_cov(a_t, d.cov())
    return Gaussian(mean, cov)


def ellipse_outline(g: Gaussian, k_sigma: float, segments: int = 64) -> np.ndarray:
    """Isoline polyline of a 2-d Gaussian at k_sigma standard deviations.

    Returns a closed (segments + 1, 2) polyline: mean + k L (cos t, sin t)
    where L L^T equals the covariance (eigen factor).  The last vertex
    repeats the first.
    """
    if g.dim != 2:
        raise ValueError(f"ellipse outline requires a 2-d Gaussian, got dimension {g.dim}")
    if not (k_sigma > 0.0):
        raise ValueError(f"k_sigma must be positive, got {k_sigma}")
    if segments < 8:
        raise ValueError(f"segments must be >= 8, got {segments}")
    pairs = eig_sym(g.cov())
    factor = pairs.vectors * np.sqrt(pairs.values)
    theta = np.linspace(0.0, 2.0 * np.pi, segments, endpoint=False)
    circle = np.stack([np.cos(theta), np.sin(theta)])
    pts = g.mean() + k_sigma * (factor @ circle).T
    return np.vstack([pts, pts[:1]])
